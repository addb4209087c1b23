#pragma once

#include "lawson/tri_mesh.hpp"

#include <string>
#include <vector>

namespace lawson {

struct SolverOptions {
    enum class StepRule { LineSearch, Fixed };
    enum class Direction { Steepest, ConjugateGradient, Sobolev };

    int max_iterations = 0;  // 0 selects 50 n^2
    StepRule step_rule = StepRule::LineSearch;
    Direction direction = Direction::Sobolev;
    double initial_step = 1e-3;  // first trial step for Steepest/ConjugateGradient
    double tolerance = 1e-6;     // on the normal mean-curvature residual
    double boundary_tolerance = 1e-8;  // allowed distance of boundary vertices from their circle

    void validate() const;
};

struct SolveResult {
    TriMesh mesh;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    double area = 0.0;
    std::vector<double> area_history;  // area after every accepted step, starting with the input
    std::string stop_reason;
};

/// Disk grid of (n+1)^2 vertices spanning the fundamental quadrilateral,
/// built by slerping along the edges P1->Q1 and Q2->P2 and then across.
/// Grid vertex (i, j) has index j*(n+1)+i; corners sit at P1=(0,0),
/// Q1=(n,0), P2=(n,n), Q2=(0,n).
TriMesh init_disk_mesh(const LawsonParams& params, int n);

struct CurvatureResidual {
    std::vector<double> per_vertex;  // |<area gradient, normal>| / dual area; 0 on the boundary
    double max_interior = 0.0;
};

/// Discrete mean curvature: the component of the area gradient along the
/// vertex normal inside T_x S^3, divided by the barycentric dual area.
/// Closed meshes count every vertex as interior.
CurvatureResidual mean_curvature_residual(const TriMesh& mesh);

/// Descent on the total Euclidean triangle area. Interior vertices move along
/// their normal inside T_x S^3 and are renormalized onto S^3; boundary and
/// corner vertices stay where init_disk_mesh put them. Every accepted step
/// strictly decreases the area. Throws SolverDivergedError on NaN.
SolveResult minimize_area(const TriMesh& mesh, const SolverOptions& opts);

/// Applies an orthogonal map to a patch (vertices and boundary circles);
/// faces are reversed when the map flips the patch orientation flag.
TriMesh transform_patch(const TriMesh& mesh, const Mat4& g, bool reverse_faces);

/// Flips the longest edge of every face with area below `min_area` when the
/// edge is interior. Returns the number of flips; throws MeshQualityError
/// if a degenerate face remains afterwards.
int repair_degenerate_faces(TriMesh& mesh, double min_area = 1e-14);

} // namespace lawson
