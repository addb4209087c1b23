#pragma once

#include "lawson/reflection_group.hpp"
#include "lawson/tri_mesh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lawson {

struct AssemblyOptions {
    double weld_tolerance = 1e-7;  // absolute, in R^4
};

/// Closed surface built from the |G| images of a patch.
/// Vertices [0, patch_vertex_count) are the identity copy in patch order,
/// so patch_tags[v] is the boundary role of surface vertex v for those.
struct AssembledSurface {
    TriMesh mesh;
    std::vector<GroupElement> copy_map;          // per face: element whose copy produced it
    std::vector<std::vector<int>> action_table;  // by element_index: v -> pi_g(v)
    std::vector<VertexTag> patch_tags;
    std::size_t patch_vertex_count = 0;
    std::size_t patch_face_count = 0;
    std::size_t copy_vertex_count = 0;  // vertices before welding
    std::size_t weld_count = 0;         // copy_vertex_count - V
    double weld_tolerance = 1e-7;

    const std::vector<int>& action(const GroupElement& g) const;
};

struct Topology {
    long V = 0;
    long E = 0;
    long F = 0;
    long chi = 0;
    long genus = 0;  // (2 - chi) / 2
};

/// V, E, F and chi of any triangle mesh. Throws TopologyError when an
/// edge is shared by a number of faces other than two.
Topology closed_topology(const TriMesh& mesh);

struct WeldResult {
    TriMesh mesh;
    std::vector<int> representative;  // input vertex -> output vertex
    std::size_t merged = 0;
};

/// Merges vertices closer than `tol`. Each cluster keeps the position of its
/// lowest input index and output indices follow that order. A cluster whose
/// diameter exceeds `tol` is ambiguous and raises AssemblyError.
WeldResult weld_vertices(const TriMesh& mesh, double tol);

/// Reorients faces by breadth-first propagation across shared edges so that
/// neighbouring faces traverse their common edge in opposite directions.
/// Returns the number of faces flipped. Throws TopologyError if impossible.
int orient_consistently(TriMesh& mesh);

/// Copies the patch by every group element, welds, orients, validates
/// manifoldness and chi = 2 - 2mk, and tabulates the vertex action.
AssembledSurface assemble(const TriMesh& patch, const AssemblyOptions& opts = {});

/// pi_g with g x_v = x_{pi_g(v)}, matched geometrically within `tol`.
/// Throws SymmetryError for an unmatched vertex.
std::vector<int> group_action_on_mesh(const TriMesh& mesh, const GroupElement& g, double tol);

struct EmbeddednessReport {
    bool computed = false;
    double min_separation = 0.0;  // over face pairs sharing no vertex
    std::string notice;
};

EmbeddednessReport embeddedness_diagnostic(const TriMesh& mesh);

/// Distance between two triangles of R^4.
double triangle_distance(const std::array<Vec4, 3>& s, const std::array<Vec4, 3>& t);

/// {"V","E","F","chi","genus","copies","weld_count"} as a JSON object.
void write_topology_json(std::ostream& os, const AssembledSurface& surface);

} // namespace lawson
