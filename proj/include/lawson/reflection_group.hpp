#pragma once

#include "lawson/sphere_geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace lawson {

/// Element (A,A)^eps (B,I)^j (I,C)^ell of the reflection group, in its
/// unique normal form. The (m, k) context travels with the element so
/// products across different surfaces are rejected.
struct GroupElement {
    int eps = 0;  // 0 or 1
    int j = 0;    // 0 .. k
    int ell = 0;  // 0 .. m
    int m = 1;
    int k = 1;

    bool operator==(const GroupElement&) const = default;
    std::string to_string() const;
};

struct BlockMatrices {
    Eigen::Matrix2d A;  // diag(-1, 1)
    Eigen::Matrix2d B;  // rotation by 2 theta, acting on (x1, x2)
    Eigen::Matrix2d C;  // rotation by 2 beta, acting on (x3, x4)
};

struct Generator {
    std::string name;      // "g1" .. "g4"
    GroupElement element;  // normal form
    Mat4 matrix;           // block form from the closed-form expression
    GreatCircle circle;    // the great circle it fixes pointwise
};

/// Cell C_{i,j}, 1-based: i in [1, 2m+2], j in [1, 2k+2].
struct CellIndex {
    int i = 1;
    int j = 1;
    bool operator==(const CellIndex&) const = default;
    auto operator<=>(const CellIndex&) const = default;
};

BlockMatrices block_matrices(const LawsonParams& params);

GroupElement identity(const LawsonParams& params);
/// Normal form with exponents reduced into their canonical ranges.
GroupElement make_element(const LawsonParams& params, int eps, int j, int ell);
GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
Mat4 to_matrix(const GroupElement& g);

/// Reflections across gamma_1 .. gamma_4 as (A,A), (A,AC), (AB,AC), (AB,A).
std::array<Generator, 4> generators(const LawsonParams& params);

/// All 2(m+1)(k+1) elements; identity first, index = eps*(k+1)(m+1) + j*(m+1) + ell.
std::vector<GroupElement> enumerate_group(const LawsonParams& params);
int element_index(const GroupElement& g);

/// Convention used to label a cell. Angles are measured counter-clockwise
/// from e4 towards e3 on the (x3, x4) plane and from e2 towards e1 on the
/// (x1, x2) plane, in [0, 2 pi).
enum class CellBoundary { Strict, HalfOpen };

CellIndex cell_of_point(const SpherePoint& x, const LawsonParams& params,
                        CellBoundary convention = CellBoundary::Strict);

/// Image of a cell under a group matrix, identified by matching the image of
/// its four vertices against the P/Q families (within `match_tol`).
CellIndex image_cell(const Mat4& g, const CellIndex& cell, const LawsonParams& params,
                     double match_tol = 1e-9);

struct CellOrbit {
    std::vector<CellIndex> image;            // image of C_{1,1} per enumerated element
    std::vector<GroupElement> stabilizer;    // elements fixing C_{1,1}
    std::vector<int> p1_image;               // index i with g(P1) = P_i, per element
    std::vector<int> q1_image;               // index j with g(Q1) = Q_j, per element
    bool all_even_parity = true;
    int distinct_cells = 0;
};

CellOrbit cell_orbit(const LawsonParams& params);

/// Index of the vertex among `family` matching x within tol; -1 when none.
/// Throws ConsistencyError when several candidates match.
int match_vertex(const std::vector<SpherePoint>& family, const Vec4& x, double tol);

/// Multiplication table as CSV rows "g,h,product" with normal-form triples.
void write_multiplication_table(std::ostream& os, const LawsonParams& params);

} // namespace lawson
