#include "lawson/reflection_group.hpp"

#include "lawson/errors.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

namespace lawson {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

Eigen::Matrix2d power(const Eigen::Matrix2d& x, int e) {
    Eigen::Matrix2d r = Eigen::Matrix2d::Identity();
    for (int i = 0; i < e; ++i) {
        r = r * x;
    }
    return r;
}

Mat4 block(const Eigen::Matrix2d& x, const Eigen::Matrix2d& y) {
    Mat4 r = Mat4::Zero();
    r.topLeftCorner<2, 2>() = x;
    r.bottomRightCorner<2, 2>() = y;
    return r;
}

double angle_from(double sine_coord, double cosine_coord) {
    double a = std::atan2(sine_coord, cosine_coord);
    if (a < 0.0) {
        a += 2.0 * std::numbers::pi;
    }
    if (a >= 2.0 * std::numbers::pi) {
        a = 0.0;
    }
    return a;
}

// Sector index (0-based) of an angle for sectors of width `step`; angles
// within 1e-9 of a sector boundary snap onto it (half-open convention).
int sector(double angle, double step, int count) {
    const double t = angle / step;
    const double r = std::round(t);
    const int s = std::abs(t - r) < 1e-9 ? static_cast<int>(r) : static_cast<int>(std::floor(t));
    return mod(s, count);
}

} // namespace

std::string GroupElement::to_string() const {
    return "(" + std::to_string(eps) + "," + std::to_string(j) + "," + std::to_string(ell) + ")";
}

BlockMatrices block_matrices(const LawsonParams& params) {
    BlockMatrices b;
    b.A << -1.0, 0.0, 0.0, 1.0;
    b.B = rotation(2.0 * params.theta());
    b.C = rotation(2.0 * params.beta());
    return b;
}

GroupElement identity(const LawsonParams& params) { return GroupElement{0, 0, 0, params.m, params.k}; }

GroupElement make_element(const LawsonParams& params, int eps, int j, int ell) {
    return GroupElement{mod(eps, 2), mod(j, params.k + 1), mod(ell, params.m + 1), params.m, params.k};
}

// (AA)^e1 h1 (AA)^e2 h2 = (AA)^(e1+e2) h1^((-1)^e2) h2, since (AA) h (AA) = h^-1.
GroupElement multiply(const GroupElement& g, const GroupElement& h) {
    if (g.m != h.m || g.k != h.k) {
        throw UsageError("multiply: elements belong to different (m,k) groups");
    }
    const int sign = h.eps == 0 ? 1 : -1;
    const LawsonParams p(g.m, g.k);
    return make_element(p, g.eps + h.eps, sign * g.j + h.j, sign * g.ell + h.ell);
}

GroupElement inverse(const GroupElement& g) {
    const LawsonParams p(g.m, g.k);
    if (g.eps == 1) {
        return g;  // every element outside H is an involution
    }
    return make_element(p, 0, -g.j, -g.ell);
}

Mat4 to_matrix(const GroupElement& g) {
    const LawsonParams p(g.m, g.k);
    const BlockMatrices b = block_matrices(p);
    const Eigen::Matrix2d a = g.eps == 1 ? b.A : Eigen::Matrix2d::Identity();
    return block(a * power(b.B, g.j), a * power(b.C, g.ell));
}

std::array<Generator, 4> generators(const LawsonParams& params) {
    const BlockMatrices b = block_matrices(params);
    const auto quad = fundamental_quadrilateral(params);
    return {
        Generator{"g1", make_element(params, 1, 0, 0), block(b.A, b.A), quad[0].circle},
        Generator{"g2", make_element(params, 1, 0, 1), block(b.A, b.A * b.C), quad[1].circle},
        Generator{"g3", make_element(params, 1, 1, 1), block(b.A * b.B, b.A * b.C), quad[2].circle},
        Generator{"g4", make_element(params, 1, 1, 0), block(b.A * b.B, b.A), quad[3].circle},
    };
}

std::vector<GroupElement> enumerate_group(const LawsonParams& params) {
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(params.group_order()));
    for (int eps = 0; eps < 2; ++eps) {
        for (int j = 0; j <= params.k; ++j) {
            for (int ell = 0; ell <= params.m; ++ell) {
                out.push_back(GroupElement{eps, j, ell, params.m, params.k});
            }
        }
    }
    return out;
}

int element_index(const GroupElement& g) { return (g.eps * (g.k + 1) + g.j) * (g.m + 1) + g.ell; }

CellIndex cell_of_point(const SpherePoint& x, const LawsonParams& params, CellBoundary convention) {
    const double r_p = std::hypot(x[2], x[3]);
    const double r_q = std::hypot(x[0], x[1]);
    if (convention == CellBoundary::Strict && (r_p < 1e-9 || r_q < 1e-9)) {
        throw BoundaryDegenerateError("cell_of_point: point lies on C1 or C2");
    }
    const double angle_p = r_p < 1e-9 ? 0.0 : angle_from(x[2], x[3]);
    const double angle_q = r_q < 1e-9 ? 0.0 : angle_from(x[0], x[1]);
    const int np = 2 * params.m + 2;
    const int nq = 2 * params.k + 2;
    return CellIndex{sector(angle_p, params.beta(), np) + 1, sector(angle_q, params.theta(), nq) + 1};
}

int match_vertex(const std::vector<SpherePoint>& family, const Vec4& x, double tol) {
    int found = -1;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if ((family[i].vec() - x).norm() <= tol) {
            if (found >= 0) {
                throw ConsistencyError("match_vertex: ambiguous vertex match");
            }
            found = static_cast<int>(i);
        }
    }
    return found;
}

namespace {

// Given the 0-based positions a, b of two consecutive vertices on a cycle of
// length n, the 1-based index of the arc joining them.
int consecutive_pair(int a, int b, int n) {
    if (mod(b - a, n) == 1) {
        return a + 1;
    }
    if (mod(a - b, n) == 1) {
        return b + 1;
    }
    throw ConsistencyError("image_cell: image vertices are not consecutive");
}

} // namespace

CellIndex image_cell(const Mat4& g, const CellIndex& cell, const LawsonParams& params, double match_tol) {
    const LawsonVertices lv = lawson_vertices(params);
    auto find = [&](const std::vector<SpherePoint>& family, const SpherePoint& v) {
        const int idx = match_vertex(family, g * v.vec(), match_tol);
        if (idx < 0) {
            throw ConsistencyError("image_cell: image vertex matches no Lawson vertex");
        }
        return idx;
    };
    const int np = static_cast<int>(lv.p.size());
    const int nq = static_cast<int>(lv.q.size());
    const int a = find(lv.p, lv.P(cell.i));
    const int b = find(lv.p, lv.P(cell.i + 1));
    const int c = find(lv.q, lv.Q(cell.j));
    const int d = find(lv.q, lv.Q(cell.j + 1));
    return CellIndex{consecutive_pair(a, b, np), consecutive_pair(c, d, nq)};
}

CellOrbit cell_orbit(const LawsonParams& params) {
    CellOrbit out;
    const LawsonVertices lv = lawson_vertices(params);
    std::set<CellIndex> distinct;
    for (const GroupElement& g : enumerate_group(params)) {
        const Mat4 mat = to_matrix(g);
        const CellIndex c = image_cell(mat, CellIndex{1, 1}, params);
        out.image.push_back(c);
        distinct.insert(c);
        if (c == CellIndex{1, 1}) {
            out.stabilizer.push_back(g);
        }
        if ((c.i + c.j) % 2 != 0) {
            out.all_even_parity = false;
        }
        out.p1_image.push_back(match_vertex(lv.p, mat * lv.P(1).vec(), 1e-9) + 1);
        out.q1_image.push_back(match_vertex(lv.q, mat * lv.Q(1).vec(), 1e-9) + 1);
    }
    out.distinct_cells = static_cast<int>(distinct.size());
    return out;
}

void write_multiplication_table(std::ostream& os, const LawsonParams& params) {
    const auto elems = enumerate_group(params);
    os << "g,h,product\n";
    for (const auto& g : elems) {
        for (const auto& h : elems) {
            os << '"' << g.to_string() << "\",\"" << h.to_string() << "\",\""
               << multiply(g, h).to_string() << "\"\n";
        }
    }
}

} // namespace lawson
