#include "lawson/plateau.hpp"

#include "lawson/errors.hpp"
#include "lawson/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

namespace lawson {

void SolverOptions::validate() const {
    if (max_iterations < 0 || !(initial_step > 0.0) || !(tolerance > 0.0) ||
        !(boundary_tolerance > 0.0)) {
        throw InputError("SolverOptions: tolerances and step must be positive");
    }
}

TriMesh init_disk_mesh(const LawsonParams& params, int n) {
    if (n < 2) {
        throw InputError("init_disk_mesh: resolution must be at least 2");
    }
    const LawsonVertices lv = lawson_vertices(params);
    const Vec4 p1 = lv.P(1).vec(), q1 = lv.Q(1).vec(), p2 = lv.P(2).vec(), q2 = lv.Q(2).vec();
    const auto quad = fundamental_quadrilateral(params);

    TriMesh mesh;
    mesh.params = params;
    mesh.resolution = n;
    for (const auto& arc : quad) {
        mesh.arcs.push_back(arc.circle);
    }
    const int w = n + 1;
    mesh.vertices.resize(static_cast<std::size_t>(w * w));
    mesh.tags.resize(mesh.vertices.size());
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const double s = static_cast<double>(i) / n;
            const double t = static_cast<double>(j) / n;
            const Vec4 bottom = slerp(p1, q1, s);
            const Vec4 top = slerp(q2, p2, s);
            const int idx = j * w + i;
            mesh.vertices[idx] = slerp(bottom, top, t);

            VertexTag tag = VertexTag::interior();
            if (j == 0) tag = VertexTag::arc(0);
            if (i == n) tag = VertexTag::arc(1);
            if (j == n) tag = VertexTag::arc(2);
            if (i == 0) tag = VertexTag::arc(3);
            mesh.tags[idx] = tag;
        }
    }
    auto pin = [&](int i, int j, int corner, const Vec4& x) {
        mesh.vertices[j * w + i] = x;
        mesh.tags[j * w + i] = VertexTag::corner(corner);
    };
    pin(0, 0, 0, p1);
    pin(n, 0, 1, q1);
    pin(n, n, 2, p2);
    pin(0, n, 3, q2);
    // Edge vertices sit exactly on their circle.
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        if (mesh.tags[v].kind == VertexTag::Kind::Arc) {
            const GreatCircle& c = mesh.arcs[mesh.tags[v].id];
            mesh.vertices[v] = c.project_to_plane(mesh.vertices[v]).normalized();
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = j * w + i;
            const int b = a + 1;
            const int c = a + w + 1;
            const int d = a + w;
            // Shorter diagonal; ties keep a-c so the (1,1) grid is unchanged.
            const double ac = (mesh.vertices[a] - mesh.vertices[c]).norm();
            const double bd = (mesh.vertices[b] - mesh.vertices[d]).norm();
            if (bd < ac * (1.0 - 1e-9)) {
                mesh.faces.push_back({a, b, d});
                mesh.faces.push_back({b, c, d});
            } else {
                mesh.faces.push_back({a, b, c});
                mesh.faces.push_back({a, c, d});
            }
        }
    }
    return mesh;
}

namespace {

// Gradient of the Euclidean area of triangle (a, b, c) with respect to a:
// half the opposite edge length times the unit altitude direction towards a.
Vec4 area_gradient_at(const Vec4& a, const Vec4& b, const Vec4& c) {
    const Vec4 e = c - b;
    const Vec4 w = a - b;
    const double ee = e.squaredNorm();
    if (ee <= 0.0) {
        return Vec4::Zero();
    }
    const Vec4 h = w - (w.dot(e) / ee) * e;
    const double hn = h.norm();
    if (hn <= 0.0) {
        return Vec4::Zero();
    }
    return (0.5 * std::sqrt(ee) / hn) * h;
}

// Generalized cross product: orthogonal to a, b, c with det[a b c n] > 0.
Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
    Eigen::Matrix<double, 3, 4> rows;
    rows.row(0) = a.transpose();
    rows.row(1) = b.transpose();
    rows.row(2) = c.transpose();
    Vec4 n;
    for (int i = 0; i < 4; ++i) {
        Eigen::Matrix3d minor;
        int col = 0;
        for (int j = 0; j < 4; ++j) {
            if (j != i) {
                minor.col(col++) = rows.col(j);
            }
        }
        n[i] = ((3 + i) % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
    }
    return n;
}

struct Incidence {
    std::vector<std::size_t> offsets;              // CSR over vertices
    std::vector<std::pair<int, int>> face_corner;  // (face, local corner)
};

Incidence build_incidence(const TriMesh& mesh) {
    Incidence inc;
    inc.offsets.assign(mesh.vertices.size() + 1, 0);
    for (const Face& t : mesh.faces) {
        for (int v : t) {
            ++inc.offsets[v + 1];
        }
    }
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        inc.offsets[i + 1] += inc.offsets[i];
    }
    inc.face_corner.resize(inc.offsets.back());
    std::vector<std::size_t> fill(inc.offsets.begin(), inc.offsets.end() - 1);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            inc.face_corner[fill[mesh.faces[f][c]]++] = {static_cast<int>(f), c};
        }
    }
    return inc;
}

// Per-vertex area gradient, barycentric dual area and unit surface normal
// inside T_x S^3, gathered in a fixed order so the worker count never
// changes the floating-point result.
struct Field {
    std::vector<Vec4> grad;
    std::vector<double> dual;
    std::vector<Vec4> normal;
    double area = 0.0;
};

Field compute_field(const TriMesh& mesh, const Incidence& inc) {
    const std::size_t nf = mesh.faces.size();
    std::vector<std::array<Vec4, 3>> face_grad(nf);
    std::vector<Vec4> face_normal(nf);
    std::vector<double> face_a(nf);
    parallel_for(nf, [&](std::size_t f) {
        const Face& t = mesh.faces[f];
        const Vec4& a = mesh.vertices[t[0]];
        const Vec4& b = mesh.vertices[t[1]];
        const Vec4& c = mesh.vertices[t[2]];
        face_a[f] = triangle_area(a, b, c);
        face_grad[f][0] = area_gradient_at(a, b, c);
        face_grad[f][1] = area_gradient_at(b, c, a);
        face_grad[f][2] = area_gradient_at(c, a, b);
        const Vec4 n = cross4(a, b, c);
        const double nn = n.norm();
        face_normal[f] = nn > 0.0 ? Vec4(face_a[f] * n / nn) : Vec4::Zero();
    });
    Field out;
    out.grad.assign(mesh.vertices.size(), Vec4::Zero());
    out.dual.assign(mesh.vertices.size(), 0.0);
    out.normal.assign(mesh.vertices.size(), Vec4::Zero());
    parallel_for(mesh.vertices.size(), [&](std::size_t v) {
        Vec4 g = Vec4::Zero();
        Vec4 nsum = Vec4::Zero();
        double d = 0.0;
        for (std::size_t e = inc.offsets[v]; e < inc.offsets[v + 1]; ++e) {
            const auto [f, c] = inc.face_corner[e];
            g += face_grad[f][c];
            nsum += face_normal[f];
            d += face_a[f] / 3.0;
        }
        const Vec4& x = mesh.vertices[v];
        nsum -= nsum.dot(x) * x;
        const double nn = nsum.norm();
        out.grad[v] = g;
        out.dual[v] = d;
        out.normal[v] = nn > 0.0 ? Vec4(nsum / nn) : Vec4::Zero();
    });
    for (double a : face_a) {
        out.area += a;
    }
    return out;
}

bool movable(const TriMesh& mesh, std::size_t v) {
    return !mesh.is_patch() || mesh.tags[v].kind == VertexTag::Kind::Interior;
}

// Symmetric cotangent stiffness, entries (cot a + cot b)/2 off the diagonal.
Eigen::SparseMatrix<double> cotan_stiffness(const TriMesh& mesh) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.faces.size() * 12);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& t = mesh.faces[f];
        for (int c = 0; c < 3; ++c) {
            const Vec4 u = mesh.vertices[t[(c + 1) % 3]] - mesh.vertices[t[c]];
            const Vec4 v = mesh.vertices[t[(c + 2) % 3]] - mesh.vertices[t[c]];
            const double uv = u.dot(v);
            const double cross = std::sqrt(std::max(0.0, u.squaredNorm() * v.squaredNorm() - uv * uv));
            const double w = 0.5 * uv / std::max(cross, 1e-300);
            const int i = t[(c + 1) % 3];
            const int j = t[(c + 2) % 3];
            trip.emplace_back(i, j, -w);
            trip.emplace_back(j, i, -w);
            trip.emplace_back(i, i, w);
            trip.emplace_back(j, j, w);
        }
    }
    const int n = static_cast<int>(mesh.vertices.size());
    Eigen::SparseMatrix<double> k(n, n);
    k.setFromTriplets(trip.begin(), trip.end());
    return k;
}

// H^1 preconditioned normal speed: (K + M) s = -<grad, normal> on movable
// vertices, zero elsewhere.
bool sobolev_speed(const TriMesh& mesh, const Field& field, std::vector<double>& speed) {
    const std::size_t nv = mesh.vertices.size();
    std::vector<int> dof(nv, -1);
    int ndof = 0;
    for (std::size_t v = 0; v < nv; ++v) {
        if (movable(mesh, v)) {
            dof[v] = ndof++;
        }
    }
    const Eigen::SparseMatrix<double> k = cotan_stiffness(mesh);
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < k.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
            const int a = dof[it.row()];
            const int b = dof[it.col()];
            if (a >= 0 && b >= 0) {
                trip.emplace_back(a, b, it.value());
            }
        }
    }
    Eigen::VectorXd rhs(ndof);
    for (std::size_t v = 0; v < nv; ++v) {
        if (dof[v] >= 0) {
            trip.emplace_back(dof[v], dof[v], field.dual[v]);
            rhs[dof[v]] = -field.grad[v].dot(field.normal[v]);
        }
    }
    Eigen::SparseMatrix<double> sys(ndof, ndof);
    sys.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys);
    if (ldlt.info() != Eigen::Success) {
        return false;
    }
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !sol.allFinite()) {
        return false;
    }
    speed.assign(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
        if (dof[v] >= 0) {
            speed[v] = sol[dof[v]];
        }
    }
    return true;
}

void advance(const TriMesh& base, const Field& field, const std::vector<double>& speed, double step,
             TriMesh& out) {
    for (std::size_t v = 0; v < base.vertices.size(); ++v) {
        if (!movable(base, v) || speed[v] == 0.0) {
            out.vertices[v] = base.vertices[v];
            continue;
        }
        out.vertices[v] = (base.vertices[v] + (step * speed[v]) * field.normal[v]).normalized();
    }
}

double area_of(const TriMesh& mesh) {
    std::vector<double> a(mesh.faces.size());
    parallel_for(mesh.faces.size(), [&](std::size_t f) { a[f] = face_area(mesh, f); });
    double s = 0.0;
    for (double x : a) {
        s += x;
    }
    return s;
}

bool finite_mesh(const TriMesh& mesh) {
    for (const Vec4& v : mesh.vertices) {
        if (!v.allFinite()) {
            return false;
        }
    }
    return true;
}

} // namespace

CurvatureResidual mean_curvature_residual(const TriMesh& mesh) {
    const Incidence inc = build_incidence(mesh);
    const Field field = compute_field(mesh, inc);
    CurvatureResidual out;
    out.per_vertex.assign(mesh.vertices.size(), 0.0);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        if (!movable(mesh, v) || field.dual[v] <= 0.0) {
            continue;
        }
        const double r = std::abs(field.grad[v].dot(field.normal[v])) / field.dual[v];
        out.per_vertex[v] = r;
        out.max_interior = std::max(out.max_interior, r);
    }
    return out;
}

int repair_degenerate_faces(TriMesh& mesh, double min_area) {
    int flips = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        if (face_area(mesh, f) >= min_area) {
            continue;
        }
        int best = 0;
        double len = -1.0;
        for (int c = 0; c < 3; ++c) {
            const double l = (mesh.vertices[mesh.faces[f][c]] - mesh.vertices[mesh.faces[f][(c + 1) % 3]]).norm();
            if (l > len) {
                len = l;
                best = c;
            }
        }
        const int a = mesh.faces[f][best];
        const int b = mesh.faces[f][(best + 1) % 3];
        const int c = mesh.faces[f][(best + 2) % 3];
        bool flipped = false;
        for (std::size_t g = 0; g < mesh.faces.size() && !flipped; ++g) {
            const Face t = mesh.faces[g];
            for (int e = 0; e < 3 && g != f; ++e) {
                if (t[e] == b && t[(e + 1) % 3] == a) {
                    const int d = t[(e + 2) % 3];
                    mesh.faces[f] = {c, a, d};
                    mesh.faces[g] = {c, d, b};
                    ++flips;
                    flipped = true;
                    break;
                }
            }
        }
    }
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        if (face_area(mesh, f) < min_area) {
            throw MeshQualityError("degenerate face " + std::to_string(f) + " survives edge flips");
        }
    }
    return flips;
}

SolveResult minimize_area(const TriMesh& input, const SolverOptions& opts) {
    opts.validate();
    if (!input.is_patch() || input.arcs.size() != 4) {
        throw InputError("minimize_area: mesh has no boundary tags");
    }
    if (!finite_mesh(input)) {
        throw InputError("minimize_area: non-finite vertex in the input");
    }
    for (std::size_t v = 0; v < input.vertices.size(); ++v) {
        const VertexTag& tag = input.tags[v];
        for (int a = 0; a < 4; ++a) {
            if (tag.on_arc(a) && input.arcs[a].distance_to_plane(input.vertices[v]) > opts.boundary_tolerance) {
                throw InputError("minimize_area: boundary vertex " + std::to_string(v) + " is off its arc");
            }
        }
    }
    const int n = std::max(input.resolution, 2);
    const int max_it = opts.max_iterations > 0 ? opts.max_iterations : 50 * n * n;
    const std::size_t nv = input.vertices.size();

    SolveResult res;
    res.mesh = input;
    Incidence inc = build_incidence(res.mesh);
    TriMesh trial = res.mesh;

    Field field = compute_field(res.mesh, inc);
    res.area_history.push_back(field.area);

    // Mass-normalized normal force r_v = <grad, normal> / dual area.
    std::vector<double> r(nv, 0.0), r_prev(nv, 0.0), speed(nv, 0.0);
    auto normal_force = [&](const Field& f, std::vector<double>& out) {
        double worst = 0.0, rr = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
            out[v] = 0.0;
            if (!movable(res.mesh, v) || f.dual[v] <= 0.0) {
                continue;
            }
            out[v] = f.grad[v].dot(f.normal[v]) / f.dual[v];
            if (!std::isfinite(out[v])) {
                throw SolverDivergedError("minimize_area: non-finite residual at vertex " + std::to_string(v));
            }
            worst = std::max(worst, std::abs(out[v]));
            rr += out[v] * out[v] * f.dual[v];
        }
        return std::pair{worst, rr};
    };
    auto [worst, rr] = normal_force(field, r);
    double rr_prev = 0.0;
    const bool sobolev = opts.direction == SolverOptions::Direction::Sobolev;
    double step = sobolev ? 1.0 : opts.initial_step;

    int it = 0;
    for (; it < max_it; ++it) {
        if (worst <= opts.tolerance) {
            break;
        }
        double slope = 0.0;
        bool restarted = false;
        if (sobolev) {
            if (!sobolev_speed(res.mesh, field, speed)) {
                throw MeshQualityError("minimize_area: preconditioner factorization failed");
            }
        } else {
            double beta = 0.0;
            if (opts.direction == SolverOptions::Direction::ConjugateGradient && rr_prev > 0.0) {
                double num = 0.0;
                for (std::size_t v = 0; v < nv; ++v) {
                    num += r[v] * (r[v] - r_prev[v]) * field.dual[v];
                }
                beta = std::max(0.0, num / rr_prev);
            }
            restarted = beta == 0.0;
            for (std::size_t v = 0; v < nv; ++v) {
                speed[v] = -r[v] + beta * speed[v];
            }
        }
        for (std::size_t v = 0; v < nv; ++v) {
            slope += speed[v] * field.grad[v].dot(field.normal[v]);
        }
        if (!(slope < 0.0)) {
            for (std::size_t v = 0; v < nv; ++v) {
                speed[v] = -r[v];
            }
            slope = -rr;
            restarted = true;
        }

        const double a0 = field.area;
        double accepted = 0.0;
        double best_area = a0;
        if (opts.step_rule == SolverOptions::StepRule::Fixed) {
            const double s = sobolev ? 1.0 : opts.initial_step;
            advance(res.mesh, field, speed, s, trial);
            const double a = area_of(trial);
            if (!std::isfinite(a) || !finite_mesh(trial)) {
                throw SolverDivergedError("minimize_area: non-finite vertex after fixed step");
            }
            if (a < a0) {
                accepted = s;
                best_area = a;
            }
        } else {
            // Halve from the last accepted step until the area drops
            // (Armijo), then double while it keeps dropping.
            double s = sobolev ? std::min(1.0, 2.0 * step) : step;
            for (int bt = 0; bt < 60; ++bt) {
                advance(res.mesh, field, speed, s, trial);
                const double a = area_of(trial);
                if (std::isfinite(a) && finite_mesh(trial) && a < a0 + 1e-4 * s * slope) {
                    accepted = s;
                    best_area = a;
                    break;
                }
                s *= 0.5;
            }
            if (accepted > 0.0 && !sobolev) {
                for (int ex = 0; ex < 8; ++ex) {
                    advance(res.mesh, field, speed, 2.0 * accepted, trial);
                    const double a = area_of(trial);
                    if (!std::isfinite(a) || !(a < best_area)) {
                        break;
                    }
                    accepted *= 2.0;
                    best_area = a;
                }
            }
        }
        if (!(accepted > 0.0) || !(best_area < a0)) {
            if (!restarted && !sobolev) {
                rr_prev = 0.0;
                std::fill(speed.begin(), speed.end(), 0.0);
                continue;
            }
            res.stop_reason = "line search stalled";
            break;
        }
        advance(res.mesh, field, speed, accepted, trial);
        if (!finite_mesh(trial)) {
            throw SolverDivergedError("minimize_area: NaN vertex");
        }
        std::swap(res.mesh.vertices, trial.vertices);
        step = accepted;

        bool sliver = false;
        for (std::size_t f = 0; f < res.mesh.faces.size() && !sliver; ++f) {
            sliver = face_area(res.mesh, f) < 1e-14;
        }
        if (sliver) {
            repair_degenerate_faces(res.mesh);
            inc = build_incidence(res.mesh);
            trial = res.mesh;
            rr_prev = 0.0;
        }

        field = compute_field(res.mesh, inc);
        res.area_history.push_back(field.area);
        std::swap(r, r_prev);
        rr_prev = rr;
        std::tie(worst, rr) = normal_force(field, r);
    }
    res.iterations = it;
    res.residual = worst;
    res.area = field.area;
    res.converged = worst <= opts.tolerance;
    if (res.converged) {
        res.stop_reason = "residual below tolerance";
    } else if (res.stop_reason.empty()) {
        res.stop_reason = "iteration budget exhausted";
    }
    return res;
}

TriMesh transform_patch(const TriMesh& mesh, const Mat4& g, bool reverse_faces) {
    TriMesh out = mesh;
    for (Vec4& v : out.vertices) {
        v = g * v;
    }
    for (GreatCircle& c : out.arcs) {
        c = GreatCircle{g * c.u, g * c.v};
    }
    if (reverse_faces) {
        for (Face& t : out.faces) {
            std::swap(t[1], t[2]);
        }
    }
    return out;
}

} // namespace lawson
