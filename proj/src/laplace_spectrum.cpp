#include "lawson/laplace_spectrum.hpp"

#include "lawson/assembly.hpp"
#include "lawson/errors.hpp"
#include "lawson/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace lawson {

const char* to_string(MassScheme s) { return s == MassScheme::Lumped ? "lumped" : "consistent"; }

FemPair build_fem(const TriMesh& mesh, MassScheme scheme) {
    closed_topology(mesh);
    const std::size_t nf = mesh.faces.size();
    const int nv = static_cast<int>(mesh.vertices.size());

    // Per-face cotangents and area into fixed slots, merged in face order.
    std::vector<std::array<double, 3>> cot(nf);
    std::vector<double> area(nf);
    std::vector<double> min_angle(nf);
    parallel_for(nf, [&](std::size_t f) {
        const Face& t = mesh.faces[f];
        double lo = std::numbers::pi;
        for (int c = 0; c < 3; ++c) {
            const Vec4 u = mesh.vertices[t[(c + 1) % 3]] - mesh.vertices[t[c]];
            const Vec4 v = mesh.vertices[t[(c + 2) % 3]] - mesh.vertices[t[c]];
            const double uv = u.dot(v);
            const double cross = std::sqrt(std::max(0.0, u.squaredNorm() * v.squaredNorm() - uv * uv));
            cot[f][c] = uv / cross;
            lo = std::min(lo, std::atan2(cross, uv));
        }
        area[f] = face_area(mesh, f);
        min_angle[f] = lo;
    });

    FemPair fem;
    fem.scheme = scheme;
    std::vector<Eigen::Triplet<double>> lt;
    std::vector<Eigen::Triplet<double>> mt;
    lt.reserve(nf * 12);
    mt.reserve(scheme == MassScheme::Lumped ? nf * 3 : nf * 9);
    const double thin = 0.5 * std::numbers::pi / 180.0;
    for (std::size_t f = 0; f < nf; ++f) {
        const Face& t = mesh.faces[f];
        if (min_angle[f] < thin) {
            fem.thin_faces.push_back(static_cast<int>(f));
        }
        for (int c = 0; c < 3; ++c) {
            const int i = t[(c + 1) % 3];
            const int j = t[(c + 2) % 3];
            const double w = 0.5 * cot[f][c];
            lt.emplace_back(i, j, -w);
            lt.emplace_back(j, i, -w);
            lt.emplace_back(i, i, w);
            lt.emplace_back(j, j, w);
        }
        if (scheme == MassScheme::Lumped) {
            for (int c = 0; c < 3; ++c) {
                mt.emplace_back(t[c], t[c], area[f] / 3.0);
            }
        } else {
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    mt.emplace_back(t[a], t[b], area[f] / (a == b ? 6.0 : 12.0));
                }
            }
        }
        fem.total_mass += area[f];
    }
    fem.L.resize(nv, nv);
    fem.L.setFromTriplets(lt.begin(), lt.end());
    fem.M.resize(nv, nv);
    fem.M.setFromTriplets(mt.begin(), mt.end());
    if (!fem.thin_faces.empty()) {
        std::ostringstream os;
        os << "conditioning: " << fem.thin_faces.size() << " faces with an angle below 0.5 degrees:";
        for (std::size_t i = 0; i < fem.thin_faces.size() && i < 20; ++i) {
            os << ' ' << fem.thin_faces[i];
        }
        if (fem.thin_faces.size() > 20) {
            os << " ...";
        }
        fem.warnings.push_back(os.str());
    }
    return fem;
}

namespace {

// Dense block Rayleigh-Ritz helpers. V holds an M-orthonormal basis by
// columns; MV caches M*V.
struct Basis {
    Eigen::MatrixXd V;
    Eigen::MatrixXd MV;
    int cols = 0;
};

// Appends w to the basis after two rounds of classical Gram-Schmidt in the
// M inner product. Nearly dependent vectors are dropped.
void append(Basis& b, const SparseMatrix& M, Eigen::VectorXd w) {
    const double start = std::sqrt(std::max(0.0, w.dot(M * w)));
    if (!(start > 0.0)) {
        return;
    }
    for (int pass = 0; pass < 2 && b.cols > 0; ++pass) {
        const Eigen::VectorXd c = b.MV.leftCols(b.cols).transpose() * w;
        w.noalias() -= b.V.leftCols(b.cols) * c;
    }
    Eigen::VectorXd mw = M * w;
    const double nrm = std::sqrt(std::max(0.0, w.dot(mw)));
    if (!(nrm > 1e-10 * start)) {
        return;
    }
    b.V.col(b.cols) = w / nrm;
    b.MV.col(b.cols) = mw / nrm;
    ++b.cols;
}

} // namespace

EigenResult lowest_eigenpairs(const FemPair& fem, int count, const EigenOptions& opts) {
    const int n = static_cast<int>(fem.L.rows());
    if (count < 1) {
        throw InputError("lowest_eigenpairs: count must be positive");
    }
    const int p = opts.block_size > 0 ? std::max(opts.block_size, count)
                                      : std::max(2 * count, count + 8);
    if (p * opts.krylov_degree >= n) {
        throw InputError("lowest_eigenpairs: too many eigenpairs for the mesh size");
    }
    const SparseMatrix K = fem.L + opts.shift * fem.M;
    Eigen::SimplicialLDLT<SparseMatrix> solver(K);
    if (solver.info() != Eigen::Success) {
        throw SolverDivergedError("lowest_eigenpairs: factorization of L + shift M failed");
    }
    const bool lumped = fem.scheme == MassScheme::Lumped;
    Eigen::VectorXd mdiag = fem.M.diagonal();
    Eigen::SimplicialLDLT<SparseMatrix> msolver;
    if (!lumped) {
        msolver.compute(fem.M);
    }
    auto minv_norm = [&](const Eigen::VectorXd& r) {
        if (lumped) {
            return std::sqrt(r.cwiseAbs2().cwiseQuotient(mdiag).sum());
        }
        return std::sqrt(std::max(0.0, r.dot(msolver.solve(r))));
    };

    std::mt19937_64 rng(opts.seed);
    Eigen::MatrixXd X(n, p);
    for (int c = 0; c < p; ++c) {
        for (int i = 0; i < n; ++i) {
            X(i, c) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
        }
    }

    EigenResult res;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd Y;
    std::vector<double> resid(p, 0.0);
    for (int it = 0; it < opts.max_restarts; ++it) {
        res.restarts = it + 1;
        Basis b;
        b.V.resize(n, p * opts.krylov_degree);
        b.MV.resize(n, p * opts.krylov_degree);
        Eigen::MatrixXd block = X;
        for (int d = 0; d < opts.krylov_degree; ++d) {
            const int first = b.cols;
            for (int c = 0; c < block.cols(); ++c) {
                append(b, fem.M, block.col(c));
            }
            if (d + 1 == opts.krylov_degree || b.cols == first) {
                break;
            }
            const Eigen::MatrixXd mb = b.MV.middleCols(first, b.cols - first);
            block = solver.solve(mb);
        }
        const Eigen::MatrixXd V = b.V.leftCols(b.cols);
        const Eigen::MatrixXd LV = fem.L * V;
        Eigen::MatrixXd A = V.transpose() * LV;
        A = 0.5 * (A + A.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(A);
        const int keep = std::min<int>(p, b.cols);
        lambda = rr.eigenvalues().head(keep);
        const Eigen::MatrixXd Q = rr.eigenvectors().leftCols(keep);
        Y = V * Q;
        const Eigen::MatrixXd R = LV * Q - b.MV.leftCols(b.cols) * Q * lambda.asDiagonal();
        bool done = keep >= count;
        for (int c = 0; c < keep; ++c) {
            resid[c] = minv_norm(R.col(c));
            if (c < count && !(resid[c] <= opts.tolerance)) {
                done = false;
            }
        }
        if (!lambda.allFinite()) {
            throw SolverDivergedError("lowest_eigenpairs: non-finite Ritz values");
        }
        X = Y;
        if (done) {
            res.converged = true;
            break;
        }
    }

    const int got = std::min<int>(count, static_cast<int>(lambda.size()));
    for (int c = 0; c < got; ++c) {
        EigenPair e;
        e.lambda = lambda[c];
        e.phi = Y.col(c);
        Eigen::Index at = 0;
        e.phi.cwiseAbs().maxCoeff(&at);
        if (e.phi[at] < 0.0) {
            e.phi = -e.phi;
        }
        e.residual = resid[c];
        res.pairs.push_back(std::move(e));
    }
    if (!res.converged) {
        res.warnings.push_back("eigensolver: restart budget exhausted before all residuals reached tolerance");
    }
    if (!res.pairs.empty()) {
        const double l0 = res.pairs[0].lambda;
        if (l0 < -1e-8) {
            res.warnings.push_back("eigensolver: negative lowest eigenvalue");
        } else if (std::abs(l0) > 1e-6 && std::abs(l0) < 1e-2) {
            res.warnings.push_back("mesh quality: lowest eigenvalue is not a clean zero");
        }
    }
    return res;
}

double function_residual(const FemPair& fem, const Eigen::VectorXd& f, double lambda) {
    const Eigen::VectorXd mf = fem.M * f;
    const Eigen::VectorXd r = fem.L * f - lambda * mf;
    const double denom = lambda != 0.0 ? std::abs(lambda) * mf.norm() : mf.norm();
    if (!(denom > 0.0)) {
        throw DomainError("function_residual: zero function");
    }
    return r.norm() / denom;
}

Eigen::VectorXd coordinate_vector(const TriMesh& mesh, const Vec4& v) {
    Eigen::VectorXd f(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        f[static_cast<Eigen::Index>(i)] = mesh.vertices[i].dot(v);
    }
    return f;
}

std::array<double, 4> takahashi_residual(const TriMesh& mesh, const FemPair& fem) {
    std::array<double, 4> out{};
    for (int c = 0; c < 4; ++c) {
        out[c] = function_residual(fem, coordinate_vector(mesh, Vec4::Unit(c)), 2.0);
    }
    return out;
}

double rayleigh_quotient(const FemPair& fem, const Eigen::VectorXd& phi) {
    const double den = phi.dot(fem.M * phi);
    if (!(den > 0.0)) {
        throw DomainError("rayleigh_quotient: zero vector");
    }
    return phi.dot(fem.L * phi) / den;
}

std::vector<int> cluster(const std::vector<EigenPair>& pairs, double center, double delta) {
    std::vector<int> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (std::abs(pairs[i].lambda - center) < delta) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

double invariance_defect(const FemPair& fem, const std::vector<Eigen::VectorXd>& basis,
                         const std::vector<int>& perm) {
    if (basis.empty()) {
        return 0.0;
    }
    const Eigen::Index n = basis.front().size();
    Basis b;
    b.V.resize(n, static_cast<Eigen::Index>(basis.size()));
    b.MV.resize(n, static_cast<Eigen::Index>(basis.size()));
    for (const auto& v : basis) {
        append(b, fem.M, v);
    }
    double worst = 0.0;
    for (const auto& phi : basis) {
        Eigen::VectorXd psi(n);
        for (Eigen::Index v = 0; v < n; ++v) {
            psi[v] = phi[perm[v]];
        }
        const double total = std::sqrt(psi.dot(fem.M * psi));
        const Eigen::VectorXd c = b.MV.leftCols(b.cols).transpose() * psi;
        const Eigen::VectorXd rest = psi - b.V.leftCols(b.cols) * c;
        worst = std::max(worst, std::sqrt(std::max(0.0, rest.dot(fem.M * rest))) / total);
    }
    return worst;
}

} // namespace lawson
