#pragma once

#include "lawson/tri_mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lawson {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MassScheme { Lumped, Consistent };
const char* to_string(MassScheme s);

/// Piecewise-linear discretization of the Laplace-Beltrami operator.
/// Sign convention: L is positive semi-definite, so the geometer's
/// Delta phi + lambda phi = 0 becomes L phi = lambda M phi with lambda >= 0.
struct FemPair {
    SparseMatrix L;
    SparseMatrix M;
    MassScheme scheme = MassScheme::Lumped;
    double total_mass = 0.0;
    std::vector<int> thin_faces;        // faces with an angle below 0.5 degrees
    std::vector<std::string> warnings;
};

/// Cotangent stiffness and mass of a closed triangle mesh in R^4.
/// Throws TopologyError for a mesh with boundary or non-manifold edges.
FemPair build_fem(const TriMesh& mesh, MassScheme scheme = MassScheme::Lumped);

struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd phi;    // M-normalized; largest-magnitude entry positive
    double residual = 0.0;  // ||L phi - lambda M phi|| in the M^{-1} norm
};

struct EigenOptions {
    double tolerance = 1e-8;
    double shift = 1.0;        // factorizes L + shift*M
    int block_size = 0;        // 0 selects max(2 count, count + 8)
    int krylov_degree = 3;     // blocks [X, TX, ..., T^{d-1} X] per restart
    int max_restarts = 200;
    std::uint64_t seed = 20240611;
};

struct EigenResult {
    std::vector<EigenPair> pairs;  // ascending
    bool converged = false;
    int restarts = 0;
    std::vector<std::string> warnings;
};

/// The `count` smallest eigenpairs of L phi = lambda M phi by shift-invert
/// block subspace iteration with Rayleigh-Ritz. On budget exhaustion the
/// current Ritz pairs are returned with converged = false.
EigenResult lowest_eigenpairs(const FemPair& fem, int count, const EigenOptions& opts = {});

/// ||L f - lambda M f|| / ||lambda M f|| (Euclidean norms); lambda = 0 falls
/// back to ||M f|| in the denominator.
double function_residual(const FemPair& fem, const Eigen::VectorXd& f, double lambda);

/// Relative residual of each coordinate function x_1 .. x_4 against lambda = 2.
std::array<double, 4> takahashi_residual(const TriMesh& mesh, const FemPair& fem);

/// (phi^T L phi) / (phi^T M phi). Throws DomainError for the zero vector.
double rayleigh_quotient(const FemPair& fem, const Eigen::VectorXd& phi);

Eigen::VectorXd coordinate_vector(const TriMesh& mesh, const Vec4& v);

/// Indices of eigenpairs with |lambda - center| < delta.
std::vector<int> cluster(const std::vector<EigenPair>& pairs, double center, double delta);

/// Largest M-relative component of (phi o pi) outside span(basis), over the
/// basis vectors. `perm` is a vertex permutation with (phi o pi)_v = phi_{perm[v]}.
double invariance_defect(const FemPair& fem, const std::vector<Eigen::VectorXd>& basis,
                         const std::vector<int>& perm);

} // namespace lawson
