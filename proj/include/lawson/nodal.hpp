#pragma once

#include "lawson/assembly.hpp"
#include "lawson/laplace_spectrum.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lawson {

struct NodalThresholds {
    double zero = 1e-9;  // |phi| <= zero * ||phi||_inf is the zero set
    double band = 1e-8;  // |phi| <= band * ||phi||_inf is excluded from both signs
};

struct NodalDomains {
    static constexpr int kZero = -1;  // label of zero-set vertices
    static constexpr int kBand = -2;  // label of hysteresis-band vertices

    int count = 0;
    std::vector<int> labels;     // domain id >= 0 numbered by first vertex, or kZero / kBand
    std::vector<int> domain_sign;  // +1 / -1 per domain
};

/// Connected components of the same-sign subgraphs of the edge graph.
/// Throws DomainError when phi vanishes identically.
NodalDomains nodal_domains(const TriMesh& mesh, const Eigen::VectorXd& phi, const NodalThresholds& th = {});

/// f_v = <X, v> per vertex. Throws InputError unless |v| = 1 to 1e-8.
Eigen::VectorXd coordinate_function(const TriMesh& mesh, const Vec4& v);

/// (phi o g)_v = phi_{pi_g(v)}.
Eigen::VectorXd pullback(const Eigen::VectorXd& phi, const std::vector<int>& perm);

/// Sum over the group of phi o g.
Eigen::VectorXd symmetrize(const AssembledSurface& surface, const Eigen::VectorXd& phi);

enum class Signature { Plus, Minus, Mixed };
const char* to_string(Signature s);

/// Per generator g1..g4: +1 when ||phi o sigma - phi||_M <= tol ||phi||_M,
/// -1 for ||phi o sigma + phi||_M, mixed otherwise.
std::array<Signature, 4> symmetry_signature(const AssembledSurface& surface, const FemPair& fem,
                                            const Eigen::VectorXd& phi, double tol = 1e-3);

struct EquatorCheck {
    Vec4 direction;
    int component_count = 0;
    bool reflection_found = false;  // some group element maps v to -v
    std::string element;            // that element in normal form
    bool exchanged_by_reflection = false;
};

EquatorCheck equator_separation_check(const AssembledSurface& surface, const Vec4& v,
                                      const NodalThresholds& th = {});

/// One connected component of the nodal set inside the fundamental patch.
/// Nodes are sign-change edges and zero vertices of identity-copy faces;
/// faces whose three vertices vanish are collapsed to one node.
struct NodalComponent {
    int nodes = 0;
    int links = 0;
    bool meets_interior = false;
    bool h1_arc = false;         // simple path meeting the interior
    bool h2_two_pieces = false;  // its removal leaves exactly two pieces of the patch
    bool h3_free_edge = false;   // one piece U misses some boundary arc gamma_i
    bool h4_distinct = false;    // U and sigma_i(U) lie in disjoint global domains
    int free_arc = -1;           // the i used for H3 and H4
    std::vector<int> piece_sizes;

    bool all() const { return h1_arc && h2_two_pieces && h3_free_edge && h4_distinct; }
};

struct ObstructionReport {
    std::string branch;  // "constant_sign_patch" or "interior_nodal_set"
    std::vector<NodalComponent> components;  // only those meeting the interior
    int global_count = 0;
    bool any_all_hypotheses = false;
    bool cross_check_ok = true;  // all hypotheses => global_count >= 3

    /// Component summarized in reports: the first with all hypotheses,
    /// otherwise the first one; empty for the constant-sign branch.
    const NodalComponent* headline() const;
};

/// Classifies the nodal set of a G-invariant phi on the fundamental patch.
/// Throws PreconditionError unless every generator signature is +1.
ObstructionReport obstruction_classifier(const AssembledSurface& surface, const FemPair& fem,
                                         const Eigen::VectorXd& phi, const NodalThresholds& th = {});

struct NodalReport {
    int eigen_index = 0;
    double lambda = 0.0;
    NodalDomains domains;
    std::array<Signature, 4> signature{};
    std::optional<ObstructionReport> obstruction;  // absent when phi is not invariant
};

NodalReport analyze_eigenfunction(const AssembledSurface& surface, const FemPair& fem, int index,
                                  const EigenPair& pair);

/// JSON array with one object per report.
void write_nodal_json(std::ostream& os, const std::vector<NodalReport>& reports);

} // namespace lawson
