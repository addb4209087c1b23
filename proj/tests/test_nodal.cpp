#include "clifford_oracle.hpp"

#include "lawson/errors.hpp"
#include "lawson/nodal.hpp"

#include <json.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>

using namespace lawson;

namespace {

const AssembledSurface& lawson22() {
    static const AssembledSurface s =
        assemble(minimize_area(init_disk_mesh(LawsonParams(2, 2), 8), SolverOptions{}).mesh);
    return s;
}

const FemPair& fem22() {
    static const FemPair f = build_fem(lawson22().mesh);
    return f;
}

// Breadth-first count of the positive and negative vertex clusters.
int bfs_domain_count(const TriMesh& mesh, const Eigen::VectorXd& phi, double cut) {
    const auto nbr = vertex_neighbors(mesh);
    const double inf = phi.cwiseAbs().maxCoeff();
    auto sgn = [&](int v) { return std::abs(phi[v]) <= cut * inf ? 0 : (phi[v] > 0 ? 1 : -1); };
    std::vector<char> seen(phi.size(), 0);
    int count = 0;
    for (int s = 0; s < phi.size(); ++s) {
        if (seen[s] || sgn(s) == 0) {
            continue;
        }
        ++count;
        std::queue<int> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int w : nbr[v]) {
                if (!seen[w] && sgn(w) == sgn(s)) {
                    seen[w] = 1;
                    q.push(w);
                }
            }
        }
    }
    return count;
}

Eigen::VectorXd map_vertices(const TriMesh& mesh, double (*f)(const Vec4&)) {
    Eigen::VectorXd out(mesh.vertex_count());
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        out[v] = f(mesh.vertices[v]);
    }
    return out;
}

double cubic12(const Vec4& x) { return x[1] * x[1] * x[1] - 3 * x[1] * x[0] * x[0]; }  // Re (x2 + i x1)^3
double cubic34(const Vec4& x) { return x[3] * x[3] * x[3] - 3 * x[3] * x[2] * x[2]; }
double split(const Vec4& x) { return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]; }
double seed(const Vec4& x) { return x[0] * x[0] * x[3] * x[3] + x[1] * x[1] * x[1]; }

} // namespace

TEST(NodalDomains, ConstantAndZero) {
    const TriMesh& mesh = lawson22().mesh;
    const NodalDomains d = nodal_domains(mesh, Eigen::VectorXd::Ones(mesh.vertex_count()));
    EXPECT_EQ(d.count, 1);
    EXPECT_THROW(nodal_domains(mesh, Eigen::VectorXd::Zero(mesh.vertex_count())), DomainError);
    EXPECT_THROW(nodal_domains(mesh, Eigen::VectorXd::Ones(3)), InputError);
}

TEST(NodalDomains, CoordinateHemispheres) {
    const TriMesh& mesh = lawson22().mesh;
    const Eigen::VectorXd f4 = coordinate_function(mesh, Vec4(0, 0, 0, 1));
    EXPECT_NEAR(f4[0], 1.0, 1e-15);  // vertex 0 is P1 = e4
    EXPECT_THROW(coordinate_function(mesh, Vec4(0, 0, 0, 2)), InputError);
    const NodalDomains d = nodal_domains(mesh, f4);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (std::abs(mesh.vertices[v][3]) < 1e-12) {
            EXPECT_EQ(d.labels[v], NodalDomains::kZero);
        } else {
            ASSERT_GE(d.labels[v], 0);
            EXPECT_EQ(d.domain_sign[d.labels[v]], mesh.vertices[v][3] > 0 ? 1 : -1);
        }
    }
    EXPECT_EQ(d.count, bfs_domain_count(mesh, f4, 1e-8));
}

TEST(NodalDomains, CliffordEquatorsGiveTwoDomains) {
    const AssembledSurface s = oracle::clifford_surface(8);
    for (int i = 0; i < 4; ++i) {
        Vec4 e = Vec4::Zero();
        e[i] = 1;
        const EquatorCheck c = equator_separation_check(s, e);
        EXPECT_EQ(c.component_count, 2);
        EXPECT_TRUE(c.reflection_found);
        EXPECT_TRUE(c.exchanged_by_reflection);
    }
}

TEST(Signature, CoordinateFunctions) {
    const AssembledSurface& s = lawson22();
    const auto sig1 = symmetry_signature(s, fem22(), coordinate_function(s.mesh, Vec4(1, 0, 0, 0)));
    const auto sig2 = symmetry_signature(s, fem22(), coordinate_function(s.mesh, Vec4(0, 1, 0, 0)));
    // g1 = (A, A) flips x1 and x3 and fixes x2, x4.
    EXPECT_EQ(sig1[0], Signature::Minus);
    EXPECT_EQ(sig2[0], Signature::Plus);
    const auto gens = generators(LawsonParams(2, 2));
    for (int i = 0; i < 4; ++i) {
        const Vec4 x = Vec4(0.3, -0.5, 0.7, 0.2).normalized();
        const Eigen::VectorXd phi = coordinate_function(s.mesh, x);
        const Eigen::VectorXd psi = phi - pullback(phi, s.action(gens[i].element));
        EXPECT_EQ(symmetry_signature(s, fem22(), psi)[i], Signature::Minus);
        EXPECT_EQ(symmetry_signature(s, fem22(), symmetrize(s, phi) + Eigen::VectorXd::Ones(phi.size()))[i],
                  Signature::Plus);
    }
    AssembledSurface bare = s;
    bare.action_table.clear();
    EXPECT_THROW(symmetry_signature(bare, fem22(), Eigen::VectorXd::Ones(s.mesh.vertex_count())), UsageError);
}

TEST(Obstruction, RequiresInvariance) {
    const AssembledSurface& s = lawson22();
    EXPECT_THROW(obstruction_classifier(s, fem22(), coordinate_function(s.mesh, Vec4(1, 0, 0, 0))),
                 PreconditionError);
}

TEST(Obstruction, ConstantSignBranch) {
    const AssembledSurface& s = lawson22();
    const Eigen::VectorXd phi = map_vertices(s.mesh, split) + 2.0 * Eigen::VectorXd::Ones(s.mesh.vertex_count());
    const ObstructionReport r = obstruction_classifier(s, fem22(), phi);
    EXPECT_EQ(r.branch, "constant_sign_patch");
    EXPECT_EQ(r.global_count, 1);
    EXPECT_EQ(r.headline(), nullptr);
}

TEST(Obstruction, SyntheticInvariantFunctionsAgreeWithCounts) {
    const AssembledSurface& s = lawson22();
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(s.mesh.vertex_count());
    std::vector<Eigen::VectorXd> family;
    for (auto f : {cubic12, cubic34, split}) {
        for (double c : {-0.3, -0.1, 0.0, 0.05, 0.2}) {
            family.push_back(map_vertices(s.mesh, f) + c * one);
        }
    }
    const Eigen::VectorXd sym = symmetrize(s, map_vertices(s.mesh, seed));
    ASSERT_GT(sym.cwiseAbs().maxCoeff(), 1e-3);
    for (double c : {-0.5, 0.0, 0.5}) {
        family.push_back(sym / sym.cwiseAbs().maxCoeff() + c * one);
    }
    int interior = 0;
    int all_hyp = 0;
    for (const Eigen::VectorXd& phi : family) {
        ASSERT_EQ(symmetry_signature(s, fem22(), phi), (std::array<Signature, 4>{Signature::Plus, Signature::Plus,
                                                                                 Signature::Plus, Signature::Plus}));
        const ObstructionReport r = obstruction_classifier(s, fem22(), phi);
        EXPECT_EQ(r.global_count, bfs_domain_count(s.mesh, phi, 1e-8));
        EXPECT_TRUE(r.cross_check_ok);
        if (r.any_all_hypotheses) {
            EXPECT_GE(r.global_count, 3);
        }
        all_hyp += r.any_all_hypotheses ? 1 : 0;
        if (r.branch == "interior_nodal_set") {
            ++interior;
            for (const NodalComponent& c : r.components) {
                EXPECT_TRUE(c.meets_interior);
                if (c.h2_two_pieces) {
                    EXPECT_EQ(c.piece_sizes.size(), 2u);
                }
            }
        }
    }
    EXPECT_GT(interior, 0);
    std::printf("functions with every hypothesis: %d of %zu\n", all_hyp, family.size());
}

TEST(Courant, CliffordEigenfunctions) {
    const AssembledSurface s = oracle::clifford_surface(12);
    const FemPair fem = build_fem(s.mesh);
    const EigenResult r = lowest_eigenpairs(fem, 10);
    ASSERT_TRUE(r.converged);
    for (int i = 0; i < 10; ++i) {
        const NodalDomains d = nodal_domains(s.mesh, r.pairs[i].phi);
        EXPECT_LE(d.count, i + 1) << i;
        EXPECT_EQ(d.count, bfs_domain_count(s.mesh, r.pairs[i].phi, 1e-8));
    }
    EXPECT_EQ(nodal_domains(s.mesh, r.pairs[1].phi).count, 2);
}

TEST(NodalJson, Shape) {
    const AssembledSurface& s = lawson22();
    EigenPair constant;
    constant.phi = Eigen::VectorXd::Ones(s.mesh.vertex_count());
    EigenPair coord;
    coord.lambda = 2.0;
    coord.phi = coordinate_function(s.mesh, Vec4(1, 0, 0, 0));
    std::vector<NodalReport> reps{analyze_eigenfunction(s, fem22(), 0, constant),
                                  analyze_eigenfunction(s, fem22(), 1, coord)};
    ASSERT_TRUE(reps[0].obstruction.has_value());
    EXPECT_FALSE(reps[1].obstruction.has_value());
    std::ostringstream os;
    write_nodal_json(os, reps);
    const auto j = nlohmann::json::parse(os.str());
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["obstruction"]["branch"], "constant_sign_patch");
    EXPECT_TRUE(j[1]["obstruction"].is_null());
    EXPECT_EQ(j[1]["signature"]["g1"], "-1");
    EXPECT_EQ(j[1]["domain_count"], 2);
}
