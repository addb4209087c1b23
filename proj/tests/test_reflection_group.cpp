#include "lawson/errors.hpp"
#include "lawson/pipeline.hpp"
#include "lawson/reflection_group.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace lawson;

namespace {

bool same(const Mat4& a, const Mat4& b, double tol = 1e-12) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

// Closure of the four edge reflections by breadth-first multiplication,
// independent of the normal form.
std::vector<Mat4> closure_of_reflections(const LawsonParams& p) {
    const LawsonVertices lv = lawson_vertices(p);
    const Vec4 c[5] = {lv.P(1).vec(), lv.Q(1).vec(), lv.P(2).vec(), lv.Q(2).vec(), lv.P(1).vec()};
    std::vector<Mat4> gens;
    for (int i = 0; i < 4; ++i) {
        const Vec4 u = c[i];
        const Vec4 v = c[i + 1];  // orthogonal to u: a P and a Q
        gens.push_back(2.0 * (u * u.transpose() + v * v.transpose()) - Mat4::Identity());
    }
    std::vector<Mat4> found{Mat4::Identity()};
    for (std::size_t head = 0; head < found.size(); ++head) {
        for (const Mat4& g : gens) {
            const Mat4 x = g * found[head];
            bool known = false;
            for (const Mat4& y : found) {
                known = known || same(x, y, 1e-9);
            }
            if (!known) {
                found.push_back(x);
            }
        }
    }
    return found;
}

// Cell of a point from its two angles, written out directly.
std::pair<int, int> cell_by_angles(const Vec4& x, const LawsonParams& p) {
    double ap = std::atan2(x[2], x[3]);
    double aq = std::atan2(x[0], x[1]);
    if (ap < 0) ap += 2 * std::numbers::pi;
    if (aq < 0) aq += 2 * std::numbers::pi;
    return {static_cast<int>(ap / (std::numbers::pi / (p.m + 1))) + 1,
            static_cast<int>(aq / (std::numbers::pi / (p.k + 1))) + 1};
}

} // namespace

TEST(Group, OrderMatchesIndependentClosure) {
    for (int m = 1; m <= 4; ++m) {
        for (int k = 1; k <= 4; ++k) {
            const LawsonParams p(m, k);
            const auto oracle = closure_of_reflections(p);
            const auto elems = enumerate_group(p);
            ASSERT_EQ(static_cast<int>(oracle.size()), 2 * (m + 1) * (k + 1));
            ASSERT_EQ(elems.size(), oracle.size());
            for (const auto& g : elems) {
                const Mat4 mg = to_matrix(g);
                int hits = 0;
                for (const Mat4& y : oracle) {
                    hits += same(mg, y, 1e-9) ? 1 : 0;
                }
                EXPECT_EQ(hits, 1) << g.to_string();
            }
        }
    }
}

TEST(Group, GeneratorsMatchBlockFormulas) {
    const LawsonParams p(2, 3);
    const double b = std::numbers::pi / 3, t = std::numbers::pi / 4;
    Eigen::Matrix2d A;
    A << -1, 0, 0, 1;
    Eigen::Matrix2d B, C;
    B << std::cos(2 * t), -std::sin(2 * t), std::sin(2 * t), std::cos(2 * t);
    C << std::cos(2 * b), -std::sin(2 * b), std::sin(2 * b), std::cos(2 * b);
    auto blk = [](const Eigen::Matrix2d& x, const Eigen::Matrix2d& y) {
        Mat4 r = Mat4::Zero();
        r.topLeftCorner<2, 2>() = x;
        r.bottomRightCorner<2, 2>() = y;
        return r;
    };
    const auto gens = generators(p);
    EXPECT_TRUE(same(gens[0].matrix, blk(A, A)));
    EXPECT_TRUE(same(gens[1].matrix, blk(A, A * C)));
    EXPECT_TRUE(same(gens[2].matrix, blk(A * B, A * C)));
    EXPECT_TRUE(same(gens[3].matrix, blk(A * B, A)));
    for (const auto& g : gens) {
        EXPECT_TRUE(same(g.matrix, g.circle.reflection_matrix())) << g.name;
        EXPECT_TRUE(same(g.matrix * g.matrix, Mat4::Identity())) << g.name;
    }
}

TEST(Group, ProductMatchesMatrixProduct) {
    const LawsonParams p(3, 2);
    const auto elems = enumerate_group(p);
    for (const auto& g : elems) {
        for (const auto& h : elems) {
            EXPECT_TRUE(same(to_matrix(multiply(g, h)), to_matrix(g) * to_matrix(h)));
        }
        EXPECT_EQ(multiply(g, inverse(g)), identity(p));
        EXPECT_EQ(multiply(identity(p), g), g);
    }
}

TEST(Group, ConjugationInvertsRotationSubgroup) {
    const LawsonParams p(4, 3);
    const GroupElement aa = make_element(p, 1, 0, 0);
    for (const auto& h : enumerate_group(p)) {
        if (h.eps == 0) {
            EXPECT_EQ(multiply(multiply(aa, h), aa), inverse(h));
            EXPECT_TRUE(same(to_matrix(aa) * to_matrix(h) * to_matrix(aa), to_matrix(h).transpose()));
        }
    }
}

TEST(Group, NormalFormIsUnique) {
    const LawsonParams p(2, 2);
    std::set<int> idx;
    for (const auto& g : enumerate_group(p)) {
        idx.insert(element_index(g));
    }
    EXPECT_EQ(idx.size(), 18u);
    EXPECT_EQ(make_element(p, 3, -1, 5), make_element(p, 1, 2, 2));
    EXPECT_EQ(enumerate_group(p).front(), identity(p));
    EXPECT_EQ(identity(p).to_string(), "(0,0,0)");
}

TEST(Group, MismatchedContextsAreRejected) {
    EXPECT_THROW(multiply(identity(LawsonParams(1, 1)), identity(LawsonParams(2, 2))), UsageError);
}

TEST(Group, VerificationSuitePasses) {
    for (int m = 1; m <= 4; ++m) {
        for (int k = 1; k <= 4; ++k) {
            const GroupVerification v = verify_group(LawsonParams(m, k));
            EXPECT_TRUE(v.passed()) << m << "," << k << ": " << v.first_failure;
            EXPECT_EQ(v.order, 2 * (m + 1) * (k + 1));
        }
    }
}

TEST(Cells, OrbitOfFirstCellIsTheEvenCells) {
    for (const auto& [m, k] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {2, 4}}) {
        const LawsonParams p(m, k);
        const LawsonVertices lv = lawson_vertices(p);
        const Vec4 centre = (lv.P(1).vec() + lv.P(2).vec() + lv.Q(1).vec() + lv.Q(2).vec()).normalized();
        std::set<std::pair<int, int>> oracle;
        int fixed = 0;
        for (const auto& g : enumerate_group(p)) {
            const auto c = cell_by_angles(to_matrix(g) * centre, p);
            oracle.insert(c);
            fixed += c == std::pair{1, 1} ? 1 : 0;
        }
        std::set<std::pair<int, int>> even;
        for (int i = 1; i <= 2 * m + 2; ++i) {
            for (int j = 1; j <= 2 * k + 2; ++j) {
                if ((i + j) % 2 == 0) {
                    even.insert({i, j});
                }
            }
        }
        EXPECT_EQ(oracle, even);
        EXPECT_EQ(fixed, 1);

        const CellOrbit orbit = cell_orbit(p);
        std::set<std::pair<int, int>> got;
        for (const auto& c : orbit.image) {
            got.insert({c.i, c.j});
        }
        EXPECT_EQ(got, even);
        EXPECT_EQ(orbit.distinct_cells, 2 * (m + 1) * (k + 1));
        EXPECT_EQ(orbit.stabilizer.size(), 1u);
        EXPECT_TRUE(orbit.all_even_parity);
    }
}

TEST(Cells, PointOnTheCoreCirclesIsDegenerate) {
    const LawsonParams p(2, 2);
    const LawsonVertices lv = lawson_vertices(p);
    EXPECT_THROW(cell_of_point(lv.P(1), p), BoundaryDegenerateError);
    EXPECT_NO_THROW(cell_of_point(lv.P(1), p, CellBoundary::HalfOpen));
    const SpherePoint inside = SpherePoint::normalized(lv.P(1).vec() + lv.P(2).vec() + lv.Q(1).vec() + lv.Q(2).vec());
    EXPECT_EQ(cell_of_point(inside, p), (CellIndex{1, 1}));
}

TEST(Cells, MultiplicationTableHasEveryProduct) {
    const LawsonParams p(1, 2);
    std::ostringstream os;
    write_multiplication_table(os, p);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "g,h,product");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 12 * 12);
}
