#include "lawson/assembly.hpp"

#include "lawson/errors.hpp"
#include "lawson/parallel.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace lawson {

namespace {

using CellKey = std::array<long long, 4>;

struct CellKeyHash {
    std::size_t operator()(const CellKey& c) const {
        std::size_t h = 1469598103934665603ull;
        for (long long x : c) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

// Uniform grid over R^4 with cell size equal to the query radius, so a
// radius query visits the 81 surrounding cells.
class PointGrid {
public:
    explicit PointGrid(double cell) : cell_(cell) {}

    void insert(const Vec4& x, int id) { cells_[key(x)].push_back(id); }

    template <class Visit>
    void near(const Vec4& x, Visit&& visit) const {
        const CellKey c = key(x);
        for (int code = 0; code < 81; ++code) {
            CellKey q = c;
            int r = code;
            for (int d = 0; d < 4; ++d) {
                q[d] += r % 3 - 1;
                r /= 3;
            }
            auto it = cells_.find(q);
            if (it == cells_.end()) {
                continue;
            }
            for (int id : it->second) {
                visit(id);
            }
        }
    }

private:
    CellKey key(const Vec4& x) const {
        CellKey c;
        for (int d = 0; d < 4; ++d) {
            c[d] = static_cast<long long>(std::floor(x[d] / cell_));
        }
        return c;
    }

    double cell_;
    std::unordered_map<CellKey, std::vector<int>, CellKeyHash> cells_;
};

int find_root(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

std::string coords(const Vec4& x) {
    std::ostringstream os;
    os.precision(17);
    os << '(' << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3] << ')';
    return os.str();
}

struct EdgeUse {
    int a;
    int b;
    int face;
    bool operator<(const EdgeUse& o) const { return std::tie(a, b, face) < std::tie(o.a, o.b, o.face); }
};

std::vector<EdgeUse> edge_uses(const TriMesh& mesh) {
    std::vector<EdgeUse> uses;
    uses.reserve(mesh.faces.size() * 3);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            const int a = mesh.faces[f][c];
            const int b = mesh.faces[f][(c + 1) % 3];
            uses.push_back({std::min(a, b), std::max(a, b), static_cast<int>(f)});
        }
    }
    std::sort(uses.begin(), uses.end());
    return uses;
}

// +1 when face t runs a -> b, -1 when it runs b -> a.
int direction(const Face& t, int a, int b) {
    for (int c = 0; c < 3; ++c) {
        if (t[c] == a && t[(c + 1) % 3] == b) {
            return 1;
        }
        if (t[c] == b && t[(c + 1) % 3] == a) {
            return -1;
        }
    }
    return 0;
}

} // namespace

const std::vector<int>& AssembledSurface::action(const GroupElement& g) const {
    const int idx = element_index(g);
    if (idx < 0 || static_cast<std::size_t>(idx) >= action_table.size()) {
        throw UsageError("AssembledSurface::action: element outside the table");
    }
    return action_table[idx];
}

Topology closed_topology(const TriMesh& mesh) {
    const std::vector<EdgeUse> uses = edge_uses(mesh);
    Topology t;
    for (std::size_t i = 0; i < uses.size();) {
        std::size_t j = i;
        while (j < uses.size() && uses[j].a == uses[i].a && uses[j].b == uses[i].b) {
            ++j;
        }
        if (j - i != 2) {
            throw TopologyError("edge (" + std::to_string(uses[i].a) + ", " + std::to_string(uses[i].b) +
                                ") is shared by " + std::to_string(j - i) + " faces");
        }
        ++t.E;
        i = j;
    }
    t.V = static_cast<long>(mesh.vertices.size());
    t.F = static_cast<long>(mesh.faces.size());
    t.chi = t.V - t.E + t.F;
    t.genus = (2 - t.chi) / 2;
    return t;
}

WeldResult weld_vertices(const TriMesh& mesh, double tol) {
    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    PointGrid grid(tol);
    for (int i = 0; i < n; ++i) {
        const Vec4& x = mesh.vertices[i];
        grid.near(x, [&](int j) {
            if ((mesh.vertices[j] - x).norm() <= tol) {
                const int a = find_root(parent, i);
                const int b = find_root(parent, j);
                parent[std::max(a, b)] = std::min(a, b);
            }
        });
        grid.insert(x, i);
    }
    std::vector<std::vector<int>> members(n);
    for (int i = 0; i < n; ++i) {
        members[find_root(parent, i)].push_back(i);
    }
    WeldResult out;
    out.representative.assign(n, -1);
    out.mesh = mesh;
    out.mesh.vertices.clear();
    for (int r = 0; r < n; ++r) {
        if (members[r].empty()) {
            continue;
        }
        const auto& cl = members[r];
        for (std::size_t a = 0; a < cl.size(); ++a) {
            for (std::size_t b = a + 1; b < cl.size(); ++b) {
                if ((mesh.vertices[cl[a]] - mesh.vertices[cl[b]]).norm() > tol) {
                    throw AssemblyError("weld ambiguity: " + coords(mesh.vertices[cl[a]]) + " and " +
                                        coords(mesh.vertices[cl[b]]) + " are chained but not within tolerance");
                }
            }
        }
        const int id = static_cast<int>(out.mesh.vertices.size());
        out.mesh.vertices.push_back(mesh.vertices[r]);
        for (int v : cl) {
            out.representative[v] = id;
        }
    }
    for (Face& t : out.mesh.faces) {
        for (int& v : t) {
            v = out.representative[v];
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw AssemblyError("welding collapsed a face");
        }
    }
    if (!mesh.tags.empty()) {
        out.mesh.tags.clear();
        for (int r = 0; r < n; ++r) {
            if (!members[r].empty()) {
                out.mesh.tags.push_back(mesh.tags[r]);
            }
        }
    }
    out.merged = static_cast<std::size_t>(n) - out.mesh.vertices.size();
    return out;
}

int orient_consistently(TriMesh& mesh) {
    const std::vector<EdgeUse> uses = edge_uses(mesh);
    const std::size_t nf = mesh.faces.size();
    // Neighbour across each edge; built from the sorted uses.
    std::vector<std::vector<std::array<int, 3>>> adj(nf);  // (neighbour, a, b)
    for (std::size_t i = 0; i < uses.size();) {
        std::size_t j = i;
        while (j < uses.size() && uses[j].a == uses[i].a && uses[j].b == uses[i].b) {
            ++j;
        }
        if (j - i == 2) {
            adj[uses[i].face].push_back({uses[i + 1].face, uses[i].a, uses[i].b});
            adj[uses[i + 1].face].push_back({uses[i].face, uses[i].a, uses[i].b});
        } else if (j - i > 2) {
            throw TopologyError("orient_consistently: non-manifold edge");
        }
        i = j;
    }
    std::vector<int> state(nf, 0);  // 0 unseen, +1 keep, -1 flip
    int flips = 0;
    for (std::size_t seed = 0; seed < nf; ++seed) {
        if (state[seed] != 0) {
            continue;
        }
        state[seed] = 1;
        std::queue<int> bfs;
        bfs.push(static_cast<int>(seed));
        while (!bfs.empty()) {
            const int f = bfs.front();
            bfs.pop();
            for (const auto& [g, a, b] : adj[f]) {
                const int want = -state[f] * direction(mesh.faces[f], a, b) * direction(mesh.faces[g], a, b);
                if (state[g] == 0) {
                    state[g] = want;
                    bfs.push(g);
                } else if (state[g] != want) {
                    throw TopologyError("orient_consistently: surface is not orientable");
                }
            }
        }
    }
    for (std::size_t f = 0; f < nf; ++f) {
        if (state[f] < 0) {
            std::swap(mesh.faces[f][1], mesh.faces[f][2]);
            ++flips;
        }
    }
    return flips;
}

std::vector<int> group_action_on_mesh(const TriMesh& mesh, const GroupElement& g, double tol) {
    const Mat4 mat = to_matrix(g);
    PointGrid grid(tol);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        grid.insert(mesh.vertices[v], static_cast<int>(v));
    }
    std::vector<int> perm(mesh.vertices.size(), -1);
    std::vector<char> hit(mesh.vertices.size(), 0);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const Vec4 y = mat * mesh.vertices[v];
        double best = std::numeric_limits<double>::infinity();
        grid.near(y, [&](int w) {
            const double d = (mesh.vertices[w] - y).norm();
            if (d <= tol && (d < best || (d == best && w < perm[v]))) {
                best = d;
                perm[v] = w;
            }
        });
        if (perm[v] < 0) {
            throw SymmetryError("group_action_on_mesh: image of vertex " + std::to_string(v) + " under " +
                                g.to_string() + " is unmatched " + coords(y));
        }
        if (hit[perm[v]]) {
            throw SymmetryError("group_action_on_mesh: " + g.to_string() + " is not injective on vertices");
        }
        hit[perm[v]] = 1;
    }
    return perm;
}

AssembledSurface assemble(const TriMesh& patch, const AssemblyOptions& opts) {
    if (!patch.is_patch()) {
        throw InputError("assemble: input is not a tagged patch");
    }
    if (!(opts.weld_tolerance > 0.0)) {
        throw InputError("assemble: weld tolerance must be positive");
    }
    const LawsonParams& params = patch.params;
    const std::vector<GroupElement> elements = enumerate_group(params);
    const std::size_t nv = patch.vertices.size();
    const std::size_t nf = patch.faces.size();

    TriMesh copies;
    copies.params = params;
    copies.resolution = patch.resolution;
    copies.vertices.resize(nv * elements.size());
    copies.faces.resize(nf * elements.size());
    parallel_for(elements.size(), [&](std::size_t c) {
        const Mat4 mat = to_matrix(elements[c]);
        for (std::size_t v = 0; v < nv; ++v) {
            copies.vertices[c * nv + v] = mat * patch.vertices[v];
        }
        const int off = static_cast<int>(c * nv);
        for (std::size_t f = 0; f < nf; ++f) {
            const Face& t = patch.faces[f];
            copies.faces[c * nf + f] = {t[0] + off, t[1] + off, t[2] + off};
        }
    });

    AssembledSurface out;
    WeldResult welded = weld_vertices(copies, opts.weld_tolerance);
    out.mesh = std::move(welded.mesh);
    out.copy_map.reserve(copies.faces.size());
    for (const GroupElement& g : elements) {
        out.copy_map.insert(out.copy_map.end(), nf, g);
    }
    out.patch_tags = patch.tags;
    out.patch_vertex_count = nv;
    out.patch_face_count = nf;
    out.copy_vertex_count = copies.vertices.size();
    out.weld_count = welded.merged;
    out.weld_tolerance = opts.weld_tolerance;

    closed_topology(out.mesh);
    orient_consistently(out.mesh);
    const Topology topo = closed_topology(out.mesh);
    const long expected = 2 - 2L * params.m * params.k;
    if (topo.chi != expected) {
        throw TopologyError("assemble: Euler characteristic " + std::to_string(topo.chi) + ", expected " +
                            std::to_string(expected));
    }
    out.action_table.reserve(elements.size());
    for (const GroupElement& g : elements) {
        out.action_table.push_back(group_action_on_mesh(out.mesh, g, opts.weld_tolerance));
    }
    return out;
}

double triangle_distance(const std::array<Vec4, 3>& s, const std::array<Vec4, 3>& t) {
    // Minimum over all pairs of sub-simplices (7 x 7) of the unconstrained
    // least-squares distance between their affine hulls, kept only when the
    // minimizer lies inside both sub-simplices.
    static const std::array<std::vector<int>, 7> subs = {{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}, {0, 1, 2}}};
    double best = std::numeric_limits<double>::infinity();
    constexpr double slack = 1e-12;
    for (const auto& a : subs) {
        for (const auto& b : subs) {
            const int p = static_cast<int>(a.size()) - 1;
            const int q = static_cast<int>(b.size()) - 1;
            const Vec4 rhs = t[b[0]] - s[a[0]];
            if (p + q == 0) {
                best = std::min(best, rhs.norm());
                continue;
            }
            Eigen::Matrix<double, 4, Eigen::Dynamic> d(4, p + q);
            for (int i = 0; i < p; ++i) {
                d.col(i) = s[a[i + 1]] - s[a[0]];
            }
            for (int j = 0; j < q; ++j) {
                d.col(p + j) = -(t[b[j + 1]] - t[b[0]]);
            }
            const Eigen::MatrixXd gram = d.transpose() * d;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
            const Eigen::VectorXd diag = ldlt.vectorD();
            if (ldlt.info() != Eigen::Success || diag.minCoeff() <= 1e-14 * std::max(1.0, diag.maxCoeff())) {
                continue;
            }
            const Eigen::VectorXd coef = ldlt.solve(d.transpose() * rhs);
            bool inside = true;
            double sa = 0.0, sb = 0.0;
            for (int i = 0; i < p; ++i) {
                inside = inside && coef[i] >= -slack;
                sa += coef[i];
            }
            for (int j = 0; j < q; ++j) {
                inside = inside && coef[p + j] >= -slack;
                sb += coef[p + j];
            }
            if (!inside || sa > 1.0 + slack || sb > 1.0 + slack) {
                continue;
            }
            best = std::min(best, (d * coef - rhs).norm());
        }
    }
    return best;
}

namespace {

struct Box {
    Vec4 lo = Vec4::Constant(std::numeric_limits<double>::infinity());
    Vec4 hi = Vec4::Constant(-std::numeric_limits<double>::infinity());

    void grow(const Vec4& x) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    void grow(const Box& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    double distance(const Box& b) const {
        const Vec4 gap = (b.lo - hi).cwiseMax(lo - b.hi).cwiseMax(0.0);
        return gap.norm();
    }
};

struct BvhNode {
    Box box;
    int left = -1;
    int right = -1;
    int begin = 0;
    int end = 0;
};

class FaceBvh {
public:
    FaceBvh(const std::vector<Box>& boxes) : boxes_(boxes), order_(boxes.size()) {
        std::iota(order_.begin(), order_.end(), 0);
        if (!boxes.empty()) {
            build(0, static_cast<int>(boxes.size()));
        }
    }

    template <class Visit>
    void query(const Box& b, double& radius, Visit&& visit) const {
        if (nodes_.empty()) {
            return;
        }
        std::vector<int> stack{0};
        while (!stack.empty()) {
            const BvhNode& node = nodes_[stack.back()];
            stack.pop_back();
            if (node.box.distance(b) >= radius) {
                continue;
            }
            if (node.left < 0) {
                for (int i = node.begin; i < node.end; ++i) {
                    if (boxes_[order_[i]].distance(b) < radius) {
                        visit(order_[i]);
                    }
                }
                continue;
            }
            stack.push_back(node.right);
            stack.push_back(node.left);
        }
    }

private:
    int build(int begin, int end) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        Box box;
        Box centers;
        for (int i = begin; i < end; ++i) {
            box.grow(boxes_[order_[i]]);
            centers.grow(Vec4(0.5 * (boxes_[order_[i]].lo + boxes_[order_[i]].hi)));
        }
        nodes_[id].box = box;
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        if (end - begin <= 4) {
            return id;
        }
        int axis = 0;
        (centers.hi - centers.lo).maxCoeff(&axis);
        const int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
            const double ca = boxes_[a].lo[axis] + boxes_[a].hi[axis];
            const double cb = boxes_[b].lo[axis] + boxes_[b].hi[axis];
            return ca < cb || (ca == cb && a < b);
        });
        const int l = build(begin, mid);
        const int r = build(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    const std::vector<Box>& boxes_;
    std::vector<int> order_;
    std::vector<BvhNode> nodes_;
};

} // namespace

EmbeddednessReport embeddedness_diagnostic(const TriMesh& mesh) {
    EmbeddednessReport rep;
    if (mesh.is_patch()) {
        rep.notice = "skipped: input is a single patch, not a closed surface";
        return rep;
    }
    try {
        closed_topology(mesh);
    } catch (const TopologyError&) {
        rep.notice = "skipped: input is not a closed surface";
        return rep;
    }
    const std::size_t nf = mesh.faces.size();
    std::vector<Box> boxes(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        for (int v : mesh.faces[f]) {
            boxes[f].grow(mesh.vertices[v]);
        }
    }
    const FaceBvh bvh(boxes);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < nf; ++f) {
        const Face& a = mesh.faces[f];
        const std::array<Vec4, 3> s{mesh.vertices[a[0]], mesh.vertices[a[1]], mesh.vertices[a[2]]};
        bvh.query(boxes[f], best, [&](int g) {
            if (static_cast<std::size_t>(g) <= f) {
                return;
            }
            const Face& b = mesh.faces[g];
            for (int x : a) {
                for (int y : b) {
                    if (x == y) {
                        return;
                    }
                }
            }
            const std::array<Vec4, 3> t{mesh.vertices[b[0]], mesh.vertices[b[1]], mesh.vertices[b[2]]};
            best = std::min(best, triangle_distance(s, t));
        });
    }
    rep.computed = true;
    rep.min_separation = best;
    return rep;
}

void write_topology_json(std::ostream& os, const AssembledSurface& surface) {
    const Topology t = closed_topology(surface.mesh);
    nlohmann::ordered_json j;
    j["V"] = t.V;
    j["E"] = t.E;
    j["F"] = t.F;
    j["chi"] = t.chi;
    j["genus"] = t.genus;
    j["copies"] = surface.action_table.size();
    j["weld_count"] = surface.weld_count;
    os << j.dump(2) << '\n';
}

} // namespace lawson
