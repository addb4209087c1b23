#include "lawson/nodal.hpp"

#include "lawson/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace lawson {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

double m_norm(const FemPair& fem, const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(fem.M * x))); }

// +1 / -1 for vertices in a domain, 0 for zero-set and band vertices.
int vertex_sign(const NodalDomains& d, int v) {
    const int l = d.labels[v];
    return l >= 0 ? d.domain_sign[l] : 0;
}

} // namespace

NodalDomains nodal_domains(const TriMesh& mesh, const Eigen::VectorXd& phi, const NodalThresholds& th) {
    const int n = static_cast<int>(mesh.vertices.size());
    if (phi.size() != n) {
        throw InputError("nodal_domains: vector length does not match the mesh");
    }
    const double inf = phi.cwiseAbs().maxCoeff();
    if (!(inf > 0.0)) {
        throw DomainError("nodal_domains: function vanishes identically");
    }
    std::vector<int> sign(n, 0);
    NodalDomains out;
    out.labels.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        const double a = std::abs(phi[v]);
        if (a <= th.zero * inf) {
            out.labels[v] = NodalDomains::kZero;
        } else if (a <= th.band * inf) {
            out.labels[v] = NodalDomains::kBand;
        } else {
            sign[v] = phi[v] > 0.0 ? 1 : -1;
        }
    }
    UnionFind uf(n);
    for (const auto& [a, b] : unique_edges(mesh)) {
        if (sign[a] != 0 && sign[a] == sign[b]) {
            uf.unite(a, b);
        }
    }
    std::vector<int> id(n, -1);
    for (int v = 0; v < n; ++v) {
        if (sign[v] == 0) {
            continue;
        }
        const int r = uf.find(v);
        if (id[r] < 0) {
            id[r] = out.count++;
            out.domain_sign.push_back(sign[v]);
        }
        out.labels[v] = id[r];
    }
    return out;
}

Eigen::VectorXd coordinate_function(const TriMesh& mesh, const Vec4& v) {
    if (std::abs(v.norm() - 1.0) > 1e-8) {
        throw InputError("coordinate_function: direction must be a unit vector");
    }
    return coordinate_vector(mesh, v);
}

Eigen::VectorXd pullback(const Eigen::VectorXd& phi, const std::vector<int>& perm) {
    Eigen::VectorXd out(phi.size());
    for (Eigen::Index v = 0; v < phi.size(); ++v) {
        out[v] = phi[perm[v]];
    }
    return out;
}

Eigen::VectorXd symmetrize(const AssembledSurface& surface, const Eigen::VectorXd& phi) {
    if (surface.action_table.empty()) {
        throw UsageError("symmetrize: surface has no action table");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(phi.size());
    for (const auto& perm : surface.action_table) {
        out += pullback(phi, perm);
    }
    return out;
}

const char* to_string(Signature s) {
    switch (s) {
    case Signature::Plus:
        return "+1";
    case Signature::Minus:
        return "-1";
    default:
        return "mixed";
    }
}

std::array<Signature, 4> symmetry_signature(const AssembledSurface& surface, const FemPair& fem,
                                            const Eigen::VectorXd& phi, double tol) {
    if (surface.action_table.empty()) {
        throw UsageError("symmetry_signature: surface has no action table");
    }
    const double base = m_norm(fem, phi);
    if (!(base > 0.0)) {
        throw DomainError("symmetry_signature: zero function");
    }
    std::array<Signature, 4> out{};
    const auto gens = generators(surface.mesh.params);
    for (int i = 0; i < 4; ++i) {
        const Eigen::VectorXd psi = pullback(phi, surface.action(gens[i].element));
        if (m_norm(fem, psi - phi) <= tol * base) {
            out[i] = Signature::Plus;
        } else if (m_norm(fem, psi + phi) <= tol * base) {
            out[i] = Signature::Minus;
        } else {
            out[i] = Signature::Mixed;
        }
    }
    return out;
}

EquatorCheck equator_separation_check(const AssembledSurface& surface, const Vec4& v, const NodalThresholds& th) {
    EquatorCheck out;
    out.direction = v.normalized();
    const NodalDomains d = nodal_domains(surface.mesh, coordinate_function(surface.mesh, out.direction), th);
    out.component_count = d.count;
    const auto elements = enumerate_group(surface.mesh.params);
    // Reflections in great circles (eps = 1) first, then the rotations.
    for (int pass = 1; pass >= 0 && !out.reflection_found; --pass) {
        for (const GroupElement& g : elements) {
            if (g.eps == pass && (to_matrix(g) * out.direction + out.direction).norm() <= 1e-12) {
                out.reflection_found = true;
                out.element = g.to_string();
                if (d.count == 2 && !surface.action_table.empty()) {
                    const auto& perm = surface.action(g);
                    bool swapped = true;
                    for (std::size_t u = 0; u < d.labels.size() && swapped; ++u) {
                        const int l = d.labels[u];
                        if (l >= 0) {
                            const int m = d.labels[perm[u]];
                            swapped = m >= 0 && m != l;
                        }
                    }
                    out.exchanged_by_reflection = swapped;
                }
                break;
            }
        }
    }
    return out;
}

const NodalComponent* ObstructionReport::headline() const {
    for (const auto& c : components) {
        if (c.all()) {
            return &c;
        }
    }
    return components.empty() ? nullptr : &components.front();
}

ObstructionReport obstruction_classifier(const AssembledSurface& surface, const FemPair& fem,
                                         const Eigen::VectorXd& phi, const NodalThresholds& th) {
    for (Signature s : symmetry_signature(surface, fem, phi)) {
        if (s != Signature::Plus) {
            throw PreconditionError(
                "obstruction_classifier: function is not G-invariant; check symmetry_signature first");
        }
    }
    const NodalDomains global = nodal_domains(surface.mesh, phi, th);
    ObstructionReport rep;
    rep.global_count = global.count;

    const GroupElement id = identity(surface.mesh.params);
    std::vector<int> patch_faces;
    for (std::size_t f = 0; f < surface.mesh.faces.size(); ++f) {
        if (surface.copy_map[f] == id) {
            patch_faces.push_back(static_cast<int>(f));
        }
    }
    const auto& tags = surface.patch_tags;
    auto common_arc = [&](int a, int b) {
        for (int i = 0; i < 4; ++i) {
            if (tags[a].on_arc(i) && tags[b].on_arc(i)) {
                return true;
            }
        }
        return false;
    };

    // Nodes: zero vertices and sign-change edges of patch faces.
    std::map<std::pair<int, int>, int> node_of;
    std::vector<char> node_interior;
    std::vector<std::pair<int, int>> node_key;
    auto node = [&](int a, int b) {
        const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        auto [it, fresh] = node_of.try_emplace(key, static_cast<int>(node_key.size()));
        if (fresh) {
            node_key.push_back(key);
            const bool inner = a == b ? tags[a].kind == VertexTag::Kind::Interior : !common_arc(a, b);
            node_interior.push_back(inner ? 1 : 0);
        }
        return it->second;
    };
    std::vector<std::array<int, 2>> raw_links;
    std::vector<std::array<int, 3>> collapse;
    for (int f : patch_faces) {
        const Face& t = surface.mesh.faces[f];
        std::array<int, 3> s{};
        for (int c = 0; c < 3; ++c) {
            s[c] = vertex_sign(global, t[c]);
        }
        std::vector<int> here;
        for (int c = 0; c < 3; ++c) {
            if (s[c] == 0) {
                here.push_back(node(t[c], t[c]));
            }
        }
        for (int c = 0; c < 3; ++c) {
            const int a = t[c];
            const int b = t[(c + 1) % 3];
            if (s[c] * s[(c + 1) % 3] < 0) {
                here.push_back(node(a, b));
            }
        }
        const int zeros = static_cast<int>(std::count(s.begin(), s.end(), 0));
        if (zeros == 3) {
            collapse.push_back({here[0], here[1], here[2]});
        } else if (here.size() == 2) {
            raw_links.push_back({here[0], here[1]});
        }
    }

    const int nn = static_cast<int>(node_key.size());
    UnionFind merged(nn);
    for (const auto& c : collapse) {
        merged.unite(c[0], c[1]);
        merged.unite(c[0], c[2]);
    }
    std::set<std::pair<int, int>> links;
    for (const auto& l : raw_links) {
        const int a = merged.find(l[0]);
        const int b = merged.find(l[1]);
        if (a != b) {
            links.insert({std::min(a, b), std::max(a, b)});
        }
    }
    UnionFind comp(nn);
    for (const auto& [a, b] : links) {
        comp.unite(a, b);
    }
    std::map<int, std::vector<int>> members;  // component root -> collapsed nodes
    std::vector<char> interior_by_root(nn, 0);
    for (int x = 0; x < nn; ++x) {
        const int r = merged.find(x);
        if (node_interior[x]) {
            interior_by_root[comp.find(r)] = 1;
        }
        if (r == x) {
            members[comp.find(r)].push_back(r);
        }
    }
    std::vector<int> degree(nn, 0);
    std::map<int, int> link_count;
    for (const auto& [a, b] : links) {
        ++degree[a];
        ++degree[b];
        ++link_count[comp.find(a)];
    }

    const std::size_t npv = surface.patch_vertex_count;
    const auto gens = generators(surface.mesh.params);
    for (const auto& [root, nodes] : members) {
        if (!interior_by_root[root]) {
            continue;
        }
        NodalComponent c;
        c.meets_interior = true;
        c.nodes = static_cast<int>(nodes.size());
        c.links = link_count[root];
        bool path = c.links == c.nodes - 1;
        for (int x : nodes) {
            path = path && degree[x] <= 2;
        }
        c.h1_arc = path;

        // Cut the patch along this component.
        std::vector<char> removed(npv, 0);
        std::set<std::pair<int, int>> cut;
        for (int x = 0; x < nn; ++x) {
            if (comp.find(merged.find(x)) != root) {
                continue;
            }
            const auto [a, b] = node_key[x];
            if (a == b) {
                removed[a] = 1;
            } else {
                cut.insert({a, b});
            }
        }
        UnionFind pieces(npv);
        std::vector<char> used(npv, 0);
        for (int f : patch_faces) {
            const Face& t = surface.mesh.faces[f];
            for (int k = 0; k < 3; ++k) {
                const int a = t[k];
                const int b = t[(k + 1) % 3];
                used[a] = used[b] = 1;
                if (!removed[a] && !removed[b] && !cut.count({std::min(a, b), std::max(a, b)})) {
                    pieces.unite(a, b);
                }
            }
        }
        std::map<int, std::vector<int>> piece_members;
        for (std::size_t v = 0; v < npv; ++v) {
            if (used[v] && !removed[v]) {
                piece_members[pieces.find(static_cast<int>(v))].push_back(static_cast<int>(v));
            }
        }
        for (const auto& [r, vs] : piece_members) {
            c.piece_sizes.push_back(static_cast<int>(vs.size()));
        }
        c.h2_two_pieces = piece_members.size() == 2;
        if (c.h2_two_pieces) {
            for (const auto& [r, vs] : piece_members) {
                for (int i = 0; i < 4 && c.free_arc < 0; ++i) {
                    const bool touches =
                        std::any_of(vs.begin(), vs.end(), [&](int v) { return tags[v].on_arc(i); });
                    if (!touches) {
                        c.free_arc = i;
                    }
                }
                if (c.free_arc < 0) {
                    continue;
                }
                c.h3_free_edge = true;
                const auto& perm = surface.action(gens[c.free_arc].element);
                std::set<int> mine, theirs;
                for (int v : vs) {
                    if (global.labels[v] >= 0) {
                        mine.insert(global.labels[v]);
                    }
                    if (global.labels[perm[v]] >= 0) {
                        theirs.insert(global.labels[perm[v]]);
                    }
                }
                bool disjoint = !mine.empty() && !theirs.empty();
                for (int l : mine) {
                    disjoint = disjoint && !theirs.count(l);
                }
                c.h4_distinct = disjoint;
                break;
            }
        }
        if (c.all()) {
            rep.any_all_hypotheses = true;
            if (rep.global_count < 3) {
                rep.cross_check_ok = false;
            }
        }
        rep.components.push_back(std::move(c));
    }
    rep.branch = rep.components.empty() ? "constant_sign_patch" : "interior_nodal_set";
    return rep;
}

NodalReport analyze_eigenfunction(const AssembledSurface& surface, const FemPair& fem, int index,
                                  const EigenPair& pair) {
    NodalReport r;
    r.eigen_index = index;
    r.lambda = pair.lambda;
    r.domains = nodal_domains(surface.mesh, pair.phi);
    r.signature = symmetry_signature(surface, fem, pair.phi);
    if (std::all_of(r.signature.begin(), r.signature.end(), [](Signature s) { return s == Signature::Plus; })) {
        r.obstruction = obstruction_classifier(surface, fem, pair.phi);
    }
    return r;
}

void write_nodal_json(std::ostream& os, const std::vector<NodalReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const NodalReport& r : reports) {
        nlohmann::ordered_json j;
        j["index"] = r.eigen_index;
        j["lambda"] = r.lambda;
        j["domain_count"] = r.domains.count;
        nlohmann::ordered_json sig;
        for (int i = 0; i < 4; ++i) {
            sig["g" + std::to_string(i + 1)] = to_string(r.signature[i]);
        }
        j["signature"] = sig;
        if (r.obstruction) {
            const ObstructionReport& o = *r.obstruction;
            nlohmann::ordered_json ob;
            ob["branch"] = o.branch;
            const NodalComponent* h = o.headline();
            ob["H1"] = h ? nlohmann::ordered_json(h->h1_arc) : nlohmann::ordered_json(nullptr);
            ob["H2"] = h ? nlohmann::ordered_json(h->h2_two_pieces) : nlohmann::ordered_json(nullptr);
            ob["H3"] = h ? nlohmann::ordered_json(h->h3_free_edge) : nlohmann::ordered_json(nullptr);
            ob["H4"] = h ? nlohmann::ordered_json(h->h4_distinct) : nlohmann::ordered_json(nullptr);
            ob["global_count"] = o.global_count;
            ob["interior_components"] = o.components.size();
            ob["cross_check_ok"] = o.cross_check_ok;
            j["obstruction"] = ob;
        } else {
            j["obstruction"] = nullptr;
        }
        arr.push_back(j);
    }
    os << arr.dump(2) << '\n';
}

} // namespace lawson
