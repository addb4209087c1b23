#include "lawson/pipeline.hpp"

#include "lawson/errors.hpp"
#include "lawson/nodal.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace lawson {

namespace {

bool close(const Mat4& a, const Mat4& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream os(std::filesystem::path(cfg.out_dir) / name);
    if (!os) {
        throw InputError("cannot write " + (std::filesystem::path(cfg.out_dir) / name).string());
    }
    return os;
}

OffHeader header_for(const RunConfig& cfg, const std::string& what) {
    OffHeader h;
    h.comments.push_back(what);
    h.comments.push_back("m " + std::to_string(cfg.m) + " k " + std::to_string(cfg.k) + " n " +
                         std::to_string(cfg.n));
    return h;
}

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

} // namespace

GroupVerification verify_group(const LawsonParams& params) {
    GroupVerification v;
    auto fail = [&](const std::string& what) {
        if (v.first_failure.empty()) {
            v.first_failure = what;
        }
    };
    const auto elements = enumerate_group(params);
    v.order = static_cast<int>(elements.size());
    v.expected_order = params.group_order();
    if (v.order != v.expected_order) {
        fail("order " + std::to_string(v.order) + " != " + std::to_string(v.expected_order));
    }
    v.identity_present = !elements.empty() && elements.front() == identity(params) &&
                         close(to_matrix(elements.front()), Mat4::Identity(), 0.0);
    if (!v.identity_present) {
        fail("identity (0,0,0) missing or not first");
    }

    std::vector<Mat4> mats;
    mats.reserve(elements.size());
    for (const auto& g : elements) {
        mats.push_back(to_matrix(g));
    }
    v.orthogonal = true;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        if (!close(mats[i].transpose() * mats[i], Mat4::Identity(), 1e-12)) {
            v.orthogonal = false;
            fail("element " + elements[i].to_string() + " is not orthogonal");
        }
    }
    v.distinct_matrices = true;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            if (close(mats[i], mats[j], 1e-9)) {
                v.distinct_matrices = false;
                fail(elements[i].to_string() + " and " + elements[j].to_string() + " have equal matrices");
            }
        }
    }
    std::set<int> indices;
    v.normal_form_bijective = true;
    for (const auto& g : elements) {
        indices.insert(element_index(g));
        if (!(make_element(params, g.eps, g.j, g.ell) == g)) {
            v.normal_form_bijective = false;
            fail("normal form of " + g.to_string() + " does not round-trip");
        }
    }
    if (static_cast<int>(indices.size()) != v.order || *indices.begin() != 0 || *indices.rbegin() != v.order - 1) {
        v.normal_form_bijective = false;
        fail("element_index is not a bijection onto 0..|G|-1");
    }

    v.closure = true;
    v.homomorphism = true;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        for (std::size_t j = 0; j < elements.size(); ++j) {
            const GroupElement p = multiply(elements[i], elements[j]);
            const int idx = element_index(p);
            if (idx < 0 || idx >= v.order || !(elements[idx] == p)) {
                v.closure = false;
                fail("product " + elements[i].to_string() + "*" + elements[j].to_string() + " left the group");
                continue;
            }
            if (!close(mats[idx], mats[i] * mats[j], 1e-12)) {
                v.homomorphism = false;
                fail("matrix of " + elements[i].to_string() + "*" + elements[j].to_string() +
                     " differs from the matrix product");
            }
        }
    }
    const GroupElement aa = make_element(params, 1, 0, 0);
    v.conjugation_inverts_H = true;
    for (const auto& h : elements) {
        if (h.eps == 0 && !(multiply(multiply(aa, h), aa) == inverse(h))) {
            v.conjugation_inverts_H = false;
            fail("(A,A) " + h.to_string() + " (A,A) is not the inverse");
        }
    }
    v.generators_match = true;
    for (const Generator& g : generators(params)) {
        if (!close(g.matrix, g.circle.reflection_matrix(), 1e-12) || !close(g.matrix, to_matrix(g.element), 1e-12)) {
            v.generators_match = false;
            fail("generator " + g.name + " does not match its reflection");
        }
    }
    const CellOrbit orbit = cell_orbit(params);
    v.cell_orbit_even = orbit.all_even_parity;
    v.cell_orbit_size = orbit.distinct_cells;
    v.stabilizer_size = static_cast<int>(orbit.stabilizer.size());
    if (!v.cell_orbit_even) {
        fail("cell orbit of C_{1,1} contains an odd cell");
    }
    if (v.cell_orbit_size != v.expected_order) {
        fail("cell orbit has " + std::to_string(v.cell_orbit_size) + " cells");
    }
    if (v.stabilizer_size != 1) {
        fail("stabilizer of C_{1,1} is not trivial");
    }
    return v;
}

void write_group_json(std::ostream& os, const LawsonParams& params, const GroupVerification& v) {
    nlohmann::ordered_json j;
    j["m"] = params.m;
    j["k"] = params.k;
    j["order"] = v.order;
    j["expected_order"] = v.expected_order;
    j["identity_present"] = v.identity_present;
    j["distinct_matrices"] = v.distinct_matrices;
    j["orthogonal"] = v.orthogonal;
    j["normal_form_bijective"] = v.normal_form_bijective;
    j["closure"] = v.closure;
    j["homomorphism"] = v.homomorphism;
    j["conjugation_inverts_H"] = v.conjugation_inverts_H;
    j["generators_match"] = v.generators_match;
    j["cell_orbit_even"] = v.cell_orbit_even;
    j["cell_orbit_size"] = v.cell_orbit_size;
    j["stabilizer_size"] = v.stabilizer_size;
    j["passed"] = v.passed();
    j["first_failure"] = v.first_failure;
    os << j.dump(2) << '\n';
}

void write_spectrum_csv(std::ostream& os, const std::vector<EigenPair>& pairs) {
    os << "index,lambda,residual\n" << std::setprecision(17);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        os << i << ',' << pairs[i].lambda << ',' << pairs[i].residual << '\n';
    }
}

void write_spectrum_svg(std::ostream& os, const std::vector<EigenPair>& pairs, double reference) {
    const std::size_t count = std::min<std::size_t>(12, pairs.size());
    const double w = 640, h = 360, left = 50, right = 20, top = 20, bottom = 40;
    double ymax = reference * 1.25;
    for (std::size_t i = 0; i < count; ++i) {
        ymax = std::max(ymax, pairs[i].lambda * 1.1);
    }
    const double plot_w = w - left - right;
    const double plot_h = h - top - bottom;
    auto y_of = [&](double v) { return top + plot_h * (1.0 - std::max(0.0, v) / ymax); };
    const double slot = plot_w / std::max<std::size_t>(count, 1);
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << w - right << "\" y2=\""
       << top + plot_h << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
       << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < count; ++i) {
        const double x = left + slot * (static_cast<double>(i) + 0.15);
        const double y = y_of(pairs[i].lambda);
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << slot * 0.7 << "\" height=\""
           << top + plot_h - y << "\" fill=\"steelblue\"><title>lambda_" << i << " = " << std::setprecision(6)
           << pairs[i].lambda << std::setprecision(2) << "</title></rect>\n";
        os << "<text x=\"" << x + slot * 0.35 << "\" y=\"" << top + plot_h + 15
           << "\" font-size=\"11\" text-anchor=\"middle\">" << i << "</text>\n";
    }
    const double yr = y_of(reference);
    os << "<line x1=\"" << left << "\" y1=\"" << yr << "\" x2=\"" << w - right << "\" y2=\"" << yr
       << "\" stroke=\"crimson\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << w - right << "\" y=\"" << yr - 4 << "\" font-size=\"11\" text-anchor=\"end\" fill=\"crimson\">"
       << "lambda = " << reference << "</text>\n";
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << h - 8
       << "\" font-size=\"12\" text-anchor=\"middle\">eigenvalue index</text>\n";
    os << "</svg>\n";
}

Vec4 viewer_pole(const LawsonParams& params) {
    const LawsonVertices lv = lawson_vertices(params);
    return (lv.P(1).vec() + lv.P(2).vec() + lv.Q(2).vec() + lv.Q(3).vec()).normalized();
}

BuiltSurface build_surface(const RunConfig& cfg) {
    cfg.validate();
    const LawsonParams params(cfg.m, cfg.k);
    SolverOptions so;
    so.tolerance = cfg.solver_tolerance;
    BuiltSurface b;
    b.solve = minimize_area(init_disk_mesh(params, cfg.n), so);
    AssemblyOptions ao;
    ao.weld_tolerance = cfg.weld_tolerance;
    b.surface = assemble(b.solve.mesh, ao);
    return b;
}

namespace {

// Shared by build and spectrum: solve, assemble, write mesh artifacts.
// Returns an exit code; on success `out` holds the surface.
int build_and_write(const RunConfig& cfg, std::ostream& log, BuiltSurface& out) {
    cfg.validate();
    {
        std::ofstream os = open_out(cfg, "config.txt");
        write_config(os, cfg);
    }
    const LawsonParams params(cfg.m, cfg.k);
    SolverOptions so;
    so.tolerance = cfg.solver_tolerance;
    try {
        out.solve = minimize_area(init_disk_mesh(params, cfg.n), so);
    } catch (const SolverDivergedError& e) {
        log << "solver diverged: " << e.what() << '\n';
        return kExitSolver;
    } catch (const MeshQualityError& e) {
        log << "solver mesh failure: " << e.what() << '\n';
        return kExitSolver;
    }
    {
        OffHeader h = header_for(cfg, "fundamental patch");
        h.comments.push_back("area " + num(out.solve.area));
        h.comments.push_back("residual " + num(out.solve.residual));
        h.comments.push_back("iterations " + std::to_string(out.solve.iterations));
        std::ofstream os = open_out(cfg, "patch.off");
        write_off4(os, out.solve.mesh, h);
    }
    log << "plateau: area " << num(out.solve.area) << " residual " << out.solve.residual << " after "
        << out.solve.iterations << " iterations (" << out.solve.stop_reason << ")\n";
    if (!out.solve.converged) {
        return kExitSolver;
    }
    AssemblyOptions ao;
    ao.weld_tolerance = cfg.weld_tolerance;
    try {
        out.surface = assemble(out.solve.mesh, ao);
    } catch (const AssemblyError& e) {
        log << "assembly failed: " << e.what() << '\n';
        return kExitTopology;
    } catch (const TopologyError& e) {
        log << "topology check failed: " << e.what() << '\n';
        return kExitTopology;
    } catch (const SymmetryError& e) {
        log << "symmetry check failed: " << e.what() << '\n';
        return kExitTopology;
    }
    const TriMesh& mesh = out.surface.mesh;
    const Topology topo = closed_topology(mesh);
    const EmbeddednessReport emb = embeddedness_diagnostic(mesh);
    {
        nlohmann::ordered_json j;
        j["V"] = topo.V;
        j["E"] = topo.E;
        j["F"] = topo.F;
        j["chi"] = topo.chi;
        j["genus"] = topo.genus;
        j["copies"] = out.surface.action_table.size();
        j["weld_count"] = out.surface.weld_count;
        j["area"] = total_area(mesh);
        j["patch_area"] = out.solve.area;
        j["min_separation"] = emb.computed ? nlohmann::ordered_json(emb.min_separation) : nlohmann::ordered_json(nullptr);
        std::ofstream os = open_out(cfg, "topology.json");
        os << j.dump(2) << '\n';
    }
    const Vec4 pole = viewer_pole(params);
    {
        std::ofstream os = open_out(cfg, "surface.off");
        write_off_stereo(os, mesh, pole, header_for(cfg, "assembled surface"));
    }
    {
        std::ofstream os = open_out(cfg, "surface.obj");
        write_obj_stereo(os, mesh, pole, header_for(cfg, "assembled surface"));
    }
    log << "surface: V " << topo.V << " E " << topo.E << " F " << topo.F << " chi " << topo.chi << " genus "
        << topo.genus << " area " << num(total_area(mesh)) << '\n';
    return kExitPass;
}

} // namespace

int cmd_group_verify(const RunConfig& cfg, std::ostream& log) {
    const LawsonParams params(cfg.m, cfg.k);
    const GroupVerification v = verify_group(params);
    {
        std::ofstream os = open_out(cfg, "group.json");
        write_group_json(os, params, v);
    }
    {
        std::ofstream os = open_out(cfg, "multiplication_table.csv");
        write_multiplication_table(os, params);
    }
    log << "group (m,k) = (" << cfg.m << "," << cfg.k << "): |G| = " << v.order;
    if (v.passed()) {
        log << ", all checks pass\n";
        return kExitPass;
    }
    log << ", FAILED: " << v.first_failure << '\n';
    return kExitGroup;
}

int cmd_build(const RunConfig& cfg, std::ostream& log) {
    BuiltSurface b;
    return build_and_write(cfg, log, b);
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
    BuiltSurface b;
    if (const int code = build_and_write(cfg, log, b); code != kExitPass) {
        return code;
    }
    const AssembledSurface& s = b.surface;
    const FemPair fem = build_fem(s.mesh, cfg.mass == "consistent" ? MassScheme::Consistent : MassScheme::Lumped);
    EigenOptions eo;
    eo.tolerance = cfg.eigen_tolerance;
    eo.seed = cfg.seed;
    EigenResult er;
    try {
        er = lowest_eigenpairs(fem, cfg.eigen_count, eo);
    } catch (const Error& e) {
        log << "eigensolver failed: " << e.what() << '\n';
        return kExitEigen;
    }
    const auto& pairs = er.pairs;
    {
        std::ofstream os = open_out(cfg, "spectrum.csv");
        write_spectrum_csv(os, pairs);
    }
    {
        std::ofstream os = open_out(cfg, "spectrum.svg");
        write_spectrum_svg(os, pairs, 2.0);
    }

    std::vector<NodalReport> nodal;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        nodal.push_back(analyze_eigenfunction(s, fem, static_cast<int>(i), pairs[i]));
    }
    {
        std::ofstream os = open_out(cfg, "nodal.json");
        write_nodal_json(os, nodal);
    }
    {
        std::vector<ScalarField> fields;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            fields.push_back({"phi_" + std::to_string(i), std::vector<double>(pairs[i].phi.begin(), pairs[i].phi.end())});
        }
        for (std::size_t i = 0; i < nodal.size() && i < 2; ++i) {
            fields.push_back({"domains_" + std::to_string(i),
                              std::vector<double>(nodal[i].domains.labels.begin(), nodal[i].domains.labels.end())});
        }
        std::ofstream os = open_out(cfg, "eigenvectors.off");
        write_off_stereo(os, s.mesh, viewer_pole(s.mesh.params), header_for(cfg, "eigenvectors"), fields);
    }

    const std::array<double, 4> tk = takahashi_residual(s.mesh, fem);
    const std::vector<int> two = cluster(pairs, 2.0, 0.1);
    std::vector<Eigen::VectorXd> basis;
    for (int i : two) {
        basis.push_back(pairs[i].phi);
    }
    double defect = 0.0;
    for (const auto& perm : s.action_table) {
        defect = std::max(defect, invariance_defect(fem, basis, perm));
    }
    const double lambda0 = pairs.empty() ? NAN : pairs[0].lambda;
    const double lambda1 = pairs.size() > 1 ? pairs[1].lambda : NAN;
    bool courant = true;
    nlohmann::ordered_json counts = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < nodal.size() && i <= 10; ++i) {
        counts.push_back(nodal[i].domains.count);
        courant = courant && nodal[i].domains.count <= static_cast<int>(i) + 1;
    }
    const int phi1_domains = nodal.size() > 1 ? nodal[1].domains.count : 0;
    const double phi1_mean = pairs.size() > 1 ? (fem.M * pairs[1].phi).sum() : NAN;
    const bool lambda0_ok = std::abs(lambda0) <= 1e-6;
    const bool band_ok = lambda1 >= cfg.lambda_band_lo && lambda1 <= cfg.lambda_band_hi;
    bool classifier_ok = true;
    for (const auto& r : nodal) {
        if (r.obstruction && !r.obstruction->cross_check_ok) {
            classifier_ok = false;
        }
    }
    const bool passed = er.converged && lambda0_ok && band_ok && courant && phi1_domains == 2;

    {
        nlohmann::ordered_json j;
        j["m"] = cfg.m;
        j["k"] = cfg.k;
        j["n"] = cfg.n;
        j["mass"] = to_string(fem.scheme);
        j["total_mass"] = fem.total_mass;
        j["converged"] = er.converged;
        j["restarts"] = er.restarts;
        j["lambda0"] = lambda0;
        j["lambda1"] = lambda1;
        j["lambda1_band"] = {cfg.lambda_band_lo, cfg.lambda_band_hi};
        j["lambda1_in_band"] = band_ok;
        j["lambda1_above_half_dimension"] = lambda1 > 1.0;
        j["cluster_at_2"] = two.size();
        j["cluster_invariance_defect"] = defect;
        j["takahashi"] = {tk[0], tk[1], tk[2], tk[3]};
        j["nodal_counts"] = counts;
        j["courant"] = courant;
        j["phi1_domains"] = phi1_domains;
        j["phi1_mass_mean"] = phi1_mean;
        j["classifier_cross_check"] = classifier_ok;
        nlohmann::ordered_json warn = nlohmann::ordered_json::array();
        for (const auto& w : fem.warnings) {
            warn.push_back(w);
        }
        for (const auto& w : er.warnings) {
            warn.push_back(w);
        }
        j["warnings"] = warn;
        j["passed"] = passed;
        std::ofstream os = open_out(cfg, "spectrum.json");
        os << j.dump(2) << '\n';
    }

    log << "spectrum: lambda0 " << lambda0 << " lambda1 " << num(lambda1) << " cluster at 2: " << two.size()
        << " eigenfunctions, invariance defect " << defect << '\n';
    log << "takahashi: " << tk[0] << ' ' << tk[1] << ' ' << tk[2] << ' ' << tk[3] << '\n';
    log << "nodal: phi1 has " << phi1_domains << " domains, courant " << (courant ? "ok" : "VIOLATED") << '\n';
    for (const auto& w : fem.warnings) {
        log << "warning: " << w << '\n';
    }
    for (const auto& w : er.warnings) {
        log << "warning: " << w << '\n';
    }
    return passed ? kExitPass : kExitEigen;
}

} // namespace lawson
