// lawson: command-line driver for the Lawson surface pipeline.
//
//   lawson group-verify --m 2 --k 2 --out out
//   lawson build --m 2 --k 2 --n 16 --out out
//   lawson spectrum --m 2 --k 2 --n 16 --eigs 12 --out out
//
// LAWSON_THREADS sets the worker count (default 1).

#include "lawson/errors.hpp"
#include "lawson/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Flags {
    std::string config;
    std::optional<int> m, k, n, eigs;
    std::optional<double> tol, eig_tol, weld_tol, band_lo, band_hi;
    std::optional<std::string> out, mass;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Flags& f, bool mesh, bool eigen) {
    sub->add_option("--config", f.config, "key = value file; flags override it");
    sub->add_option("--m", f.m, "Lawson parameter m");
    sub->add_option("--k", f.k, "Lawson parameter k");
    sub->add_option("--out", f.out, "output directory");
    if (mesh) {
        sub->add_option("--n", f.n, "patch grid resolution");
        sub->add_option("--tol", f.tol, "mean-curvature residual tolerance");
        sub->add_option("--weld-tol", f.weld_tol, "vertex weld tolerance");
    }
    if (eigen) {
        sub->add_option("--eigs", f.eigs, "number of eigenpairs");
        sub->add_option("--eig-tol", f.eig_tol, "eigen residual tolerance");
        sub->add_option("--seed", f.seed, "start block seed");
        sub->add_option("--mass", f.mass, "lumped or consistent");
        sub->add_option("--band-lo", f.band_lo, "lower end of the accepted lambda_1 band");
        sub->add_option("--band-hi", f.band_hi, "upper end of the accepted lambda_1 band");
    }
}

lawson::RunConfig resolve(const Flags& f) {
    lawson::RunConfig c;
    if (!f.config.empty()) {
        std::ifstream is(f.config);
        if (!is) {
            throw lawson::InputError("cannot read config " + f.config);
        }
        c = lawson::read_config(is, c);
    }
    if (f.m) c.m = *f.m;
    if (f.k) c.k = *f.k;
    if (f.n) c.n = *f.n;
    if (f.eigs) c.eigen_count = *f.eigs;
    if (f.tol) c.solver_tolerance = *f.tol;
    if (f.eig_tol) c.eigen_tolerance = *f.eig_tol;
    if (f.weld_tol) c.weld_tolerance = *f.weld_tol;
    if (f.band_lo) c.lambda_band_lo = *f.band_lo;
    if (f.band_hi) c.lambda_band_hi = *f.band_hi;
    if (f.out) c.out_dir = *f.out;
    if (f.mass) c.mass = *f.mass;
    if (f.seed) c.seed = *f.seed;
    c.validate();
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lawson minimal surfaces in S^3: group checks, Plateau patch, assembly and spectrum"};
    app.require_subcommand(1);
    Flags gf, bf, sf;
    auto* group = app.add_subcommand("group-verify", "check the reflection group and its cell action");
    add_common(group, gf, false, false);
    auto* build = app.add_subcommand("build", "solve the Plateau patch and assemble the closed surface");
    add_common(build, bf, true, false);
    auto* spectrum = app.add_subcommand("spectrum", "build, then compute eigenpairs and nodal reports");
    add_common(spectrum, sf, true, true);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lawson::kExitUsage;
    }
    try {
        if (*group) {
            return lawson::cmd_group_verify(resolve(gf), std::cout);
        }
        if (*build) {
            return lawson::cmd_build(resolve(bf), std::cout);
        }
        return lawson::cmd_spectrum(resolve(sf), std::cout);
    } catch (const lawson::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lawson::kExitUsage;
    } catch (const lawson::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lawson::kExitUsage;
    }
}
