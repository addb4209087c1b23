#pragma once

#include "lawson/assembly.hpp"
#include "lawson/laplace_spectrum.hpp"
#include "lawson/plateau.hpp"
#include "lawson/run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lawson {

/// Stable process exit codes.
enum ExitCode : int {
    kExitPass = 0,
    kExitGroup = 1,
    kExitSolver = 2,
    kExitTopology = 3,
    kExitEigen = 4,
    kExitUsage = 64,
};

struct GroupVerification {
    int order = 0;
    int expected_order = 0;
    bool identity_present = false;
    bool distinct_matrices = false;
    bool orthogonal = false;
    bool normal_form_bijective = false;
    bool closure = false;             // products stay in the enumerated set
    bool homomorphism = false;        // matrix of g*h equals matrix(g) matrix(h)
    bool conjugation_inverts_H = false;
    bool generators_match = false;    // block formulas agree with circle reflections
    bool cell_orbit_even = false;
    int cell_orbit_size = 0;
    int stabilizer_size = 0;
    std::string first_failure;

    bool passed() const { return first_failure.empty(); }
};

GroupVerification verify_group(const LawsonParams& params);
void write_group_json(std::ostream& os, const LawsonParams& params, const GroupVerification& v);

/// CSV "index,lambda,residual".
void write_spectrum_csv(std::ostream& os, const std::vector<EigenPair>& pairs);
/// Bar chart of the first (up to) 12 eigenvalues with a dashed line at `reference`.
void write_spectrum_svg(std::ostream& os, const std::vector<EigenPair>& pairs, double reference = 2.0);

/// Centre of the odd cell C_{1,2}; the surface avoids it, so it is a safe
/// pole for stereographic export.
Vec4 viewer_pole(const LawsonParams& params);

struct BuiltSurface {
    SolveResult solve;
    AssembledSurface surface;
};

/// Plateau solve and assembly without writing anything.
/// Throws SolverDivergedError, AssemblyError or TopologyError.
BuiltSurface build_surface(const RunConfig& cfg);

/// Subcommands. Artifacts go to cfg.out_dir, a human summary to `log`.
int cmd_group_verify(const RunConfig& cfg, std::ostream& log);
int cmd_build(const RunConfig& cfg, std::ostream& log);
int cmd_spectrum(const RunConfig& cfg, std::ostream& log);

} // namespace lawson
