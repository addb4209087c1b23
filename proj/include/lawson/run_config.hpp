#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace lawson {

/// Parameters of one pipeline run. The text form is one "key = value" per
/// line; '#' starts a comment. Doubles are written with 17 significant
/// digits so a write/read cycle reproduces every field exactly.
struct RunConfig {
    int m = 2;
    int k = 2;
    int n = 16;
    int eigen_count = 12;
    double solver_tolerance = 1e-6;
    double eigen_tolerance = 1e-8;
    double weld_tolerance = 1e-7;
    double lambda_band_lo = 1.8;
    double lambda_band_hi = 2.2;
    std::string mass = "lumped";  // or "consistent"
    std::string out_dir = "out";
    std::uint64_t seed = 20240611;

    /// Throws InputError on a non-positive or inconsistent field.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

void write_config(std::ostream& os, const RunConfig& cfg);
/// Starts from `base` and overrides every key present in the stream.
/// Unknown keys and malformed values throw InputError.
RunConfig read_config(std::istream& is, RunConfig base = {});

} // namespace lawson
