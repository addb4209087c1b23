#include "lawson/run_config.hpp"

#include "lawson/errors.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace lawson {

void RunConfig::validate() const {
    if (m < 1 || k < 1) {
        throw InputError("config: m and k must be at least 1");
    }
    if (n < 2) {
        throw InputError("config: n must be at least 2");
    }
    if (eigen_count < 2) {
        throw InputError("config: eigen_count must be at least 2");
    }
    if (!(solver_tolerance > 0.0) || !(eigen_tolerance > 0.0) || !(weld_tolerance > 0.0)) {
        throw InputError("config: tolerances must be positive");
    }
    if (!(lambda_band_lo > 0.0) || !(lambda_band_hi > lambda_band_lo)) {
        throw InputError("config: lambda band must satisfy 0 < lo < hi");
    }
    if (mass != "lumped" && mass != "consistent") {
        throw InputError("config: mass must be lumped or consistent");
    }
    if (out_dir.empty()) {
        throw InputError("config: output directory is empty");
    }
}

void write_config(std::ostream& os, const RunConfig& c) {
    std::ostringstream s;
    s << std::setprecision(17);
    s << "m = " << c.m << '\n'
      << "k = " << c.k << '\n'
      << "n = " << c.n << '\n'
      << "eigen_count = " << c.eigen_count << '\n'
      << "solver_tolerance = " << c.solver_tolerance << '\n'
      << "eigen_tolerance = " << c.eigen_tolerance << '\n'
      << "weld_tolerance = " << c.weld_tolerance << '\n'
      << "lambda_band_lo = " << c.lambda_band_lo << '\n'
      << "lambda_band_hi = " << c.lambda_band_hi << '\n'
      << "mass = " << c.mass << '\n'
      << "out_dir = " << c.out_dir << '\n'
      << "seed = " << c.seed << '\n';
    os << s.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw InputError("config: bad value for " + key + ": '" + text + "'");
    }
    return value;
}

} // namespace

RunConfig read_config(std::istream& is, RunConfig c) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("config: line " + std::to_string(lineno) + " has no '='");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "m") c.m = parse_number<int>(key, val);
        else if (key == "k") c.k = parse_number<int>(key, val);
        else if (key == "n") c.n = parse_number<int>(key, val);
        else if (key == "eigen_count") c.eigen_count = parse_number<int>(key, val);
        else if (key == "solver_tolerance") c.solver_tolerance = parse_number<double>(key, val);
        else if (key == "eigen_tolerance") c.eigen_tolerance = parse_number<double>(key, val);
        else if (key == "weld_tolerance") c.weld_tolerance = parse_number<double>(key, val);
        else if (key == "lambda_band_lo") c.lambda_band_lo = parse_number<double>(key, val);
        else if (key == "lambda_band_hi") c.lambda_band_hi = parse_number<double>(key, val);
        else if (key == "mass") c.mass = val;
        else if (key == "out_dir") c.out_dir = val;
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, val);
        else throw InputError("config: unknown key '" + key + "'");
    }
    return c;
}

} // namespace lawson
