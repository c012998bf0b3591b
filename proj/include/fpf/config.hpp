#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpf/material.hpp"
#include "fpf/optimizer.hpp"
#include "fpf/pcg.hpp"
#include "fpf/sensitivity.hpp"

namespace fpf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Run configuration. Text form is line-based `key = value` with `#`
/// comments and dotted section keys, e.g. `method.alpha = 0.5`.
/// Units: lengths in m, moduli and tractions in Pa, eta in N/m.
struct RunConfig {
    int nx = 100;
    int ny = 50;
    double lx = 2.0;
    double ly = 1.0;
    MethodParameters method;
    MaterialModel material;
    OptimizerConfig optimizer;
    SolverConfig solver;
    std::string load_preset = "cantilever";  // cantilever | uniaxial
    double traction = 1.0e6;
    std::string output_dir = "fpf_out";
    std::uint64_t seed = 1;

    void validate() const;
};

/// Parameters of the cantilever study: 2 x 1 m, 0.02 m elements,
/// alpha = beta = 0.5, gamma = 0.01 m, r_f = 0.1 m, eta = 1 N/m.
RunConfig benchmark_preset();

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

/// Sets one dotted key from its text value; throws ConfigError on unknown
/// keys or malformed values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// All recognized keys, in serialization order.
std::vector<std::string> config_keys();

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

}  // namespace fpf
