#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fpf/config.hpp"
#include "fpf/optimizer.hpp"
#include "fpf/sensitivity.hpp"

namespace fpf {

/// Elements with gray_lower < m < gray_upper count as gray.
inline constexpr double kGrayLower = 0.05;
inline constexpr double kGrayUpper = 0.95;

double gray_fraction(const Eigen::VectorXd& m);

BoundaryConditions make_bcs(const RunConfig& cfg, const Grid& grid);
TopologyProblem make_problem(const RunConfig& cfg);

struct RunSummary {
    std::filesystem::path output_dir;
    double initial_objective = 0.0;
    double objective = 0.0;
    double compliance = 0.0;
    double penalty = 0.0;
    double gray_fraction = 0.0;
    double descent_fraction = 0.0;  // accepted iterations that strictly decreased J
    Eigen::VectorXd phi;
    Eigen::VectorXd blended;
    std::vector<IterationRecord> history;
};

/// Optimizes from phi = volume_fraction and writes phi.pgm, m.pgm,
/// history.csv, final_field.bin and metadata.txt into cfg.output_dir.
RunSummary cmd_run(const RunConfig& cfg, std::ostream* log = nullptr);

enum class SweepAxis { alpha, gamma, filter_radius, mesh };
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);

/// Applies one sweep value to a copy of `base`. Mesh values read "NXxNY".
RunConfig apply_sweep_value(const RunConfig& base, SweepAxis axis, std::string_view value);

struct SweepPoint {
    std::string value;
    bool ok = false;
    std::string error;
    RunSummary summary;
};

/// Runs each value in its own subdirectory, up to `workers` at a time, and
/// writes sweep_<axis>.csv into base.output_dir. Failed points are recorded
/// and the sweep continues.
std::vector<SweepPoint> cmd_sweep(const RunConfig& base, SweepAxis axis,
                                  const std::vector<std::string>& values, int workers,
                                  std::ostream* log = nullptr);

/// Worker count from FPF_WORKERS, defaulting to the hardware concurrency.
int workers_from_env();

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Names accepted by cmd_verify besides "all".
const std::vector<std::string>& verify_check_names();

/// Runs one named check (gradient, filter, patch, lagrangian, modica) or all.
std::vector<CheckResult> cmd_verify(const RunConfig& cfg, std::string_view which);

// Individual checks, shared with the acceptance suite.
CheckResult verify_gradient(const RunConfig& cfg);
CheckResult verify_lagrangian(const RunConfig& cfg);
CheckResult verify_filter(const RunConfig& cfg);
CheckResult verify_patch(const RunConfig& cfg);
CheckResult verify_modica(const RunConfig& cfg);

/// Continuum value of P_gamma for the logistic profile centred in [0, lx] and
/// constant along y, by composite Simpson quadrature of its energy density.
double profile_energy_quadrature(double lx, double ly, double gamma, double eta, int panels);

}  // namespace fpf
