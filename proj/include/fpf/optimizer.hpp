#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "fpf/mesh.hpp"
#include "fpf/sensitivity.hpp"

namespace fpf {

struct OptimizerConfig {
    double tau0 = 10.0;             // initial pseudo-time step (step is tau * g / |g|_inf)
    int max_iters = 300;
    double tol_step = 1.0e-4;       // stop when ||phi_{n+1} - phi_n||_inf < tol_step
    double backtrack_factor = 0.5;
    int max_halvings = 30;
    double volume_tol = 1.0e-12;    // relative to |Omega|

    void validate() const;
};

struct IterationRecord {
    int iter = 0;
    double objective = 0.0;
    double compliance = 0.0;
    double penalty = 0.0;  // alpha * P_gamma
    double volume_fraction = 0.0;
    double tau = 0.0;
    double max_change = 0.0;
    int cg_iterations = 0;
    bool descent = true;   // objective strictly decreased
};

/// Euclidean projection onto {0 <= phi <= 1, sum phi_e |e| = vbar |Omega|}:
/// clamp(psi + lambda, 0, 1) with lambda found by bisection.
Eigen::VectorXd project(const Eigen::VectorXd& psi, double volume_fraction, const Grid& grid,
                        double volume_tol = 1.0e-12);

double volume_fraction(const Grid& grid, const Eigen::VectorXd& phi);

struct StepResult {
    Eigen::VectorXd phi;
    Evaluation eval;
    IterationRecord record;
};

/// One projected gradient step with backtracking, starting from pseudo-time
/// step `tau`. `current` must be the evaluation of `phi`.
StepResult step(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                const Evaluation& current, double tau, const OptimizerConfig& cfg);

struct RunResult {
    Eigen::VectorXd phi;
    Evaluation final_eval;
    double initial_objective = 0.0;
    std::vector<IterationRecord> history;
};

/// Called after every accepted iteration with its record and the new field.
using IterationCallback = std::function<void(const IterationRecord&, const Eigen::VectorXd& phi)>;

/// Projected Allen-Cahn-type gradient flow from `initial` (already in the
/// admissible set) until the step criterion or max_iters.
RunResult run(const TopologyProblem& problem, const Eigen::VectorXd& initial,
              const OptimizerConfig& cfg, const IterationCallback& on_iteration = {});

}  // namespace fpf
