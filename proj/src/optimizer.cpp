#include "fpf/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fpf {

void OptimizerConfig::validate() const {
    if (!(tau0 > 0.0)) throw std::invalid_argument("optimizer: tau0 must be positive");
    if (max_iters < 0) throw std::invalid_argument("optimizer: max_iters must be >= 0");
    if (!(tol_step >= 0.0)) throw std::invalid_argument("optimizer: tol_step must be >= 0");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
        throw std::invalid_argument("optimizer: backtrack factor must lie in (0, 1)");
    if (max_halvings < 0) throw std::invalid_argument("optimizer: max_halvings must be >= 0");
    if (!(volume_tol > 0.0)) throw std::invalid_argument("optimizer: volume_tol must be positive");
}

double volume_fraction(const Grid& grid, const Eigen::VectorXd& phi) {
    return phi.sum() * grid.cell_area() / grid.area();
}

Eigen::VectorXd project(const Eigen::VectorXd& psi, double vbar, const Grid& grid,
                        double volume_tol) {
    if (!(vbar > 0.0 && vbar < 1.0))
        throw std::invalid_argument("projection: volume fraction must lie in (0, 1)");
    if (psi.size() != grid.num_elements())
        throw std::invalid_argument("projection: field length does not match the grid");

    const double target = vbar * grid.area();
    const double tol = volume_tol * grid.area();
    const double area = grid.cell_area();
    auto residual = [&](double lambda) {
        double v = 0.0;
        for (Eigen::Index e = 0; e < psi.size(); ++e) v += std::clamp(psi[e] + lambda, 0.0, 1.0);
        return v * area - target;
    };

    const bool in_box = (psi.array() >= 0.0).all() && (psi.array() <= 1.0).all();
    if (in_box && std::abs(residual(0.0)) <= tol) return psi;

    double lo = -1.0 - psi.maxCoeff();
    double hi = 1.0 - psi.minCoeff();
    assert(residual(lo) < 0.0 && residual(hi) > 0.0);
    double lambda = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        lambda = 0.5 * (lo + hi);
        const double r = residual(lambda);
        if (std::abs(r) <= tol) break;
        if (r < 0.0)
            lo = lambda;
        else
            hi = lambda;
        if (hi - lo <= 0.0) break;
    }
    return (psi.array() + lambda).cwiseMax(0.0).cwiseMin(1.0).matrix();
}

StepResult step(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                const Evaluation& current, double tau, const OptimizerConfig& cfg) {
    const Grid& grid = problem.grid();
    const double vbar = problem.params().volume_fraction;
    const Eigen::VectorXd g = gradient(problem, phi, current);
    const double g_max = g.lpNorm<Eigen::Infinity>();

    StepResult out;
    out.record.volume_fraction = volume_fraction(grid, phi);
    if (g_max == 0.0) {
        out.phi = phi;
        out.eval = current;
        out.record.objective = current.objective;
        out.record.compliance = current.compliance;
        out.record.penalty = current.penalty;
        out.record.tau = tau;
        out.record.descent = false;
        return out;
    }

    const Eigen::VectorXd direction = g / g_max;
    int cg_total = 0;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
        Eigen::VectorXd candidate = project(phi - tau * direction, vbar, grid, cfg.volume_tol);
        Evaluation eval = objective(problem, candidate, current.state.u);
        cg_total += eval.state.cg_iterations;
        const bool last = halving == cfg.max_halvings;
        if (eval.objective <= current.objective || last) {
            out.record.max_change = (candidate - phi).lpNorm<Eigen::Infinity>();
            out.record.descent = eval.objective < current.objective;
            out.record.volume_fraction = volume_fraction(grid, candidate);
            out.phi = std::move(candidate);
            out.eval = std::move(eval);
            break;
        }
        tau *= cfg.backtrack_factor;
    }
    out.record.objective = out.eval.objective;
    out.record.compliance = out.eval.compliance;
    out.record.penalty = out.eval.penalty;
    out.record.tau = tau;
    out.record.cg_iterations = cg_total;
    return out;
}

RunResult run(const TopologyProblem& problem, const Eigen::VectorXd& initial,
              const OptimizerConfig& cfg, const IterationCallback& on_iteration) {
    cfg.validate();
    validate_density(problem.grid(), initial);
    if (std::abs(volume_fraction(problem.grid(), initial) - problem.params().volume_fraction) > 1e-8)
        throw std::invalid_argument("optimizer: initial field violates the volume constraint");

    RunResult result;
    result.phi = initial;
    result.final_eval = objective(problem, initial);
    result.initial_objective = result.final_eval.objective;

    double tau = cfg.tau0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        StepResult s = step(problem, result.phi, result.final_eval, tau, cfg);
        s.record.iter = it;
        result.phi = std::move(s.phi);
        result.final_eval = std::move(s.eval);
        result.history.push_back(s.record);
        if (on_iteration) on_iteration(s.record, result.phi);
        if (s.record.max_change < cfg.tol_step) break;
        tau = std::min(cfg.tau0, s.record.tau / cfg.backtrack_factor);
    }
    return result;
}

}  // namespace fpf
