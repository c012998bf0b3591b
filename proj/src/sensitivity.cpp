#include "fpf/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fpf {

namespace {

double relative(double abs_value, double reference) {
    return reference > 0.0 ? abs_value / reference : abs_value;
}

// Average nodal displacement of each element dotted with its body force,
// times the cell area: int_e f.u for bilinear u and constant f.
Eigen::VectorXd body_work(const ElasticitySolver& solver, const Eigen::VectorXd& u) {
    const Grid& grid = solver.grid();
    Eigen::VectorXd work = Eigen::VectorXd::Zero(grid.num_elements());
    const auto& body = solver.bcs().body_force;
    if (body.empty()) return work;
    for (int e = 0; e < grid.num_elements(); ++e) {
        Eigen::Vector2d mean = Eigen::Vector2d::Zero();
        for (int n : grid.element_nodes(e)) mean += Eigen::Vector2d(u[2 * n], u[2 * n + 1]);
        work[e] = body[e].dot(0.25 * mean) * grid.cell_area();
    }
    return work;
}

// (alpha I + beta K^T) w, skipping K entirely when beta == 0.
Eigen::VectorXd blend_adjoint(const TopologyProblem& problem, const Eigen::VectorXd& w) {
    const double alpha = problem.params().alpha;
    const double beta = problem.params().effective_beta();
    Eigen::VectorXd out = alpha * w;
    if (beta != 0.0) out += beta * problem.filter().apply_adjoint(w);
    return out;
}

}  // namespace

void MethodParameters::validate() const {
    const double b = effective_beta();
    if (!(alpha >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("alpha and beta must be >= 0");
    if (!(alpha + b > 0.0)) throw std::invalid_argument("alpha + beta must be positive");
    if (alpha > 0.0 && !(gamma > 0.0))
        throw std::invalid_argument("gamma must be positive when alpha > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (!(filter_radius >= 0.0)) throw std::invalid_argument("filter radius must be >= 0");
    if (!(volume_fraction > 0.0 && volume_fraction < 1.0))
        throw std::invalid_argument("volume fraction must lie in (0, 1)");
}

TopologyProblem::TopologyProblem(Grid grid, BoundaryConditions bcs, MaterialModel material,
                                 MethodParameters params, SolverConfig solver)
    : elasticity_(grid, std::move(bcs), material),
      filter_(grid, params.filter_radius),
      params_(params),
      solver_(solver) {
    params_.validate();
}

BlendedField TopologyProblem::blend(const Eigen::VectorXd& phi) const {
    return fpf::blend(phi, filter_, params_.alpha, params_.effective_beta());
}

double TopologyProblem::penalty(const Eigen::VectorXd& phi) const {
    if (params_.alpha == 0.0) return 0.0;
    return params_.alpha * eval_p_gamma(grid(), phi, params_.phase_field());
}

Eigen::VectorXd TopologyProblem::penalty_gradient(const Eigen::VectorXd& phi) const {
    if (params_.alpha == 0.0) return Eigen::VectorXd::Zero(grid().num_elements());
    return params_.alpha * grad_p_gamma(grid(), phi, params_.phase_field());
}

Evaluation objective(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                     const Eigen::VectorXd& warm_start) {
    Evaluation eval;
    eval.blended = problem.blend(phi);
    eval.state = problem.elasticity().solve(phi, eval.blended, problem.solver_config(), warm_start);
    eval.compliance = eval.state.compliance;
    eval.penalty = problem.penalty(phi);
    eval.objective = eval.compliance + eval.penalty;
    return eval;
}

Eigen::VectorXd compliance_gradient(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                                    const Evaluation& eval) {
    if (field_hash(phi) != eval.state.phi_hash)
        throw std::invalid_argument("gradient: elastic state was computed for a different field");

    const ElasticitySolver& solver = problem.elasticity();
    const MaterialModel& mat = solver.material();
    const BlendedField& m = eval.blended;

    Eigen::VectorXd w = solver.element_energies(eval.state.u);
    for (int e = 0; e < w.size(); ++e)
        w[e] = m.interior(e) ? mat.d_scale(m.values[e]) * w[e] : 0.0;

    Eigen::VectorXd g = -blend_adjoint(problem, w);
    if (solver.bcs().has_body_force()) g += 2.0 * body_work(solver, eval.state.u);
    return g;
}

Eigen::VectorXd gradient(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                         const Evaluation& eval) {
    Eigen::VectorXd g = compliance_gradient(problem, phi, eval);
    if (problem.params().alpha != 0.0) g += problem.penalty_gradient(phi);
    return g;
}

LagrangianResiduals lagrangian_residuals(const TopologyProblem& problem,
                                         const Eigen::VectorXd& phi, const Eigen::VectorXd& u,
                                         const std::vector<Eigen::Vector3d>& strain,
                                         const std::vector<Eigen::Vector3d>& stress) {
    const ElasticitySolver& solver = problem.elasticity();
    const Grid& grid = solver.grid();
    const MaterialModel& mat = solver.material();
    const int ne = grid.num_elements();
    const auto n_gp = static_cast<std::size_t>(ne) * kGaussPoints;
    if (strain.size() != n_gp || stress.size() != n_gp || u.size() != grid.num_dofs())
        throw std::invalid_argument("lagrangian_residuals: field sizes do not match the grid");

    const BlendedField m = problem.blend(phi);
    const Eigen::Matrix3d& c1 = solver.solid_tensor();
    const double g = 1.0 / std::sqrt(3.0);
    const std::array<Eigen::Vector2d, kGaussPoints> gps{
        Eigen::Vector2d(-g, -g), Eigen::Vector2d(g, -g), Eigen::Vector2d(g, g),
        Eigen::Vector2d(-g, g)};
    std::array<StrainMatrix, kGaussPoints> b;
    for (int k = 0; k < kGaussPoints; ++k)
        b[k] = strain_displacement(grid.hx(), grid.hy(), gps[k].x(), gps[k].y());
    const double det_j = 0.25 * grid.cell_area();

    double constitutive = 0.0, stress_norm = 0.0;
    double compatibility = 0.0, strain_norm = 0.0;
    Eigen::VectorXd internal = Eigen::VectorXd::Zero(grid.num_dofs());
    Eigen::VectorXd energy(ne);  // int_e C1 e:e

    for (int e = 0; e < ne; ++e) {
        const auto dofs = grid.element_dofs(e);
        ElementVector ue;
        for (int k = 0; k < 8; ++k) ue[k] = u[dofs[k]];
        const double s = mat.scale(m.values[e]);
        ElementVector fe = ElementVector::Zero();
        double en = 0.0;
        for (int k = 0; k < kGaussPoints; ++k) {
            const Eigen::Vector3d& eps = strain[kGaussPoints * e + k];
            const Eigen::Vector3d& sig = stress[kGaussPoints * e + k];
            constitutive += (sig - s * (c1 * eps)).squaredNorm();
            stress_norm += sig.squaredNorm();
            compatibility += (eps - b[k] * ue).squaredNorm();
            strain_norm += eps.squaredNorm();
            fe.noalias() += b[k].transpose() * sig * det_j;
            en += eps.dot(c1 * eps) * det_j;
        }
        for (int k = 0; k < 8; ++k) internal[dofs[k]] += fe[k];
        energy[e] = en;
    }

    const Eigen::VectorXd load = solver.load(phi);
    double eq = 0.0, load_norm = 0.0;
    for (int d : solver.free_dofs()) {
        const double r = load[d] - internal[d];
        eq += r * r;
        load_norm += load[d] * load[d];
    }

    LagrangianResiduals res;
    res.equilibrium = relative(std::sqrt(eq), std::sqrt(load_norm));
    res.constitutive = relative(std::sqrt(constitutive), std::sqrt(stress_norm));
    res.compatibility = relative(std::sqrt(compatibility), std::sqrt(strain_norm));

    Eigen::VectorXd w(ne);
    for (int e = 0; e < ne; ++e) w[e] = m.interior(e) ? mat.d_scale(m.values[e]) * energy[e] : 0.0;
    res.phi_variation = -0.5 * blend_adjoint(problem, w);
    if (solver.bcs().has_body_force()) res.phi_variation += body_work(solver, u);
    if (problem.params().alpha != 0.0) res.phi_variation += 0.5 * problem.penalty_gradient(phi);
    return res;
}

GradientCheck check_gradient_fd(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                                int samples, double step, std::uint64_t seed) {
    const int ne = problem.grid().num_elements();
    const Evaluation base = objective(problem, phi);
    const Eigen::VectorXd g = gradient(problem, phi, base);

    std::vector<int> ids(ne);
    for (int e = 0; e < ne; ++e) ids[e] = e;
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(samples, ne));

    GradientCheck out;
    for (int e : ids) {
        Eigen::VectorXd plus = phi, minus = phi;
        plus[e] += step;
        minus[e] -= step;
        const double jp = objective(problem, plus, base.state.u).objective;
        const double jm = objective(problem, minus, base.state.u).objective;
        const double fd = (jp - jm) / (2.0 * step);
        out.elements.push_back(e);
        out.analytic.push_back(g[e]);
        out.finite_difference.push_back(fd);
        const double scale = std::max(std::abs(fd), std::abs(g[e]));
        const double err = scale > 0.0 ? std::abs(fd - g[e]) / scale : 0.0;
        out.max_rel_error = std::max(out.max_rel_error, err);
    }
    return out;
}

}  // namespace fpf
