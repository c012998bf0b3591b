#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "fpf/elasticity.hpp"
#include "fpf/filter.hpp"
#include "fpf/material.hpp"
#include "fpf/mesh.hpp"
#include "fpf/pcg.hpp"
#include "fpf/phasefield.hpp"

namespace fpf {

/// Weights of the combined filtered/phase-field method. By default beta
/// follows 1 - alpha; set couple_beta = false to use `beta` as given.
struct MethodParameters {
    double alpha = 0.5;
    double beta = 0.5;
    bool couple_beta = true;
    double gamma = 0.01;          // m
    double eta = 1.0;             // N/m
    double filter_radius = 0.1;   // m
    double volume_fraction = 0.4;

    void validate() const;
    double effective_beta() const { return couple_beta ? 1.0 - alpha : beta; }
    PhaseFieldParams phase_field() const { return {gamma, eta}; }
};

/// Everything needed to evaluate J(phi) = C(phi, S(phi)) + alpha P_gamma(phi).
class TopologyProblem {
public:
    TopologyProblem(Grid grid, BoundaryConditions bcs, MaterialModel material,
                    MethodParameters params, SolverConfig solver = {});

    const Grid& grid() const { return elasticity_.grid(); }
    const ElasticitySolver& elasticity() const { return elasticity_; }
    const FilterOperator& filter() const { return filter_; }
    const MethodParameters& params() const { return params_; }
    const SolverConfig& solver_config() const { return solver_; }
    void set_solver_config(const SolverConfig& cfg) { solver_ = cfg; }

    BlendedField blend(const Eigen::VectorXd& phi) const;
    /// alpha * P_gamma(phi); zero when alpha == 0.
    double penalty(const Eigen::VectorXd& phi) const;
    Eigen::VectorXd penalty_gradient(const Eigen::VectorXd& phi) const;

private:
    ElasticitySolver elasticity_;
    FilterOperator filter_;
    MethodParameters params_;
    SolverConfig solver_;
};

struct Evaluation {
    double objective = 0.0;
    double compliance = 0.0;
    double penalty = 0.0;  // alpha * P_gamma
    BlendedField blended;
    ElasticState state;
};

Evaluation objective(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                     const Eigen::VectorXd& warm_start = {});

/// Gradient of the compliance term only:
///   2 f_e . avg(u_e) |e| - [(alpha I + beta K^T) w]_e,  w_e = scale'(m_e) u_e^T K0 u_e.
/// The compliance problem is self-adjoint, so no adjoint solve is needed.
Eigen::VectorXd compliance_gradient(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                                    const Evaluation& eval);

/// Full gradient of J. Throws std::invalid_argument if `eval` was computed
/// for a different phi.
Eigen::VectorXd gradient(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                         const Evaluation& eval);

/// Residuals of the four-field Lagrangian
///   L = C(phi,u) + alpha/2 P_gamma - 1/2 int C(m) e:e + int sigma:(e - eps(u))
/// at Gauss points, plus the phi-variation field. Residual norms are relative
/// to the matching reference quantity (load, stress, strain), falling back to
/// absolute values when that reference is zero.
struct LagrangianResiduals {
    double equilibrium = 0.0;    // delta_u L: load - B^T sigma on free dofs
    double constitutive = 0.0;   // delta_e L: sigma - C(m) e
    double compatibility = 0.0;  // delta_sigma L: e - eps(u)
    Eigen::VectorXd phi_variation;  // delta_phi L per element
};

LagrangianResiduals lagrangian_residuals(const TopologyProblem& problem,
                                         const Eigen::VectorXd& phi, const Eigen::VectorXd& u,
                                         const std::vector<Eigen::Vector3d>& strain,
                                         const std::vector<Eigen::Vector3d>& stress);

struct GradientCheck {
    std::vector<int> elements;
    std::vector<double> analytic;
    std::vector<double> finite_difference;
    double max_rel_error = 0.0;
};

/// Compares gradient() against central differences of objective() on
/// `samples` random elements. The caller's solver tolerance is used as is.
GradientCheck check_gradient_fd(const TopologyProblem& problem, const Eigen::VectorXd& phi,
                                int samples, double step, std::uint64_t seed);

}  // namespace fpf
