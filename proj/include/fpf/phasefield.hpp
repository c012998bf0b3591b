#pragma once

#include <Eigen/Core>

#include "fpf/mesh.hpp"

namespace fpf {

/// sqrt(2)/3, the constant multiplying the perimeter in P_0.
inline const double kPerimeterConstant = 0.47140452079103168;

struct PhaseFieldParams {
    double gamma = 0.01;  // interface width, m
    double eta = 1.0;     // weight, N/m
};

/// Double-well W(s) = s^2 (1-s)^2 and its derivative.
inline double double_well(double s) { return s * s * (1.0 - s) * (1.0 - s); }
inline double double_well_derivative(double s) { return 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }

/// Discrete P_gamma on element-constant fields:
///   eta * [ gamma/2 * sum_pairs (dphi/h)^2 * hx*hy + 1/gamma * sum_e W(phi_e) * hx*hy ]
/// where pairs are face-adjacent centroids and the boundary is zero-flux.
double eval_p_gamma(const Grid& grid, const Eigen::VectorXd& phi, const PhaseFieldParams& params);

/// Exact gradient of eval_p_gamma with respect to each phi_e.
Eigen::VectorXd grad_p_gamma(const Grid& grid, const Eigen::VectorXd& phi,
                             const PhaseFieldParams& params);

/// Zero-flux five-point Laplacian of an element field on the centroid grid.
Eigen::VectorXd discrete_laplacian(const Grid& grid, const Eigen::VectorXd& phi);

/// eta * sqrt(2)/3 * (length of interior edges separating 0 and 1 cells).
/// Throws if phi is not binary within 1e-6.
double eval_p0(const Grid& grid, const Eigen::VectorXd& phi, const PhaseFieldParams& params);

/// Grid-aligned perimeter of the {phi = 1} set inside the domain.
double interface_length(const Grid& grid, const Eigen::VectorXd& phi);

/// Logistic profile 1/(1+exp(-sqrt(2)(x-x0)/gamma)), the 1D minimizer of the
/// Modica-Mortola energy.
double optimal_profile(double x, double x0, double gamma);

}  // namespace fpf
