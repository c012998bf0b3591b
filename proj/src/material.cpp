#include "fpf/material.hpp"

#include <cmath>
#include <stdexcept>

namespace fpf {

Eigen::Matrix3d plane_stress_tensor(double youngs_modulus, double poisson_ratio) {
    if (!(youngs_modulus > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
        throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
    // lambda* I2 (x) I2 + 2 mu I restricted to symmetric strains
    const double lambda = youngs_modulus * poisson_ratio / (1.0 - poisson_ratio * poisson_ratio);
    const double two_mu = youngs_modulus / (1.0 + poisson_ratio);
    Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
    c(0, 0) = c(1, 1) = lambda + two_mu;
    c(0, 1) = c(1, 0) = lambda;
    c(2, 2) = 0.5 * two_mu;
    return c;
}

void MaterialModel::validate() const {
    plane_stress_tensor(youngs_modulus, poisson_ratio);
    if (!(simp_exponent >= 1.0)) throw std::invalid_argument("SIMP exponent must be >= 1");
    if (!(ersatz_ratio > 0.0 && ersatz_ratio < 1.0))
        throw std::invalid_argument("ersatz ratio must lie in (0, 1)");
}

double MaterialModel::scale(double m) const {
    return ersatz_ratio + std::pow(m, simp_exponent) * (1.0 - ersatz_ratio);
}

double MaterialModel::d_scale(double m) const {
    if (simp_exponent == 1.0) return 1.0 - ersatz_ratio;
    return simp_exponent * std::pow(m, simp_exponent - 1.0) * (1.0 - ersatz_ratio);
}

Eigen::Matrix3d MaterialModel::tensor() const {
    return plane_stress_tensor(youngs_modulus, poisson_ratio);
}

}  // namespace fpf
