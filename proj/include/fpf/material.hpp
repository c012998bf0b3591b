#pragma once

#include <Eigen/Core>

namespace fpf {

/// SIMP interpolation C(m) = C0 + m^q (C1 - C0) with C0 = ersatz_ratio * C1,
/// which factors into scale(m) * C1.
struct MaterialModel {
    double youngs_modulus = 10.0e9;  // Pa
    double poisson_ratio = 0.25;
    double simp_exponent = 3.0;
    double ersatz_ratio = 1.0e-3;

    void validate() const;

    double scale(double m) const;
    double d_scale(double m) const;
    Eigen::Matrix3d tensor() const;
};

/// Plane-stress isotropic constitutive matrix in Voigt form (exx, eyy, gxy),
/// engineering shear strain.
Eigen::Matrix3d plane_stress_tensor(double youngs_modulus, double poisson_ratio);

}  // namespace fpf
