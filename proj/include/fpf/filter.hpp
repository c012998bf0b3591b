#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fpf/mesh.hpp"

namespace fpf {

/// Density filter K_h over element centroids with a linear hat kernel
/// w(d) = max(0, 1 - d/r_f), normalized per row so that K_h 1 = 1.
///
/// A radius below the smallest element size degenerates to the identity.
class FilterOperator {
public:
    using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    FilterOperator(const Grid& grid, double radius);

    double radius() const { return radius_; }
    int size() const { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    bool is_identity() const { return identity_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& phi) const;
    Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& v) const;

private:
    double radius_;
    bool identity_;
    Matrix matrix_;
};

FilterOperator build_filter(const Grid& grid, double radius);

}  // namespace fpf
