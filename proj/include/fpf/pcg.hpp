#pragma once

#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace fpf {

struct SolverConfig {
    double rel_tol = 1.0e-8;
    int max_iters = 100000;
};

struct SolveReport {
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Raised when CG hits its iteration cap; carries the last relative residual.
class SolverError : public std::runtime_error {
public:
    SolverError(int iterations, double rel_residual);
    int iterations() const { return iterations_; }
    double rel_residual() const { return rel_residual_; }

private:
    int iterations_;
    double rel_residual_;
};

/// Jacobi-preconditioned conjugate gradients for an SPD system. `x` holds the
/// initial guess on entry and the solution on exit. Converged when
/// ||b - A x|| <= rel_tol * ||b||.
SolveReport pcg_solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                      const Eigen::VectorXd& b, Eigen::VectorXd& x, const SolverConfig& cfg);

}  // namespace fpf
