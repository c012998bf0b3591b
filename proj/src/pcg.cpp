#include "fpf/pcg.hpp"

#include <cmath>
#include <string>

namespace fpf {

SolverError::SolverError(int iterations, double rel_residual)
    : std::runtime_error("CG did not converge in " + std::to_string(iterations) +
                         " iterations (relative residual " + std::to_string(rel_residual) + ")"),
      iterations_(iterations),
      rel_residual_(rel_residual) {}

SolveReport pcg_solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                      const Eigen::VectorXd& b, Eigen::VectorXd& x, const SolverConfig& cfg) {
    const Eigen::Index n = b.size();
    if (x.size() != n) x = Eigen::VectorXd::Zero(n);

    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        x.setZero();
        return {};
    }

    const Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
    Eigen::VectorXd r = b - a * x;
    const double threshold = cfg.rel_tol * b_norm;
    double r_norm = r.norm();
    if (r_norm <= threshold) return {0, r_norm / b_norm};

    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd q(n);
    double rz = r.dot(z);

    for (int it = 1; it <= cfg.max_iters; ++it) {
        q.noalias() = a * p;
        const double step = rz / p.dot(q);
        x += step * p;
        r -= step * q;
        r_norm = r.norm();
        if (r_norm <= threshold) return {it, r_norm / b_norm};
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    throw SolverError(cfg.max_iters, r_norm / b_norm);
}

}  // namespace fpf
