#include "fpf/phasefield.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fpf {

namespace {

void check(const Grid& grid, const Eigen::VectorXd& phi, const PhaseFieldParams& params) {
    if (!(params.gamma > 0.0)) throw std::invalid_argument("P_gamma requires gamma > 0");
    if (phi.size() != grid.num_elements())
        throw std::invalid_argument("phase field length does not match the grid");
}

}  // namespace

double eval_p_gamma(const Grid& grid, const Eigen::VectorXd& phi, const PhaseFieldParams& params) {
    check(grid, phi, params);
    const double wx = grid.hy() / grid.hx();  // ((dphi/hx)^2 * hx*hy)
    const double wy = grid.hx() / grid.hy();
    double dirichlet = 0.0;
    double well = 0.0;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const double p = phi[grid.element_id(i, j)];
            if (i + 1 < grid.nx()) {
                const double d = phi[grid.element_id(i + 1, j)] - p;
                dirichlet += wx * d * d;
            }
            if (j + 1 < grid.ny()) {
                const double d = phi[grid.element_id(i, j + 1)] - p;
                dirichlet += wy * d * d;
            }
            well += double_well(p);
        }
    }
    return params.eta * (0.5 * params.gamma * dirichlet + well * grid.cell_area() / params.gamma);
}

Eigen::VectorXd discrete_laplacian(const Grid& grid, const Eigen::VectorXd& phi) {
    const double cx = 1.0 / (grid.hx() * grid.hx());
    const double cy = 1.0 / (grid.hy() * grid.hy());
    Eigen::VectorXd lap(grid.num_elements());
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const int e = grid.element_id(i, j);
            double acc = 0.0;
            if (i > 0) acc += cx * (phi[grid.element_id(i - 1, j)] - phi[e]);
            if (i + 1 < grid.nx()) acc += cx * (phi[grid.element_id(i + 1, j)] - phi[e]);
            if (j > 0) acc += cy * (phi[grid.element_id(i, j - 1)] - phi[e]);
            if (j + 1 < grid.ny()) acc += cy * (phi[grid.element_id(i, j + 1)] - phi[e]);
            lap[e] = acc;
        }
    }
    return lap;
}

Eigen::VectorXd grad_p_gamma(const Grid& grid, const Eigen::VectorXd& phi,
                             const PhaseFieldParams& params) {
    check(grid, phi, params);
    const Eigen::VectorXd lap = discrete_laplacian(grid, phi);
    const double area = grid.cell_area();
    Eigen::VectorXd g(grid.num_elements());
    for (int e = 0; e < grid.num_elements(); ++e)
        g[e] = params.eta * area *
               (-params.gamma * lap[e] + double_well_derivative(phi[e]) / params.gamma);
    return g;
}

double interface_length(const Grid& grid, const Eigen::VectorXd& phi) {
    if (phi.size() != grid.num_elements())
        throw std::invalid_argument("phase field length does not match the grid");
    for (Eigen::Index e = 0; e < phi.size(); ++e)
        if (std::abs(phi[e]) > 1e-6 && std::abs(phi[e] - 1.0) > 1e-6)
            throw std::invalid_argument("P_0 requires a binary field; element " +
                                        std::to_string(e) + " has value " +
                                        std::to_string(phi[e]));
    auto solid = [&](int i, int j) { return phi[grid.element_id(i, j)] > 0.5; };
    double length = 0.0;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            if (i + 1 < grid.nx() && solid(i, j) != solid(i + 1, j)) length += grid.hy();
            if (j + 1 < grid.ny() && solid(i, j) != solid(i, j + 1)) length += grid.hx();
        }
    }
    return length;
}

double eval_p0(const Grid& grid, const Eigen::VectorXd& phi, const PhaseFieldParams& params) {
    return params.eta * kPerimeterConstant * interface_length(grid, phi);
}

double optimal_profile(double x, double x0, double gamma) {
    return 1.0 / (1.0 + std::exp(-std::sqrt(2.0) * (x - x0) / gamma));
}

}  // namespace fpf
