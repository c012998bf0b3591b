#include "fpf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpf {

namespace {

void check_length(const FilterOperator& k, Eigen::Index n) {
    if (n != k.size())
        throw std::invalid_argument("filter: vector length " + std::to_string(n) +
                                    " does not match element count " + std::to_string(k.size()));
}

}  // namespace

FilterOperator::FilterOperator(const Grid& grid, double radius)
    : radius_(radius), identity_(false), matrix_(grid.num_elements(), grid.num_elements()) {
    if (!(radius >= 0.0)) throw std::invalid_argument("filter radius must be non-negative");

    const int n = grid.num_elements();
    if (radius < std::min(grid.hx(), grid.hy())) {
        identity_ = true;
        matrix_.setIdentity();
        return;
    }

    const int reach_x = static_cast<int>(std::ceil(radius / grid.hx()));
    const int reach_y = static_cast<int>(std::ceil(radius / grid.hy()));
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * (2 * reach_x + 1) * (2 * reach_y + 1));

    std::vector<std::pair<int, double>> row;
    for (int e = 0; e < n; ++e) {
        const auto [i, j] = grid.element_ij(e);
        row.clear();
        double total = 0.0;
        for (int jj = std::max(0, j - reach_y); jj <= std::min(grid.ny() - 1, j + reach_y); ++jj) {
            for (int ii = std::max(0, i - reach_x); ii <= std::min(grid.nx() - 1, i + reach_x); ++ii) {
                const double dx = (ii - i) * grid.hx();
                const double dy = (jj - j) * grid.hy();
                const double w = 1.0 - std::sqrt(dx * dx + dy * dy) / radius;
                if (w <= 0.0) continue;
                row.emplace_back(grid.element_id(ii, jj), w);
                total += w;
            }
        }
        for (const auto& [col, w] : row) triplets.emplace_back(e, col, w / total);
    }
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();
}

Eigen::VectorXd FilterOperator::apply(const Eigen::VectorXd& phi) const {
    check_length(*this, phi.size());
    return matrix_ * phi;
}

Eigen::VectorXd FilterOperator::apply_adjoint(const Eigen::VectorXd& v) const {
    check_length(*this, v.size());
    return matrix_.transpose() * v;
}

FilterOperator build_filter(const Grid& grid, double radius) { return FilterOperator(grid, radius); }

}  // namespace fpf
