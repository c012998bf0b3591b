#include "fpf/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fpf {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("grid: element counts must be >= 1, got " +
                                    std::to_string(nx) + "x" + std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0))
        throw std::invalid_argument("grid: side lengths must be positive");
}

Eigen::Vector2d Grid::node_coord(int n) const {
    const auto [i, j] = node_ij(n);
    return {i * hx(), j * hy()};
}

Eigen::Vector2d Grid::centroid(int e) const {
    const auto [i, j] = element_ij(e);
    return {(i + 0.5) * hx(), (j + 0.5) * hy()};
}

std::array<int, 4> Grid::element_nodes(int e) const {
    const auto [i, j] = element_ij(e);
    return {node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1), node_id(i, j + 1)};
}

std::array<int, 8> Grid::element_dofs(int e) const {
    const auto nodes = element_nodes(e);
    std::array<int, 8> dofs{};
    for (int a = 0; a < 4; ++a) {
        dofs[2 * a] = 2 * nodes[a];
        dofs[2 * a + 1] = 2 * nodes[a] + 1;
    }
    return dofs;
}

Grid build_grid(int nx, int ny, double lx, double ly) { return Grid(nx, ny, lx, ly); }

bool BoundaryConditions::has_body_force() const {
    return std::any_of(body_force.begin(), body_force.end(),
                       [](const Eigen::Vector2d& f) { return f.squaredNorm() > 0.0; });
}

BoundaryConditions cantilever_benchmark_bcs(const Grid& grid, double traction) {
    BoundaryConditions bcs;
    for (int j = 0; j <= grid.ny(); ++j) bcs.dirichlet_nodes.push_back(grid.node_id(0, j));

    const double cut = 0.9 * grid.lx();
    for (int i = 0; i < grid.nx(); ++i) {
        const double mid = (i + 0.5) * grid.hx();
        // small slack so a cut landing exactly on a midpoint is not lost to rounding
        if (mid >= cut - 1e-12 * grid.lx())
            bcs.neumann_edges.push_back({grid.node_id(i, 0), grid.node_id(i + 1, 0),
                                         Eigen::Vector2d(0.0, -traction)});
    }
    return bcs;
}

BoundaryConditions uniaxial_patch_bcs(const Grid& grid, double traction) {
    BoundaryConditions bcs;
    for (int j = 0; j <= grid.ny(); ++j) bcs.roller_dofs.push_back(2 * grid.node_id(0, j));
    bcs.roller_dofs.push_back(2 * grid.node_id(0, 0) + 1);
    for (int j = 0; j < grid.ny(); ++j)
        bcs.neumann_edges.push_back({grid.node_id(grid.nx(), j), grid.node_id(grid.nx(), j + 1),
                                     Eigen::Vector2d(traction, 0.0)});
    return bcs;
}

std::vector<int> constrained_dofs(const Grid& grid, const BoundaryConditions& bcs) {
    std::vector<int> dofs;
    dofs.reserve(2 * bcs.dirichlet_nodes.size() + bcs.roller_dofs.size());
    for (int n : bcs.dirichlet_nodes) {
        if (n < 0 || n >= grid.num_nodes()) throw std::out_of_range("dirichlet node out of range");
        dofs.push_back(2 * n);
        dofs.push_back(2 * n + 1);
    }
    for (int d : bcs.roller_dofs) {
        if (d < 0 || d >= grid.num_dofs()) throw std::out_of_range("roller dof out of range");
        dofs.push_back(d);
    }
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    return dofs;
}

Eigen::VectorXd traction_load(const Grid& grid, const BoundaryConditions& bcs) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.num_dofs());
    for (const auto& edge : bcs.neumann_edges) {
        const double len = (grid.node_coord(edge.node_b) - grid.node_coord(edge.node_a)).norm();
        // linear edge shape functions each integrate to len/2
        for (int n : {edge.node_a, edge.node_b}) {
            f[2 * n] += 0.5 * len * edge.traction.x();
            f[2 * n + 1] += 0.5 * len * edge.traction.y();
        }
    }
    return f;
}

Eigen::VectorXd body_load(const Grid& grid, const BoundaryConditions& bcs,
                          const Eigen::VectorXd& phi) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.num_dofs());
    if (bcs.body_force.empty()) return f;
    if (static_cast<int>(bcs.body_force.size()) != grid.num_elements())
        throw std::invalid_argument("body force must have one entry per element");
    const double quarter = 0.25 * grid.cell_area();
    for (int e = 0; e < grid.num_elements(); ++e) {
        const Eigen::Vector2d fe = phi[e] * bcs.body_force[e] * quarter;
        for (int n : grid.element_nodes(e)) {
            f[2 * n] += fe.x();
            f[2 * n + 1] += fe.y();
        }
    }
    return f;
}

}  // namespace fpf
