#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace fpf {

/// Structured grid of rectangular bilinear elements on [0,lx] x [0,ly].
///
/// Nodes and elements are numbered row-major with x running fastest:
/// node (i,j) -> j*(nx+1)+i, element (i,j) -> j*nx+i. Element nodes are
/// listed counter-clockwise starting from the lower-left corner.
class Grid {
public:
    Grid(int nx, int ny, double lx, double ly);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return lx_ / nx_; }
    double hy() const { return ly_ / ny_; }
    double cell_area() const { return hx() * hy(); }
    double area() const { return lx_ * ly_; }

    int num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
    int num_elements() const { return nx_ * ny_; }
    int num_dofs() const { return 2 * num_nodes(); }

    int node_id(int i, int j) const { return j * (nx_ + 1) + i; }
    int element_id(int i, int j) const { return j * nx_ + i; }
    std::array<int, 2> element_ij(int e) const { return {e % nx_, e / nx_}; }
    std::array<int, 2> node_ij(int n) const { return {n % (nx_ + 1), n / (nx_ + 1)}; }

    Eigen::Vector2d node_coord(int n) const;
    Eigen::Vector2d centroid(int e) const;

    std::array<int, 4> element_nodes(int e) const;
    /// Global dof ids (ux, uy per node) in element-node order.
    std::array<int, 8> element_dofs(int e) const;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
};

Grid build_grid(int nx, int ny, double lx, double ly);

/// A boundary edge between two adjacent boundary nodes carrying a constant traction.
struct TractionEdge {
    int node_a;
    int node_b;
    Eigen::Vector2d traction;  // Pa
};

struct BoundaryConditions {
    std::vector<int> dirichlet_nodes;      // both components clamped
    std::vector<int> roller_dofs;          // single clamped components (global dof ids)
    std::vector<TractionEdge> neumann_edges;
    std::vector<Eigen::Vector2d> body_force;  // per element, N/m^3; empty means zero

    bool has_body_force() const;
};

/// Clamped left side, downward 1 MPa traction on bottom edges whose midpoint
/// lies in the rightmost 10% of the span.
BoundaryConditions cantilever_benchmark_bcs(const Grid& grid, double traction = 1.0e6);

/// Bar under uniform tension on the right edge; rollers (ux = 0) on the left
/// edge and uy = 0 at the lower-left node.
BoundaryConditions uniaxial_patch_bcs(const Grid& grid, double traction);

/// Sorted, unique list of all constrained dofs.
std::vector<int> constrained_dofs(const Grid& grid, const BoundaryConditions& bcs);

/// Consistent nodal loads of the edge tractions (per unit thickness).
Eigen::VectorXd traction_load(const Grid& grid, const BoundaryConditions& bcs);

/// Consistent nodal loads of the body force scaled by the raw density phi.
Eigen::VectorXd body_load(const Grid& grid, const BoundaryConditions& bcs,
                          const Eigen::VectorXd& phi);

}  // namespace fpf
