#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fpf/filter.hpp"
#include "fpf/material.hpp"
#include "fpf/mesh.hpp"
#include "fpf/pcg.hpp"

namespace fpf {

using ElementMatrix = Eigen::Matrix<double, 8, 8>;
using ElementVector = Eigen::Matrix<double, 8, 1>;
using StrainMatrix = Eigen::Matrix<double, 3, 8>;

/// 2x2 Gauss points on the reference square, in element-node order.
inline constexpr int kGaussPoints = 4;

/// Throws unless phi has one entry per element, each in [0,1].
void validate_density(const Grid& grid, const Eigen::VectorXd& phi);

/// Order-dependent hash of a density vector, used to detect stale states.
std::uint64_t field_hash(const Eigen::VectorXd& phi);

/// m = alpha*phi + beta*K phi clamped to [0,1]. `raw` keeps the unclamped
/// blend so derivatives can tell where the clamp is active.
struct BlendedField {
    Eigen::VectorXd values;
    Eigen::VectorXd raw;
    double alpha = 0.0;
    double beta = 0.0;

    /// True where the clamp does not bind (up to rounding noise).
    bool interior(int e) const;
};

BlendedField blend(const Eigen::VectorXd& phi, const FilterOperator& filter, double alpha,
                   double beta);

/// Bilinear strain-displacement matrix (Voigt, engineering shear) for an
/// hx x hy rectangle at reference coordinates (xi, eta) in [-1,1]^2.
StrainMatrix strain_displacement(double hx, double hy, double xi, double eta);

/// Q4 stiffness of one hx x hy element for constitutive matrix c (unit thickness),
/// integrated with 2x2 Gauss quadrature.
ElementMatrix reference_element_stiffness(double hx, double hy, const Eigen::Matrix3d& c);

struct ElasticState {
    Eigen::VectorXd u;                    // 2 dofs per node, m
    std::vector<Eigen::Vector3d> strain;  // kGaussPoints per element
    std::vector<Eigen::Vector3d> stress;  // Pa
    double compliance = 0.0;              // J per unit thickness
    int cg_iterations = 0;
    std::uint64_t phi_hash = 0;

    ElementVector element_displacement(const Grid& grid, int e) const;
};

/// Discrete elasticity problem on a fixed grid. Precomputes the reference
/// element matrix and the sparsity pattern of the reduced (free-dof) system;
/// each solve then only rescales and scatters element contributions.
class ElasticitySolver {
public:
    ElasticitySolver(Grid grid, BoundaryConditions bcs, MaterialModel material);

    const Grid& grid() const { return grid_; }
    const BoundaryConditions& bcs() const { return bcs_; }
    const MaterialModel& material() const { return material_; }
    const ElementMatrix& reference_stiffness() const { return k0_; }
    const Eigen::Matrix3d& solid_tensor() const { return c1_; }
    const std::vector<int>& free_dofs() const { return free_dofs_; }

    /// Full load vector: edge tractions plus phi-weighted body force.
    Eigen::VectorXd load(const Eigen::VectorXd& phi) const;

    /// Full-size global stiffness for the blended field (constraints not applied).
    Eigen::SparseMatrix<double> global_stiffness(const Eigen::VectorXd& m) const;

    /// Solves for u = S(phi). `warm_start`, if non-empty, seeds CG.
    ElasticState solve(const Eigen::VectorXd& phi, const BlendedField& m,
                       const SolverConfig& cfg, const Eigen::VectorXd& warm_start = {}) const;

    /// Gauss-point strains and stresses of a given displacement.
    void fill_fields(const Eigen::VectorXd& m, ElasticState& state) const;

    /// u_e^T K0 u_e for every element (twice the solid-material element energy).
    Eigen::VectorXd element_energies(const Eigen::VectorXd& u) const;

    /// E(m,u) = 1/2 sum_e scale(m_e) u_e^T K0 u_e.
    double elastic_energy(const Eigen::VectorXd& m, const Eigen::VectorXd& u) const;

private:
    Grid grid_;
    BoundaryConditions bcs_;
    MaterialModel material_;
    Eigen::Matrix3d c1_;
    ElementMatrix k0_;
    Eigen::VectorXd traction_;
    std::vector<int> free_dofs_;
    std::vector<int> reduced_index_;  // full dof -> reduced index or -1
    Eigen::SparseMatrix<double, Eigen::RowMajor> pattern_;
    std::vector<std::array<int, 64>> scatter_;  // per element: value slot or -1
};

/// C(phi,u) = int phi f.u + int_GammaN g.u, i.e. <load(phi), u>.
double compliance(const ElasticitySolver& solver, const Eigen::VectorXd& phi,
                  const Eigen::VectorXd& u);

}  // namespace fpf
