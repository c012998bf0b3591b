#include "fpf/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace fpf {

namespace {

constexpr std::array<double, 4> kNodeXi{-1.0, 1.0, 1.0, -1.0};
constexpr std::array<double, 4> kNodeEta{-1.0, -1.0, 1.0, 1.0};

// Gauss points listed in element-node order so point g sits nearest node g.
std::array<Eigen::Vector2d, kGaussPoints> gauss_points() {
    const double g = 1.0 / std::sqrt(3.0);
    return {Eigen::Vector2d(-g, -g), Eigen::Vector2d(g, -g), Eigen::Vector2d(g, g),
            Eigen::Vector2d(-g, g)};
}

constexpr double kClampSlack = 1e-12;

}  // namespace

void validate_density(const Grid& grid, const Eigen::VectorXd& phi) {
    if (phi.size() != grid.num_elements())
        throw std::invalid_argument("density field has " + std::to_string(phi.size()) +
                                    " entries, grid has " + std::to_string(grid.num_elements()) +
                                    " elements");
    for (Eigen::Index e = 0; e < phi.size(); ++e)
        if (!(phi[e] >= 0.0 && phi[e] <= 1.0))
            throw std::invalid_argument("density value outside [0,1] at element " +
                                        std::to_string(e));
}

std::uint64_t field_hash(const Eigen::VectorXd& phi) {
    // FNV-1a over the raw bytes
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        unsigned char bytes[sizeof(double)];
        const double v = phi[i];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

bool BlendedField::interior(int e) const {
    return raw[e] >= -kClampSlack && raw[e] <= 1.0 + kClampSlack;
}

BlendedField blend(const Eigen::VectorXd& phi, const FilterOperator& filter, double alpha,
                   double beta) {
    BlendedField m;
    m.alpha = alpha;
    m.beta = beta;
    m.raw = alpha * phi;
    if (beta != 0.0) m.raw += beta * filter.apply(phi);
    m.values = m.raw.cwiseMax(0.0).cwiseMin(1.0);
    return m;
}

StrainMatrix strain_displacement(double hx, double hy, double xi, double eta) {
    StrainMatrix b = StrainMatrix::Zero();
    for (int a = 0; a < 4; ++a) {
        const double dn_dx = 0.25 * kNodeXi[a] * (1.0 + kNodeEta[a] * eta) * 2.0 / hx;
        const double dn_dy = 0.25 * kNodeEta[a] * (1.0 + kNodeXi[a] * xi) * 2.0 / hy;
        b(0, 2 * a) = dn_dx;
        b(1, 2 * a + 1) = dn_dy;
        b(2, 2 * a) = dn_dy;
        b(2, 2 * a + 1) = dn_dx;
    }
    return b;
}

ElementMatrix reference_element_stiffness(double hx, double hy, const Eigen::Matrix3d& c) {
    const double det_j = 0.25 * hx * hy;
    ElementMatrix k = ElementMatrix::Zero();
    for (const auto& gp : gauss_points()) {
        const StrainMatrix b = strain_displacement(hx, hy, gp.x(), gp.y());
        k.noalias() += b.transpose() * c * b * det_j;
    }
    return 0.5 * (k + k.transpose());
}

ElementVector ElasticState::element_displacement(const Grid& grid, int e) const {
    ElementVector ue;
    const auto dofs = grid.element_dofs(e);
    for (int k = 0; k < 8; ++k) ue[k] = u[dofs[k]];
    return ue;
}

ElasticitySolver::ElasticitySolver(Grid grid, BoundaryConditions bcs, MaterialModel material)
    : grid_(std::move(grid)), bcs_(std::move(bcs)), material_(material) {
    material_.validate();
    c1_ = material_.tensor();
    k0_ = reference_element_stiffness(grid_.hx(), grid_.hy(), c1_);
    traction_ = traction_load(grid_, bcs_);

    const std::vector<int> fixed = constrained_dofs(grid_, bcs_);
    if (fixed.empty())
        throw std::invalid_argument("elasticity: no constrained dofs, system is singular");

    reduced_index_.assign(grid_.num_dofs(), -1);
    std::size_t next_fixed = 0;
    for (int d = 0; d < grid_.num_dofs(); ++d) {
        if (next_fixed < fixed.size() && fixed[next_fixed] == d) {
            ++next_fixed;
            continue;
        }
        reduced_index_[d] = static_cast<int>(free_dofs_.size());
        free_dofs_.push_back(d);
    }

    const int n_free = static_cast<int>(free_dofs_.size());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(grid_.num_elements()) * 64);
    for (int e = 0; e < grid_.num_elements(); ++e) {
        const auto dofs = grid_.element_dofs(e);
        for (int a = 0; a < 8; ++a) {
            const int ra = reduced_index_[dofs[a]];
            if (ra < 0) continue;
            for (int b = 0; b < 8; ++b) {
                const int rb = reduced_index_[dofs[b]];
                if (rb >= 0) triplets.emplace_back(ra, rb, 1.0);
            }
        }
    }
    pattern_.resize(n_free, n_free);
    pattern_.setFromTriplets(triplets.begin(), triplets.end());
    pattern_.makeCompressed();

    const int* outer = pattern_.outerIndexPtr();
    const int* inner = pattern_.innerIndexPtr();
    scatter_.resize(grid_.num_elements());
    for (int e = 0; e < grid_.num_elements(); ++e) {
        const auto dofs = grid_.element_dofs(e);
        auto& slots = scatter_[e];
        for (int a = 0; a < 8; ++a) {
            const int ra = reduced_index_[dofs[a]];
            for (int b = 0; b < 8; ++b) {
                const int rb = reduced_index_[dofs[b]];
                if (ra < 0 || rb < 0) {
                    slots[8 * a + b] = -1;
                    continue;
                }
                const int* pos = std::lower_bound(inner + outer[ra], inner + outer[ra + 1], rb);
                slots[8 * a + b] = static_cast<int>(pos - inner);
            }
        }
    }
}

Eigen::VectorXd ElasticitySolver::load(const Eigen::VectorXd& phi) const {
    if (bcs_.body_force.empty()) return traction_;
    return traction_ + body_load(grid_, bcs_, phi);
}

Eigen::SparseMatrix<double> ElasticitySolver::global_stiffness(const Eigen::VectorXd& m) const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(grid_.num_elements()) * 64);
    for (int e = 0; e < grid_.num_elements(); ++e) {
        const double s = material_.scale(m[e]);
        const auto dofs = grid_.element_dofs(e);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) triplets.emplace_back(dofs[a], dofs[b], s * k0_(a, b));
    }
    Eigen::SparseMatrix<double> k(grid_.num_dofs(), grid_.num_dofs());
    k.setFromTriplets(triplets.begin(), triplets.end());
    return k;
}

ElasticState ElasticitySolver::solve(const Eigen::VectorXd& phi, const BlendedField& m,
                                     const SolverConfig& cfg,
                                     const Eigen::VectorXd& warm_start) const {
    validate_density(grid_, phi);
    if (m.values.size() != grid_.num_elements())
        throw std::invalid_argument("blended field length does not match the grid");

    Eigen::SparseMatrix<double, Eigen::RowMajor> k = pattern_;
    double* values = k.valuePtr();
    std::fill(values, values + k.nonZeros(), 0.0);
    for (int e = 0; e < grid_.num_elements(); ++e) {
        const double s = material_.scale(m.values[e]);
        const auto& slots = scatter_[e];
        for (int ab = 0; ab < 64; ++ab)
            if (slots[ab] >= 0) values[slots[ab]] += s * k0_(ab / 8, ab % 8);
    }

    const Eigen::VectorXd f = load(phi);
    const auto n_free = static_cast<Eigen::Index>(free_dofs_.size());
    Eigen::VectorXd rhs(n_free);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_free);
    for (Eigen::Index r = 0; r < n_free; ++r) {
        rhs[r] = f[free_dofs_[r]];
        if (warm_start.size() == grid_.num_dofs()) x[r] = warm_start[free_dofs_[r]];
    }

    const SolveReport report = pcg_solve(k, rhs, x, cfg);

    ElasticState state;
    state.u = Eigen::VectorXd::Zero(grid_.num_dofs());
    for (Eigen::Index r = 0; r < n_free; ++r) state.u[free_dofs_[r]] = x[r];
    state.cg_iterations = report.iterations;
    state.phi_hash = field_hash(phi);
    state.compliance = f.dot(state.u);
    fill_fields(m.values, state);
    return state;
}

void ElasticitySolver::fill_fields(const Eigen::VectorXd& m, ElasticState& state) const {
    const auto gps = gauss_points();
    std::array<StrainMatrix, kGaussPoints> b;
    for (int g = 0; g < kGaussPoints; ++g)
        b[g] = strain_displacement(grid_.hx(), grid_.hy(), gps[g].x(), gps[g].y());

    const int ne = grid_.num_elements();
    state.strain.assign(static_cast<std::size_t>(ne) * kGaussPoints, Eigen::Vector3d::Zero());
    state.stress.assign(state.strain.size(), Eigen::Vector3d::Zero());
    for (int e = 0; e < ne; ++e) {
        const ElementVector ue = state.element_displacement(grid_, e);
        const Eigen::Matrix3d c = material_.scale(m[e]) * c1_;
        for (int g = 0; g < kGaussPoints; ++g) {
            const Eigen::Vector3d eps = b[g] * ue;
            state.strain[kGaussPoints * e + g] = eps;
            state.stress[kGaussPoints * e + g] = c * eps;
        }
    }
}

Eigen::VectorXd ElasticitySolver::element_energies(const Eigen::VectorXd& u) const {
    Eigen::VectorXd w(grid_.num_elements());
    for (int e = 0; e < grid_.num_elements(); ++e) {
        ElementVector ue;
        const auto dofs = grid_.element_dofs(e);
        for (int k = 0; k < 8; ++k) ue[k] = u[dofs[k]];
        w[e] = ue.dot(k0_ * ue);
    }
    return w;
}

double ElasticitySolver::elastic_energy(const Eigen::VectorXd& m, const Eigen::VectorXd& u) const {
    const Eigen::VectorXd w = element_energies(u);
    double energy = 0.0;
    for (int e = 0; e < grid_.num_elements(); ++e) energy += material_.scale(m[e]) * w[e];
    return 0.5 * energy;
}

double compliance(const ElasticitySolver& solver, const Eigen::VectorXd& phi,
                  const Eigen::VectorXd& u) {
    return solver.load(phi).dot(u);
}

}  // namespace fpf
