#include <gtest/gtest.h>

#include <random>

#include "fpf/sensitivity.hpp"

using namespace fpf;

namespace {

TopologyProblem small_problem(MethodParameters params, double tol = 1e-12, int nx = 8, int ny = 4) {
    const Grid g(nx, ny, 2.0, 1.0);
    return TopologyProblem(g, cantilever_benchmark_bcs(g), MaterialModel{}, params, {tol, 100000});
}

Eigen::VectorXd random_field(int n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

MethodParameters params_with(double alpha, double gamma = 0.05, double radius = 0.6) {
    MethodParameters p;
    p.alpha = alpha;
    p.gamma = gamma;
    p.filter_radius = radius;
    return p;
}

}  // namespace

TEST(Method, ParameterValidation) {
    MethodParameters p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_DOUBLE_EQ(p.effective_beta(), 0.5);
    p.alpha = 1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.couple_beta = false;
    p.alpha = 0.0;
    p.beta = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.volume_fraction = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.gamma = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.alpha = 0.0;  // gamma is irrelevant without the phase-field term
    EXPECT_NO_THROW(p.validate());
}

TEST(Objective, PureFilterHasNoPenalty) {
    const TopologyProblem problem = small_problem(params_with(0.0));
    const Eigen::VectorXd phi = random_field(32, 0.0, 1.0, 1);
    const Evaluation eval = objective(problem, phi);
    EXPECT_EQ(eval.penalty, 0.0);
    EXPECT_EQ(eval.objective, eval.compliance);
}

TEST(Objective, UniformFieldPenaltyArithmetic) {
    // alpha * W(0.4) * |Omega| / gamma on a uniform field
    MethodParameters p = params_with(0.3, 0.05);
    const TopologyProblem problem = small_problem(p);
    const Eigen::VectorXd phi = Eigen::VectorXd::Constant(32, 0.4);
    const Evaluation eval = objective(problem, phi);
    EXPECT_NEAR(eval.penalty, 0.3 * double_well(0.4) * 2.0 / 0.05, 1e-12);
    EXPECT_NEAR(eval.objective, eval.compliance + eval.penalty, 1e-9 * eval.objective);
    // the filter preserves constants, so m = phi
    EXPECT_LE((eval.blended.values - phi).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(Objective, BlendWithoutFilter) {
    MethodParameters p = params_with(1.0);
    const TopologyProblem problem = small_problem(p);
    const Eigen::VectorXd phi = random_field(32, 0.0, 1.0, 2);
    const BlendedField m = problem.blend(phi);
    EXPECT_EQ(m.beta, 0.0);
    EXPECT_EQ((m.values - phi).norm(), 0.0);
}

TEST(Objective, BlendIsClampedCombination) {
    MethodParameters p = params_with(0.7);
    p.couple_beta = false;
    p.beta = 0.6;  // alpha + beta > 1 lets m exceed 1
    const TopologyProblem problem = small_problem(p);
    const Eigen::VectorXd phi = Eigen::VectorXd::Ones(32);
    const BlendedField m = problem.blend(phi);
    EXPECT_NEAR(m.raw[0], 1.3, 1e-14);
    EXPECT_EQ(m.values.maxCoeff(), 1.0);
    EXPECT_FALSE(m.interior(0));
}

// (alpha, difference step). With alpha = 1 some entries are ~1e-4 of |J|,
// so the h = 1e-6 difference quotient is dominated by rounding in J.
class GradientFd : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(GradientFd, MatchesCentralDifferences) {
    const auto [alpha, h] = GetParam();
    const TopologyProblem problem = small_problem(params_with(alpha));
    const Eigen::VectorXd phi = random_field(32, 0.2, 0.8, 3);
    const GradientCheck check = check_gradient_fd(problem, phi, 20, h, 4);
    EXPECT_EQ(check.elements.size(), 20u);
    EXPECT_LE(check.max_rel_error, 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Alphas, GradientFd,
                         ::testing::Values(std::pair{0.0, 1e-6}, std::pair{0.5, 1e-6},
                                           std::pair{1.0, 1e-4}));

TEST(Gradient, DirectionalDerivativeWithBodyForce) {
    const Grid g(6, 3, 2.0, 1.0);
    BoundaryConditions bcs = cantilever_benchmark_bcs(g);
    bcs.body_force.assign(g.num_elements(), Eigen::Vector2d(2e4, -1e5));
    const TopologyProblem problem(g, bcs, MaterialModel{}, params_with(0.5), {1e-12, 100000});
    const Eigen::VectorXd phi = random_field(18, 0.2, 0.8, 5);
    const Eigen::VectorXd v = random_field(18, -1.0, 1.0, 6);
    const Eigen::VectorXd grad = gradient(problem, phi, objective(problem, phi));
    const double h = 1e-6;
    const double fd =
        (objective(problem, phi + h * v).objective - objective(problem, phi - h * v).objective) / (2 * h);
    EXPECT_NEAR(grad.dot(v) / fd, 1.0, 1e-5);
}

TEST(Gradient, ComplianceGradientIsNonPositiveWithoutBodyForce) {
    const TopologyProblem problem = small_problem(params_with(0.5), 1e-10, 16, 8);
    for (int t = 0; t < 5; ++t) {
        const Eigen::VectorXd phi = random_field(128, 0.0, 1.0, 10 + t);
        const Eigen::VectorXd g = compliance_gradient(problem, phi, objective(problem, phi));
        EXPECT_LE(g.maxCoeff(), 0.0);
    }
}

TEST(Gradient, RejectsStaleState) {
    const TopologyProblem problem = small_problem(params_with(0.5));
    const Eigen::VectorXd phi = random_field(32, 0.2, 0.8, 7);
    const Evaluation eval = objective(problem, phi);
    Eigen::VectorXd other = phi;
    other[3] += 0.01;
    EXPECT_THROW(gradient(problem, other, eval), std::invalid_argument);
}

TEST(Lagrangian, ConsistentStateHasSmallResiduals) {
    const TopologyProblem problem = small_problem(params_with(0.5), 1e-10);
    const Eigen::VectorXd phi = random_field(32, 0.05, 0.95, 8);
    const Evaluation eval = objective(problem, phi);
    const LagrangianResiduals r =
        lagrangian_residuals(problem, phi, eval.state.u, eval.state.strain, eval.state.stress);
    EXPECT_LE(r.equilibrium, 1e-9);
    EXPECT_LE(r.constitutive, 1e-14);
    EXPECT_LE(r.compatibility, 1e-14);
}

TEST(Lagrangian, DetectsPerturbedStress) {
    const TopologyProblem problem = small_problem(params_with(0.5), 1e-10);
    const Eigen::VectorXd phi = random_field(32, 0.05, 0.95, 9);
    const Evaluation eval = objective(problem, phi);
    auto stress = eval.state.stress;
    for (auto& s : stress) s[0] += 1.0e4;
    const LagrangianResiduals r = lagrangian_residuals(problem, phi, eval.state.u, eval.state.strain, stress);
    EXPECT_GT(r.constitutive, 1e-6);
    EXPECT_GT(r.equilibrium, 1e-6);
    EXPECT_LE(r.compatibility, 1e-14);
}

TEST(Lagrangian, ZeroStateWithoutLoadsIsAbsolute) {
    const Grid g(4, 2, 2.0, 1.0);
    BoundaryConditions bcs = cantilever_benchmark_bcs(g);
    bcs.neumann_edges.clear();
    const TopologyProblem problem(g, bcs, MaterialModel{}, params_with(0.5), {});
    const Eigen::VectorXd phi = Eigen::VectorXd::Constant(8, 0.5);
    const std::vector<Eigen::Vector3d> zeros(32, Eigen::Vector3d::Zero());
    const LagrangianResiduals r =
        lagrangian_residuals(problem, phi, Eigen::VectorXd::Zero(g.num_dofs()), zeros, zeros);
    EXPECT_EQ(r.equilibrium, 0.0);
    EXPECT_EQ(r.constitutive, 0.0);
    EXPECT_EQ(r.compatibility, 0.0);
}

TEST(Lagrangian, GradientIsTwicePhiVariation) {
    for (double alpha : {0.0, 0.5, 1.0}) {
        const TopologyProblem problem = small_problem(params_with(alpha), 1e-10);
        for (int t = 0; t < 10; ++t) {
            const Eigen::VectorXd phi = random_field(32, 0.05, 0.95, 100 + t);
            const Evaluation eval = objective(problem, phi);
            const Eigen::VectorXd g = gradient(problem, phi, eval);
            const LagrangianResiduals r =
                lagrangian_residuals(problem, phi, eval.state.u, eval.state.strain, eval.state.stress);
            EXPECT_LE((g - 2.0 * r.phi_variation).norm() / g.norm(), 1e-8) << "alpha=" << alpha;
        }
    }
}

TEST(Lagrangian, RejectsMismatchedSizes) {
    const TopologyProblem problem = small_problem(params_with(0.5));
    const Eigen::VectorXd phi = Eigen::VectorXd::Constant(32, 0.5);
    const std::vector<Eigen::Vector3d> few(3, Eigen::Vector3d::Zero());
    EXPECT_THROW(lagrangian_residuals(problem, phi, Eigen::VectorXd::Zero(90), few, few),
                 std::invalid_argument);
}
