// Acceptance suite: one PASS/FAIL (or WARN for soft gates) line per criterion.
// Oracles here are computed independently of the library wherever possible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "fpf/app.hpp"
#include "fpf/export.hpp"

using namespace fpf;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, warn };

struct Outcome {
    Verdict verdict = Verdict::fail;
    std::string summary;
};

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

Eigen::VectorXd random_field(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

Outcome verdict(bool ok, std::string summary) {
    return {ok ? Verdict::pass : Verdict::fail, std::move(summary)};
}

fs::path artifact_dir(const std::string& name) {
    const fs::path dir = fs::path("acceptance_artifacts") / name;
    fs::create_directories(dir);
    return dir;
}

// 1. Uniform uniaxial traction on a solid bar reproduces sigma = (t, 0, 0).
Outcome patch_test() {
    Stopwatch clock;
    const double t = 1.0e6;
    const Grid grid(10, 5, 2.0, 1.0);
    const ElasticitySolver solver(grid, uniaxial_patch_bcs(grid, t), MaterialModel{});
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.num_elements());
    BlendedField m;
    m.values = m.raw = ones;
    m.alpha = 1.0;
    const ElasticState s = solver.solve(ones, m, {1e-15, 10000});
    double err = 0.0;
    for (const auto& sigma : s.stress)
        err = std::max(err, (sigma - Eigen::Vector3d(t, 0, 0)).lpNorm<Eigen::Infinity>() / t);
    const double secs = clock.seconds();
    return verdict(err <= 1e-10 && secs < 1.0,
                   "max relative stress error " + fmt(err) + " (tol 1e-10), " + fmt(secs, 3) +
                       " s (limit 1 s)");
}

// 2. Solid cantilever against the Timoshenko beam with shear correction 5/6.
Outcome cantilever_deflection() {
    Stopwatch clock;
    const MaterialModel mat;
    const double lx = 2.0, ly = 1.0, t = 1.0e6;
    const Grid grid(200, 100, lx, ly);
    const ElasticitySolver solver(grid, cantilever_benchmark_bcs(grid, t), mat);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.num_elements());
    BlendedField m;
    m.values = m.raw = ones;
    m.alpha = 1.0;
    const ElasticState s = solver.solve(ones, m, {1e-10, 100000});

    double tip = 0.0;
    for (int j = 0; j <= grid.ny(); ++j) tip += s.u[2 * grid.node_id(grid.nx(), j) + 1];
    tip /= grid.ny() + 1;

    const double p = t * 0.1 * lx;  // load patch covers the last 10% of the bottom edge
    const double inertia = ly * ly * ly / 12.0;
    const double shear = mat.youngs_modulus / (2.0 * (1.0 + mat.poisson_ratio));
    const double oracle = p * lx * lx * lx / (3.0 * mat.youngs_modulus * inertia) +
                          p * lx / (5.0 / 6.0 * shear * ly);
    const double rel = std::abs(-tip - oracle) / oracle;
    const double secs = clock.seconds();
    return verdict(rel <= 0.10 && secs < 60.0,
                   "tip deflection " + fmt(-tip) + " m vs beam " + fmt(oracle) + " m, rel. error " +
                       fmt(rel, 3) + " (tol 0.10), " + fmt(secs, 3) + " s (limit 60 s)");
}

// 3. Gradient against central differences of J, and against twice the
// phi-variation of the Lagrangian. Run with the benchmark radius (which is
// below the 8x4 cell size, so K = I) and with a radius that couples cells.
Outcome gradient_exactness() {
    Stopwatch clock;
    double worst_fd = 0.0, worst_identity = 0.0;
    std::string detail;
    for (double radius : {0.1, 0.6}) {
        MethodParameters params;
        params.alpha = 0.5;
        params.couple_beta = false;
        params.beta = 0.5;
        params.gamma = 0.05;
        params.filter_radius = radius;
        const Grid grid(8, 4, 2.0, 1.0);
        const TopologyProblem problem(grid, cantilever_benchmark_bcs(grid), MaterialModel{}, params,
                                      {1e-12, 100000});
        std::mt19937_64 rng(2024);
        const Eigen::VectorXd phi = random_field(grid.num_elements(), 0.2, 0.8, rng);
        const Evaluation eval = objective(problem, phi);
        const Eigen::VectorXd g = gradient(problem, phi, eval);

        std::vector<int> ids(grid.num_elements());
        for (int e = 0; e < grid.num_elements(); ++e) ids[e] = e;
        std::shuffle(ids.begin(), ids.end(), rng);
        const double h = 1e-6;
        for (int k = 0; k < 20; ++k) {
            const int e = ids[k];
            Eigen::VectorXd plus = phi, minus = phi;
            plus[e] += h;
            minus[e] -= h;
            const double fd =
                (objective(problem, plus).objective - objective(problem, minus).objective) / (2 * h);
            worst_fd = std::max(worst_fd, std::abs(fd - g[e]) / std::max(std::abs(fd), std::abs(g[e])));
        }
        const LagrangianResiduals res =
            lagrangian_residuals(problem, phi, eval.state.u, eval.state.strain, eval.state.stress);
        worst_identity = std::max(worst_identity, (g - 2.0 * res.phi_variation).norm() / g.norm());
    }
    const double secs = clock.seconds();
    return verdict(worst_fd <= 1e-5 && worst_identity <= 1e-8 && secs < 30.0,
                   "max rel. FD error " + fmt(worst_fd) + " (tol 1e-5), |g - 2 dphiL|/|g| " +
                       fmt(worst_identity) + " (tol 1e-8), r_f in {0.1, 0.6}, " + fmt(secs, 3) +
                       " s (limit 30 s)");
}

// 4. Filter conservation, adjointness and range preservation on the benchmark grid.
Outcome filter_properties() {
    Stopwatch clock;
    const Grid grid(100, 50, 2.0, 1.0);
    const FilterOperator k(grid, 0.1);
    const int n = grid.num_elements();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const double conservation = (k.apply(ones) - ones).lpNorm<Eigen::Infinity>();
    const double void_out = k.apply(Eigen::VectorXd::Zero(n)).lpNorm<Eigen::Infinity>();

    std::mt19937_64 rng(7);
    double adjoint = 0.0;
    bool range = true;
    for (int t = 0; t < 100; ++t) {
        const Eigen::VectorXd phi = random_field(n, 0.0, 1.0, rng);
        const Eigen::VectorXd kphi = k.apply(phi);
        range = range && kphi.minCoeff() >= 0.0 && kphi.maxCoeff() <= 1.0;
        const Eigen::VectorXd v = random_field(n, -1.0, 1.0, rng);
        adjoint = std::max(adjoint, std::abs(kphi.dot(v) - phi.dot(k.apply_adjoint(v))) /
                                        (phi.norm() * v.norm()));
    }
    const double secs = clock.seconds();
    return verdict(conservation <= 1e-12 && void_out == 0.0 && adjoint <= 1e-12 && range && secs < 5.0,
                   "|K1 - 1| " + fmt(conservation) + ", |K0| " + fmt(void_out) + ", adjoint " +
                       fmt(adjoint) + " (tol 1e-12), range preserved on 100 fields: " +
                       (range ? "yes" : "no") + ", " + fmt(secs, 3) + " s (limit 5 s)");
}

// 5. P_gamma of the logistic profile against eta * sqrt(2)/3 * interface length.
Outcome perimeter_constant() {
    Stopwatch clock;
    const double lx = 2.0, ly = 1.0, eta = 1.0;
    std::vector<double> ratios;
    std::vector<double> gaps;
    double p0 = 0.0;
    for (double gamma : {0.08, 0.04, 0.02, 0.01}) {
        const int nx = static_cast<int>(std::ceil(20.0 * lx / gamma));
        const Grid grid(nx, 1, lx, ly);
        Eigen::VectorXd phi(nx), sharp(nx);
        for (int e = 0; e < nx; ++e) {
            const double x = grid.centroid(e).x();
            phi[e] = 1.0 / (1.0 + std::exp(-std::sqrt(2.0) * (x - 0.5 * lx) / gamma));
            sharp[e] = x > 0.5 * lx ? 1.0 : 0.0;
        }
        const double pg = eval_p_gamma(grid, phi, {gamma, eta});
        p0 = eval_p0(grid, sharp, {gamma, eta});
        ratios.push_back(pg / (eta * std::sqrt(2.0) / 3.0 * ly));
        gaps.push_back(std::abs(pg - p0) / p0);
    }
    bool trend = true;
    for (std::size_t k = 1; k < gaps.size(); ++k) trend = trend && gaps[k] <= gaps[k - 1];
    trend = trend && gaps.back() <= 0.02;
    const double final_err = std::abs(ratios.back() - 1.0);
    const double secs = clock.seconds();

    std::string detail = "P_gamma / (eta sqrt(2)/3 L) at gamma = 0.08..0.01:";
    for (double r : ratios) detail += " " + fmt(r, 5);
    detail += "; |P_gamma - P_0|/P_0:";
    for (double g : gaps) detail += " " + fmt(g, 4);
    detail += " (tol 0.02, trend " + std::string(trend ? "ok" : "not met") + "), P_0 = " +
              fmt(p0, 6) + ", " + fmt(secs, 3) + " s (limit 10 s)";
    return verdict(final_err <= 0.02 && trend && secs < 10.0, detail);
}

RunConfig benchmark() {
    RunConfig cfg = benchmark_preset();
    cfg.output_dir = artifact_dir("benchmark").string();
    return cfg;
}

struct BenchmarkRun {
    RunResult result;
    double seconds = 0.0;
    double worst_volume = 0.0;
    bool in_box = true;
    int max_iters = 0;
    double tol_step = 0.0;
};

const BenchmarkRun& benchmark_run() {
    static const BenchmarkRun run_once = [] {
        const RunConfig cfg = benchmark();
        const TopologyProblem problem = make_problem(cfg);
        const Grid& grid = problem.grid();
        BenchmarkRun b;
        b.max_iters = cfg.optimizer.max_iters;
        b.tol_step = cfg.optimizer.tol_step;
        Stopwatch clock;
        const Eigen::VectorXd initial =
            Eigen::VectorXd::Constant(grid.num_elements(), cfg.method.volume_fraction);
        b.result = run(problem, initial, cfg.optimizer,
                       [&](const IterationRecord&, const Eigen::VectorXd& phi) {
                           const double vol = phi.sum() * grid.hx() * grid.hy() / (cfg.lx * cfg.ly);
                           b.worst_volume = std::max(b.worst_volume, std::abs(vol - 0.4));
                           b.in_box = b.in_box && phi.minCoeff() >= 0.0 && phi.maxCoeff() <= 1.0;
                       });
        b.seconds = clock.seconds();
        export_pgm(grid, b.result.phi, fs::path(cfg.output_dir) / "phi.pgm");
        export_pgm(grid, b.result.final_eval.blended.values, fs::path(cfg.output_dir) / "m.pgm");
        export_csv(b.result.history, fs::path(cfg.output_dir) / "history.csv");
        return b;
    }();
    return run_once;
}

// 6. Volume and box constraints at every accepted iteration.
Outcome constraint_exactness() {
    const BenchmarkRun& b = benchmark_run();
    return verdict(b.worst_volume <= 1e-10 && b.in_box && !b.result.history.empty(),
                   "max |V(phi) - 0.4| " + fmt(b.worst_volume) + " (tol 1e-10) over " +
                       std::to_string(b.result.history.size()) + " iterations, phi in [0,1]: " +
                       (b.in_box ? "yes" : "no"));
}

// 7. Benchmark run: termination, descent share and objective reduction.
Outcome benchmark_criterion() {
    const BenchmarkRun& b = benchmark_run();
    const auto& h = b.result.history;
    const int descents = static_cast<int>(
        std::count_if(h.begin(), h.end(), [](const IterationRecord& r) { return r.descent; }));
    const double share = h.empty() ? 0.0 : static_cast<double>(descents) / h.size();
    const bool stopped = !h.empty() && h.back().max_change < b.tol_step &&
                         static_cast<int>(h.size()) <= b.max_iters;
    const double drop = 1.0 - b.result.final_eval.objective / b.result.initial_objective;
    return verdict(stopped && share >= 0.95 && drop >= 0.5 && b.seconds < 900.0,
                   "stopped by step rule after " + std::to_string(h.size()) + " of " +
                       std::to_string(b.max_iters) + " iterations: " + (stopped ? "yes" : "no") +
                       ", descent share " + fmt(share, 3) + " (min 0.95), J " +
                       fmt(b.result.initial_objective, 6) + " -> " +
                       fmt(b.result.final_eval.objective, 6) + " (drop " + fmt(drop, 3) +
                       ", min 0.5), " + fmt(b.seconds, 3) + " s (limit 900 s)");
}

double l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().sum() / static_cast<double>(a.size());
}

RunSummary variant(const std::string& name, double alpha, double gamma, double radius) {
    RunConfig cfg = benchmark_preset();
    cfg.method.alpha = alpha;
    cfg.method.gamma = gamma;
    cfg.method.filter_radius = radius;
    cfg.output_dir = artifact_dir(name).string();
    return cmd_run(cfg);
}

// 8. Soft gates on robustness: gray area at the largest filter radius, and
// sensitivity of the layout to gamma.
Outcome robustness() {
    Stopwatch clock;
    const RunSummary f = variant("rf0.14_alpha0", 0.0, 0.01, 0.14);
    const RunSummary fpf = variant("rf0.14_alpha0.5", 0.5, 0.01, 0.14);
    const bool gray_ok = fpf.gray_fraction <= f.gray_fraction;

    const RunSummary pf_lo = variant("gamma0.005_alpha1", 1.0, 0.005, 0.1);
    const RunSummary pf_hi = variant("gamma0.02_alpha1", 1.0, 0.02, 0.1);
    const RunSummary mix_lo = variant("gamma0.005_alpha0.5", 0.5, 0.005, 0.1);
    const RunSummary mix_hi = variant("gamma0.02_alpha0.5", 0.5, 0.02, 0.1);
    const double d_pf = l1_distance(pf_lo.blended, pf_hi.blended);
    const double d_mix = l1_distance(mix_lo.blended, mix_hi.blended);
    const bool gamma_ok = d_mix < d_pf;

    Outcome o;
    o.verdict = gray_ok && gamma_ok ? Verdict::pass : Verdict::warn;
    o.summary = "gray fraction at r_f = 0.14: F/PF " + fmt(fpf.gray_fraction, 3) + " vs F " +
                fmt(f.gray_fraction, 3) + (gray_ok ? " (ok)" : " (not met)") +
                "; L1(m) between gamma = 0.005 and 0.02: F/PF " + fmt(d_mix, 3) + " vs PF " +
                fmt(d_pf, 3) + (gamma_ok ? " (ok)" : " (not met)") +
                "; artifacts in acceptance_artifacts/, " + fmt(clock.seconds(), 3) + " s";
    return o;
}

// 9. Successive differences of the optimized objective shrink under refinement.
// gamma and r_f are held at values the coarsest mesh resolves (h = 0.05), and
// nx stays a multiple of 10 so the loaded patch is the same 0.2 m on every level.
Outcome mesh_refinement() {
    Stopwatch clock;
    const std::vector<std::pair<int, int>> meshes{{40, 20}, {80, 40}, {160, 80}};
    std::vector<double> j;
    for (auto [nx, ny] : meshes) {
        RunConfig cfg = benchmark_preset();
        cfg.nx = nx;
        cfg.ny = ny;
        cfg.method.gamma = 0.1;
        cfg.method.filter_radius = 0.2;
        cfg.optimizer.max_iters = 1000;
        cfg.output_dir = artifact_dir("mesh_" + std::to_string(nx) + "x" + std::to_string(ny)).string();
        j.push_back(cmd_run(cfg).objective);
    }
    const double d1 = std::abs(j[0] - j[1]), d2 = std::abs(j[1] - j[2]);
    return verdict(d2 < d1, "J on 40x20, 80x40, 160x80 (gamma 0.1, r_f 0.2): " + fmt(j[0], 6) +
                                ", " + fmt(j[1], 6) + ", " + fmt(j[2], 6) + "; |dJ| " + fmt(d1, 4) +
                                " -> " + fmt(d2, 4) + ", " + fmt(clock.seconds(), 3) + " s");
}

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria for the filtered/phase-field optimizer"};
    std::vector<int> selected;
    app.add_option("--criterion", selected, "criteria to run (default: all)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "patch test", patch_test},
        {2, "cantilever deflection", cantilever_deflection},
        {3, "gradient exactness", gradient_exactness},
        {4, "filter properties", filter_properties},
        {5, "perimeter constant", perimeter_constant},
        {6, "constraint exactness", constraint_exactness},
        {7, "benchmark run", benchmark_criterion},
        {8, "robustness (soft)", robustness},
        {9, "mesh refinement", mesh_refinement},
    };
    const std::set<int> want(selected.begin(), selected.end());

    int failures = 0;
    for (const auto& c : criteria) {
        if (!want.empty() && !want.count(c.id)) continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {Verdict::fail, std::string("error: ") + e.what()};
        }
        const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::warn ? "WARN" : "FAIL";
        if (o.verdict == Verdict::fail) ++failures;
        std::cout << tag << "  C" << c.id << " " << c.name << ": " << o.summary << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
