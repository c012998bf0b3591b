#include "fpf/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "fpf/export.hpp"
#include "fpf/phasefield.hpp"

namespace fpf {

double gray_fraction(const Eigen::VectorXd& m) {
    if (m.size() == 0) return 0.0;
    const auto gray = (m.array() > kGrayLower && m.array() < kGrayUpper).count();
    return static_cast<double>(gray) / static_cast<double>(m.size());
}

BoundaryConditions make_bcs(const RunConfig& cfg, const Grid& grid) {
    if (cfg.load_preset == "cantilever") return cantilever_benchmark_bcs(grid, cfg.traction);
    if (cfg.load_preset == "uniaxial") return uniaxial_patch_bcs(grid, cfg.traction);
    throw ConfigError("unknown load preset '" + cfg.load_preset + "'");
}

TopologyProblem make_problem(const RunConfig& cfg) {
    cfg.validate();
    Grid grid(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    BoundaryConditions bcs = make_bcs(cfg, grid);
    return TopologyProblem(grid, std::move(bcs), cfg.material, cfg.method, cfg.solver);
}

namespace {

void write_metadata(const RunConfig& cfg, const TopologyProblem& problem, const RunSummary& s,
                    const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "# run configuration\n" << serialize_config(cfg);
    out << "\n# discretization choices\n"
        << "method.effective_beta = " << format_double(cfg.method.effective_beta()) << '\n'
        << "filter.kernel = linear_hat\n"
        << "filter.normalization = row\n"
        << "filter.identity = " << (problem.filter().is_identity() ? "true" : "false") << '\n'
        << "phasefield.gradient = centroid_two_point_zero_flux\n"
        << "perimeter.p0 = grid_aligned\n"
        << "material.blend_clamp = [0,1]\n"
        << "constraints.box = projection\n"
        << "constraints.volume = bisection\n"
        << "solver = jacobi_pcg\n"
        << "gray.lower = " << format_double(kGrayLower) << '\n'
        << "gray.upper = " << format_double(kGrayUpper) << '\n'
        << "postprocessing = none\n";
    out << "\n# results\n"
        << "result.initial_objective = " << format_double(s.initial_objective) << '\n'
        << "result.objective = " << format_double(s.objective) << '\n'
        << "result.compliance = " << format_double(s.compliance) << '\n'
        << "result.alphaP = " << format_double(s.penalty) << '\n'
        << "result.iterations = " << s.history.size() << '\n'
        << "result.descent_fraction = " << format_double(s.descent_fraction) << '\n'
        << "result.gray_fraction = " << format_double(s.gray_fraction) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

RunSummary cmd_run(const RunConfig& cfg, std::ostream* log) {
    const TopologyProblem problem = make_problem(cfg);
    const Grid& grid = problem.grid();

    const Eigen::VectorXd initial =
        Eigen::VectorXd::Constant(grid.num_elements(), cfg.method.volume_fraction);
    IterationCallback progress;
    if (log) {
        progress = [log](const IterationRecord& r, const Eigen::VectorXd&) {
            if (r.iter % 10 == 0)
                *log << "  iter " << r.iter << "  J = " << format_double(r.objective)
                     << "  tau = " << format_double(r.tau) << "  max_dphi = "
                     << format_double(r.max_change) << '\n';
        };
    }
    RunResult result = run(problem, initial, cfg.optimizer, progress);

    RunSummary s;
    s.output_dir = cfg.output_dir;
    s.initial_objective = result.initial_objective;
    s.objective = result.final_eval.objective;
    s.compliance = result.final_eval.compliance;
    s.penalty = result.final_eval.penalty;
    s.phi = result.phi;
    s.blended = result.final_eval.blended.values;
    s.gray_fraction = gray_fraction(s.blended);
    s.history = std::move(result.history);
    if (!s.history.empty()) {
        const auto descents = std::count_if(s.history.begin(), s.history.end(),
                                            [](const IterationRecord& r) { return r.descent; });
        s.descent_fraction = static_cast<double>(descents) / static_cast<double>(s.history.size());
    }

    const Eigen::VectorXd energies = problem.elasticity().element_energies(result.final_eval.state.u);
    Eigen::VectorXd density(grid.num_elements());
    for (int e = 0; e < grid.num_elements(); ++e)
        density[e] = 0.5 * problem.elasticity().material().scale(s.blended[e]) * energies[e] /
                     grid.cell_area();

    std::filesystem::create_directories(s.output_dir);
    export_pgm(grid, s.phi, s.output_dir / "phi.pgm");
    export_pgm(grid, s.blended, s.output_dir / "m.pgm");
    export_csv(s.history, s.output_dir / "history.csv");
    write_field_dump({grid.nx(), grid.ny(), grid.lx(), grid.ly(), s.phi, s.blended, density},
                     s.output_dir / "final_field.bin");
    write_metadata(cfg, problem, s, s.output_dir / "metadata.txt");

    if (log)
        *log << "done: " << s.history.size() << " iterations, J = " << format_double(s.objective)
             << " (initial " << format_double(s.initial_objective) << "), gray fraction "
             << format_double(s.gray_fraction) << '\n';
    return s;
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "alpha") return SweepAxis::alpha;
    if (name == "gamma") return SweepAxis::gamma;
    if (name == "r_f" || name == "filter_radius") return SweepAxis::filter_radius;
    if (name == "mesh") return SweepAxis::mesh;
    throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

std::string_view axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::alpha: return "alpha";
        case SweepAxis::gamma: return "gamma";
        case SweepAxis::filter_radius: return "r_f";
        case SweepAxis::mesh: return "mesh";
    }
    return "?";
}

RunConfig apply_sweep_value(const RunConfig& base, SweepAxis axis, std::string_view value) {
    RunConfig cfg = base;
    switch (axis) {
        case SweepAxis::alpha: set_config_value(cfg, "method.alpha", value); break;
        case SweepAxis::gamma: set_config_value(cfg, "method.gamma", value); break;
        case SweepAxis::filter_radius: set_config_value(cfg, "method.filter_radius", value); break;
        case SweepAxis::mesh: {
            const auto x = value.find('x');
            if (x == std::string_view::npos)
                throw ConfigError("mesh sweep values look like NXxNY, got '" + std::string(value) + "'");
            set_config_value(cfg, "geometry.nx", value.substr(0, x));
            set_config_value(cfg, "geometry.ny", value.substr(x + 1));
            break;
        }
    }
    cfg.validate();
    return cfg;
}

int workers_from_env() {
    if (const char* env = std::getenv("FPF_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepPoint> cmd_sweep(const RunConfig& base, SweepAxis axis,
                                  const std::vector<std::string>& values, int workers,
                                  std::ostream* log) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    std::vector<SweepPoint> points(values.size());
    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < values.size(); k = next++) {
            SweepPoint& p = points[k];
            p.value = values[k];
            try {
                RunConfig cfg = apply_sweep_value(base, axis, values[k]);
                cfg.output_dir = (std::filesystem::path(base.output_dir) /
                                  (std::string(axis_name(axis)) + "_" + std::to_string(k) + "_" + values[k]))
                                     .string();
                p.summary = cmd_run(cfg);
                p.ok = true;
            } catch (const std::exception& e) {
                p.error = e.what();
            }
            if (log) {
                std::lock_guard lock(log_mutex);
                *log << axis_name(axis) << " = " << values[k] << ": "
                     << (p.ok ? "J = " + format_double(p.summary.objective) : "FAILED: " + p.error)
                     << '\n';
            }
        }
    };
    const int n_threads = std::clamp(workers, 1, static_cast<int>(values.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::filesystem::create_directories(base.output_dir);
    const auto summary_path =
        std::filesystem::path(base.output_dir) / ("sweep_" + std::string(axis_name(axis)) + ".csv");
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + summary_path.string());
    out << "point,axis,value,status,J,compliance,alphaP,gray_fraction,iterations\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        out << k << ',' << axis_name(axis) << ',' << p.value << ',' << (p.ok ? "ok" : "failed");
        if (p.ok)
            out << ',' << format_double(p.summary.objective) << ','
                << format_double(p.summary.compliance) << ',' << format_double(p.summary.penalty)
                << ',' << format_double(p.summary.gray_fraction) << ',' << p.summary.history.size();
        else
            out << ",,,,,";
        out << '\n';
    }
    return points;
}

// ---------------------------------------------------------------------------
// verification

double profile_energy_quadrature(double lx, double ly, double gamma, double eta, int panels) {
    const double x0 = 0.5 * lx;
    const double rate = std::sqrt(2.0) / gamma;
    auto density = [&](double x) {
        const double p = optimal_profile(x, x0, gamma);
        const double dp = rate * p * (1.0 - p);
        return 0.5 * gamma * dp * dp + double_well(p) / gamma;
    };
    if (panels % 2) ++panels;
    const double h = lx / panels;
    double sum = density(0.0) + density(lx);
    for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * density(k * h);
    return eta * ly * sum * h / 3.0;
}

namespace {

Eigen::VectorXd random_field(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

RunConfig small_mesh(const RunConfig& cfg) {
    RunConfig small = cfg;
    small.nx = 8;
    small.ny = 4;
    return small;
}

}  // namespace

CheckResult verify_gradient(const RunConfig& cfg) {
    RunConfig small = small_mesh(cfg);
    small.solver.rel_tol = std::min(cfg.solver.rel_tol, 1e-12);
    const TopologyProblem problem = make_problem(small);
    std::mt19937_64 rng(cfg.seed);
    const Eigen::VectorXd phi = random_field(problem.grid().num_elements(), 0.2, 0.8, rng);
    const GradientCheck check = check_gradient_fd(problem, phi, 20, 1e-6, cfg.seed);

    CheckResult r{"gradient", false, check.max_rel_error, 1e-5, {}};
    r.passed = check.max_rel_error <= r.tolerance;
    r.detail = "max relative error vs central differences over " +
               std::to_string(check.elements.size()) + " elements on 8x4";
    return r;
}

CheckResult verify_lagrangian(const RunConfig& cfg) {
    const TopologyProblem problem = make_problem(small_mesh(cfg));
    std::mt19937_64 rng(cfg.seed + 1);
    const Eigen::VectorXd phi = random_field(problem.grid().num_elements(), 0.05, 0.95, rng);
    const Evaluation eval = objective(problem, phi);
    const Eigen::VectorXd g = gradient(problem, phi, eval);
    const LagrangianResiduals res =
        lagrangian_residuals(problem, phi, eval.state.u, eval.state.strain, eval.state.stress);
    const double identity = (g - 2.0 * res.phi_variation).norm() / g.norm();
    const double tol = cfg.solver.rel_tol;

    CheckResult r{"lagrangian", false, identity, 1e-8, {}};
    r.passed = identity <= 1e-8 && res.equilibrium <= tol && res.constitutive <= tol &&
               res.compatibility <= tol;
    std::ostringstream d;
    d << "|g - 2 dphiL|/|g| = " << identity << ", r_u = " << res.equilibrium
      << ", r_e = " << res.constitutive << ", r_sigma = " << res.compatibility
      << " (residual tol " << tol << ")";
    r.detail = d.str();
    return r;
}

CheckResult verify_filter(const RunConfig& cfg) {
    const Grid grid(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    const FilterOperator k(grid, cfg.method.filter_radius);
    const int n = grid.num_elements();

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const double row_sum_err = (k.apply(ones) - ones).lpNorm<Eigen::Infinity>();

    std::mt19937_64 rng(cfg.seed + 2);
    double adjoint_err = 0.0;
    bool range_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd phi = random_field(n, 0.0, 1.0, rng);
        const Eigen::VectorXd kphi = k.apply(phi);
        range_ok = range_ok && kphi.minCoeff() >= 0.0 && kphi.maxCoeff() <= 1.0;
        if (trial < 10) {
            const Eigen::VectorXd v = random_field(n, -1.0, 1.0, rng);
            const double lhs = kphi.dot(v);
            const double rhs = phi.dot(k.apply_adjoint(v));
            adjoint_err = std::max(adjoint_err, std::abs(lhs - rhs) /
                                                    std::max(1.0, std::abs(kphi.dot(v.cwiseAbs()))));
        }
    }
    CheckResult r{"filter", false, std::max(row_sum_err, adjoint_err), 1e-12, {}};
    r.passed = row_sum_err <= 1e-12 && adjoint_err <= 1e-12 && range_ok;
    std::ostringstream d;
    d << "|K1 - 1|_inf = " << row_sum_err << ", adjoint identity error = " << adjoint_err
      << ", range preserved on 100 fields: " << (range_ok ? "yes" : "no");
    r.detail = d.str();
    return r;
}

CheckResult verify_patch(const RunConfig& cfg) {
    const Grid grid(10, 5, cfg.lx, cfg.ly);
    const double t = cfg.traction;
    ElasticitySolver solver(grid, uniaxial_patch_bcs(grid, t), cfg.material);
    const Eigen::VectorXd phi = Eigen::VectorXd::Ones(grid.num_elements());
    BlendedField m;
    m.values = m.raw = phi;
    m.alpha = 1.0;
    const ElasticState state = solver.solve(phi, m, {1e-15, 100000});

    double err = 0.0;
    for (const auto& s : state.stress)
        err = std::max(err, (s - Eigen::Vector3d(t, 0.0, 0.0)).lpNorm<Eigen::Infinity>() / std::abs(t));
    CheckResult r{"patch", false, err, 1e-10, "max relative stress deviation from (t, 0, 0)"};
    r.passed = err <= r.tolerance;
    return r;
}

CheckResult verify_modica(const RunConfig& cfg) {
    const double gamma = cfg.method.gamma;
    const double eta = cfg.method.eta;
    const int nx = static_cast<int>(std::ceil(20.0 * cfg.lx / gamma));
    const Grid grid(nx, 1, cfg.lx, cfg.ly);
    Eigen::VectorXd phi(grid.num_elements());
    for (int e = 0; e < grid.num_elements(); ++e)
        phi[e] = optimal_profile(grid.centroid(e).x(), 0.5 * cfg.lx, gamma);

    const double discrete = eval_p_gamma(grid, phi, {gamma, eta});
    const double continuum = profile_energy_quadrature(cfg.lx, cfg.ly, gamma, eta, 200000);
    const double err = std::abs(discrete - continuum) / continuum;

    CheckResult r{"modica", false, err, 0.02, {}};
    r.passed = err <= r.tolerance;
    std::ostringstream d;
    d << "P_gamma = " << discrete << " vs quadrature " << continuum << " (gamma " << gamma
      << ", " << nx << " cells); per unit interface length / eta: " << discrete / (eta * cfg.ly)
      << ", P_0 constant sqrt(2)/3 = " << kPerimeterConstant;
    r.detail = d.str();
    return r;
}

const std::vector<std::string>& verify_check_names() {
    static const std::vector<std::string> names{"gradient", "filter", "patch", "lagrangian",
                                                "modica"};
    return names;
}

std::vector<CheckResult> cmd_verify(const RunConfig& cfg, std::string_view which) {
    std::vector<CheckResult> out;
    auto want = [&](std::string_view name) { return which == "all" || which == name; };
    if (want("gradient")) out.push_back(verify_gradient(cfg));
    if (want("filter")) out.push_back(verify_filter(cfg));
    if (want("patch")) out.push_back(verify_patch(cfg));
    if (want("lagrangian")) out.push_back(verify_lagrangian(cfg));
    if (want("modica")) out.push_back(verify_modica(cfg));
    if (out.empty()) throw ConfigError("unknown verification check '" + std::string(which) + "'");
    return out;
}

}  // namespace fpf
