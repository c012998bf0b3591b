#include "fpf/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace fpf {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" +
                          std::string(text) + "'");
    return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("config: '" + std::string(key) + "' expects an integer, got '" +
                          std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("config: '" + std::string(key) + "' expects true/false, got '" +
                      std::string(text) + "'");
}

struct Entry {
    std::string key;
    std::string comment;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view key, std::string_view)> set;
};

Entry real(std::string key, std::string comment, double RunConfig::*field) {
    return {std::move(key), std::move(comment),
            [field](const RunConfig& c) { return format_double(c.*field); },
            [field](RunConfig& c, std::string_view k, std::string_view v) {
                c.*field = parse_double(k, v);
            }};
}

template <typename Owner>
Entry real(std::string key, std::string comment, Owner RunConfig::*owner, double Owner::*field) {
    return {std::move(key), std::move(comment),
            [owner, field](const RunConfig& c) { return format_double(c.*owner.*field); },
            [owner, field](RunConfig& c, std::string_view k, std::string_view v) {
                c.*owner.*field = parse_double(k, v);
            }};
}

template <typename Owner>
Entry integer(std::string key, std::string comment, Owner RunConfig::*owner, int Owner::*field) {
    return {std::move(key), std::move(comment),
            [owner, field](const RunConfig& c) { return std::to_string(c.*owner.*field); },
            [owner, field](RunConfig& c, std::string_view k, std::string_view v) {
                c.*owner.*field = parse_int<int>(k, v);
            }};
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        {"geometry.nx", "elements along x",
         [](const RunConfig& c) { return std::to_string(c.nx); },
         [](RunConfig& c, std::string_view k, std::string_view v) { c.nx = parse_int<int>(k, v); }},
        {"geometry.ny", "elements along y",
         [](const RunConfig& c) { return std::to_string(c.ny); },
         [](RunConfig& c, std::string_view k, std::string_view v) { c.ny = parse_int<int>(k, v); }},
        real("geometry.lx", "m", &RunConfig::lx),
        real("geometry.ly", "m", &RunConfig::ly),
        real("method.alpha", "weight of the unfiltered density", &RunConfig::method,
             &MethodParameters::alpha),
        real("method.beta", "weight of the filtered density, used when couple_beta = false",
             &RunConfig::method, &MethodParameters::beta),
        {"method.couple_beta", "beta = 1 - alpha",
         [](const RunConfig& c) { return std::string(c.method.couple_beta ? "true" : "false"); },
         [](RunConfig& c, std::string_view k, std::string_view v) {
             c.method.couple_beta = parse_bool(k, v);
         }},
        real("method.gamma", "phase-field width, m", &RunConfig::method, &MethodParameters::gamma),
        real("method.eta", "phase-field weight, N/m", &RunConfig::method, &MethodParameters::eta),
        real("method.filter_radius", "m", &RunConfig::method, &MethodParameters::filter_radius),
        real("method.volume_fraction", "target volume fraction", &RunConfig::method,
             &MethodParameters::volume_fraction),
        real("material.youngs_modulus", "Pa", &RunConfig::material,
             &MaterialModel::youngs_modulus),
        real("material.poisson_ratio", "", &RunConfig::material, &MaterialModel::poisson_ratio),
        real("material.simp_exponent", "", &RunConfig::material, &MaterialModel::simp_exponent),
        real("material.ersatz_ratio", "void/solid stiffness ratio", &RunConfig::material,
             &MaterialModel::ersatz_ratio),
        real("optimizer.tau0", "initial pseudo-time step", &RunConfig::optimizer,
             &OptimizerConfig::tau0),
        integer("optimizer.max_iters", "", &RunConfig::optimizer, &OptimizerConfig::max_iters),
        real("optimizer.tol_step", "max-norm change below which the run stops",
             &RunConfig::optimizer, &OptimizerConfig::tol_step),
        real("optimizer.backtrack_factor", "", &RunConfig::optimizer,
             &OptimizerConfig::backtrack_factor),
        integer("optimizer.max_halvings", "", &RunConfig::optimizer,
                &OptimizerConfig::max_halvings),
        real("optimizer.volume_tol", "relative to the domain area", &RunConfig::optimizer,
             &OptimizerConfig::volume_tol),
        real("solver.rel_tol", "CG relative residual", &RunConfig::solver, &SolverConfig::rel_tol),
        integer("solver.max_iters", "", &RunConfig::solver, &SolverConfig::max_iters),
        {"load.preset", "cantilever | uniaxial",
         [](const RunConfig& c) { return c.load_preset; },
         [](RunConfig& c, std::string_view, std::string_view v) { c.load_preset = v; }},
        real("load.traction", "Pa", &RunConfig::traction),
        {"output.dir", "",
         [](const RunConfig& c) { return c.output_dir; },
         [](RunConfig& c, std::string_view, std::string_view v) { c.output_dir = v; }},
        {"seed", "random seed for verification commands",
         [](const RunConfig& c) { return std::to_string(c.seed); },
         [](RunConfig& c, std::string_view k, std::string_view v) {
             c.seed = parse_int<std::uint64_t>(k, v);
         }},
    };
    return table;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void RunConfig::validate() const {
    try {
        Grid(nx, ny, lx, ly);
        method.validate();
        material.validate();
        optimizer.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(solver.rel_tol > 0.0) || solver.max_iters < 1)
        throw ConfigError("config: solver tolerance and iteration cap must be positive");
    if (load_preset != "cantilever" && load_preset != "uniaxial")
        throw ConfigError("config: unknown load preset '" + load_preset + "'");
}

RunConfig benchmark_preset() { return RunConfig{}; }

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
    for (const auto& entry : entries()) {
        if (entry.key == key) {
            entry.set(cfg, key, value);
            return;
        }
    }
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& entry : entries()) keys.push_back(entry.key);
    return keys;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        try {
            set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& entry : entries()) {
        out += entry.key;
        out += " = ";
        out += entry.get(cfg);
        if (!entry.comment.empty()) {
            out += "  # ";
            out += entry.comment;
        }
        out += '\n';
    }
    return out;
}

}  // namespace fpf
