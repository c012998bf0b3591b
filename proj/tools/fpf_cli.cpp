// Command-line driver: run / sweep / verify / export / preset.
// Exit codes: 0 ok, 1 verification failure, 2 runtime or configuration error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fpf/app.hpp"
#include "fpf/config.hpp"
#include "fpf/export.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kRuntimeError = 2;

std::vector<std::string> split_values(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

void export_element_csv(const fpf::FieldDump& dump, const std::filesystem::path& path) {
    const fpf::Grid grid(dump.nx, dump.ny, dump.lx, dump.ly);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "element,i,j,x,y,phi,m,energy_density\n";
    for (int e = 0; e < grid.num_elements(); ++e) {
        const auto [i, j] = grid.element_ij(e);
        const auto c = grid.centroid(e);
        out << e << ',' << i << ',' << j << ',' << fpf::format_double(c.x()) << ','
            << fpf::format_double(c.y()) << ',' << fpf::format_double(dump.phi[e]) << ','
            << fpf::format_double(dump.blended[e]) << ','
            << fpf::format_double(dump.energy_density[e]) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Filtered/phase-field topology optimization of a 2D elastic body"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* run_cmd = app.add_subcommand("run", "optimize and write artifacts");
    run_cmd->add_option("config", config_path, "configuration file")->required();
    run_cmd->add_option("--out", out_dir, "override output.dir");

    std::string axis;
    std::string values;
    int workers = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "run one optimization per parameter value");
    sweep_cmd->add_option("config", config_path, "configuration file")->required();
    sweep_cmd->add_option("--axis", axis, "alpha | gamma | r_f | mesh")->required();
    sweep_cmd->add_option("--values", values, "comma-separated values (mesh: NXxNY)")->required();
    sweep_cmd->add_option("--workers", workers, "parallel points (default: FPF_WORKERS or cores)");
    sweep_cmd->add_option("--out", out_dir, "override output.dir");

    std::string check = "all";
    auto* verify_cmd = app.add_subcommand("verify", "run verification checks");
    verify_cmd->add_option("config", config_path, "configuration file")->required();
    verify_cmd->add_option("--check", check, "gradient | filter | patch | lagrangian | modica | all");

    std::string format;
    std::string input;
    std::string output;
    std::string field = "m";
    auto* export_cmd = app.add_subcommand("export", "convert a final_field.bin dump");
    export_cmd->add_option("--format", format, "pgm | vtk | csv")
        ->required()
        ->check(CLI::IsMember({"pgm", "vtk", "csv"}));
    export_cmd->add_option("--input", input, "field dump written by 'run'")->required();
    export_cmd->add_option("--output", output, "output file")->required();
    export_cmd->add_option("--field", field, "field for pgm: phi | m")
        ->check(CLI::IsMember({"phi", "m"}));

    auto* preset_cmd = app.add_subcommand("preset", "print the cantilever benchmark configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*preset_cmd) {
            std::cout << fpf::serialize_config(fpf::benchmark_preset());
            return kOk;
        }
        if (*export_cmd) {
            const fpf::FieldDump dump = fpf::read_field_dump(input);
            const fpf::Grid grid(dump.nx, dump.ny, dump.lx, dump.ly);
            if (format == "pgm")
                fpf::export_pgm(grid, field == "phi" ? dump.phi : dump.blended, output);
            else if (format == "vtk")
                fpf::export_vtk(grid, {{"phi", dump.phi}, {"m", dump.blended},
                                       {"strain_energy_density", dump.energy_density}},
                                output);
            else
                export_element_csv(dump, output);
            return kOk;
        }

        fpf::RunConfig cfg = fpf::load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        if (*run_cmd) {
            fpf::cmd_run(cfg, &std::cout);
            return kOk;
        }
        if (*sweep_cmd) {
            const auto points = fpf::cmd_sweep(cfg, fpf::parse_sweep_axis(axis), split_values(values),
                                               workers > 0 ? workers : fpf::workers_from_env(),
                                               &std::cout);
            for (const auto& p : points)
                if (!p.ok) return kRuntimeError;
            return kOk;
        }
        if (*verify_cmd) {
            bool all_passed = true;
            for (const auto& r : fpf::cmd_verify(cfg, check)) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  measured "
                          << r.measured << " (tol " << r.tolerance << ")  " << r.detail << '\n';
                all_passed = all_passed && r.passed;
            }
            return all_passed ? kOk : kVerifyFailed;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
