#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fpf/mesh.hpp"
#include "fpf/optimizer.hpp"

namespace fpf {

/// Binary P5 grayscale, width nx, height ny, top image row = grid row ny-1,
/// pixel = round(255 * clamp(value, 0, 1)).
void export_pgm(const Grid& grid, const Eigen::VectorXd& field, const std::filesystem::path& path);

/// Legacy ASCII STRUCTURED_POINTS file with one CELL_DATA scalar per field.
void export_vtk(const Grid& grid,
                const std::vector<std::pair<std::string, Eigen::VectorXd>>& fields,
                const std::filesystem::path& path);

/// Header `iter,J,compliance,alphaP,volfrac,tau,max_dphi,cg_iters`, one row
/// per accepted iteration.
void export_csv(const std::vector<IterationRecord>& history, const std::filesystem::path& path);

/// Final-field dump: little-endian "FPF1" magic, int32 nx, ny, float64 lx, ly,
/// then nx*ny float64 values each of phi, m and strain-energy density.
struct FieldDump {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    Eigen::VectorXd phi;
    Eigen::VectorXd blended;
    Eigen::VectorXd energy_density;
};

void write_field_dump(const FieldDump& dump, const std::filesystem::path& path);
FieldDump read_field_dump(const std::filesystem::path& path);

}  // namespace fpf
