#include "fpf/export.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fpf/config.hpp"

namespace fpf {

namespace {

static_assert(std::endian::native == std::endian::little, "field dumps assume little-endian hosts");

void require_finite(const Eigen::VectorXd& v, const std::string& what) {
    if (!v.allFinite()) throw std::invalid_argument("refusing to export non-finite values in " + what);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("truncated field dump");
    return value;
}

constexpr char kMagic[4] = {'F', 'P', 'F', '1'};

}  // namespace

void export_pgm(const Grid& grid, const Eigen::VectorXd& field, const std::filesystem::path& path) {
    if (field.size() != grid.num_elements())
        throw std::invalid_argument("pgm export: field length does not match the grid");
    require_finite(field, path.string());
    auto out = open_out(path, true);
    out << "P5\n" << grid.nx() << ' ' << grid.ny() << "\n255\n";
    std::vector<unsigned char> row(grid.nx());
    for (int r = 0; r < grid.ny(); ++r) {
        const int j = grid.ny() - 1 - r;
        for (int i = 0; i < grid.nx(); ++i) {
            const double v = std::clamp(field[grid.element_id(i, j)], 0.0, 1.0);
            row[i] = static_cast<unsigned char>(std::lround(255.0 * v));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void export_vtk(const Grid& grid,
                const std::vector<std::pair<std::string, Eigen::VectorXd>>& fields,
                const std::filesystem::path& path) {
    for (const auto& [name, values] : fields) {
        if (values.size() != grid.num_elements())
            throw std::invalid_argument("vtk export: field '" + name + "' has the wrong length");
        require_finite(values, name);
    }
    auto out = open_out(path, false);
    out << "# vtk DataFile Version 3.0\n"
        << "fpf density fields\n"
        << "ASCII\n"
        << "DATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << grid.nx() + 1 << ' ' << grid.ny() + 1 << " 1\n"
        << "ORIGIN 0 0 0\n"
        << "SPACING " << format_double(grid.hx()) << ' ' << format_double(grid.hy()) << " 1\n"
        << "CELL_DATA " << grid.num_elements() << '\n';
    for (const auto& [name, values] : fields) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (Eigen::Index e = 0; e < values.size(); ++e) out << format_double(values[e]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void export_csv(const std::vector<IterationRecord>& history, const std::filesystem::path& path) {
    auto out = open_out(path, true);
    out << "iter,J,compliance,alphaP,volfrac,tau,max_dphi,cg_iters\n";
    for (const auto& r : history) {
        for (double v : {r.objective, r.compliance, r.penalty, r.volume_fraction, r.tau, r.max_change})
            if (!std::isfinite(v)) throw std::invalid_argument("refusing to export non-finite history");
        out << r.iter << ',' << format_double(r.objective) << ',' << format_double(r.compliance)
            << ',' << format_double(r.penalty) << ',' << format_double(r.volume_fraction) << ','
            << format_double(r.tau) << ',' << format_double(r.max_change) << ','
            << r.cg_iterations << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_field_dump(const FieldDump& dump, const std::filesystem::path& path) {
    const Eigen::Index n = static_cast<Eigen::Index>(dump.nx) * dump.ny;
    for (const auto* v : {&dump.phi, &dump.blended, &dump.energy_density}) {
        if (v->size() != n) throw std::invalid_argument("field dump: inconsistent field length");
        require_finite(*v, path.string());
    }
    auto out = open_out(path, true);
    out.write(kMagic, 4);
    put<std::int32_t>(out, dump.nx);
    put<std::int32_t>(out, dump.ny);
    put<double>(out, dump.lx);
    put<double>(out, dump.ly);
    for (const auto* v : {&dump.phi, &dump.blended, &dump.energy_density})
        out.write(reinterpret_cast<const char*>(v->data()),
                  static_cast<std::streamsize>(n * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

FieldDump read_field_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path.string() + " is not a field dump");
    FieldDump dump;
    dump.nx = get<std::int32_t>(in);
    dump.ny = get<std::int32_t>(in);
    dump.lx = get<double>(in);
    dump.ly = get<double>(in);
    if (dump.nx < 1 || dump.ny < 1) throw std::runtime_error("field dump has an invalid grid");
    const Eigen::Index n = static_cast<Eigen::Index>(dump.nx) * dump.ny;
    for (auto* v : {&dump.phi, &dump.blended, &dump.energy_density}) {
        v->resize(n);
        in.read(reinterpret_cast<char*>(v->data()), static_cast<std::streamsize>(n * sizeof(double)));
        if (!in) throw std::runtime_error("truncated field dump");
    }
    return dump;
}

}  // namespace fpf
