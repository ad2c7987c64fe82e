#include "alphalab/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "binary path format assumes a little-endian host");

namespace alphalab {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        cells.push_back(first == std::string::npos ? std::string()
                                                   : cell.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, int data_row, const std::string& column) {
    if (cell.empty())
        throw std::invalid_argument("csv: empty cell at row " + std::to_string(data_row) +
                                    ", column " + column);
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || !std::isfinite(value))
        throw std::invalid_argument("csv: non-numeric cell '" + cell + "' at row " +
                                    std::to_string(data_row) + ", column " + column);
    return value;
}

// Smallest dyadic level putting every time on the grid j * 2^-level;
// -1 when none fits.
int detect_dyadic_level(const std::vector<double>& times) {
    for (int level = 0; level <= 30; ++level) {
        const double scale = std::ldexp(1.0, level);
        bool ok = true;
        for (double t : times) {
            const double idx = t * scale;
            if (std::fabs(idx - std::round(idx)) > 1e-9 * std::max(1.0, std::fabs(idx))) {
                ok = false;
                break;
            }
        }
        if (ok) return level == 0 ? 1 : level;
    }
    return -1;
}

} // namespace

ReturnsPanel ingest_csv_stream(std::istream& in, const std::string& path_label) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("csv: " + path_label + " is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "t" || header[1] != "y")
        throw std::invalid_argument("csv: malformed header in " + path_label +
                                    " (expected t,y,x1..xm,z1..zp)");

    std::size_t pos = 2;
    std::vector<std::string> x_names, z_names;
    while (pos < header.size() && header[pos] == "x" + std::to_string(x_names.size() + 1))
        x_names.push_back(header[pos++]);
    while (pos < header.size() && header[pos] == "z" + std::to_string(z_names.size() + 1))
        z_names.push_back(header[pos++]);
    if (pos != header.size() || x_names.empty() || z_names.empty())
        throw std::invalid_argument("csv: malformed header in " + path_label +
                                    " (columns after y must be x1..xm then z1..zp)");

    std::vector<double> times, ys;
    std::vector<std::vector<double>> xs, zs;
    int data_row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++data_row;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("csv: row " + std::to_string(data_row) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(header.size()));
        times.push_back(parse_cell(cells[0], data_row, "t"));
        ys.push_back(parse_cell(cells[1], data_row, "y"));
        std::vector<double> xrow, zrow;
        for (std::size_t c = 0; c < x_names.size(); ++c)
            xrow.push_back(parse_cell(cells[2 + c], data_row, x_names[c]));
        for (std::size_t c = 0; c < z_names.size(); ++c)
            zrow.push_back(parse_cell(cells[2 + x_names.size() + c], data_row, z_names[c]));
        xs.push_back(std::move(xrow));
        zs.push_back(std::move(zrow));
    }
    if (times.empty()) throw std::invalid_argument("csv: " + path_label + " has no data rows");

    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("csv: rows not sorted by time at row " +
                                        std::to_string(i + 1) + " of " + path_label);

    ReturnsPanel panel;
    const auto J = static_cast<Eigen::Index>(times.size());
    panel.y.resize(J);
    panel.X.resize(J, static_cast<Eigen::Index>(x_names.size()));
    panel.Z.resize(J, static_cast<Eigen::Index>(z_names.size()));
    panel.time.resize(J);
    for (Eigen::Index i = 0; i < J; ++i) {
        panel.time(i) = times[static_cast<std::size_t>(i)];
        panel.y(i) = ys[static_cast<std::size_t>(i)];
        for (Eigen::Index c = 0; c < panel.X.cols(); ++c)
            panel.X(i, c) = xs[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        for (Eigen::Index c = 0; c < panel.Z.cols(); ++c)
            panel.Z(i, c) = zs[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
    panel.benchmark_names = x_names;
    panel.hedge_names = z_names;

    const int level = detect_dyadic_level(times);
    if (level > 0) {
        panel.level = level;
        panel.grid_reindexed = false;
    } else {
        // Off-grid times: keep the ordering, reindex onto j * 2^-n.
        int n = 1;
        while ((1 << n) < static_cast<int>(times.size()) + 1) ++n;
        panel.level = n;
        const double step = std::ldexp(1.0, -n);
        for (Eigen::Index i = 0; i < J; ++i) panel.time(i) = static_cast<double>(i + 1) * step;
        panel.grid_reindexed = true;
    }

    validate_panel(panel);
    return panel;
}

ReturnsPanel ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("csv: cannot open " + path);
    return ingest_csv_stream(in, path);
}

void write_paths_csv(const PathEnsemble& ensemble, std::ostream& out) {
    out << std::setprecision(17);
    for (Eigen::Index r = 0; r < ensemble.trials(); ++r) {
        for (Eigen::Index c = 0; c < ensemble.points(); ++c) {
            if (c) out << ',';
            out << ensemble.paths(r, c);
        }
        out << '\n';
    }
}

void write_paths_csv_file(const PathEnsemble& ensemble, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_paths_csv(ensemble, out);
}

std::uint32_t scheme_id(const std::string& scheme) {
    if (scheme == "bm") return 1;
    if (scheme == "bridge") return 2;
    if (scheme == "const-drift") return 3;
    if (scheme == "subordinated") return 4;
    if (scheme == "strategy") return 5;
    if (scheme == "excursion") return 6;
    return 0;
}

std::string scheme_from_id(std::uint32_t id) {
    switch (id) {
        case 1: return "bm";
        case 2: return "bridge";
        case 3: return "const-drift";
        case 4: return "subordinated";
        case 5: return "strategy";
        case 6: return "excursion";
        default: return "unknown";
    }
}

namespace {

template <typename T>
void write_raw(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const std::string& what) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
        throw std::runtime_error("binary paths: truncated file while reading " + what);
    return value;
}

constexpr char kMagic[8] = {'A', 'L', 'P', 'H', 'P', 'A', 'T', 'H'};

} // namespace

void write_paths_binary(const PathEnsemble& ensemble, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    write_raw<std::uint32_t>(out, 1u);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(ensemble.level));
    write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(ensemble.trials()));
    write_raw<std::uint64_t>(out, ensemble.seed);
    write_raw<std::uint32_t>(out, scheme_id(ensemble.scheme));
    write_raw<std::uint32_t>(out, ensemble.pinned_final_step ? 1u : 0u);
    write_raw<double>(out, ensemble.initial_value);
    for (Eigen::Index r = 0; r < ensemble.trials(); ++r)
        for (Eigen::Index c = 0; c < ensemble.points(); ++c)
            write_raw<double>(out, ensemble.paths(r, c));
    if (!out) throw std::runtime_error("binary paths: write to " + path + " failed");
}

PathEnsemble read_paths_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("binary paths: bad magic in " + path);
    const auto version = read_raw<std::uint32_t>(in, "version");
    if (version != 1)
        throw std::runtime_error("binary paths: unsupported version " + std::to_string(version));
    const auto level = read_raw<std::uint32_t>(in, "level");
    const auto trials = read_raw<std::uint64_t>(in, "trials");
    const auto seed = read_raw<std::uint64_t>(in, "seed");
    const auto scheme = read_raw<std::uint32_t>(in, "scheme");
    const auto flags = read_raw<std::uint32_t>(in, "flags");
    const auto initial = read_raw<double>(in, "initial value");

    PathEnsemble e;
    e.level = static_cast<int>(level);
    e.dt = std::ldexp(1.0, -e.level);
    e.seed = seed;
    e.scheme = scheme_from_id(scheme);
    e.pinned_final_step = (flags & 1u) != 0;
    e.initial_value = initial;
    const Eigen::Index points = (Eigen::Index{1} << level) + 1;
    e.grid.resize(points);
    for (Eigen::Index i = 0; i < points; ++i)
        e.grid(i) = static_cast<double>(i) / static_cast<double>(points - 1);
    e.paths.resize(static_cast<Eigen::Index>(trials), points);
    for (Eigen::Index r = 0; r < e.paths.rows(); ++r)
        for (Eigen::Index c = 0; c < points; ++c)
            e.paths(r, c) = read_raw<double>(in, "path value");
    return e;
}

void write_excursions_csv(const ExcursionEnsemble& ensemble, std::ostream& out) {
    out << std::setprecision(17);
    for (const auto& path : ensemble.paths) {
        out << path.tau_minus << ',' << path.tau_plus;
        for (Eigen::Index i = 0; i < path.values.size(); ++i) out << ',' << path.values(i);
        out << '\n';
    }
}

} // namespace alphalab
