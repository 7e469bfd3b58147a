#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bimodal/coupling.hpp"

namespace bimodal {

namespace {

struct Row {
    Vec3 r;
    Vec3c v;
};

std::vector<double> unique_sorted(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

std::size_t locate(const std::vector<double>& axis, double x) {
    auto it = std::lower_bound(axis.begin(), axis.end(), x);
    return static_cast<std::size_t>(it - axis.begin());
}

}  // namespace

ModeField read_mode_field(std::istream& in, std::array<bool, 3> periodic) {
    std::string line;
    std::array<std::size_t, 3> dims{};
    bool have_header = false;
    std::vector<Row> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> dims[0] >> dims[1] >> dims[2]) || dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
                throw ValidationError("mode file: bad grid header on line " + std::to_string(line_no));
            }
            have_header = true;
            continue;
        }
        Row row;
        double re[3];
        double im[3];
        if (!(ls >> row.r[0] >> row.r[1] >> row.r[2] >> re[0] >> im[0] >> re[1] >> im[1] >> re[2] >> im[2])) {
            throw ValidationError("mode file: malformed row on line " + std::to_string(line_no));
        }
        for (std::size_t c = 0; c < 3; ++c) row.v[c] = cplx(re[c], im[c]);
        rows.push_back(row);
    }
    if (!have_header) throw ValidationError("mode file: missing grid header");

    const std::size_t expected = dims[0] * dims[1] * dims[2];
    if (rows.size() != expected) {
        throw ValidationError("mode file: expected " + std::to_string(expected) + " rows, found " +
                              std::to_string(rows.size()));
    }
    std::array<std::vector<double>, 3> axes;
    for (std::size_t a = 0; a < 3; ++a) {
        std::vector<double> xs;
        xs.reserve(rows.size());
        for (const auto& row : rows) xs.push_back(row.r[a]);
        axes[a] = unique_sorted(std::move(xs));
        if (axes[a].size() != dims[a]) {
            throw ValidationError("mode file: axis " + std::to_string(a) + " has " + std::to_string(axes[a].size()) +
                                  " distinct coordinates, header says " + std::to_string(dims[a]));
        }
    }

    ModeField field{Grid3(axes, periodic), std::vector<Vec3c>(expected), false};
    std::vector<bool> seen(expected, false);
    for (const auto& row : rows) {
        const std::size_t p = field.grid.index(locate(field.grid.axis(0), row.r[0]),
                                               locate(field.grid.axis(1), row.r[1]),
                                               locate(field.grid.axis(2), row.r[2]));
        if (seen[p]) throw ValidationError("mode file: duplicate grid point");
        seen[p] = true;
        field.values[p] = row.v;
    }
    return field;
}

ModeField read_mode_field(const std::string& path, std::array<bool, 3> periodic) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mode file: " + path);
    return read_mode_field(in, periodic);
}

void write_mode_field(std::ostream& out, const ModeField& field) {
    const Grid3& g = field.grid;
    out << g.extent(0) << ' ' << g.extent(1) << ' ' << g.extent(2) << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < g.extent(0); ++i)
        for (std::size_t j = 0; j < g.extent(1); ++j)
            for (std::size_t k = 0; k < g.extent(2); ++k) {
                const auto r = g.point(i, j, k);
                const auto& v = field.values[g.index(i, j, k)];
                out << r[0] << ' ' << r[1] << ' ' << r[2];
                for (const auto& c : v) out << ' ' << c.real() << ' ' << c.imag();
                out << '\n';
            }
}

}  // namespace bimodal
