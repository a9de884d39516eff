#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matcone.hpp"

namespace viscone {

enum class Geometry { Box1D, Box2D, Radial };

// Scalar samples on a uniform tensor grid. Radial grids are 1D in r with ambient dimension n.
// Non-finite values mark masked nodes.
struct GridFn {
    Geometry geometry = Geometry::Box1D;
    int ambient = 1;
    std::array<double, 2> lo{0.0, 0.0}, hi{1.0, 1.0};
    std::array<int, 2> count{3, 1};
    Vec values;

    static GridFn box1d(double a, double b, int N) {
        GridFn g;
        g.geometry = Geometry::Box1D;
        g.lo = {a, 0.0};
        g.hi = {b, 0.0};
        g.count = {N, 1};
        g.values.assign(N, 0.0);
        g.validate();
        return g;
    }
    static GridFn box2d(double ax, double bx, double ay, double by, int Nx, int Ny) {
        GridFn g;
        g.geometry = Geometry::Box2D;
        g.ambient = 2;
        g.lo = {ax, ay};
        g.hi = {bx, by};
        g.count = {Nx, Ny};
        g.values.assign(static_cast<std::size_t>(Nx) * Ny, 0.0);
        g.validate();
        return g;
    }
    static GridFn radial(double r_lo, double r_hi, int N, int n) {
        GridFn g = box1d(r_lo, r_hi, N);
        g.geometry = Geometry::Radial;
        g.ambient = n;
        if (r_lo < 0) throw std::invalid_argument("radial grid needs r_lo >= 0");
        return g;
    }

    void validate() const {
        for (int a = 0; a < dim(); ++a) {
            if (count[a] < 3) throw std::invalid_argument("grid needs at least 3 nodes per axis");
            if (!(hi[a] > lo[a])) throw std::invalid_argument("grid needs positive spacing");
        }
        if (values.size() != size()) throw std::invalid_argument("grid value count mismatch");
    }

    int dim() const { return geometry == Geometry::Box2D ? 2 : 1; }
    std::size_t size() const { return static_cast<std::size_t>(count[0]) * (dim() == 2 ? count[1] : 1); }
    double h(int axis = 0) const { return (hi[axis] - lo[axis]) / (count[axis] - 1); }
    double coord(int axis, int i) const {
        if (i == count[axis] - 1) return hi[axis];
        return lo[axis] + (hi[axis] - lo[axis]) * i / (count[axis] - 1);
    }
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * count[0] + i; }
    int ix(std::size_t k) const { return static_cast<int>(k % count[0]); }
    int iy(std::size_t k) const { return static_cast<int>(k / count[0]); }
    Vec point(std::size_t k) const {
        if (dim() == 2) return {coord(0, ix(k)), coord(1, iy(k))};
        return {coord(0, ix(k))};
    }
    double sq_dist(std::size_t a, std::size_t b) const {
        double dx = coord(0, ix(a)) - coord(0, ix(b));
        if (dim() == 1) return dx * dx;
        double dy = coord(1, iy(a)) - coord(1, iy(b));
        return dx * dx + dy * dy;
    }
    bool masked(std::size_t k) const { return !std::isfinite(values[k]); }
    bool on_edge(std::size_t k) const {
        if (ix(k) == 0 || ix(k) == count[0] - 1) return true;
        return dim() == 2 && (iy(k) == 0 || iy(k) == count[1] - 1);
    }
    std::vector<std::size_t> neighbors(std::size_t k) const {
        std::vector<std::size_t> out;
        int i = ix(k), j = iy(k);
        if (i > 0) out.push_back(index(i - 1, j));
        if (i + 1 < count[0]) out.push_back(index(i + 1, j));
        if (dim() == 2) {
            if (j > 0) out.push_back(index(i, j - 1));
            if (j + 1 < count[1]) out.push_back(index(i, j + 1));
        }
        return out;
    }
    bool same_layout(const GridFn& o) const {
        return geometry == o.geometry && ambient == o.ambient && lo == o.lo && hi == o.hi && count == o.count;
    }
    GridFn like(double fill = 0.0) const {
        GridFn g = *this;
        std::fill(g.values.begin(), g.values.end(), fill);
        return g;
    }
    void sample(const std::function<double(const Vec&)>& f) {
        for (std::size_t k = 0; k < size(); ++k) values[k] = f(point(k));
    }
    double finite_max() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : values)
            if (std::isfinite(v)) m = std::max(m, v);
        return m;
    }
    double finite_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (double v : values)
            if (std::isfinite(v)) m = std::min(m, v);
        return m;
    }
    bool any_finite() const {
        for (double v : values)
            if (std::isfinite(v)) return true;
        return false;
    }
};

inline GridFn operator-(const GridFn& g) {
    GridFn out = g;
    for (double& v : out.values) v = -v;
    return out;
}

inline double sup_distance(const GridFn& a, const GridFn& b) {
    if (!a.same_layout(b)) throw std::invalid_argument("grids mismatched");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::isfinite(a.values[k]) && std::isfinite(b.values[k]))
            d = std::max(d, std::abs(a.values[k] - b.values[k]));
    return d;
}

// ---------------------------------------------------------------- CSV

inline std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline double parse_real(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ' && c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline void write_grid_csv(std::ostream& os, const GridFn& g) {
    if (g.geometry == Geometry::Radial) os << "# geometry=radial:" << g.ambient << "\n";
    os << (g.dim() == 2 ? "x,y,value\n" : "x,value\n");
    for (std::size_t k = 0; k < g.size(); ++k) {
        os << format_real(g.coord(0, g.ix(k)));
        if (g.dim() == 2) os << "," << format_real(g.coord(1, g.iy(k)));
        os << "," << format_real(g.values[k]) << "\n";
    }
}

// Rebuilds a uniform grid from row-major `x[,y],<columns...>` rows.
struct GridTable {
    GridFn grid;
    std::map<std::string, Vec> columns;
    std::map<std::string, std::string> header;  // `# key=value` and bare `key=value` lines
};

inline GridTable read_grid_table(std::istream& in) {
    GridTable t;
    std::string line;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string body = line;
        if (body[0] == '#') {
            body = body.substr(1);
            while (!body.empty() && body[0] == ' ') body.erase(0, 1);
            if (body.rfind("config:", 0) == 0 || body.rfind("paper_ref:", 0) == 0) continue;
        }
        auto eq = body.find('=');
        if (names.empty() && eq != std::string::npos && body.find(',') == std::string::npos) {
            t.header[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        if (line[0] == '#') continue;
        if (names.empty()) {
            names = split_csv(line);
            if (names.empty() || names[0] != "x") throw std::invalid_argument("grid CSV must start with column x");
            continue;
        }
        auto cells = split_csv(line);
        if (cells.size() != names.size()) throw std::invalid_argument("grid CSV row has wrong column count");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_real(c));
        rows.push_back(row);
    }
    if (rows.size() < 3) throw std::invalid_argument("grid CSV has too few rows");
    bool two_d = names.size() > 1 && names[1] == "y";
    std::size_t first_val = two_d ? 2 : 1;
    if (two_d) {
        std::vector<double> xs, ys;
        for (const auto& r : rows) {
            if (std::find(xs.begin(), xs.end(), r[0]) == xs.end()) xs.push_back(r[0]);
            if (std::find(ys.begin(), ys.end(), r[1]) == ys.end()) ys.push_back(r[1]);
        }
        if (xs.size() * ys.size() != rows.size()) throw std::invalid_argument("2D grid CSV is not a full tensor grid");
        t.grid = GridFn::box2d(xs.front(), xs.back(), ys.front(), ys.back(), static_cast<int>(xs.size()),
                               static_cast<int>(ys.size()));
    } else {
        t.grid = GridFn::box1d(rows.front()[0], rows.back()[0], static_cast<int>(rows.size()));
        auto geo = t.header.find("geometry");
        if (geo != t.header.end() && geo->second.rfind("radial:", 0) == 0)
            t.grid = GridFn::radial(rows.front()[0], rows.back()[0], static_cast<int>(rows.size()),
                                    std::stoi(geo->second.substr(7)));
    }
    double tolx = 1e-9 * (t.grid.hi[0] - t.grid.lo[0]);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (std::abs(rows[k][0] - t.grid.coord(0, t.grid.ix(k))) > tolx)
            throw std::invalid_argument("grid CSV nodes are not uniform and row-major");
    }
    for (std::size_t c = first_val; c < names.size(); ++c) {
        Vec col(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) col[k] = rows[k][c];
        t.columns[names[c]] = col;
    }
    if (t.columns.count("value")) t.grid.values = t.columns["value"];
    return t;
}

inline GridFn read_grid_csv(std::istream& in) {
    GridTable t = read_grid_table(in);
    if (!t.columns.count("value")) throw std::invalid_argument("grid CSV needs a value column");
    if (!t.grid.any_finite()) throw std::invalid_argument("grid has no finite values");
    return t.grid;
}

inline GridFn read_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return read_grid_csv(in);
}

}  // namespace viscone
