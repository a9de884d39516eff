#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"

namespace viscone {

enum class Side { Upper, Lower };

inline const char* side_name(Side s) { return s == Side::Upper ? "upper" : "lower"; }

struct EnvelopeResult {
    GridFn env;
    std::vector<std::size_t> argpt;
    double eps = 0.0;
    Side side = Side::Upper;
};

namespace detail {

// min_y { w(y) + |y − x|²/ε } over unmasked y; ties keep x itself, then the lowest index.
inline EnvelopeResult lower_envelope_bruteforce(const GridFn& w, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("envelope needs eps > 0");
    if (!w.any_finite()) throw std::invalid_argument("envelope of an all-masked grid");
    EnvelopeResult R;
    R.env = w;
    R.eps = eps;
    R.side = Side::Lower;
    R.argpt.assign(w.size(), 0);
    std::vector<std::size_t> live;
    for (std::size_t y = 0; y < w.size(); ++y)
        if (!w.masked(y)) live.push_back(y);
    for (std::size_t x = 0; x < w.size(); ++x) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = live.front();
        if (!w.masked(x)) {
            best = w.values[x];
            arg = x;
        }
        for (std::size_t y : live) {
            double val = w.values[y] + w.sq_dist(x, y) / eps;
            if (val < best) {
                best = val;
                arg = y;
            }
        }
        R.env.values[x] = best;
        R.argpt[x] = arg;
    }
    return R;
}

}  // namespace detail

inline EnvelopeResult lower_envelope(const GridFn& w, double eps) { return detail::lower_envelope_bruteforce(w, eps); }

// v^ε = −(−v)_ε, so the two sides are exact mirror images.
inline EnvelopeResult upper_envelope(const GridFn& v, double eps) {
    EnvelopeResult R = detail::lower_envelope_bruteforce(-v, eps);
    R.env = -R.env;
    R.side = Side::Upper;
    return R;
}

inline EnvelopeResult envelope(const GridFn& src, double eps, Side side) {
    return side == Side::Upper ? upper_envelope(src, eps) : lower_envelope(src, eps);
}

namespace detail {

// Lower envelope of parabolas f_q + (x − x_q)²/ε along one line (distance-transform pass).
inline void parabola_pass(const Vec& xs, const Vec& f, double eps, Vec& out, std::vector<std::size_t>& arg) {
    const std::size_t N = xs.size();
    std::vector<std::size_t> hull;
    Vec starts;
    auto key = [&](std::size_t q) { return f[q] + xs[q] * xs[q] / eps; };
    auto cross = [&](std::size_t a, std::size_t b) { return (key(b) - key(a)) / (2.0 * (xs[b] - xs[a]) / eps); };
    for (std::size_t q = 0; q < N; ++q) {
        if (!std::isfinite(f[q])) continue;
        while (!hull.empty()) {
            double s = cross(hull.back(), q);
            if (s <= starts.back()) {
                hull.pop_back();
                starts.pop_back();
            } else {
                break;
            }
        }
        starts.push_back(hull.empty() ? -std::numeric_limits<double>::infinity() : cross(hull.back(), q));
        hull.push_back(q);
    }
    out.assign(N, std::numeric_limits<double>::infinity());
    arg.assign(N, 0);
    if (hull.empty()) return;
    std::size_t k = 0;
    for (std::size_t i = 0; i < N; ++i) {
        while (k + 1 < hull.size() && starts[k + 1] < xs[i]) ++k;
        std::size_t lo = k > 0 ? k - 1 : 0, hi = std::min(hull.size() - 1, k + 1);
        double best = std::numeric_limits<double>::infinity();
        std::size_t b = hull[k];
        if (std::isfinite(f[i])) {
            best = f[i];
            b = i;
        }
        for (std::size_t c = lo; c <= hi; ++c) {
            std::size_t q = hull[c];
            double d = xs[i] - xs[q];
            double val = f[q] + d * d / eps;
            if (val < best || (val == best && b != i && q < b)) {
                best = val;
                b = q;
            }
        }
        out[i] = best;
        arg[i] = b;
    }
}

}  // namespace detail

// Separable two-pass lower envelope: O(N) per grid line.
inline EnvelopeResult lower_envelope_separable(const GridFn& w, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("envelope needs eps > 0");
    if (!w.any_finite()) throw std::invalid_argument("envelope of an all-masked grid");
    EnvelopeResult R;
    R.env = w;
    R.eps = eps;
    R.side = Side::Lower;
    R.argpt.assign(w.size(), 0);
    const int Nx = w.count[0];
    Vec xs(Nx);
    for (int i = 0; i < Nx; ++i) xs[i] = w.coord(0, i);
    if (w.dim() == 1) {
        Vec out;
        std::vector<std::size_t> arg;
        detail::parabola_pass(xs, w.values, eps, out, arg);
        R.env.values = out;
        R.argpt = arg;
        return R;
    }
    const int Ny = w.count[1];
    Vec ys(Ny);
    for (int j = 0; j < Ny; ++j) ys[j] = w.coord(1, j);
    Vec pass1(w.size());
    std::vector<std::size_t> arg1(w.size());
    for (int j = 0; j < Ny; ++j) {
        Vec row(Nx), out;
        std::vector<std::size_t> arg;
        for (int i = 0; i < Nx; ++i) row[i] = w.values[w.index(i, j)];
        detail::parabola_pass(xs, row, eps, out, arg);
        for (int i = 0; i < Nx; ++i) {
            pass1[w.index(i, j)] = out[i];
            arg1[w.index(i, j)] = w.index(static_cast<int>(arg[i]), j);
        }
    }
    for (int i = 0; i < Nx; ++i) {
        Vec col(Ny), out;
        std::vector<std::size_t> arg;
        for (int j = 0; j < Ny; ++j) col[j] = pass1[w.index(i, j)];
        detail::parabola_pass(ys, col, eps, out, arg);
        for (int j = 0; j < Ny; ++j) {
            R.env.values[w.index(i, j)] = out[j];
            R.argpt[w.index(i, j)] = arg1[w.index(i, static_cast<int>(arg[j]))];
        }
    }
    return R;
}

// Envelope of the piecewise-linear interpolant of a 1D grid, minimized over continuous y.
// `extremal` holds the real-valued x_* per node; argpt is its nearest node.
struct ContinuousEnvelope {
    EnvelopeResult result;
    Vec extremal;
};

inline ContinuousEnvelope lower_envelope_interpolated(const GridFn& w, double eps) {
    if (w.dim() != 1) throw std::invalid_argument("interpolated envelope is one-dimensional");
    if (!(eps > 0)) throw std::invalid_argument("envelope needs eps > 0");
    if (!w.any_finite()) throw std::invalid_argument("envelope of an all-masked grid");
    ContinuousEnvelope out;
    out.result = lower_envelope(w, eps);
    out.extremal.assign(w.size(), 0.0);
    const int N = w.count[0];
    for (int i = 0; i < N; ++i) {
        double x = w.coord(0, i);
        double best = out.result.env.values[i];
        double arg = w.coord(0, static_cast<int>(out.result.argpt[i]));
        for (int k = 0; k + 1 < N; ++k) {
            double wa = w.values[k], wb = w.values[k + 1];
            if (!std::isfinite(wa) || !std::isfinite(wb)) continue;
            double ya = w.coord(0, k), yb = w.coord(0, k + 1);
            double slope = (wb - wa) / (yb - ya);
            double y = std::clamp(x - 0.5 * eps * slope, ya, yb);
            double val = wa + slope * (y - ya) + (y - x) * (y - x) / eps;
            if (val < best) {
                best = val;
                arg = y;
            }
        }
        out.result.env.values[i] = best;
        out.extremal[i] = arg;
        int node = static_cast<int>(std::lround((arg - w.lo[0]) / w.h(0)));
        out.result.argpt[i] = static_cast<std::size_t>(std::clamp(node, 0, N - 1));
    }
    return out;
}

inline ContinuousEnvelope upper_envelope_interpolated(const GridFn& v, double eps) {
    ContinuousEnvelope out = lower_envelope_interpolated(-v, eps);
    out.result.env = -out.result.env;
    out.result.side = Side::Upper;
    return out;
}

// ---------------------------------------------------------------- property checks

struct PropertyLine {
    std::string name;
    bool pass = true;
    double worst = 0.0;  // largest violation excess (≤ 0 when passing)
    std::string detail;
};

struct EnvelopeReport {
    Side side = Side::Upper;
    std::vector<double> eps;
    std::vector<PropertyLine> lines;
    bool pass() const {
        for (const auto& l : lines)
            if (!l.pass) return false;
        return true;
    }
    const PropertyLine* get(const std::string& name) const {
        for (const auto& l : lines)
            if (l.name == name) return &l;
        return nullptr;
    }
};

namespace detail {

inline void note(PropertyLine& line, double excess) {
    line.worst = std::max(line.worst, excess);
    if (excess > 0) line.pass = false;
}

// Per-axis second differences of env, signed so that the bound reads D ≥ −2/ε.
inline void semiconcavity(const GridFn& src, const EnvelopeResult& E, PropertyLine& line) {
    const GridFn& g = E.env;
    double sgn = E.side == Side::Upper ? 1.0 : -1.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
        double h = g.h(axis);
        double slack = 4.0 * h;
        for (std::size_t k = 0; k < g.size(); ++k) {
            int i = axis == 0 ? g.ix(k) : g.iy(k);
            if (i == 0 || i == g.count[axis] - 1) continue;
            std::size_t km = axis == 0 ? g.index(g.ix(k) - 1, g.iy(k)) : g.index(g.ix(k), g.iy(k) - 1);
            std::size_t kp = axis == 0 ? g.index(g.ix(k) + 1, g.iy(k)) : g.index(g.ix(k), g.iy(k) + 1);
            double d2 = sgn * (g.values[kp] - 2 * g.values[k] + g.values[km]) / (h * h);
            note(line, -2.0 / E.eps - slack - d2);
        }
    }
    (void)src;
}

}  // namespace detail

// Checks, for each ε in a decreasing list: (a) monotone approach to src, (b) one-sided second-difference
// bound, (c) displacement bound of the extremal point, (d) windowed gradient bound.
inline EnvelopeReport check_envelope_properties(const GridFn& src, const std::vector<double>& eps_list, Side side,
                                                int windows = 4) {
    EnvelopeReport rep;
    rep.side = side;
    rep.eps = eps_list;
    PropertyLine a{"convergence", true, 0.0, ""}, b{"semiconcavity", true, 0.0, ""},
        c{"displacement", true, 0.0, ""}, d{"gradient", true, 0.0, ""};
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("eps list must decrease");
    const double sgn = side == Side::Upper ? 1.0 : -1.0;
    const double vmax = src.finite_max(), vmin = src.finite_min();
    const double round = 1e-12 * (1.0 + std::max(std::abs(vmax), std::abs(vmin)));
    std::vector<EnvelopeResult> envs;
    for (double eps : eps_list) envs.push_back(envelope(src, eps, side));

    double prev_dist = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < envs.size(); ++e) {
        const auto& E = envs[e];
        double dist = 0.0;
        for (std::size_t k = 0; k < src.size(); ++k) {
            if (src.masked(k)) continue;
            detail::note(a, sgn * (src.values[k] - E.env.values[k]));
            dist = std::max(dist, std::abs(E.env.values[k] - src.values[k]));
            if (e > 0) detail::note(a, sgn * (E.env.values[k] - envs[e - 1].env.values[k]));
        }
        detail::note(a, dist - prev_dist);
        prev_dist = dist;

        detail::semiconcavity(src, E, b);

        for (std::size_t k = 0; k < src.size(); ++k) {
            if (src.masked(k)) continue;
            double d2 = src.sq_dist(k, E.argpt[k]);
            double room = side == Side::Upper ? vmax - src.values[k] : src.values[k] - vmin;
            detail::note(c, d2 / E.eps - room - round);
        }

        for (int axis = 0; axis < src.dim(); ++axis) {
            double h = src.h(axis);
            int nw = std::max(1, windows);
            for (int wx = 0; wx < nw; ++wx) {
                for (int wy = 0; wy < (src.dim() == 2 ? nw : 1); ++wy) {
                    auto in_window = [&](std::size_t k) {
                        int bx = src.ix(k) * nw / src.count[0];
                        int by = src.dim() == 2 ? src.iy(k) * nw / src.count[1] : 0;
                        return bx == wx && by == wy && !src.masked(k);
                    };
                    double inf_w = std::numeric_limits<double>::infinity(), sup_w = -inf_w;
                    for (std::size_t k = 0; k < src.size(); ++k)
                        if (in_window(k)) {
                            inf_w = std::min(inf_w, src.values[k]);
                            sup_w = std::max(sup_w, src.values[k]);
                        }
                    if (!std::isfinite(inf_w)) continue;
                    double spread = side == Side::Upper ? vmax - inf_w : sup_w - vmin;
                    double bound = 2.0 / std::sqrt(E.eps) * std::sqrt(std::max(0.0, spread)) + h / E.eps;
                    for (std::size_t k = 0; k < src.size(); ++k) {
                        if (!in_window(k)) continue;
                        int i = axis == 0 ? src.ix(k) : src.iy(k);
                        if (i + 1 >= src.count[axis]) continue;
                        std::size_t kp = axis == 0 ? src.index(src.ix(k) + 1, src.iy(k))
                                                   : src.index(src.ix(k), src.iy(k) + 1);
                        if (!in_window(kp)) continue;
                        double q = std::abs(E.env.values[kp] - E.env.values[k]) / h;
                        detail::note(d, q - bound - round / h);
                    }
                }
            }
        }
    }
    rep.lines = {a, b, c, d};
    return rep;
}

// Refined displacement bound for sources with Lipschitz constant K: |x* − x| ≤ [εK(2ε sup|v|)^{1/2}]^{1/2}.
inline PropertyLine check_lipschitz_displacement(const GridFn& src, double eps, double K, Side side) {
    PropertyLine line{"lipschitz-displacement", true, 0.0, ""};
    EnvelopeResult E = envelope(src, eps, side);
    double sup_abs = std::max(std::abs(src.finite_max()), std::abs(src.finite_min()));
    double bound = std::sqrt(eps * K * std::sqrt(2.0 * eps * sup_abs));
    for (std::size_t k = 0; k < src.size(); ++k) {
        if (src.masked(k)) continue;
        detail::note(line, std::sqrt(src.sq_dist(k, E.argpt[k])) - bound * (1 + 1e-12));
    }
    return line;
}

// Random bounded piecewise-affine samples on [−1,1] (or [−1,1]² as a sum of two such profiles), with jumps
// at the breakpoints.
inline GridFn random_piecewise(std::uint64_t seed, int nodes = 401, int pieces = 6, bool two_d = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto profile = [&]() {
        Vec cuts(pieces - 1);
        for (double& c : cuts) c = u(rng);
        std::sort(cuts.begin(), cuts.end());
        Vec a(pieces), b(pieces);
        for (int i = 0; i < pieces; ++i) {
            a[i] = u(rng);
            b[i] = 2.0 * u(rng);
        }
        return [cuts, a, b](double x) {
            std::size_t i = std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin();
            return a[i] + b[i] * x;
        };
    };
    if (!two_d) {
        GridFn g = GridFn::box1d(-1.0, 1.0, nodes);
        auto f = profile();
        g.sample([&](const Vec& x) { return f(x[0]); });
        return g;
    }
    GridFn g = GridFn::box2d(-1.0, 1.0, -1.0, 1.0, nodes, nodes);
    auto f = profile();
    auto k = profile();
    g.sample([&](const Vec& x) { return 0.5 * (f(x[0]) + k(x[1])); });
    return g;
}

// ---------------------------------------------------------------- sharpness example

// Dyadic blocks B_j = (2^{−(j+1)}, 2^{−j}]: ramps 2 − 2^{j+1}|x| on even j, level 1 on odd j, w(0) = 0.
inline double dyadic_w(double x) {
    double a = std::abs(x);
    if (a == 0.0) return 0.0;
    if (a > 1.0) throw std::domain_error("dyadic example lives on [-1,1]");
    int e = 0;
    double m = std::frexp(a, &e);
    int j = m == 0.5 ? 1 - e : -e;
    if (j % 2 == 0) return 2.0 - std::ldexp(a, j + 1);
    return 1.0;
}

inline Vec dyadic_nodes(int blocks = 24, int per_block = 64) {
    Vec pos;
    for (int j = 0; j < blocks; ++j) {
        double left = std::ldexp(1.0, -(j + 1));
        for (int i = 1; i <= per_block; ++i) pos.push_back(left + left * i / per_block);
    }
    std::sort(pos.begin(), pos.end());
    Vec nodes;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) nodes.push_back(-*it);
    nodes.push_back(0.0);
    for (double p : pos) nodes.push_back(p);
    return nodes;
}

struct DyadicRow {
    int k = 0;
    double eps = 0, x = 0, env = 0, argpt = 0, displacement = 0, bound_env = 0, bound_disp = 0;
    bool env_ok = false, disp_ok = false, window_ok = false;
};

struct DyadicReport {
    std::vector<DyadicRow> rows;
    std::size_t nodes = 0;
    bool pass() const {
        if (rows.empty()) return false;
        for (const auto& r : rows)
            if (!(r.env_ok && r.disp_ok && r.window_ok)) return false;
        return true;
    }
};

inline DyadicReport dyadic_sharpness(int k_min = 2, int k_max = 6) {
    DyadicReport rep;
    Vec ys = dyadic_nodes();
    rep.nodes = ys.size();
    Vec ws(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) ws[i] = dyadic_w(ys[i]);
    for (int k = k_min; k <= k_max; ++k) {
        DyadicRow row;
        row.k = k;
        row.eps = std::ldexp(1.0, -2 * (2 * k + 1));
        row.x = std::ldexp(1.0, -(2 * k + 3));
        std::size_t self = std::find(ys.begin(), ys.end(), row.x) - ys.begin();
        if (self == ys.size()) throw std::logic_error("dyadic node set misses x_k");
        double best = ws[self];
        std::size_t arg = self;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            double d = ys[i] - row.x;
            double val = ws[i] + d * d / row.eps;
            if (val < best) {
                best = val;
                arg = i;
            }
        }
        row.env = best;
        row.argpt = ys[arg];
        row.displacement = std::abs(ys[arg] - row.x);
        row.bound_env = 1.0 / 16.0;
        row.bound_disp = std::sqrt(row.eps) / 8.0;
        row.env_ok = row.env <= row.bound_env;
        row.disp_ok = row.displacement >= row.bound_disp;
        row.window_ok = true;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            double d = std::abs(ys[i] - row.x);
            if (d > 0 && d < row.bound_disp && !(ws[i] > 0.5)) row.window_ok = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------- stability under semi-continuity

struct StabilityReport {
    Side side = Side::Upper;
    int trials = 0;
    double tolerance = 0.0;
    double worst_excess = 0.0;  // max over trials of limsup v^{ε_j}(x_j) − v*(x) (upper side)
    bool pass = true;
};

// levels <= 0 picks enough halvings for the finest ε to fall below h²/osc, where the grid resolves the limit.
inline StabilityReport stability_check(const GridFn& src, Side side, int trials, std::uint64_t seed, double eps0 = 0.1,
                                       int levels = 0) {
    StabilityReport rep;
    rep.side = side;
    rep.trials = trials;
    double h = src.h(0);
    if (levels <= 0) {
        double osc = std::max(src.finite_max() - src.finite_min(), 1e-300);
        double hmin = src.dim() == 2 ? std::min(h, src.h(1)) : h;
        levels = std::max(8, static_cast<int>(std::ceil(std::log2(eps0 * osc / (hmin * hmin)))) + 2);
    }
    rep.tolerance = std::sqrt(h);
    rep.worst_excess = -std::numeric_limits<double>::infinity();
    std::vector<EnvelopeResult> envs;
    for (int j = 0; j < levels; ++j) envs.push_back(envelope(src, eps0 * std::ldexp(1.0, -j), side));
    std::mt19937_64 rng(seed);
    const double sgn = side == Side::Upper ? 1.0 : -1.0;
    for (int t = 0; t < trials; ++t) {
        std::size_t x;
        do {
            x = std::uniform_int_distribution<std::size_t>(0, src.size() - 1)(rng);
        } while (src.masked(x) || src.on_edge(x));
        int dir = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
        int axis = src.dim() == 2 ? std::uniform_int_distribution<int>(0, 1)(rng) : 0;
        int reach = src.count[axis] / 8;
        double tail = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < levels; ++j) {
            int off = dir * static_cast<int>(std::floor(reach * std::ldexp(1.0, -j)));
            int i = (axis == 0 ? src.ix(x) : src.iy(x)) + off;
            i = std::clamp(i, 0, src.count[axis] - 1);
            std::size_t xj = axis == 0 ? src.index(i, src.iy(x)) : src.index(src.ix(x), i);
            if (j >= levels - 3) tail = std::max(tail, sgn * envs[j].env.values[xj]);
        }
        // Discrete semicontinuous hull: v* over the node and its neighbors.
        double hull = sgn * src.values[x];
        for (std::size_t q : src.neighbors(x))
            if (!src.masked(q)) hull = std::max(hull, sgn * src.values[q]);
        double excess = tail - hull;
        rep.worst_excess = std::max(rep.worst_excess, excess);
        if (excess > rep.tolerance) rep.pass = false;
    }
    return rep;
}

}  // namespace viscone
