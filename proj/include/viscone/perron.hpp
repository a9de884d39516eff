#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "matcone.hpp"
#include "operators.hpp"
#include "radial.hpp"
#include "viscosity.hpp"

namespace viscone {

enum class NodeKind { Interior = 0, Boundary = 1, Outside = 2 };

struct DirichletProblem {
    GridFn grid;  // layout; values unused
    std::vector<NodeKind> kind;
    Vec sub, super;
    OperatorSpec F;
    ConeSpec U;
    std::string label;

    void validate() const {
        grid.validate();
        const std::size_t N = grid.size();
        if (kind.size() != N || sub.size() != N || super.size() != N)
            throw std::invalid_argument("problem arrays do not match the grid");
        bool any_interior = false;
        for (std::size_t k = 0; k < N; ++k) {
            if (kind[k] == NodeKind::Outside) continue;
            if (!std::isfinite(sub[k]) || !std::isfinite(super[k]))
                throw std::invalid_argument("sandwich must be finite on the domain");
            if (sub[k] > super[k]) throw std::invalid_argument("sandwich needs sub <= super");
            if (kind[k] == NodeKind::Boundary && sub[k] != super[k])
                throw std::invalid_argument("sandwich must agree on boundary nodes");
            if (kind[k] == NodeKind::Interior) {
                any_interior = true;
                if (grid.on_edge(k)) throw std::invalid_argument("grid edge nodes cannot be interior");
                for (std::size_t q : grid.neighbors(k))
                    if (kind[q] == NodeKind::Outside) throw std::invalid_argument("interior node touches outside");
            }
        }
        if (!any_interior) throw std::invalid_argument("problem has no interior nodes");
    }
};

enum class SweepOrder { Lexicographic, RedBlack };
enum class Direction { Descending, Ascending, Free };

inline const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Descending: return "descending";
        case Direction::Ascending: return "ascending";
        case Direction::Free: return "free";
    }
    return "?";
}

struct SolverConfig {
    double tol = 1e-8;
    int max_sweeps = 20000;
    SweepOrder sweep_order = SweepOrder::Lexicographic;
    int bisection_depth = 200;
    bool newton = true;
};

struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- node residual

namespace detail {

inline GridFn with_values(const GridFn& layout, const Vec& u) {
    GridFn g = layout;
    g.values = u;
    return g;
}

// Indices whose value enters the discrete jet at k.
inline std::vector<std::size_t> stencil(const GridFn& g, std::size_t k) {
    std::vector<std::size_t> s{k};
    for (std::size_t q : g.neighbors(k)) s.push_back(q);
    if (g.dim() == 2)
        for (int di : {-1, 1})
            for (int dj : {-1, 1}) s.push_back(g.index(g.ix(k) + di, g.iy(k) + dj));
    return s;
}

}  // namespace detail

// Cone slack of the discrete F at node k; positive means F ∈ U.
inline double node_slack(const GridFn& u, std::size_t k, const OperatorSpec& F, const ConeSpec& U) {
    auto J = discrete_jet(u, k);
    if (!J) throw std::invalid_argument("node has no discrete jet");
    SymMatrix M = eval_F(*J, F);
    if (U.kind == ConeKind::TraceCone) return M.trace() / M.n();
    return cone_slack(eigen_sym(M).values, U);
}

// Center value where the discrete F crosses ∂U, bracketed by [lo, hi] with slack(lo) ≥ 0 ≥ slack(hi).
inline double pointwise_root(GridFn& u, std::size_t k, const OperatorSpec& F, const ConeSpec& U, double lo, double hi,
                             int depth = 200) {
    const double keep = u.values[k];
    auto slack = [&](double c) {
        u.values[k] = c;
        return node_slack(u, k, F, U);
    };
    double slo = slack(lo), shi = slack(hi);
    if (slo < 0 || shi > 0) {
        u.values[k] = keep;
        throw BracketError("no crossing of the cone boundary in the bracket");
    }
    double root = slo == 0 ? lo : hi;
    if (slo != 0 && shi != 0) {
        for (int it = 0; it < depth; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            double sm = slack(mid);
            if (sm == 0) {
                lo = hi = mid;
                break;
            }
            (sm > 0 ? lo : hi) = mid;
        }
        root = 0.5 * (lo + hi);
    }
    u.values[k] = keep;
    return root;
}

// 1D convenience: neighbors (a, b) around a node at x on a uniform grid of spacing h.
inline double pointwise_root(double a, double b, double x, double h, const OperatorSpec& F, const ConeSpec& U,
                             double lo, double hi, int depth = 200, int radial_n = 0) {
    GridFn g = radial_n > 0 ? GridFn::radial(x - h, x + h, 3, radial_n) : GridFn::box1d(x - h, x + h, 3);
    g.values = {a, 0.5 * (a + b), b};
    return pointwise_root(g, 1, F, U, lo, hi, depth);
}

// ---------------------------------------------------------------- banded linear algebra

namespace detail {

// In-place banded LU without pivoting; A stored as rows of width 2b+1 around the diagonal.
struct Banded {
    std::size_t n = 0, b = 0;
    Vec a;
    Banded(std::size_t n_, std::size_t b_) : n(n_), b(b_), a(n_ * (2 * b_ + 1), 0.0) {}
    double& at(std::size_t i, std::size_t j) { return a[i * (2 * b + 1) + (j + b - i)]; }
    bool solve(Vec& rhs) {
        for (std::size_t k = 0; k < n; ++k) {
            double piv = at(k, k);
            if (piv == 0.0 || !std::isfinite(piv)) return false;
            std::size_t iend = std::min(n, k + b + 1);
            for (std::size_t i = k + 1; i < iend; ++i) {
                double f = at(i, k) / piv;
                if (f == 0.0) continue;
                for (std::size_t j = k; j < std::min(n, k + b + 1); ++j) at(i, j) -= f * at(k, j);
                rhs[i] -= f * rhs[k];
            }
        }
        for (std::size_t k = n; k-- > 0;) {
            double s = rhs[k];
            for (std::size_t j = k + 1; j < std::min(n, k + b + 1); ++j) s -= at(k, j) * rhs[j];
            rhs[k] = s / at(k, k);
        }
        for (double v : rhs)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace detail

// ---------------------------------------------------------------- solver

struct SolveResult {
    GridFn u;
    Direction direction = Direction::Descending;
    int iterations = 0;
    int newton_accepted = 0;
    bool converged = false;
    double residual = 0.0;  // max |slack| over interior nodes
    bool sandwich_ok = true;
    bool monotone_ok = true;
    std::vector<Verdict> classes;
};

namespace detail {

inline double max_interior_slack(const GridFn& g, const DirichletProblem& P, Vec* slacks = nullptr) {
    double r = 0.0;
    if (slacks) slacks->assign(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (P.kind[k] != NodeKind::Interior) continue;
        double s = node_slack(g, k, P.F, P.U);
        if (slacks) (*slacks)[k] = s;
        r = std::max(r, std::abs(s));
    }
    return r;
}

inline std::vector<std::size_t> sweep_sequence(const DirichletProblem& P, SweepOrder order) {
    std::vector<std::size_t> seq;
    const GridFn& g = P.grid;
    for (int colour = 0; colour < (order == SweepOrder::RedBlack ? 2 : 1); ++colour)
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (P.kind[k] != NodeKind::Interior) continue;
            if (order == SweepOrder::RedBlack && (g.ix(k) + g.iy(k)) % 2 != colour) continue;
            seq.push_back(k);
        }
    return seq;
}

// One Gauss–Seidel pass of pointwise crossings.
inline void gs_sweep(GridFn& g, const DirichletProblem& P, const std::vector<std::size_t>& seq, Direction dir,
                     int depth) {
    for (std::size_t k : seq) {
        double cur = g.values[k];
        double s = node_slack(g, k, P.F, P.U);
        if (s == 0.0) continue;
        double lo, hi;
        if (dir == Direction::Descending) {
            if (s > 0) continue;  // not a supersolution here; descending never raises
            lo = P.sub[k];
            hi = cur;
        } else if (dir == Direction::Ascending) {
            if (s < 0) continue;
            lo = cur;
            hi = P.super[k];
        } else {
            lo = s < 0 ? P.sub[k] : cur;
            hi = s < 0 ? cur : P.super[k];
        }
        double endpoint = dir == Direction::Ascending || (dir == Direction::Free && s > 0) ? hi : lo;
        g.values[k] = endpoint;
        double se = node_slack(g, k, P.F, P.U);
        g.values[k] = cur;
        bool crosses = (s < 0) ? se >= 0 : se <= 0;
        if (!crosses) {
            g.values[k] = endpoint;  // clamp to the sandwich
            continue;
        }
        g.values[k] = pointwise_root(g, k, P.F, P.U, lo, hi, depth);
    }
}

// Newton correction on interior nodes: J d = −G(u) ∓ shift, shift grown until the clamped result keeps the
// supersolution (descending) or subsolution (ascending) signature. Returns true when accepted.
inline bool newton_correction(GridFn& g, const DirichletProblem& P, Direction dir, double tol) {
    const std::size_t N = g.size();
    std::vector<std::size_t> unknown;
    std::vector<long> pos(N, -1);
    for (std::size_t k = 0; k < N; ++k)
        if (P.kind[k] == NodeKind::Interior) {
            pos[k] = static_cast<long>(unknown.size());
            unknown.push_back(k);
        }
    const std::size_t band = g.dim() == 1 ? 1 : static_cast<std::size_t>(g.count[0]) + 1;
    Vec G(unknown.size());
    for (std::size_t i = 0; i < unknown.size(); ++i) G[i] = node_slack(g, unknown[i], P.F, P.U);
    detail::Banded J(unknown.size(), band);
    for (std::size_t i = 0; i < unknown.size(); ++i) {
        std::size_t k = unknown[i];
        for (std::size_t q : stencil(g, k)) {
            if (pos[q] < 0) continue;
            double keep = g.values[q];
            double eta = 1e-3 * (1.0 + std::abs(keep));
            g.values[q] = keep + eta;
            double gp = node_slack(g, k, P.F, P.U);
            g.values[q] = keep - eta;
            double gm = node_slack(g, k, P.F, P.U);
            g.values[q] = keep;
            J.at(i, static_cast<std::size_t>(pos[q])) = (gp - gm) / (2 * eta);
        }
    }
    double sign = dir == Direction::Ascending ? 1.0 : -1.0;
    double shift = dir == Direction::Free ? 0.0 : 0.25 * tol;
    for (int attempt = 0; attempt < 40; ++attempt) {
        detail::Banded A = J;
        Vec rhs(unknown.size());
        for (std::size_t i = 0; i < unknown.size(); ++i) rhs[i] = -G[i] + sign * shift;
        if (!A.solve(rhs)) return false;
        GridFn trial = g;
        for (std::size_t i = 0; i < unknown.size(); ++i) {
            std::size_t k = unknown[i];
            double v = g.values[k] + rhs[i];
            if (dir == Direction::Descending) v = std::clamp(v, P.sub[k], g.values[k]);
            else if (dir == Direction::Ascending) v = std::clamp(v, g.values[k], P.super[k]);
            else v = std::clamp(v, P.sub[k], P.super[k]);
            trial.values[k] = v;
        }
        bool ok = true;
        double worst = 0.0;
        for (std::size_t k : unknown) {
            double s = node_slack(trial, k, P.F, P.U);
            worst = std::max(worst, std::abs(s));
            if (dir == Direction::Descending && s > 0 && trial.values[k] > P.sub[k]) ok = false;
            if (dir == Direction::Ascending && s < 0 && trial.values[k] < P.super[k]) ok = false;
        }
        if (dir == Direction::Free) {
            double before = 0.0;
            for (double v : G) before = std::max(before, std::abs(v));
            ok = worst < before;
        }
        if (ok) {
            g = trial;
            return true;
        }
        if (dir == Direction::Free) return false;
        shift = shift == 0.0 ? tol : shift * 4.0;
    }
    return false;
}

}  // namespace detail

inline bool supports_newton(const ConeSpec& U) {
    return U.kind == ConeKind::TraceCone || (U.kind == ConeKind::GammaK && U.k == 1);
}

inline SolveResult perron_solve(const DirichletProblem& P, const SolverConfig& cfg,
                                Direction dir = Direction::Descending, const Vec* init = nullptr) {
    P.validate();
    if (!(cfg.tol > 0) || cfg.max_sweeps < 1) throw std::invalid_argument("solver config needs tol > 0, max_sweeps >= 1");
    SolveResult R;
    R.direction = dir;
    Vec start = init ? *init : (dir == Direction::Ascending ? P.sub : P.super);
    if (start.size() != P.grid.size()) throw std::invalid_argument("initialization size mismatch");
    for (std::size_t k = 0; k < start.size(); ++k) {
        if (P.kind[k] == NodeKind::Outside) start[k] = std::numeric_limits<double>::quiet_NaN();
        else if (P.kind[k] == NodeKind::Boundary) start[k] = P.sub[k];
        else if (start[k] < P.sub[k] || start[k] > P.super[k]) throw std::invalid_argument("initialization outside the sandwich");
    }
    R.u = detail::with_values(P.grid, start);
    auto seq = detail::sweep_sequence(P, cfg.sweep_order);
    const bool use_newton = cfg.newton && supports_newton(P.U);
    R.residual = detail::max_interior_slack(R.u, P);
    while (R.residual > cfg.tol && R.iterations < cfg.max_sweeps) {
        Vec before = R.u.values;
        detail::gs_sweep(R.u, P, seq, dir, cfg.bisection_depth);
        if (use_newton && detail::newton_correction(R.u, P, dir, cfg.tol)) ++R.newton_accepted;
        ++R.iterations;
        for (std::size_t k = 0; k < before.size(); ++k) {
            if (P.kind[k] != NodeKind::Interior) continue;
            double v = R.u.values[k];
            if (v < P.sub[k] || v > P.super[k]) R.sandwich_ok = false;
            if (dir == Direction::Descending && v > before[k]) R.monotone_ok = false;
            if (dir == Direction::Ascending && v < before[k]) R.monotone_ok = false;
        }
        double prev = R.residual;
        R.residual = detail::max_interior_slack(R.u, P);
        if (R.u.values == before && R.residual >= prev) break;  // stalled
    }
    R.converged = R.residual <= cfg.tol;
    R.classes.assign(P.grid.size(), Verdict::Boundary);
    for (std::size_t k = 0; k < P.grid.size(); ++k) {
        if (P.kind[k] != NodeKind::Interior) continue;
        double s = node_slack(R.u, k, P.F, P.U);
        R.classes[k] = std::abs(s) <= cfg.tol ? Verdict::Boundary : (s > 0 ? Verdict::Interior : Verdict::Outside);
    }
    return R;
}

// ---------------------------------------------------------------- problems

namespace problems {

// Dirichlet problem for ψ₁ on ½ ≤ |x| ≤ 1 in R^n with F = QuadConst(1, 0), U = trace cone, on `intervals` cells.
// The sandwich ψ₁ ∓ c(r − ½)(1 − r) uses the largest dyadic c that verifies discretely.
inline DirichletProblem annulus_psi1(int n, int intervals, double mu = 1.0) {
    DirichletProblem P;
    P.label = "annulus-psi1";
    P.F = OperatorSpec::quad_const(1.0, 0.0);
    P.U = ConeSpec::trace(n);
    P.grid = GridFn::radial(0.5, 1.0, intervals + 1, n);
    auto exact = profiles::log_singular(mu, 1.0, 0.0, n);
    const std::size_t N = P.grid.size();
    P.kind.assign(N, NodeKind::Interior);
    P.kind.front() = P.kind.back() = NodeKind::Boundary;
    for (double c = 1.0; c > 1e-6; c *= 0.5) {
        P.sub.assign(N, 0.0);
        P.super.assign(N, 0.0);
        for (std::size_t k = 0; k < N; ++k) {
            double r = P.grid.coord(0, static_cast<int>(k));
            double b = P.kind[k] == NodeKind::Boundary ? 0.0 : c * (r - 0.5) * (1.0 - r);
            P.sub[k] = exact.f(r) - b;
            P.super[k] = exact.f(r) + b;
        }
        GridFn s = detail::with_values(P.grid, P.sub), w = detail::with_values(P.grid, P.super);
        bool ok = true;
        for (std::size_t k = 1; k + 1 < N && ok; ++k)
            ok = node_slack(s, k, P.F, P.U) >= 0 && node_slack(w, k, P.F, P.U) <= 0;
        if (ok) return P;
    }
    throw std::logic_error("no verified sandwich for the annulus problem");
}

inline Vec annulus_psi1_exact(const DirichletProblem& P, double mu = 1.0) {
    auto exact = profiles::log_singular(mu, 1.0, 0.0, P.grid.ambient);
    Vec out(P.grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = exact.f(P.grid.coord(0, static_cast<int>(k)));
    return out;
}

// u″ = 0 on [0,1], u(0) = a, u(1) = b, sandwiched by the chord ∓ c x(1 − x).
inline DirichletProblem interval_linear(int intervals, double a = 0.0, double b = 1.0, double c = 1.0) {
    DirichletProblem P;
    P.label = "interval-linear";
    P.F = OperatorSpec::quad_const(0.0, 0.0);
    P.U = ConeSpec::trace(1);
    P.grid = GridFn::box1d(0.0, 1.0, intervals + 1);
    const std::size_t N = P.grid.size();
    P.kind.assign(N, NodeKind::Interior);
    P.kind.front() = P.kind.back() = NodeKind::Boundary;
    P.sub.resize(N);
    P.super.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        double x = P.grid.coord(0, static_cast<int>(k));
        double bump = P.kind[k] == NodeKind::Boundary ? 0.0 : c * x * (1 - x);
        P.sub[k] = a + (b - a) * x - bump;
        P.super[k] = a + (b - a) * x + bump;
    }
    return P;
}

// Planar annulus ½ ≤ |x| ≤ 1 masked inside [−1,1]², F = QuadConst(1, 0), U = Γ₁, exact solution ln(1 − ln|x|).
inline DirichletProblem annulus_2d(int cells) {
    DirichletProblem P;
    P.label = "annulus2d";
    P.F = OperatorSpec::quad_const(1.0, 0.0);
    P.U = ConeSpec::gamma_k(2, 1);
    P.grid = GridFn::box2d(-1.0, 1.0, -1.0, 1.0, cells + 1, cells + 1);
    const std::size_t N = P.grid.size();
    auto inside = [&](std::size_t k) {
        double r = norm(P.grid.point(k));
        return r >= 0.5 && r <= 1.0;
    };
    P.kind.assign(N, NodeKind::Outside);
    for (std::size_t k = 0; k < N; ++k) {
        if (!inside(k)) continue;
        bool interior = !P.grid.on_edge(k);
        if (interior)
            for (std::size_t q : detail::stencil(P.grid, k)) interior = interior && inside(q);
        P.kind[k] = interior ? NodeKind::Interior : NodeKind::Boundary;
    }
    auto exact = [](double r) { return std::log(1.0 - std::log(r)); };
    for (double c = 1.0; c > 1e-6; c *= 0.5) {
        P.sub.assign(N, std::numeric_limits<double>::quiet_NaN());
        P.super = P.sub;
        for (std::size_t k = 0; k < N; ++k) {
            if (P.kind[k] == NodeKind::Outside) continue;
            double r = norm(P.grid.point(k));
            double b = P.kind[k] == NodeKind::Boundary ? 0.0 : c * std::max(0.0, (r - 0.5) * (1.0 - r));
            P.sub[k] = exact(r) - b;
            P.super[k] = exact(r) + b;
        }
        GridFn s = detail::with_values(P.grid, P.sub), w = detail::with_values(P.grid, P.super);
        bool ok = true;
        for (std::size_t k = 0; k < N && ok; ++k)
            if (P.kind[k] == NodeKind::Interior) ok = node_slack(s, k, P.F, P.U) >= 0 && node_slack(w, k, P.F, P.U) <= 0;
        if (ok) return P;
    }
    throw std::logic_error("no verified sandwich for the planar annulus problem");
}

inline Vec annulus_2d_exact(const DirichletProblem& P) {
    Vec out(P.grid.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < out.size(); ++k)
        if (P.kind[k] != NodeKind::Outside) out[k] = std::log(1.0 - std::log(norm(P.grid.point(k))));
    return out;
}

}  // namespace problems

// ---------------------------------------------------------------- experiments

struct UniquenessReport {
    std::vector<SolveResult> runs;
    double max_distance = 0.0;
    bool conclusive = true;
    bool pass = false;
};

inline double sup_distance(const Vec& a, const Vec& b, const DirichletProblem& P) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (P.kind[k] != NodeKind::Outside) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

// inits: "super" (descending), "sub" (ascending), "mid" (free iteration from the sandwich midpoint).
inline UniquenessReport uniqueness_experiment(const DirichletProblem& P, const SolverConfig& cfg,
                                              const std::vector<std::string>& inits) {
    UniquenessReport rep;
    for (const auto& name : inits) {
        if (name == "super") rep.runs.push_back(perron_solve(P, cfg, Direction::Descending));
        else if (name == "sub") rep.runs.push_back(perron_solve(P, cfg, Direction::Ascending));
        else if (name == "mid") {
            Vec mid(P.grid.size());
            for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (P.sub[k] + P.super[k]);
            rep.runs.push_back(perron_solve(P, cfg, Direction::Free, &mid));
        } else {
            throw std::invalid_argument("unknown initialization: " + name);
        }
        if (!rep.runs.back().converged) rep.conclusive = false;
    }
    for (std::size_t a = 0; a < rep.runs.size(); ++a)
        for (std::size_t b = a + 1; b < rep.runs.size(); ++b)
            rep.max_distance = std::max(rep.max_distance, sup_distance(rep.runs[a].u.values, rep.runs[b].u.values, P));
    rep.pass = rep.conclusive && rep.max_distance <= 10 * cfg.tol;
    return rep;
}

struct GradientBandReport {
    double interior_max = 0.0, band_max = 0.0, slack = 0.0;
    bool pass = false;
};

// Discrete gradient magnitude: centered where both neighbors exist, one-sided otherwise.
inline double discrete_gradient(const GridFn& g, std::size_t k, const std::vector<NodeKind>* kind = nullptr) {
    auto ok = [&](std::size_t q) { return !g.masked(q) && (!kind || (*kind)[q] != NodeKind::Outside); };
    double s = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
        int i = axis == 0 ? g.ix(k) : g.iy(k);
        auto at = [&](int ii) { return axis == 0 ? g.index(ii, g.iy(k)) : g.index(g.ix(k), ii); };
        double h = g.h(axis);
        bool has_m = i > 0 && ok(at(i - 1)), has_p = i + 1 < g.count[axis] && ok(at(i + 1));
        double d = 0.0;
        if (has_m && has_p) d = (g.values[at(i + 1)] - g.values[at(i - 1)]) / (2 * h);
        else if (has_p) d = (g.values[at(i + 1)] - g.values[k]) / h;
        else if (has_m) d = (g.values[k] - g.values[at(i - 1)]) / h;
        s += d * d;
    }
    return std::sqrt(s);
}

// band[k] marks nodes near the boundary. Passes when the interior maximum gradient is at most the band
// maximum plus c·h.
inline GradientBandReport translation_gradient_bound(const GridFn& psi, const std::vector<char>& band,
                                                     const std::vector<NodeKind>* kind = nullptr, double c = 4.0) {
    GradientBandReport rep;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        if (psi.masked(k) || (kind && (*kind)[k] == NodeKind::Outside)) continue;
        double g = discrete_gradient(psi, k, kind);
        (band[k] ? rep.band_max : rep.interior_max) = std::max(band[k] ? rep.band_max : rep.interior_max, g);
    }
    double h = psi.h(0);
    if (psi.dim() == 2) h = std::max(h, psi.h(1));
    rep.slack = c * h;
    rep.pass = rep.interior_max <= rep.band_max + rep.slack;
    return rep;
}

// Nodes within `layers` grid steps of a boundary node.
inline std::vector<char> boundary_band(const DirichletProblem& P, int layers = 2) {
    std::vector<char> band(P.grid.size(), 0);
    for (std::size_t k = 0; k < band.size(); ++k) band[k] = P.kind[k] == NodeKind::Boundary;
    for (int l = 0; l < layers; ++l) {
        std::vector<char> next = band;
        for (std::size_t k = 0; k < band.size(); ++k)
            if (band[k])
                for (std::size_t q : P.grid.neighbors(k))
                    if (P.kind[q] != NodeKind::Outside) next[q] = 1;
        band = next;
    }
    return band;
}

// ---------------------------------------------------------------- problem files

inline DirichletProblem read_problem(std::istream& in, SolverConfig& cfg) {
    GridTable t = read_grid_table(in);
    for (const char* col : {"sub", "super", "kind"})
        if (!t.columns.count(col)) throw std::invalid_argument(std::string("problem file needs column ") + col);
    DirichletProblem P;
    P.label = "file";
    P.grid = t.grid;
    int n = t.grid.geometry == Geometry::Radial ? t.grid.ambient : t.grid.dim();
    auto need = [&](const char* key) {
        auto it = t.header.find(key);
        if (it == t.header.end()) throw std::invalid_argument(std::string("problem file needs header ") + key + "=");
        return it->second;
    };
    P.F = parse_operator(need("F"), n);
    P.U = parse_cone(need("U"), n);
    for (const auto& [key, val] : t.header) {
        if (key == "tol") cfg.tol = parse_real(val);
        else if (key == "max_sweeps") cfg.max_sweeps = std::stoi(val);
        else if (key != "F" && key != "U" && key != "geometry") throw std::invalid_argument("unknown problem key: " + key);
    }
    P.sub = t.columns["sub"];
    P.super = t.columns["super"];
    P.kind.clear();
    for (double v : t.columns["kind"]) {
        if (v != 0.0 && v != 1.0 && v != 2.0) throw std::invalid_argument("node kind must be 0, 1 or 2");
        P.kind.push_back(static_cast<NodeKind>(static_cast<int>(v)));
    }
    P.validate();
    return P;
}

inline void write_problem(std::ostream& os, const DirichletProblem& P, const SolverConfig& cfg) {
    os << "F=" << P.F.name << "\nU=" << P.U.str() << "\ntol=" << format_real(cfg.tol)
       << "\nmax_sweeps=" << cfg.max_sweeps << "\n";
    if (P.grid.geometry == Geometry::Radial) os << "geometry=radial:" << P.grid.ambient << "\n";
    os << (P.grid.dim() == 2 ? "x,y,sub,super,kind\n" : "x,sub,super,kind\n");
    for (std::size_t k = 0; k < P.grid.size(); ++k) {
        os << format_real(P.grid.coord(0, P.grid.ix(k)));
        if (P.grid.dim() == 2) os << "," << format_real(P.grid.coord(1, P.grid.iy(k)));
        os << "," << format_real(P.sub[k]) << "," << format_real(P.super[k]) << "," << static_cast<int>(P.kind[k])
           << "\n";
    }
}

inline void write_solution(std::ostream& os, const DirichletProblem& P, const SolveResult& R, const Vec* exact = nullptr) {
    os << (P.grid.dim() == 2 ? "node,x,y,u,residual_class" : "node,x,u,residual_class") << (exact ? ",error" : "")
       << "\n";
    for (std::size_t k = 0; k < P.grid.size(); ++k) {
        if (P.kind[k] == NodeKind::Outside) continue;
        os << k << "," << format_real(P.grid.coord(0, P.grid.ix(k)));
        if (P.grid.dim() == 2) os << "," << format_real(P.grid.coord(1, P.grid.iy(k)));
        os << "," << format_real(R.u.values[k]) << ","
           << (P.kind[k] == NodeKind::Boundary ? "dirichlet" : verdict_name(R.classes[k]));
        if (exact) os << "," << format_real(std::abs(R.u.values[k] - (*exact)[k]));
        os << "\n";
    }
}

}  // namespace viscone
