#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "envelopes.hpp"
#include "grid.hpp"
#include "matcone.hpp"
#include "operators.hpp"
#include "radial.hpp"

namespace viscone {

inline ConeClass jet_classify(const Jet2& j, const OperatorSpec& F, const ConeSpec& U, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("jet_classify needs tol > 0");
    return classify(eval_F(j, F), U, tol);
}

// ---------------------------------------------------------------- discrete jets

// Centered-difference jet at an interior node; empty when a stencil value is masked or r = 0.
inline std::optional<Jet2> discrete_jet(const GridFn& g, std::size_t k) {
    if (g.on_edge(k) || g.masked(k)) return std::nullopt;
    for (std::size_t q : g.neighbors(k))
        if (g.masked(q)) return std::nullopt;
    const int i = g.ix(k), j = g.iy(k);
    const double u = g.values[k];
    if (g.dim() == 1) {
        double h = g.h(0);
        double um = g.values[g.index(i - 1)], up = g.values[g.index(i + 1)];
        double d1 = (up - um) / (2 * h), d2 = (up - 2 * u + um) / (h * h);
        double x = g.coord(0, i);
        if (g.geometry == Geometry::Radial) {
            if (!(x > 0)) return std::nullopt;
            return radial_jet(x, u, d1, d2, g.ambient);
        }
        Jet2 J{{x}, u, {d1}, SymMatrix(1)};
        J.H(0, 0) = d2;
        return J;
    }
    for (int di : {-1, 1})
        for (int dj : {-1, 1})
            if (g.masked(g.index(i + di, j + dj))) return std::nullopt;
    double hx = g.h(0), hy = g.h(1);
    auto v = [&](int a, int b) { return g.values[g.index(i + a, j + b)]; };
    Jet2 J{g.point(k), u, {(v(1, 0) - v(-1, 0)) / (2 * hx), (v(0, 1) - v(0, -1)) / (2 * hy)}, SymMatrix(2)};
    J.H(0, 0) = (v(1, 0) - 2 * u + v(-1, 0)) / (hx * hx);
    J.H(1, 1) = (v(0, 1) - 2 * u + v(0, -1)) / (hy * hy);
    J.H(0, 1) = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) / (4 * hx * hy);
    return J;
}

inline double default_grid_tol(const GridFn& g) {
    double h = g.h(0);
    if (g.dim() == 2) h = std::max(h, g.h(1));
    return 1e-6 + 4 * h * h;
}

// ---------------------------------------------------------------- grid verification

struct NodeClass {
    std::size_t node = 0;
    Verdict verdict = Verdict::Boundary;
    double margin = 0.0;
};

struct GridReport {
    double tol = 0.0;
    std::vector<NodeClass> nodes;  // interior nodes with a discrete jet
    std::size_t skipped = 0;
    std::size_t interior = 0, boundary = 0, outside = 0;
    std::vector<std::size_t> sub_fail;    // F outside the closure of U
    std::vector<std::size_t> super_fail;  // F inside U
    double max_abs_margin = 0.0;

    bool consistent_sub() const { return sub_fail.empty() && !nodes.empty(); }
    bool consistent_super() const { return super_fail.empty() && !nodes.empty(); }
    bool consistent_solution() const { return consistent_sub() && consistent_super(); }
};

inline GridReport grid_verify(const GridFn& psi, const OperatorSpec& F, const ConeSpec& U, double tol) {
    GridReport rep;
    rep.tol = tol;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        if (psi.on_edge(k)) continue;
        auto J = discrete_jet(psi, k);
        if (!J) {
            ++rep.skipped;
            continue;
        }
        ConeClass c = classify(eval_F(*J, F), U, tol);
        rep.nodes.push_back({k, c.verdict, c.margin});
        rep.max_abs_margin = std::max(rep.max_abs_margin, std::abs(c.margin));
        switch (c.verdict) {
            case Verdict::Interior:
                ++rep.interior;
                rep.super_fail.push_back(k);
                break;
            case Verdict::Boundary: ++rep.boundary; break;
            case Verdict::Outside:
                ++rep.outside;
                rep.sub_fail.push_back(k);
                break;
        }
    }
    return rep;
}

// ---------------------------------------------------------------- first variation

struct PerturbationParams {
    double mu = 0.0, tau = 0.0, alpha = 0.0, beta = 0.0, delta = 0.0, K0 = 0.0, m = 2.0, M = 1.0;
    double mu0 = 0.0;
};

struct PerturbationPrecondition : std::domain_error {
    using std::domain_error::domain_error;
};

struct FirstVariation {
    Jet2 jet;
    SymMatrix gap;
    double min_eig = 0.0;
};

namespace detail {

inline double bump_phi(const Vec& x, double alpha) { return std::exp(alpha * norm2(x)); }

inline double working_bracket(const Jet2& j, const PerturbationParams& P) {
    return bump_phi(j.x, P.alpha) + std::exp(-P.beta * j.s) - P.tau;
}

inline void check_working_set(const Jet2& j, const PerturbationParams& P) {
    if (!(P.mu > 0)) throw PerturbationPrecondition("perturbation needs mu > 0");
    if (std::abs(j.s) > P.M) throw PerturbationPrecondition("jet value outside |s| <= M");
    if (working_bracket(j, P) < -P.delta) throw PerturbationPrecondition("jet outside the working set");
}

// Jet of ψ + σμ(e^{α|x|²} + e^{−βψ} − τ), σ = ±1.
inline Jet2 perturbed_jet(const Jet2& j, const PerturbationParams& P, double sigma) {
    const int n = static_cast<int>(j.x.size());
    const double phi = bump_phi(j.x, P.alpha);
    const double e = std::exp(-P.beta * j.s);
    const double fp = P.beta * e;
    const double sm = sigma * P.mu;
    Jet2 out = j;
    out.s = j.s + sm * (phi + e - P.tau);
    out.p = axpy(2 * sm * P.alpha * phi, j.x, scaled(1 - sm * fp, j.p));
    SymMatrix Hphi = SymMatrix::scalar(n, 2 * P.alpha * phi);
    Hphi += (4 * P.alpha * P.alpha * phi) * SymMatrix::outer(j.x);
    out.H = (1 - sm * fp) * j.H;
    out.H += sm * Hphi;
    out.H += (sm * P.beta * P.beta * e) * SymMatrix::outer(j.p);
    return out;
}

inline SymMatrix excess_term(const Jet2& j, const PerturbationParams& P) {
    const int n = static_cast<int>(j.p.size());
    SymMatrix E = SymMatrix::scalar(n, 1 + std::pow(norm(j.p), P.m));
    E += SymMatrix::outer(j.p);
    return (P.mu * P.K0) * E;
}

}  // namespace detail

// gap = F[ψ̃] − (1 − μβe^{−βs})F[ψ] − μK₀[(1 + |p|^m)I + p⊗p]
inline FirstVariation first_variation_tilde(const Jet2& j, const PerturbationParams& P, const OperatorSpec& F) {
    detail::check_working_set(j, P);
    FirstVariation out;
    out.jet = detail::perturbed_jet(j, P, 1.0);
    double fp = P.beta * std::exp(-P.beta * j.s);
    out.gap = eval_F(out.jet, F);
    out.gap -= (1 - P.mu * fp) * eval_F(j, F);
    out.gap -= detail::excess_term(j, P);
    out.min_eig = eigen_sym(out.gap).min();
    return out;
}

// gap = (1 + μβe^{−βs})F[ψ] − μK₀[(1 + |p|^m)I + p⊗p] − F[ψ̂]
inline FirstVariation first_variation_hat(const Jet2& j, const PerturbationParams& P, const OperatorSpec& F) {
    detail::check_working_set(j, P);
    FirstVariation out;
    out.jet = detail::perturbed_jet(j, P, -1.0);
    double fp = P.beta * std::exp(-P.beta * j.s);
    out.gap = (1 + P.mu * fp) * eval_F(j, F);
    out.gap -= detail::excess_term(j, P);
    out.gap -= eval_F(out.jet, F);
    out.min_eig = eigen_sym(out.gap).min();
    return out;
}

// Random jet in the working set: x in [−1,1]^n, |s| ≤ M, |p| ≤ p_max, |H| ≤ 10; τ puts the bracket in [−δ, 1].
inline Jet2 random_working_jet(std::mt19937_64& rng, const PerturbationParams& P, int n, double p_max,
                               double& tau_out) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), u01(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    Jet2 j{Vec(n), P.M * u(rng), Vec(n), SymMatrix(n)};
    for (double& v : j.x) v = u(rng);
    Vec d(n);
    for (double& v : d) v = g(rng);
    j.p = scaled(p_max * u01(rng) / norm(d), d);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) j.H(a, b) = 10.0 * u(rng) / n;
    double bracket = -P.delta + (1.0 + P.delta) * u01(rng);
    tau_out = detail::bump_phi(j.x, P.alpha) + std::exp(-P.beta * j.s) - bracket;
    return j;
}

struct GapScan {
    double worst = std::numeric_limits<double>::infinity();
    int samples = 0;
};

inline GapScan scan_first_variation(const PerturbationParams& base, const OperatorSpec& F, bool hat, int samples,
                                    std::uint64_t seed, int n = 3, double p_max = 10.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    GapScan scan;
    for (int i = 0; i < samples; ++i) {
        PerturbationParams P = base;
        Jet2 j = random_working_jet(rng, P, n, p_max, P.tau);
        P.mu = P.mu0 * (1e-3 + (1 - 1e-3) * u01(rng));
        FirstVariation fv = hat ? first_variation_hat(j, P, F) : first_variation_tilde(j, P, F);
        scan.worst = std::min(scan.worst, fv.min_eig);
        ++scan.samples;
    }
    return scan;
}

struct ConstantSearch {
    PerturbationParams params;
    double C = 0.0;
    double theta_bar = 0.0;
    int rounds = 0;
    bool calibrated = false;
    double calibration_worst = 0.0;
};

// Constant cascade: C from the structural probe, β = 2C, α the largest dyadic value meeting
// α sup φ (1/f′ + 1) ≤ 1/C and αφ/(8f′) ≤ θ̄, δ with f′ − Cδ ≥ f′/2, μ₀ from the normalizations, then
// K₀ from the surviving excess terms. C doubles until a calibration scan is clean.
inline ConstantSearch search_first_variation_constants(const OperatorSpec& F, double M, double m, bool hat,
                                                       std::uint64_t seed, int n = 3, double tol = 1e-10) {
    ConstantSearch out;
    double C = 2.0;
    double theta_bar = 1.0;
    for (int it = 0; it < 5; ++it) {
        ProbeReport pr = probe_L_conditions(F, M, 8.0 * C, m, 200, seed, n);
        double C1 = std::max(pr.get("x-Lipschitz").fitted_C, pr.get("s-Lipschitz").fitted_C);
        const auto& ps = pr.get(hat ? "p-structure-mirror" : "p-structure");
        double C2 = ps.holds ? ps.fitted_C : C;
        theta_bar = ps.holds ? ps.theta_bar : theta_bar;
        double next = std::max({C1, C2, 2.0});
        if (std::abs(next - C) <= 1e-9 * C) break;
        C = next;
    }
    out.theta_bar = theta_bar;
    const double R2 = static_cast<double>(n);  // sup |x|² on [−1,1]^n
    for (int round = 0; round < 24; ++round) {
        PerturbationParams P;
        P.M = M;
        P.m = m;
        P.beta = 2 * C;
        double fmin = P.beta * std::exp(-P.beta * M), fmax = P.beta * std::exp(P.beta * M);
        for (int k = 1; k < 200; ++k) {
            double a = std::ldexp(1.0, -k);
            double phimax = std::exp(a * R2);
            if (a * phimax * (1.0 / fmin + 1.0) <= 1.0 / C && a * phimax / (8 * fmin) <= theta_bar) {
                P.alpha = a;
                break;
            }
        }
        P.delta = 0.5;
        while (P.delta > fmin / (2 * C)) P.delta *= 0.5;
        P.mu0 = 0.5;
        while (P.mu0 * (1 + fmax) > 1.0 / C || P.mu0 * P.beta * std::exp(P.beta * M) > 0.5) P.mu0 *= 0.5;
        P.K0 = std::min({P.alpha, fmin / C, 0.5 * P.beta * fmin});
        out.params = P;
        out.C = C;
        out.rounds = round + 1;
        GapScan cal = scan_first_variation(P, F, hat, 200, seed + 1, n);
        out.calibration_worst = cal.worst;
        if (cal.worst >= -tol) {
            out.calibrated = true;
            return out;
        }
        C *= 2;
    }
    return out;
}

// ---------------------------------------------------------------- regularization error

struct EnvelopeErrorReport {
    Side side = Side::Lower;
    double eps = 0.0;
    double fitted_a = 0.0;
    std::size_t checked = 0, skipped = 0, infeasible = 0, contact = 0;
    bool pass() const { return infeasible == 0 && checked > 0; }
};

// Supersolution side: F[w_ε] − a|x_* − x|(1 + |x_* − x|/ε)|∇w_ε|^m I ∉ U. Subsolution side mirrors with + and ∈ Ū.
inline EnvelopeErrorReport envelope_error_check(const GridFn& w, double eps, const OperatorSpec& F, const ConeSpec& U,
                                                double M, Side side = Side::Lower, double tol = -1.0) {
    EnvelopeErrorReport rep;
    rep.side = side;
    rep.eps = eps;
    if (tol < 0) tol = default_grid_tol(w);
    // 1D grids use the interpolated envelope so the extremal point moves continuously with x.
    EnvelopeResult E;
    Vec extremal;
    if (w.dim() == 1) {
        ContinuousEnvelope CE = side == Side::Lower ? lower_envelope_interpolated(w, eps) : upper_envelope_interpolated(w, eps);
        E = CE.result;
        extremal = CE.extremal;
    } else {
        E = envelope(w, eps, side);
    }
    const double sgn = side == Side::Lower ? 1.0 : -1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w.on_edge(k)) continue;
        auto J = discrete_jet(E.env, k);
        // The stencil must not see extremal points pinned to the domain edge.
        bool extremal_on_edge = false;
        std::vector<std::size_t> stencil = w.neighbors(k);
        stencil.push_back(k);
        for (std::size_t q : stencil)
            extremal_on_edge = extremal_on_edge || (w.dim() == 1 ? (extremal[q] <= w.lo[0] || extremal[q] >= w.hi[0])
                                                                 : w.on_edge(E.argpt[q]));
        if (!J || extremal_on_edge || std::abs(E.env.values[k]) + std::abs(w.values[E.argpt[k]]) > M) {
            ++rep.skipped;
            continue;
        }
        ++rep.checked;
        double d = w.dim() == 1 ? std::abs(extremal[k] - w.coord(0, w.ix(k))) : std::sqrt(w.sq_dist(k, E.argpt[k]));
        if (d == 0.0) ++rep.contact;
        double c = d * (1 + d / eps) * std::pow(norm(J->p), F.m);
        SymMatrix Fm = eval_F(*J, F);
        Spectrum sp = eigen_sym(Fm);
        // slack(λ − σ a c) is monotone in a; find the least a with the required classification.
        auto ok = [&](double a) {
            Vec lam = sp.values;
            for (double& l : lam) l -= sgn * a * c;
            double s = cone_slack(lam, U);
            return side == Side::Lower ? s <= tol : s >= -tol;
        };
        if (ok(0.0)) continue;
        if (c == 0.0 || !ok(1e12)) {
            ++rep.infeasible;
            continue;
        }
        double lo = 0.0, hi = 1.0;
        while (!ok(hi)) hi *= 2;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (ok(mid) ? hi : lo) = mid;
        }
        rep.fitted_a = std::max(rep.fitted_a, hi);
    }
    return rep;
}

// ---------------------------------------------------------------- touching

enum class Propagation { Consistent, Violated };

inline const char* propagation_name(Propagation p) {
    return p == Propagation::Consistent ? "PropagationConsistent" : "PropagationViolated";
}

struct TouchComponent {
    std::vector<std::size_t> nodes;
    bool boundary_contact = false;
    double min_gap = 0.0;
};

struct TouchReport {
    std::vector<TouchComponent> components;
    Propagation verdict = Propagation::Consistent;
    double min_gap = 0.0;
    double min_boundary_gap = 0.0;
    std::size_t interior_only = 0;
    bool signatures_checked = false;
    std::size_t w_super_failures = 0;  // nodes where w is not a discrete supersolution
    std::size_t v_sub_failures = 0;    // nodes where v is not a discrete subsolution
};

// Boundary nodes of the domain: grid edges, except r = 0 on radial grids (the center of a ball).
inline bool domain_boundary(const GridFn& g, std::size_t k) {
    if (g.geometry == Geometry::Radial && g.ix(k) == 0 && g.lo[0] == 0.0) return false;
    if (g.masked(k)) return false;
    if (g.on_edge(k)) return true;
    for (std::size_t q : g.neighbors(k))
        if (g.masked(q)) return true;
    return false;
}

inline TouchReport touching_experiment(const GridFn& w, const GridFn& v, double tol) {
    if (!w.same_layout(v)) throw std::invalid_argument("touching experiment: grids mismatched");
    TouchReport rep;
    const std::size_t N = w.size();
    std::vector<char> live(N, 0), touch(N, 0);
    rep.min_gap = std::numeric_limits<double>::infinity();
    rep.min_boundary_gap = std::numeric_limits<double>::infinity();
    GridFn mask = w;
    for (std::size_t k = 0; k < N; ++k) {
        live[k] = std::isfinite(w.values[k]) && std::isfinite(v.values[k]);
        if (!live[k]) {
            mask.values[k] = std::numeric_limits<double>::infinity();
            continue;
        }
        mask.values[k] = 0.0;
        double gap = w.values[k] - v.values[k];
        if (gap < -tol) throw std::invalid_argument("touching experiment needs w >= v - tol");
        rep.min_gap = std::min(rep.min_gap, gap);
        touch[k] = gap <= tol;
    }
    for (std::size_t k = 0; k < N; ++k)
        if (live[k] && domain_boundary(mask, k))
            rep.min_boundary_gap = std::min(rep.min_boundary_gap, w.values[k] - v.values[k]);
    std::vector<char> seen(N, 0);
    for (std::size_t k = 0; k < N; ++k) {
        if (!touch[k] || seen[k]) continue;
        TouchComponent comp;
        comp.min_gap = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> stack{k};
        seen[k] = 1;
        while (!stack.empty()) {
            std::size_t q = stack.back();
            stack.pop_back();
            comp.nodes.push_back(q);
            comp.min_gap = std::min(comp.min_gap, w.values[q] - v.values[q]);
            if (domain_boundary(mask, q)) comp.boundary_contact = true;
            for (std::size_t r : w.neighbors(q))
                if (touch[r] && !seen[r]) {
                    seen[r] = 1;
                    stack.push_back(r);
                }
        }
        std::sort(comp.nodes.begin(), comp.nodes.end());
        if (!comp.boundary_contact) ++rep.interior_only;
        rep.components.push_back(comp);
    }
    bool strict_boundary = rep.min_boundary_gap > tol;
    if (rep.interior_only > 0 && strict_boundary) rep.verdict = Propagation::Violated;
    return rep;
}

// Same experiment, also recording how far w and v are from discrete super/subsolutions. The counts are
// informational and do not change the verdict.
inline TouchReport touching_experiment(const GridFn& w, const GridFn& v, const OperatorSpec& F, const ConeSpec& U,
                                       double tol) {
    TouchReport rep = touching_experiment(w, v, tol);
    rep.signatures_checked = true;
    rep.w_super_failures = grid_verify(w, F, U, default_grid_tol(w)).super_fail.size();
    rep.v_sub_failures = grid_verify(v, F, U, default_grid_tol(v)).sub_fail.size();
    return rep;
}

// Radial grids carrying the (w, v) pair of a counterexample certificate.
inline std::pair<GridFn, GridFn> certificate_pair(const CtexCertificate& c) {
    if (c.rows.size() < 3) throw std::invalid_argument("certificate has too few rows");
    GridFn w = GridFn::radial(c.rows.front().r, c.rows.back().r, static_cast<int>(c.rows.size()), c.params.n);
    GridFn v = w;
    for (std::size_t k = 0; k < c.rows.size(); ++k) {
        w.values[k] = c.rows[k].w;
        v.values[k] = c.rows[k].v;
    }
    return {w, v};
}

// ψ_{μ_w} and ψ_{μ_v} of the log-singular family on r_lo ≤ r ≤ r_hi.
inline std::pair<GridFn, GridFn> log_singular_pair(double mu_w, double mu_v, double alpha, double beta, int n,
                                                   double r_lo, double r_hi, int nodes) {
    auto pw = profiles::log_singular(mu_w, alpha, beta, n), pv = profiles::log_singular(mu_v, alpha, beta, n);
    GridFn w = GridFn::radial(r_lo, r_hi, nodes, n), v = w;
    for (std::size_t k = 0; k < w.size(); ++k) {
        double r = w.coord(0, static_cast<int>(k));
        w.values[k] = pw.f(r);
        v.values[k] = pv.f(r);
    }
    return {w, v};
}

// ---------------------------------------------------------------- moving spheres

struct SphereCase {
    Vec x;
    double lambda = 0.0;
    double worst_excess = -std::numeric_limits<double>::infinity();  // max of u_{x,λ} − u over the lattice
    double sphere_error = 0.0;                                        // max |u_{x,λ} − u| on |y − x| = λ
    double boundary_excess = -std::numeric_limits<double>::infinity();  // max of u_{x,λ} − inf u on |y| = 3/4
};

struct MovingSphereReport {
    double sup_u = 0.0, inf_u = 0.0, R = 0.0, tol = 0.0;
    std::size_t lattice = 0;
    std::vector<SphereCase> cases;
    double lipschitz_quotient = 0.0;
    bool inequality_ok() const {
        for (const auto& c : cases)
            if (c.worst_excess > tol) return false;
        return !cases.empty();
    }
    bool sphere_ok() const {
        for (const auto& c : cases)
            if (c.sphere_error > tol) return false;
        return !cases.empty();
    }
    bool boundary_ok() const {
        for (const auto& c : cases)
            if (c.boundary_excess > tol) return false;
        return !cases.empty();
    }
    bool pass() const { return inequality_ok() && sphere_ok() && boundary_ok(); }
};

namespace detail {

inline std::vector<Vec> ball_lattice(int n, double radius, double h) {
    std::vector<Vec> pts;
    int m = static_cast<int>(std::floor(radius / h));
    std::vector<int> idx(n, -m);
    while (true) {
        Vec p(n);
        for (int a = 0; a < n; ++a) p[a] = idx[a] * h;
        if (norm2(p) < radius * radius) pts.push_back(p);
        int a = 0;
        while (a < n && ++idx[a] > m) idx[a++] = -m;
        if (a == n) break;
    }
    return pts;
}

inline std::vector<Vec> sphere_points(int n, const Vec& center, double radius, int count, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) {
        Vec d(n);
        for (double& v : d) v = g(rng);
        out.push_back(axpy(radius / norm(d), d, center));
    }
    return out;
}

}  // namespace detail

// Checks u_{x,λ} ≤ u on lattice nodes of B(0,3/4) outside B(x,λ), equality on the sphere |y − x| = λ,
// and the boundary estimate u_{x,λ} ≤ inf u on |y| = 3/4.
inline MovingSphereReport moving_sphere_check(const FieldOracle& u, int n, const std::vector<Vec>& xs,
                                              const std::vector<double>& lambdas, double h = 0.05,
                                              double tol = 1e-8, std::uint64_t seed = 1) {
    if (xs.size() != lambdas.size()) throw std::invalid_argument("one lambda per center");
    MovingSphereReport rep;
    rep.tol = tol;
    std::mt19937_64 rng(seed);
    auto unit_ball = detail::ball_lattice(n, 1.0, h);
    auto rim = detail::sphere_points(n, Vec(n, 0.0), 1.0, 400, rng);
    rep.sup_u = -std::numeric_limits<double>::infinity();
    rep.inf_u = std::numeric_limits<double>::infinity();
    for (const auto* set : {&unit_ball, &rim})
        for (const auto& y : *set) {
            double val = u.value(y);
            if (!(val > 0)) throw std::domain_error("moving spheres need u > 0");
            rep.sup_u = std::max(rep.sup_u, val);
            rep.inf_u = std::min(rep.inf_u, val);
        }
    rep.R = moving_sphere_radius(rep.sup_u, rep.inf_u, n);
    auto lattice = detail::ball_lattice(n, 0.75, h);
    rep.lattice = lattice.size();
    for (std::size_t c = 0; c < xs.size(); ++c) {
        const Vec& x = xs[c];
        double lam = lambdas[c];
        if (norm(x) > 0.5 + 1e-15) throw std::invalid_argument("moving sphere centers must lie in the closed half ball");
        if (!(lam > 0) || lam > rep.R) throw std::invalid_argument("moving sphere radius exceeds R");
        SphereCase sc;
        sc.x = x;
        sc.lambda = lam;
        for (const auto& y : lattice) {
            if (norm(axpy(-1.0, x, y)) < lam) continue;
            sc.worst_excess = std::max(sc.worst_excess, kelvin(u, x, lam, y, n) - u.value(y));
        }
        for (const auto& y : detail::sphere_points(n, x, lam, 64, rng))
            sc.sphere_error = std::max(sc.sphere_error, std::abs(kelvin(u, x, lam, y, n) - u.value(y)));
        for (const auto& y : detail::sphere_points(n, Vec(n, 0.0), 0.75, 64, rng))
            sc.boundary_excess = std::max(sc.boundary_excess, kelvin(u, x, lam, y, n) - rep.inf_u);
        rep.cases.push_back(sc);
    }
    for (std::size_t a = 0; a < lattice.size(); a += 7)
        for (std::size_t b = a + 1; b < lattice.size(); b += 13) {
            double d = norm(axpy(-1.0, lattice[a], lattice[b]));
            if (d < h) continue;
            rep.lipschitz_quotient = std::max(rep.lipschitz_quotient, std::abs(u.value(lattice[a]) - u.value(lattice[b])) / d);
        }
    return rep;
}

}  // namespace viscone
