#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matcone.hpp"
#include "operators.hpp"
#include "rational.hpp"

namespace viscone {

// ---------------------------------------------------------------- double-double helpers

struct DD {
    double hi = 0.0, lo = 0.0;
    double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double e = (a - (s - bb)) + (b - bb);
    return {s, e};
}
inline DD dd_add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return two_sum(s.hi, s.lo);
}
inline DD dd_mul(DD a, DD b) {
    double p = a.hi * b.hi;
    double e = std::fma(a.hi, b.hi, -p);
    e += a.hi * b.lo + a.lo * b.hi;
    return two_sum(p, e);
}

// ---------------------------------------------------------------- radial profiles

struct RadialProfile {
    std::string family;
    double r_lo = 0.0, r_hi = 1.0;
    std::function<double(double)> f, d1, d2;
    std::vector<double> singular;

    bool is_singular(double r) const {
        for (double s : singular)
            if (r == s) return true;
        return false;
    }
};

namespace profiles {

// t^{1/3}|r − r₀|^{2/3}
inline RadialProfile power_two_thirds(double t, double r0) {
    double c = std::cbrt(t);
    RadialProfile P;
    P.family = "power_two_thirds";
    P.r_lo = 0.0;
    P.r_hi = 2.0 * r0 + 1.0;
    P.f = [=](double r) { return c * std::pow(std::abs(r - r0), 2.0 / 3.0); };
    P.d1 = [=](double r) {
        double d = r - r0;
        return (2.0 / 3.0) * c * (d > 0 ? 1.0 : -1.0) * std::pow(std::abs(d), -1.0 / 3.0);
    };
    P.d2 = [=](double r) { return -(2.0 / 9.0) * c * std::pow(std::abs(r - r0), -4.0 / 3.0); };
    P.singular = {r0};
    return P;
}

// |x|^{λ+1}/((λ+1)(λ+n−1)^λ) with λ = 1/(1−γ); solves Δψ = |∇ψ|^γ.
inline RadialProfile holder_ctex(double gamma, int n) {
    if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("holder profile needs gamma in (0,1)");
    double lam = 1.0 / (1.0 - gamma);
    double K = std::pow(lam + n - 1.0, lam);
    RadialProfile P;
    P.family = "holder_ctex";
    P.r_lo = 0.0;
    P.r_hi = 1.0;
    P.f = [=](double r) { return std::pow(r, lam + 1.0) / ((lam + 1.0) * K); };
    P.d1 = [=](double r) { return std::pow(r, lam) / K; };
    P.d2 = [=](double r) { return lam * std::pow(r, lam - 1.0) / K; };
    return P;
}

// −(m−1)^{(m−2)/(m−1)}(m−2)^{−1}(r−1)^{(m−2)/(m−1)} on (1, a]; ψ″ = |ψ′|^m.
inline RadialProfile blip_ctex(double m, double a = 2.0) {
    if (!(m > 2)) throw std::invalid_argument("blip profile needs m > 2");
    RadialProfile P;
    P.family = "blip_ctex";
    P.r_lo = 1.0;
    P.r_hi = a;
    P.f = [=](double r) {
        double k = (m - 2.0) / (m - 1.0);
        return -std::pow(m - 1.0, k) / (m - 2.0) * std::pow(r - 1.0, k);
    };
    P.d1 = [=](double r) { return -std::pow((m - 1.0) * (r - 1.0), -1.0 / (m - 1.0)); };
    P.d2 = [=](double r) { return std::pow((m - 1.0) * (r - 1.0), -m / (m - 1.0)); };
    P.singular = {1.0};
    return P;
}

// ln(r^{2−n} + μ)/(α − nβ)
inline RadialProfile log_singular(double mu, double alpha, double beta, int n) {
    double kappa = 1.0 / (alpha - n * beta);
    RadialProfile P;
    P.family = "log_singular";
    P.r_lo = 0.0;
    P.r_hi = 1.0;
    P.f = [=](double r) { return kappa * std::log(std::pow(r, 2.0 - n) + mu); };
    P.d1 = [=](double r) {
        double h = std::pow(r, 2.0 - n) + mu;
        return kappa * (2.0 - n) * std::pow(r, 1.0 - n) / h;
    };
    P.d2 = [=](double r) {
        double h = std::pow(r, 2.0 - n) + mu;
        double h1 = (2.0 - n) * std::pow(r, 1.0 - n);
        double h2 = (2.0 - n) * (1.0 - n) * std::pow(r, -1.0 * n);
        return kappa * (h2 / h - h1 * h1 / (h * h));
    };
    P.singular = {0.0};
    return P;
}

// (δ/2) ln cosh(r − r₀)
inline RadialProfile tanh_bump(double delta, double r0) {
    RadialProfile P;
    P.family = "tanh_bump";
    P.r_lo = r0 - 1.0;
    P.r_hi = r0 + 1.0;
    P.f = [=](double r) { return 0.5 * delta * std::log(std::cosh(r - r0)); };
    P.d1 = [=](double r) { return 0.5 * delta * std::tanh(r - r0); };
    P.d2 = [=](double r) {
        double c = std::cosh(r - r0);
        return 0.5 * delta / (c * c);
    };
    return P;
}

// Piecewise-linear interpolation of sampled values and derivatives.
inline RadialProfile sampled(const Vec& r, const Vec& psi, const Vec& dpsi, const Vec& ddpsi) {
    if (r.size() < 2 || psi.size() != r.size() || dpsi.size() != r.size() || ddpsi.size() != r.size())
        throw std::invalid_argument("sampled profile: size mismatch");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw std::invalid_argument("sampled profile: radii must increase");
    auto interp = [r](const Vec& y) {
        return [r, y](double x) {
            if (x <= r.front()) return y.front();
            if (x >= r.back()) return y.back();
            std::size_t k = std::upper_bound(r.begin(), r.end(), x) - r.begin();
            double t = (x - r[k - 1]) / (r[k] - r[k - 1]);
            return (1 - t) * y[k - 1] + t * y[k];
        };
    };
    RadialProfile P;
    P.family = "sampled";
    P.r_lo = r.front();
    P.r_hi = r.back();
    P.f = interp(psi);
    P.d1 = interp(dpsi);
    P.d2 = interp(ddpsi);
    return P;
}

}  // namespace profiles

// Jet of a radial function at x = r e₁ in R^n.
inline Jet2 radial_jet(double r, double s, double d1, double d2, int n) {
    Jet2 j{unit(n, 0), s, unit(n, 0), SymMatrix(n)};
    j.x[0] = r;
    j.p[0] = d1;
    j.H(0, 0) = d2;
    for (int i = 1; i < n; ++i) j.H(i, i) = d1 / r;
    return j;
}

struct RadialEigs {
    double mu = 0.0;  // radial eigenvalue, multiplicity one
    double nu = 0.0;  // tangential eigenvalue, multiplicity n − 1
};

// Eigenvalues of F at a radial jet, read off the generic operator evaluation.
inline RadialEigs radial_F_eigs(double r, double s, double dpsi, double ddpsi, const OperatorSpec& F, int n = 3) {
    if (!(r > 0)) throw std::domain_error("radial eigenvalues need r > 0");
    SymMatrix M = eval_F(radial_jet(r, s, dpsi, ddpsi, n), F);
    return {M(0, 0), M(1, 1)};
}

inline RadialEigs radial_F_eigs(const RadialProfile& P, double r, const OperatorSpec& F, int n = 3) {
    return radial_F_eigs(r, P.f(r), P.d1(r), P.d2(r), F, n);
}

// ---------------------------------------------------------------- quartics

// c₄t⁴ + c₂t² + c₁t + c₀, with exact rational coefficients when available.
struct QuarticSpec {
    double c4 = 1.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;
    std::optional<std::array<Rational, 4>> exact;  // c4, c2, c1, c0

    static QuarticSpec from_rational(Rational c4, Rational c2, Rational c1, Rational c0) {
        if (c4.num() == 0) throw std::invalid_argument("quartic needs c4 != 0");
        QuarticSpec q{c4.to_double(), c2.to_double(), c1.to_double(), c0.to_double(),
                      std::array<Rational, 4>{c4, c2, c1, c0}};
        return q;
    }
    static QuarticSpec from_double(double c4, double c2, double c1, double c0) {
        if (c4 == 0) throw std::invalid_argument("quartic needs c4 != 0");
        return QuarticSpec{c4, c2, c1, c0, std::nullopt};
    }
};

enum class QuarticVariant { P4, P4tilde };

namespace quartics {

// 64t⁴ + 324αt² + 729t
inline QuarticSpec p4(const Rational& alpha) { return QuarticSpec::from_rational(64, Rational(324) * alpha, 729, 0); }
// 6400t⁴ + 32400αt² + 729t
inline QuarticSpec p4_tilde(const Rational& alpha) {
    return QuarticSpec::from_rational(6400, Rational(32400) * alpha, 729, 0);
}
// 8P₄ + 6561, whose roots make the radial eigenvalue vanish.
inline QuarticSpec p4_shifted(const Rational& alpha) {
    return QuarticSpec::from_rational(512, Rational(2592) * alpha, 5832, 6561);
}
inline QuarticSpec p4_shifted(double alpha) { return QuarticSpec::from_double(512, 2592 * alpha, 5832, 6561); }
// 2P̃₄ + 164025
inline QuarticSpec p4_tilde_shifted(const Rational& alpha) {
    return QuarticSpec::from_rational(12800, Rational(64800) * alpha, 1458, 164025);
}
inline QuarticSpec p4_tilde_shifted(double alpha) {
    return QuarticSpec::from_double(12800, 64800 * alpha, 1458, 164025);
}

}  // namespace quartics

inline Rational quartic_eval(const QuarticSpec& q, const Rational& t) {
    if (!q.exact) throw std::invalid_argument("quartic has no exact coefficients");
    const auto& c = *q.exact;
    Rational t2 = t * t;
    return c[0] * t2 * t2 + c[1] * t2 + c[2] * t + c[3];
}

// Horner evaluation in double-double at t = hi + lo.
inline DD quartic_eval_dd(const QuarticSpec& q, DD t) {
    DD acc{q.c4, 0.0};
    acc = dd_mul(acc, t);
    acc = dd_add(dd_mul(acc, t), DD{q.c2, 0.0});
    acc = dd_add(dd_mul(acc, t), DD{q.c1, 0.0});
    acc = dd_add(dd_mul(acc, t), DD{q.c0, 0.0});
    return acc;
}

inline double quartic_eval(const QuarticSpec& q, double t) { return quartic_eval_dd(q, DD{t, 0.0}).value(); }

inline double quartic_derivative(const QuarticSpec& q, double t) { return 4 * q.c4 * t * t * t + 2 * q.c2 * t + q.c1; }

struct QuarticRoot {
    double t = 0.0;
    double t_lo = 0.0;  // double-double correction after Newton polish
    double bracket_lo = 0.0, bracket_hi = 0.0;
    DD value() const { return DD{t, t_lo}; }
};

struct RootReport {
    std::vector<QuarticRoot> roots;
    std::vector<double> unresolved;  // probe locations of suspected even-multiplicity roots
    bool resolved() const { return unresolved.empty(); }
};

// Sign-change bracketing on a uniform probe grid, bisection to floating-point adjacency,
// then one double-double Newton step for the low part.
inline RootReport quartic_roots(const QuarticSpec& q, double lo = -10.0, double hi = 10.0, int probes = 1024) {
    RootReport rep;
    auto val = [&](double t) { return quartic_eval(q, t); };
    auto size_at = [&](double t) {
        double a = std::abs(t);
        return std::abs(q.c4) * a * a * a * a + std::abs(q.c2) * a * a + std::abs(q.c1) * a + std::abs(q.c0);
    };
    auto isolate = [&](double a, double b, double fa) {
        while (true) {
            double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            double fm = val(mid);
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if ((fm < 0) == (fa < 0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        QuarticRoot r{0.5 * (a + b), 0.0, a, b};
        double d = quartic_derivative(q, r.t);
        if (d != 0.0) {
            DD res = quartic_eval_dd(q, DD{r.t, 0.0});
            DD corr = two_sum(r.t, -res.value() / d);
            r.t = corr.hi;
            r.t_lo = corr.lo;
        }
        rep.roots.push_back(r);
    };
    Vec ts(probes + 1), vs(probes + 1);
    for (int i = 0; i <= probes; ++i) {
        ts[i] = lo + (hi - lo) * i / probes;
        vs[i] = val(ts[i]);
    }
    for (int i = 0; i <= probes; ++i) {
        if (vs[i] == 0.0) {
            rep.roots.push_back({ts[i], 0.0, ts[i], ts[i]});
            continue;
        }
        if (i < probes && vs[i + 1] != 0.0 && (vs[i] < 0) != (vs[i + 1] < 0)) isolate(ts[i], ts[i + 1], vs[i]);
        // Local minimum of |q| without a sign change: search the two neighboring cells for a dip through
        // zero (two close roots) or a tangency (even multiplicity).
        bool dip = i > 0 && i < probes && vs[i - 1] != 0.0 && vs[i + 1] != 0.0 && (vs[i - 1] < 0) == (vs[i] < 0) &&
                   (vs[i] < 0) == (vs[i + 1] < 0) && std::abs(vs[i]) < std::abs(vs[i - 1]) &&
                   std::abs(vs[i]) <= std::abs(vs[i + 1]);
        if (!dip) continue;
        double sgn = vs[i] < 0 ? -1.0 : 1.0;
        double a = ts[i - 1], b = ts[i + 1];
        for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
            double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            if (sgn * val(m1) < sgn * val(m2)) b = m2;
            else a = m1;
        }
        double tm = 0.5 * (a + b), fm = val(tm);
        if ((fm < 0) != (vs[i] < 0) && fm != 0.0) {
            isolate(ts[i - 1], tm, vs[i - 1]);
            isolate(tm, ts[i + 1], fm);
        } else if (std::abs(fm) <= 1e-12 * size_at(tm)) {
            rep.unresolved.push_back(tm);
        }
    }
    std::sort(rep.roots.begin(), rep.roots.end(), [](const QuarticRoot& x, const QuarticRoot& y) { return x.t < y.t; });
    return rep;
}

// ---------------------------------------------------------------- closed-form eigenvalues of ψ_t

struct Lambda12 {
    double lambda1 = 0.0, lambda2 = 0.0;
};

namespace detail {
struct VariantConstants {
    double K, shift, radial;
};
inline VariantConstants constants(QuarticVariant v) {
    if (v == QuarticVariant::P4) return {2.0 / 59049.0, 6561.0, 19683.0};
    return {2.0 / 1476225.0, 164025.0, 492075.0};
}
}  // namespace detail

// Closed forms given the shifted quartic value q(t) (8P₄+6561 or 2P̃₄+164025).
inline Lambda12 lambda12_from_residual(double t, double q_value, double r, double r0, QuarticVariant variant) {
    if (r == r0) throw std::domain_error("closed-form eigenvalues undefined at r0");
    if (!(r > 0)) throw std::domain_error("closed-form eigenvalues need r > 0");
    auto c = detail::constants(variant);
    double d43 = std::pow(std::abs(r - r0), 4.0 / 3.0);
    double ct = std::cbrt(t);
    Lambda12 out;
    out.lambda1 = -c.K * ct * q_value / d43;
    out.lambda2 = -c.K * ct * (q_value - c.shift - c.radial * (r - r0) / r) / d43;
    return out;
}

inline QuarticSpec shifted_quartic(double alpha, QuarticVariant variant) {
    return variant == QuarticVariant::P4 ? quartics::p4_shifted(alpha) : quartics::p4_tilde_shifted(alpha);
}

inline Lambda12 lambda12_t(double t, double r, double r0, double alpha, QuarticVariant variant) {
    return lambda12_from_residual(t, quartic_eval(shifted_quartic(alpha, variant), t), r, r0, variant);
}

inline Lambda12 lambda12_root(const QuarticRoot& root, const QuarticSpec& q, double r, double r0, QuarticVariant v) {
    return lambda12_from_residual(root.t, quartic_eval_dd(q, root.value()).value(), r, r0, v);
}

// ---------------------------------------------------------------- interpolated lower-order term

// Coefficient of |p|⁴ in L̃ at s = σ|p|^{−2} for σ = ±32/45: −(σ³ + ασ + 1/100).
inline Rational gap_endpoint_coefficient(int side, const Rational& alpha) {
    Rational sigma(side > 0 ? 32 : -32, 45);
    return -(sigma * sigma * sigma + alpha * sigma + Rational(1, 100));
}

// L = c I outside the band |s||p|² < 32/45 equals L̃; inside, cubic Hermite in s matching
// values and s-derivatives of L̃ at the band edges. Because L̃ is itself cubic in s the
// interpolant reproduces L̃, and since L̃(−s*) < L̃(s*) it cannot be non-increasing in s.
inline double monotone_interp_L(double p_norm, double s, double alpha = -36.0 / 25.0) {
    auto Lt = [&](double x) { return builtin::sextic_coefficient(x, p_norm, alpha, 0.01); };
    double p2 = p_norm * p_norm, p4 = p2 * p2, p6 = p4 * p2, p10 = p6 * p4;
    auto dLt = [&](double x) { return -(3.0 * x * x * p10 + alpha * p6); };
    double sstar = (32.0 / 45.0) / p2;
    if (std::abs(s) >= sstar) return Lt(s);
    double a = -sstar, b = sstar, hlen = b - a;
    double u = (s - a) / hlen;
    double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
    double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
    return h00 * Lt(a) + h10 * hlen * dLt(a) + h01 * Lt(b) + h11 * hlen * dLt(b);
}

// ---------------------------------------------------------------- log-singular family

struct LogSingularCheck {
    double trace_residual = 0.0;
    Spectrum spectrum;
    double min_eigenvalue = 0.0;
};

inline LogSingularCheck log_singular_check(double mu, double alpha, double beta, int n, const Vec& x) {
    if (!(alpha - n * beta > 0)) throw std::invalid_argument("log-singular family needs alpha - n beta > 0");
    if (norm(x) == 0.0) throw std::domain_error("log-singular family is singular at 0");
    Jet2 j = fields::log_singular(mu, alpha, beta, n).jet(x);
    SymMatrix M = eval_F(j, OperatorSpec::quad_const(alpha, beta));
    LogSingularCheck out;
    out.trace_residual = M.trace();
    out.spectrum = eigen_sym(M);
    out.min_eigenvalue = out.spectrum.min();
    return out;
}

// ---------------------------------------------------------------- counterexample certificates

enum class CtexKind { BetaSign, NonDecL, HolderRHS, BPrimeNonzero };

inline const char* ctex_name(CtexKind k) {
    switch (k) {
        case CtexKind::BetaSign: return "beta-sign";
        case CtexKind::NonDecL: return "nondec";
        case CtexKind::HolderRHS: return "holder";
        case CtexKind::BPrimeNonzero: return "bprime";
    }
    return "?";
}

struct CtexParams {
    double alpha = -3.0;  // BetaSign; NonDecL uses −36/25
    double gamma = 0.5;   // HolderRHS
    int n = 3;
    double r0 = 1.0;
};

struct CertificateRow {
    double r = 0, w = 0, v = 0, mu_w = 0, nu_w = 0, mu_v = 0, nu_v = 0;
    bool singular = false;
    bool ok = true;
};

struct Clause {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CtexCertificate {
    CtexKind kind = CtexKind::BetaSign;
    CtexParams params;
    double delta = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    std::vector<QuarticRoot> roots;
    bool roots_resolved = true;
    double t0 = 0.0;
    std::vector<CertificateRow> rows;
    std::vector<double> touching;
    double max_abs_lambda1 = 0.0;
    std::vector<Clause> clauses;

    bool pass() const {
        if (clauses.empty()) return false;
        for (const auto& c : clauses)
            if (!c.pass) return false;
        return true;
    }
    const Clause* clause(const std::string& name) const {
        for (const auto& c : clauses)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline Vec uniform_grid(double lo, double hi, int count) {
    Vec r(count);
    for (int i = 0; i < count; ++i) r[i] = lo + (hi - lo) * i / (count - 1);
    if (count % 2 == 1) r[count / 2] = 0.5 * (lo + hi);
    return r;
}

// Shared row checks for a pair (w, v) with touching point r_touch and boundary radii.
inline void finish_pair_clauses(CtexCertificate& c, double r_touch, const std::vector<double>& boundary) {
    bool ordered = true, only_touch = true;
    double min_gap_ratio = std::numeric_limits<double>::infinity();
    for (const auto& row : c.rows) {
        double gap = row.w - row.v;
        if (gap < 0) ordered = false;
        if (gap <= 0) {
            c.touching.push_back(row.r);
            if (row.r != r_touch) only_touch = false;
        } else if (row.r != r_touch) {
            double d = std::abs(row.r - r_touch);
            min_gap_ratio = std::min(min_gap_ratio, gap / std::pow(d, 2.0 / 3.0));
        }
    }
    bool touched = !c.touching.empty();
    c.clauses.push_back({"w >= v on grid", ordered, ""});
    c.clauses.push_back({"touching set is {r0}", only_touch && touched,
                         "min (w-v)/|r-r0|^(2/3) off r0 = " + fmt(min_gap_ratio)});
    bool ends = true;
    for (const auto& row : c.rows)
        for (double b : boundary)
            if (row.r == b && !(row.w > row.v)) ends = false;
    c.clauses.push_back({"w > v at domain endpoints", ends, ""});
}

}  // namespace detail

namespace detail {

// Power-two-thirds counterexamples (beta sign and the non-decreasing-modification variant).
inline CtexCertificate build_power_pair(CtexKind kind, const CtexParams& prm, int rgrid) {
    CtexCertificate c;
    c.kind = kind;
    c.params = prm;
    const bool tilde = kind == CtexKind::NonDecL;
    const QuarticVariant variant = tilde ? QuarticVariant::P4tilde : QuarticVariant::P4;
    const double alpha = tilde ? -36.0 / 25.0 : prm.alpha;
    c.params.alpha = alpha;
    const double r0 = prm.r0;
    QuarticSpec q = tilde ? quartics::p4_tilde_shifted(Rational(-36, 25)) : quartics::p4_shifted(alpha);

    RootReport rr = quartic_roots(q);
    c.roots = rr.roots;
    c.roots_resolved = rr.resolved() && rr.roots.size() == 4;
    {
        std::string detail = std::to_string(rr.roots.size()) + " roots";
        bool inter = false;
        if (rr.roots.size() == 4) {
            const auto& t = rr.roots;
            if (tilde)
                inter = t[0].bracket_hi < -2 && -2 < t[1].bracket_lo && t[1].bracket_hi < -1.6 &&
                        1.6 < t[2].bracket_lo && t[2].bracket_hi < 2 && 2 < t[3].bracket_lo;
            else
                inter = t[0].bracket_hi < -2 && -2 < t[1].bracket_lo && t[1].bracket_hi < 0 &&
                        0 < t[2].bracket_lo && t[2].bracket_hi < 2.25 && 2.25 < t[3].bracket_lo;
        }
        c.clauses.push_back({"four interlaced roots", c.roots_resolved && inter, detail});
        if (!(c.roots_resolved && inter)) return c;
    }
    const auto& t = c.roots;
    const std::vector<int> sign_roots = tilde ? std::vector<int>{1, 2, 3} : std::vector<int>{0, 1, 2, 3};

    auto lam = [&](double tt, double r) { return lambda12_t(tt, r, r0, alpha, variant); };
    auto band_ok = [&](double delta, double t0) {
        Vec rs = uniform_grid(r0 - delta, r0 + delta, rgrid);
        for (double r : rs) {
            if (r == r0) continue;
            for (int i : sign_roots) {
                Lambda12 l = lambda12_root(t[i], q, r, r0, variant);
                if (!(t[i].t * l.lambda2 > 0)) return false;
            }
            Lambda12 l0 = lam(t0, r);
            if (!(l0.lambda1 > 0 && l0.lambda2 > 0)) return false;
        }
        return true;
    };

    // t₀: fixed for the modified variant, otherwise searched downward from t₁.
    auto find_t0 = [&](double delta) {
        if (tilde) return -3.0;
        for (int k = 1; k <= 400; ++k) {
            double cand = t[0].t - 0.05 * k;
            Vec rs = uniform_grid(r0 - delta, r0 + delta, rgrid);
            bool ok = true;
            for (double r : rs) {
                if (r == r0) continue;
                Lambda12 l0 = lam(cand, r);
                if (!(l0.lambda1 > 0 && l0.lambda2 > 0)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return cand;
        }
        return std::numeric_limits<double>::quiet_NaN();
    };

    double delta = 0.0;
    for (int k = 2; k <= 20; ++k) {
        double cand = std::ldexp(1.0, -k);
        double t0 = find_t0(cand);
        if (std::isnan(t0)) continue;
        if (band_ok(cand, t0)) {
            delta = cand;
            c.t0 = t0;
            break;
        }
    }
    c.clauses.push_back({"eigenvalue sign pattern on a dyadic band", delta > 0,
                         "delta=" + fmt(delta) + " t0=" + fmt(c.t0)});
    if (!(delta > 0)) return c;
    c.delta = delta;
    c.r_lo = r0 - delta;
    c.r_hi = r0 + delta;

    const QuarticRoot& w_right = t[3];
    const QuarticRoot& w_left = t[1];
    const QuarticRoot& v_right = t[2];
    bool super_ok = true, sub_ok = true;
    for (double r : uniform_grid(r0 - delta, r0 + delta, rgrid)) {
        CertificateRow row;
        row.r = r;
        double d23 = std::pow(std::abs(r - r0), 2.0 / 3.0);
        const QuarticRoot& wr = r >= r0 ? w_right : w_left;
        row.w = std::cbrt(wr.t) * d23;
        double tv = r >= r0 ? v_right.t : c.t0;
        row.v = std::cbrt(tv) * d23;
        if (r == r0) {
            row.singular = true;
            row.w = row.v = 0.0;
            c.rows.push_back(row);
            continue;
        }
        Lambda12 lw = lambda12_root(wr, q, r, r0, variant);
        Lambda12 lv = r >= r0 ? lambda12_root(v_right, q, r, r0, variant) : lam(c.t0, r);
        row.mu_w = lw.lambda1;
        row.nu_w = lw.lambda2;
        row.mu_v = lv.lambda1;
        row.nu_v = lv.lambda2;
        for (const auto& root : t)
            c.max_abs_lambda1 = std::max(c.max_abs_lambda1, std::abs(lambda12_root(root, q, r, r0, variant).lambda1));
        // Supersolution: F[w] not positive definite. Subsolution: F[v] non-negative definite.
        bool s1 = std::min(row.mu_w, row.nu_w) <= 1e-9;
        bool s2 = std::min(row.mu_v, row.nu_v) >= -1e-9;
        row.ok = s1 && s2;
        super_ok = super_ok && s1;
        sub_ok = sub_ok && s2;
        c.rows.push_back(row);
    }
    c.clauses.push_back({"|lambda1| at roots <= 1e-9", c.max_abs_lambda1 <= 1e-9, "max=" + fmt(c.max_abs_lambda1)});
    c.clauses.push_back({"w supersolution signature", super_ok, ""});
    c.clauses.push_back({"v subsolution signature", sub_ok, ""});

    // Closed forms against the generic operator pipeline.
    {
        OperatorSpec F = tilde ? builtin::nondec_tilde(alpha) : builtin::beta_sign(alpha);
        double worst = 0.0;
        for (std::size_t i = 0; i < c.rows.size(); i += 50) {
            const auto& row = c.rows[i];
            if (row.singular) continue;
            for (double tt : {w_right.t, w_left.t, c.t0}) {
                auto P = profiles::power_two_thirds(tt, r0);
                RadialEigs e = radial_F_eigs(P, row.r, F, prm.n);
                Lambda12 l = lam(tt, row.r);
                double scale = std::abs(P.d2(row.r)) + std::abs(P.d1(row.r) / row.r) + 1e-300;
                worst = std::max({worst, std::abs(e.mu - l.lambda1) / scale, std::abs(e.nu - l.lambda2) / scale});
            }
        }
        c.clauses.push_back({"closed forms match operator evaluation", worst <= 1e-9, "max rel=" + fmt(worst)});
    }
    if (tilde) {
        // (s, p) of each piece satisfies s|p|² = (4/9)t.
        bool inN = true;
        for (double tt : {w_right.t, w_left.t, v_right.t, c.t0}) inN = inN && std::abs(4.0 / 9.0 * tt) >= 32.0 / 45.0;
        c.clauses.push_back({"pieces lie where the interpolated term equals the sextic", inN, ""});
    }
    finish_pair_clauses(c, r0, {r0 - delta, r0 + delta});
    return c;
}

inline CtexCertificate build_bprime(const CtexParams& prm, int rgrid) {
    CtexCertificate c;
    c.kind = CtexKind::BPrimeNonzero;
    c.params = prm;
    const double r0 = 2.0, delta = 0.5;
    c.params.r0 = r0;
    c.delta = delta;
    c.r_lo = r0 - 1.0;
    c.r_hi = r0 + 1.0;
    OperatorSpec F = OperatorSpec::rot_inv(builtin::radial_coefficient("zero"), builtin::radial_coefficient("neg-id"),
                                           "rotinv:zero:neg-id");
    // b(s) < 0 and r₀ > s/|b(s)| for s in (0, δ/2].
    bool b_ok = true;
    for (int i = 1; i <= 100; ++i) {
        double s = 0.5 * delta * i / 100.0;
        double b = F.b_fn(s);
        b_ok = b_ok && b < 0 && r0 > s / std::abs(b);
    }
    c.clauses.push_back({"b(s) < 0 and r0 > s/|b(s)| near 0", b_ok, ""});
    auto w = profiles::tanh_bump(delta, r0);
    bool super_ok = true, sub_ok = true, nu_zero = false;
    for (double r : uniform_grid(c.r_lo, c.r_hi, rgrid)) {
        CertificateRow row;
        row.r = r;
        row.w = w.f(r);
        row.v = 0.0;
        RadialEigs ew = radial_F_eigs(w, r, F, prm.n);
        RadialEigs ev = radial_F_eigs(r, 0.0, 0.0, 0.0, F, prm.n);
        row.mu_w = ew.mu;
        row.nu_w = ew.nu;
        row.mu_v = ev.mu;
        row.nu_v = ev.nu;
        bool s1 = std::min(ew.mu, ew.nu) <= 0.0 && ew.nu <= 0.0;
        bool s2 = std::min(ev.mu, ev.nu) >= 0.0;
        if (r == r0) nu_zero = ew.nu == 0.0;
        row.ok = s1 && s2;
        super_ok = super_ok && s1;
        sub_ok = sub_ok && s2;
        c.rows.push_back(row);
    }
    c.clauses.push_back({"w supersolution signature", super_ok, "nu <= 0 on the annulus"});
    c.clauses.push_back({"nu vanishes at r0", nu_zero, ""});
    c.clauses.push_back({"v subsolution signature", sub_ok, ""});
    finish_pair_clauses(c, r0, {c.r_lo, c.r_hi});
    return c;
}

inline CtexCertificate build_holder(const CtexParams& prm, int rgrid) {
    CtexCertificate c;
    c.kind = CtexKind::HolderRHS;
    c.params = prm;
    c.params.r0 = 0.0;
    c.r_lo = 0.0;
    c.r_hi = 1.0;
    OperatorSpec F = builtin::holder(prm.gamma, prm.n);
    auto w = profiles::holder_ctex(prm.gamma, prm.n);
    bool super_ok = true, sub_ok = true;
    double worst = 0.0;
    for (double r : uniform_grid(0.0, 1.0, rgrid)) {
        CertificateRow row;
        row.r = r;
        row.w = w.f(r);
        row.v = 0.0;
        if (r == 0.0) {
            // ψ̂ is C² at the origin with zero jet, so F vanishes there.
            row.singular = true;
            c.rows.push_back(row);
            continue;
        }
        RadialEigs ew = radial_F_eigs(w, r, F, prm.n);
        RadialEigs ev = radial_F_eigs(r, 0.0, 0.0, 0.0, F, prm.n);
        row.mu_w = ew.mu;
        row.nu_w = ew.nu;
        row.mu_v = ev.mu;
        row.nu_v = ev.nu;
        double trace = ew.mu + (prm.n - 1) * ew.nu;
        double scale = std::abs(w.d2(r)) + (prm.n - 1) * std::abs(w.d1(r) / r) + 1e-300;
        worst = std::max(worst, std::abs(trace) / scale);
        bool ok = std::abs(trace) <= 1e-10 * scale;
        row.ok = ok;
        super_ok = super_ok && ok;
        sub_ok = sub_ok && (ev.mu + (prm.n - 1) * ev.nu) == 0.0;
        c.rows.push_back(row);
    }
    c.clauses.push_back({"w solves the trace equation", super_ok, "max rel residual=" + fmt(worst)});
    c.clauses.push_back({"v solves the trace equation", sub_ok, ""});
    finish_pair_clauses(c, 0.0, {1.0});
    return c;
}

}  // namespace detail

inline CtexCertificate build_counterexample(CtexKind kind, const CtexParams& params, int rgrid = 2001) {
    if (rgrid < 3) throw std::invalid_argument("certificate grid needs at least 3 points");
    switch (kind) {
        case CtexKind::BetaSign:
        case CtexKind::NonDecL: return detail::build_power_pair(kind, params, rgrid);
        case CtexKind::BPrimeNonzero: return detail::build_bprime(params, rgrid);
        case CtexKind::HolderRHS: return detail::build_holder(params, rgrid);
    }
    throw std::invalid_argument("unknown counterexample kind");
}

inline void write_certificate_csv(std::ostream& os, const CtexCertificate& c) {
    os.precision(17);
    for (const auto& cl : c.clauses)
        os << "# clause: " << cl.name << " = " << (cl.pass ? "pass" : "fail")
           << (cl.detail.empty() ? "" : " (" + cl.detail + ")") << "\n";
    os << "# verdict: " << (c.pass() ? "pass" : "fail") << "\n";
    os << "r,w,v,mu_w,nu_w,mu_v,nu_v,verdict\n";
    for (const auto& row : c.rows) {
        os << row.r << "," << row.w << "," << row.v << ",";
        if (row.singular)
            os << "nan,nan,nan,nan,touch\n";
        else
            os << row.mu_w << "," << row.nu_w << "," << row.mu_v << "," << row.nu_v << ","
               << (row.ok ? "ok" : "fail") << "\n";
    }
    if (!c.roots.empty()) {
        os << "\ni,t_i,bracket_lo,bracket_hi\n";
        for (std::size_t i = 0; i < c.roots.size(); ++i)
            os << i + 1 << "," << c.roots[i].t << "," << c.roots[i].bracket_lo << "," << c.roots[i].bracket_hi << "\n";
    }
}

}  // namespace viscone
