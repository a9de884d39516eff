#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matcone.hpp"

namespace viscone {

// Second-order jet (x, value, gradient, Hessian).
struct Jet2 {
    Vec x;
    double s = 0.0;
    Vec p;
    SymMatrix H;

    int n() const { return static_cast<int>(x.size()); }
    void validate() const {
        if (p.size() != x.size() || H.n() != static_cast<int>(x.size()))
            throw std::invalid_argument("jet dimensions disagree");
    }
};

// ---------------------------------------------------------------- conformal operators

inline SymMatrix conformal_hessian_u(const Jet2& j, int n) {
    if (n < 3) throw std::invalid_argument("conformal Hessian needs n >= 3");
    if (!(j.s > 0)) throw std::domain_error("conformal Hessian needs u > 0");
    const double d = n - 2.0;
    const double u = j.s;
    const double a = -(2.0 / d) * std::pow(u, -(n + 2.0) / d);
    const double b = std::pow(u, -2.0 * n / d) / (d * d);
    SymMatrix out = a * j.H;
    out += (2.0 * n * b) * SymMatrix::outer(j.p);
    out += SymMatrix::scalar(j.H.n(), -2.0 * b * norm2(j.p));
    return out;
}

inline SymMatrix conformal_A_w(const Jet2& j) {
    SymMatrix out = j.s * j.H;
    out += SymMatrix::scalar(j.H.n(), -0.5 * norm2(j.p));
    return out;
}

inline SymMatrix conformal_A_psi(const Jet2& j) {
    SymMatrix out = j.H;
    out += SymMatrix::outer(j.p);
    out += SymMatrix::scalar(j.H.n(), -0.5 * norm2(j.p));
    return out;
}

// ---------------------------------------------------------------- operator strings

enum class OpKind { ConformalA, QuadConst, QuadVar, GeneralL, RotInv };

using ScalarXS = std::function<double(const Vec& x, double s)>;
using LowerOrder = std::function<SymMatrix(const Vec& x, double s, const Vec& p)>;
using Radial1 = std::function<double(double)>;

// F[ψ] = ∇²ψ + L(x, ψ, ∇ψ).
struct OperatorSpec {
    OpKind kind = OpKind::ConformalA;
    std::string name = "conformal";
    double alpha = 1.0, beta = 0.5;  // QuadConst
    ScalarXS alpha_fn, beta_fn;      // QuadVar
    LowerOrder L_fn;                 // GeneralL
    Radial1 a_fn, b_fn;              // RotInv: L = a(|p|) p⊗p + b(|p|) I
    double m = 2.0;                  // growth exponent in |p|

    static OperatorSpec conformal() { return {}; }
    static OperatorSpec quad_const(double a, double b) {
        OperatorSpec F;
        F.kind = OpKind::QuadConst;
        F.alpha = a;
        F.beta = b;
        std::ostringstream os;
        os.precision(17);
        os << "quad:" << a << ":" << b;
        F.name = os.str();
        return F;
    }
    static OperatorSpec quad_var(ScalarXS a, ScalarXS b, std::string name) {
        OperatorSpec F;
        F.kind = OpKind::QuadVar;
        F.alpha_fn = std::move(a);
        F.beta_fn = std::move(b);
        F.name = std::move(name);
        return F;
    }
    static OperatorSpec general(LowerOrder L, double m, std::string name) {
        OperatorSpec F;
        F.kind = OpKind::GeneralL;
        F.L_fn = std::move(L);
        F.m = m;
        F.name = std::move(name);
        return F;
    }
    static OperatorSpec rot_inv(Radial1 a, Radial1 b, std::string name) {
        OperatorSpec F;
        F.kind = OpKind::RotInv;
        F.a_fn = std::move(a);
        F.b_fn = std::move(b);
        F.name = std::move(name);
        return F;
    }
};

inline SymMatrix lower_order(const OperatorSpec& F, const Vec& x, double s, const Vec& p) {
    const int n = static_cast<int>(p.size());
    switch (F.kind) {
        case OpKind::ConformalA: {
            SymMatrix L = SymMatrix::outer(p);
            L += SymMatrix::scalar(n, -0.5 * norm2(p));
            return L;
        }
        case OpKind::QuadConst: {
            SymMatrix L = F.alpha * SymMatrix::outer(p);
            L += SymMatrix::scalar(n, -F.beta * norm2(p));
            return L;
        }
        case OpKind::QuadVar: {
            SymMatrix L = F.alpha_fn(x, s) * SymMatrix::outer(p);
            L += SymMatrix::scalar(n, -F.beta_fn(x, s) * norm2(p));
            return L;
        }
        case OpKind::GeneralL: return F.L_fn(x, s, p);
        case OpKind::RotInv: {
            double t = norm(p);
            SymMatrix L = F.a_fn(t) * SymMatrix::outer(p);
            L += SymMatrix::scalar(n, F.b_fn(t));
            return L;
        }
    }
    return SymMatrix(n);
}

inline SymMatrix eval_F(const Jet2& j, const OperatorSpec& F) {
    j.validate();
    return j.H + lower_order(F, j.x, j.s, j.p);
}

// ---------------------------------------------------------------- named built-ins

namespace builtin {

// α(s) p⊗p − β(s)|p|^m I with α non-decreasing, β non-increasing and β > 1/2.
inline double tanh_alpha(double s) { return 1.0 + 0.5 * std::tanh(s); }
inline double tanh_beta(double s) { return 1.0 - 0.25 * std::tanh(s); }

inline OperatorSpec tanh_coeff(double m = 2.0) {
    if (m < 2.0) throw std::invalid_argument("tanh_coeff needs m >= 2");
    auto L = [m](const Vec&, double s, const Vec& p) {
        SymMatrix out = tanh_alpha(s) * SymMatrix::outer(p);
        out += SymMatrix::scalar(static_cast<int>(p.size()), -tanh_beta(s) * std::pow(norm(p), m));
        return out;
    };
    std::ostringstream os;
    os << "genL:tanh:" << m;
    return OperatorSpec::general(L, m, os.str());
}

// Scalar coefficient c with L = c I, for −(s³|p|¹⁰ + α s|p|⁶ + κ|p|⁴) I.
inline double sextic_coefficient(double s, double pn, double alpha, double kappa) {
    double p2 = pn * pn, p4 = p2 * p2, p6 = p4 * p2, p10 = p6 * p4;
    return -(s * s * s * p10 + alpha * s * p6 + kappa * p4);
}

inline OperatorSpec beta_sign(double alpha = -3.0) {
    auto L = [alpha](const Vec&, double s, const Vec& p) {
        return SymMatrix::scalar(static_cast<int>(p.size()), sextic_coefficient(s, norm(p), alpha, 1.0));
    };
    std::ostringstream os;
    os.precision(17);
    os << "genL:beta-sign:" << alpha;
    return OperatorSpec::general(L, 10.0, os.str());
}

inline OperatorSpec nondec_tilde(double alpha = -36.0 / 25.0) {
    auto L = [alpha](const Vec&, double s, const Vec& p) {
        return SymMatrix::scalar(static_cast<int>(p.size()), sextic_coefficient(s, norm(p), alpha, 0.01));
    };
    std::ostringstream os;
    os.precision(17);
    os << "genL:nondec-tilde:" << alpha;
    return OperatorSpec::general(L, 10.0, os.str());
}

// Trace of F equals Δψ − |∇ψ|^γ.
inline OperatorSpec holder(double gamma, int n) {
    auto L = [gamma, n](const Vec&, double, const Vec& p) {
        return SymMatrix::scalar(static_cast<int>(p.size()), -std::pow(norm(p), gamma) / n);
    };
    std::ostringstream os;
    os.precision(17);
    os << "genL:holder:" << gamma;
    return OperatorSpec::general(L, gamma, os.str());
}

inline OperatorSpec blip(double m) {
    auto L = [m](const Vec&, double, const Vec& p) {
        return SymMatrix::scalar(static_cast<int>(p.size()), -std::pow(norm(p), m));
    };
    std::ostringstream os;
    os.precision(17);
    os << "genL:blip:" << m;
    return OperatorSpec::general(L, m, os.str());
}

inline Radial1 radial_coefficient(const std::string& name) {
    if (name == "zero") return [](double) { return 0.0; };
    if (name == "one") return [](double) { return 1.0; };
    if (name == "neg-id") return [](double t) { return -t; };
    if (name == "neg-sq") return [](double t) { return -t * t; };
    throw std::invalid_argument("unknown radial coefficient: " + name);
}

}  // namespace builtin

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            return parse_number(s.substr(0, slash)) / parse_number(s.substr(slash + 1));
        }
        v = std::stod(s, &used);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("not a number: " + s);
    }
    if (used != s.size()) throw std::invalid_argument("not a number: " + s);
    return v;
}

// Textual forms: conformal | quad:<a>:<b> | rotinv:<a>:<b> | genL:<name>[:<param>].
inline OperatorSpec parse_operator(const std::string& text, int n) {
    auto parts = split(text, ':');
    const std::string& head = parts[0];
    if (head == "conformal" && parts.size() == 1) return OperatorSpec::conformal();
    if (head == "quad" && parts.size() == 3) return OperatorSpec::quad_const(parse_number(parts[1]), parse_number(parts[2]));
    if (head == "rotinv" && parts.size() == 3) {
        return OperatorSpec::rot_inv(builtin::radial_coefficient(parts[1]), builtin::radial_coefficient(parts[2]), text);
    }
    if (head == "genL" && (parts.size() == 2 || parts.size() == 3)) {
        const std::string& name = parts[1];
        bool has = parts.size() == 3;
        double param = has ? parse_number(parts[2]) : 0.0;
        if (name == "tanh") return builtin::tanh_coeff(has ? param : 2.0);
        if (name == "beta-sign") return builtin::beta_sign(has ? param : -3.0);
        if (name == "nondec-tilde" || name == "nondec") return builtin::nondec_tilde(has ? param : -36.0 / 25.0);
        if (name == "holder") return builtin::holder(has ? param : 0.5, n);
        if (name == "blip") return builtin::blip(has ? param : 3.0);
        throw std::invalid_argument("unknown built-in lower-order term: " + name);
    }
    throw std::invalid_argument("malformed operator string: " + text);
}

// ---------------------------------------------------------------- analytic fields

struct FieldOracle {
    std::string name;
    int n = 3;
    std::function<Jet2(const Vec&)> jet;

    double value(const Vec& x) const { return jet(x).s; }
};

namespace fields {

inline Jet2 make_jet(const Vec& x) { return Jet2{x, 0.0, Vec(x.size(), 0.0), SymMatrix(static_cast<int>(x.size()))}; }

inline FieldOracle constant(double c, int n) {
    return {"constant", n, [c](const Vec& x) {
                Jet2 j = make_jet(x);
                j.s = c;
                return j;
            }};
}

// |x|^{2−n}
inline FieldOracle fundamental(int n) {
    return {"fundamental", n, [n](const Vec& x) {
                Jet2 j = make_jet(x);
                double r2 = norm2(x), r = std::sqrt(r2);
                if (r == 0.0) throw std::domain_error("fundamental solution singular at 0");
                double rn = std::pow(r, -n);
                j.s = std::pow(r, 2.0 - n);
                j.p = scaled((2.0 - n) * rn, x);
                j.H = ((2.0 - n) * rn) * (SymMatrix::identity(n) - (n / r2) * SymMatrix::outer(x));
                return j;
            }};
}

// (1+|x|²)^{−(n−2)/2}
inline FieldOracle bubble(int n) {
    return {"bubble", n, [n](const Vec& x) {
                Jet2 j = make_jet(x);
                double q = 1.0 + norm2(x), k = (n - 2.0) / 2.0;
                j.s = std::pow(q, -k);
                j.p = scaled(-2.0 * k * std::pow(q, -k - 1.0), x);
                j.H = (-2.0 * k * std::pow(q, -k - 1.0)) * SymMatrix::identity(n);
                j.H += (4.0 * k * (k + 1.0) * std::pow(q, -k - 2.0)) * SymMatrix::outer(x);
                return j;
            }};
}

// ψ_μ = ln(|x|^{2−n} + μ)/(α − nβ)
inline FieldOracle log_singular(double mu, double alpha, double beta, int n) {
    double kappa = 1.0 / (alpha - n * beta);
    return {"log_singular", n, [=](const Vec& x) {
                Jet2 h = fundamental(n).jet(x);
                double hv = h.s + mu;
                if (!(hv > 0)) throw std::domain_error("log-singular field needs |x|^{2-n} + mu > 0");
                Jet2 j = make_jet(x);
                j.s = kappa * std::log(hv);
                j.p = scaled(kappa / hv, h.p);
                j.H = (kappa / hv) * h.H - (kappa / (hv * hv)) * SymMatrix::outer(h.p);
                return j;
            }};
}

// u = exp(−(n−2)ψ/2) for a ψ-field.
inline FieldOracle conformal_factor(const FieldOracle& psi) {
    int n = psi.n;
    auto inner = psi.jet;
    return {"conformal_factor(" + psi.name + ")", n, [inner, n](const Vec& x) {
                Jet2 q = inner(x);
                double c = -(n - 2.0) / 2.0;
                double e = std::exp(c * q.s);
                Jet2 j = make_jet(x);
                j.s = e;
                j.p = scaled(c * e, q.p);
                j.H = (c * e) * q.H + (c * c * e) * SymMatrix::outer(q.p);
                return j;
            }};
}

// c₀ + b·x + ½ xᵀAx
inline FieldOracle quadratic(double c0, const Vec& b, const SymMatrix& A) {
    int n = static_cast<int>(b.size());
    return {"quadratic", n, [=](const Vec& x) {
                Jet2 j = make_jet(x);
                Vec Ax = A.apply(x);
                j.s = c0 + dot(b, x) + 0.5 * dot(x, Ax);
                for (int i = 0; i < n; ++i) j.p[i] = b[i] + Ax[i];
                j.H = A;
                return j;
            }};
}

}  // namespace fields

struct ConsistencyReport {
    SymMatrix A_u, A_w, A_psi_scaled;
    double deviation = 0.0;
    double scale = 1.0;  // pass compares deviation against tol·max(1, |A^u|)
    bool pass = false;
};

// Compares A^u with A_w (w = u^{−2/(n−2)}) and e^{2ψ}A[ψ] (ψ = −(2/(n−2)) ln u) through chain-rule jets.
inline ConsistencyReport consistency_check(const FieldOracle& u_oracle, const Vec& x, int n, double tol) {
    Jet2 u = u_oracle.jet(x);
    if (!(u.s > 0)) throw std::domain_error("consistency check needs u > 0");
    const double d = n - 2.0;

    Jet2 psi = fields::make_jet(x);
    psi.s = -(2.0 / d) * std::log(u.s);
    psi.p = scaled(-(2.0 / d) / u.s, u.p);
    psi.H = (-(2.0 / d) / u.s) * u.H + ((2.0 / d) / (u.s * u.s)) * SymMatrix::outer(u.p);

    const double q = -2.0 / d;
    Jet2 w = fields::make_jet(x);
    w.s = std::pow(u.s, q);
    w.p = scaled(q * std::pow(u.s, q - 1.0), u.p);
    w.H = (q * std::pow(u.s, q - 1.0)) * u.H + (q * (q - 1.0) * std::pow(u.s, q - 2.0)) * SymMatrix::outer(u.p);

    ConsistencyReport rep;
    rep.A_u = conformal_hessian_u(u, n);
    rep.A_w = conformal_A_w(w);
    rep.A_psi_scaled = std::exp(2.0 * psi.s) * conformal_A_psi(psi);
    rep.deviation = std::max({(rep.A_u - rep.A_w).max_abs(), (rep.A_u - rep.A_psi_scaled).max_abs(),
                              (rep.A_w - rep.A_psi_scaled).max_abs()});
    rep.scale = std::max(1.0, rep.A_u.max_abs());
    rep.pass = rep.deviation <= tol * rep.scale;
    return rep;
}

// ---------------------------------------------------------------- Kelvin transform

inline double kelvin_value(const std::function<double(const Vec&)>& u, const Vec& x, double lambda, const Vec& y, int n) {
    if (!(lambda > 0)) throw std::invalid_argument("kelvin: lambda must be positive");
    Vec d = axpy(-1.0, x, y);
    double r2 = norm2(d);
    if (r2 == 0.0) throw std::domain_error("kelvin: y coincides with the center");
    Vec image = axpy(lambda * lambda / r2, d, x);
    return std::pow(lambda * lambda / r2, (n - 2.0) / 2.0) * u(image);
}

inline double kelvin(const FieldOracle& u, const Vec& x, double lambda, const Vec& y, int n) {
    return kelvin_value([&](const Vec& z) { return u.value(z); }, x, lambda, y, n);
}

inline double moving_sphere_radius(double sup_u, double inf_u, int n) {
    if (!(inf_u > 0) || !(sup_u >= inf_u)) throw std::domain_error("moving sphere radius needs 0 < inf <= sup");
    return 0.25 * std::pow(sup_u / inf_u, -1.0 / (n - 2.0));
}

// ---------------------------------------------------------------- structural condition probe

struct ConditionOutcome {
    std::string name;
    bool holds = true;
    double fitted_C = 0.0;
    double theta_bar = 0.0;
    std::string witness;
};

struct ProbeReport {
    std::string op;
    std::vector<ConditionOutcome> conditions;
    const ConditionOutcome& get(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return c;
        throw std::out_of_range("no condition " + name);
    }
    bool all_hold() const {
        for (const auto& c : conditions)
            if (!c.holds) return false;
        return true;
    }
};

// ∂L/∂p_k by central differences.
inline std::vector<SymMatrix> grad_p_L(const OperatorSpec& F, const Vec& x, double s, const Vec& p) {
    const std::size_t n = p.size();
    const double h = 1e-6 * std::max(1.0, norm(p));
    std::vector<SymMatrix> out;
    for (std::size_t k = 0; k < n; ++k) {
        Vec pp = p, pm = p;
        pp[k] += h;
        pm[k] -= h;
        out.push_back((1.0 / (2.0 * h)) * (lower_order(F, x, s, pp) - lower_order(F, x, s, pm)));
    }
    return out;
}

inline std::vector<SymMatrix> grad_x_L(const OperatorSpec& F, const Vec& x, double s, const Vec& p) {
    const double h = 1e-6;
    std::vector<SymMatrix> out;
    for (std::size_t k = 0; k < x.size(); ++k) {
        Vec xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        out.push_back((1.0 / (2.0 * h)) * (lower_order(F, xp, s, p) - lower_order(F, xm, s, p)));
    }
    return out;
}

inline double frobenius3(const std::vector<SymMatrix>& t) {
    double s = 0.0;
    for (const auto& m : t) s += m.frobenius() * m.frobenius();
    return std::sqrt(s);
}

namespace detail {

// Smallest C in [1e-6, 1e12] with C p⊗p − |p|^m/C I − G ⪰ 0; negative when none exists.
inline double smallest_feasible_C(const SymMatrix& G, const Vec& p, double m) {
    const int n = static_cast<int>(p.size());
    const double pm = std::pow(norm(p), m);
    auto phi = [&](double C) {
        SymMatrix T = C * SymMatrix::outer(p);
        T += SymMatrix::scalar(n, -pm / C);
        T -= G;
        return eigen_sym(T).min();
    };
    double lo = std::log(1e-6), hi = std::log(1e12);
    if (phi(std::exp(hi)) < 0) return -1.0;
    if (phi(std::exp(lo)) >= 0) return std::exp(lo);
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (phi(std::exp(mid)) >= 0 ? hi : lo) = mid;
    }
    return std::exp(hi);
}

inline std::string describe(const Vec& x, double s, const Vec& p) {
    std::ostringstream os;
    os.precision(6);
    os << "s=" << s << " |p|=" << norm(p) << " x0=" << x[0];
    return os.str();
}

}  // namespace detail

// Sampling-based falsification of the structural conditions on L. Fitted constants are sample-feasible only.
inline ProbeReport probe_L_conditions(const OperatorSpec& F, double R, double Lambda, double m, int samples,
                                      std::uint64_t seed, int n = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), us(-R, R), ulog(-3.0, 3.0);
    std::normal_distribution<double> g(0.0, 1.0);

    struct Sample {
        Vec x;
        double s, s2;
        Vec p;
    };
    std::vector<Sample> pts;
    for (int i = 0; i < samples; ++i) {
        Sample sm;
        sm.x.resize(n);
        for (double& v : sm.x) v = ux(rng);
        sm.s = us(rng);
        sm.s2 = us(rng);
        if (sm.s2 < sm.s) std::swap(sm.s, sm.s2);
        Vec d(n);
        for (double& v : d) v = g(rng);
        sm.p = scaled(std::pow(10.0, ulog(rng)) / norm(d), d);
        pts.push_back(sm);
    }

    ProbeReport rep;
    rep.op = F.name;

    ConditionOutcome c0{"x-Lipschitz"}, c1{"s-Lipschitz"}, mono{"monotone-in-s"};
    for (const auto& sm : pts) {
        double pm = std::pow(norm(sm.p), m);
        double gx = frobenius3(grad_x_L(F, sm.x, sm.s, sm.p));
        c0.fitted_C = std::max(c0.fitted_C, gx / pm);

        SymMatrix D = lower_order(F, sm.x, sm.s2, sm.p) - lower_order(F, sm.x, sm.s, sm.p);
        Spectrum sp = eigen_sym(D);
        double scale = 1e-12 * (1.0 + lower_order(F, sm.x, sm.s, sm.p).max_abs());
        if (sp.min() < -scale) {
            mono.holds = false;
            c1.holds = false;
            if (mono.witness.empty()) mono.witness = detail::describe(sm.x, sm.s, sm.p) + " s'=" + std::to_string(sm.s2);
            c1.witness = mono.witness;
        }
        if (sm.s2 > sm.s) c1.fitted_C = std::max(c1.fitted_C, sp.max() / ((sm.s2 - sm.s) * pm));
    }

    auto fit_second = [&](const std::string& name, double sign) {
        ConditionOutcome c{name};
        c.holds = false;
        for (int k = 0; k <= 30; ++k) {
            double theta = std::ldexp(1.0, -k);
            double C = 0.0;
            bool ok = true;
            std::string wit;
            for (const auto& sm : pts) {
                SymMatrix L = lower_order(F, sm.x, sm.s, sm.p);
                auto gp = grad_p_L(F, sm.x, sm.s, sm.p);
                SymMatrix pdL(n);
                for (int q = 0; q < n; ++q) pdL += sm.p[q] * gp[q];
                double gnorm = frobenius3(gp);
                for (double th : {0.0, theta}) {
                    SymMatrix G = pdL - L;
                    G += SymMatrix::scalar(n, th * (Lambda * gnorm - 1.0));
                    if (sign < 0) G = -(pdL - L) + SymMatrix::scalar(n, th * (Lambda * gnorm - 1.0));
                    double c = detail::smallest_feasible_C(G, sm.p, m);
                    if (c < 0) {
                        ok = false;
                        wit = detail::describe(sm.x, sm.s, sm.p) + " theta=" + std::to_string(th);
                        break;
                    }
                    C = std::max(C, c);
                }
                if (!ok) break;
            }
            if (ok) {
                c.holds = true;
                c.fitted_C = C;
                c.theta_bar = theta;
                c.witness.clear();
                break;
            }
            c.witness = wit;
        }
        return c;
    };

    rep.conditions = {c0, c1, mono, fit_second("p-structure", 1.0), fit_second("p-structure-mirror", -1.0)};
    return rep;
}

}  // namespace viscone
