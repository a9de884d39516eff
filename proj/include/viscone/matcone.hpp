#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace viscone {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline Vec axpy(double a, const Vec& x, const Vec& y) {
    Vec out(y);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
    return out;
}
inline Vec scaled(double a, const Vec& x) {
    Vec out(x);
    for (double& v : out) v *= a;
    return out;
}
inline Vec unit(std::size_t n, std::size_t i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    return e;
}

inline constexpr int kMaxDim = 16;

// Dense symmetric matrix with one stored value per unordered index pair.
// Dimension 1 is accepted so that one-dimensional grid problems share the operator path.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(check_dim(n)), a_(static_cast<std::size_t>(n * (n + 1) / 2), 0.0) {}

    static SymMatrix identity(int n) { return scalar(n, 1.0); }
    static SymMatrix scalar(int n, double c) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = c;
        return m;
    }
    static SymMatrix diag(const Vec& d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m(i, i) = d[i];
        return m;
    }
    static SymMatrix outer(const Vec& p) { return outer(p, p); }
    // Symmetrized outer product (a⊗b + b⊗a)/2.
    static SymMatrix outer(const Vec& a, const Vec& b) {
        SymMatrix m(static_cast<int>(a.size()));
        for (int i = 0; i < m.n_; ++i)
            for (int j = i; j < m.n_; ++j) m(i, j) = 0.5 * (a[i] * b[j] + a[j] * b[i]);
        return m;
    }
    static SymMatrix from_dense(const std::vector<std::vector<double>>& d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i)
            for (int j = i; j < m.n_; ++j) m(i, j) = 0.5 * (d[i][j] + d[j][i]);
        return m;
    }

    int n() const { return n_; }
    double& operator()(int i, int j) { return a_[index(i, j)]; }
    double operator()(int i, int j) const { return a_[index(i, j)]; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }
    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }
    double max_abs() const {
        double s = 0.0;
        for (double v : a_) s = std::max(s, std::abs(v));
        return s;
    }
    Vec apply(const Vec& x) const {
        Vec y(n_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }
    std::vector<std::vector<double>> dense() const {
        std::vector<std::vector<double>> d(n_, std::vector<double>(n_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) d[i][j] = (*this)(i, j);
        return d;
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o) {
        same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    SymMatrix& operator*=(double c) {
        for (double& v : a_) v *= c;
        return *this;
    }
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
    friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }
    friend SymMatrix operator*(SymMatrix a, double c) { return a *= c; }
    friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.n_ == b.n_ && a.a_ == b.a_; }

private:
    int n_ = 0;
    std::vector<double> a_;

    static int check_dim(int n) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("matrix dimension must lie in [1, 16]");
        return n;
    }
    std::size_t index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
    }
    void same_dim(const SymMatrix& o) const {
        if (o.n_ != n_) throw std::invalid_argument("matrix dimension mismatch");
    }
};

// Eigenvalues sorted ascending.
struct Spectrum {
    Vec values;
    std::size_t size() const { return values.size(); }
    double min() const { return values.front(); }
    double max() const { return values.back(); }
};

struct EigenDecomposition {
    Spectrum spectrum;
    std::vector<Vec> vectors;  // vectors[k] pairs with spectrum.values[k]
    int sweeps = 0;
};

struct EigenNonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cyclic Jacobi rotations.
inline EigenDecomposition eigen_decompose(const SymMatrix& m, int max_sweeps = 100) {
    const int n = m.n();
    auto a = m.dense();
    std::vector<Vec> v(n, Vec(n, 0.0));
    for (int i = 0; i < n; ++i) v[i][i] = 1.0;

    const double scale = m.frobenius();
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off <= 1e-32 * (1.0 + scale * scale) || off == 0.0) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == max_sweeps) throw EigenNonConvergence("Jacobi iteration cap reached");

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });
    EigenDecomposition out;
    out.sweeps = sweep;
    for (int k : order) {
        out.spectrum.values.push_back(a[k][k]);
        Vec col(n);
        for (int i = 0; i < n; ++i) col[i] = v[i][k];
        out.vectors.push_back(col);
    }
    return out;
}

inline Spectrum eigen_sym(const SymMatrix& m) {
    if (m.n() == 1) return Spectrum{{m(0, 0)}};
    return eigen_decompose(m).spectrum;
}

// All elementary symmetric polynomials e_0..e_n via the product expansion of prod(1 + λ_i t).
inline Vec elementary_symmetric(const Vec& lambda) {
    Vec e(lambda.size() + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t k = i + 1; k >= 1; --k) e[k] += lambda[i] * e[k - 1];
    return e;
}

inline double sigma_k(const Vec& lambda, int k) {
    if (k < 1 || k > static_cast<int>(lambda.size())) throw std::invalid_argument("sigma_k: k out of range");
    return elementary_symmetric(lambda)[k];
}
inline double sigma_k(const Spectrum& s, int k) { return sigma_k(s.values, k); }

inline double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// ---------------------------------------------------------------- cones

enum class ConeKind { GammaK, PosDef, AtLeastOnePositive, TraceCone, Negated };

// Open spectral cone. Negated(inner) is the set of λ with −λ outside the closure of inner.
struct ConeSpec {
    ConeKind kind = ConeKind::TraceCone;
    int n = 0;
    int k = 1;
    std::shared_ptr<const ConeSpec> inner;

    static ConeSpec gamma_k(int n, int k) {
        if (k < 1 || k > n) throw std::invalid_argument("gamma_k: k must lie in [1, n]");
        return {ConeKind::GammaK, n, k, nullptr};
    }
    static ConeSpec posdef(int n) { return {ConeKind::PosDef, n, n, nullptr}; }
    static ConeSpec one_positive(int n) { return {ConeKind::AtLeastOnePositive, n, 1, nullptr}; }
    static ConeSpec trace(int n) { return {ConeKind::TraceCone, n, 1, nullptr}; }
    static ConeSpec negated(const ConeSpec& in) {
        return {ConeKind::Negated, in.n, in.k, std::make_shared<const ConeSpec>(in)};
    }
    // R^n minus the closure of −Γ_k.
    static ConeSpec neg_gamma_complement(int n, int k) { return negated(gamma_k(n, k)); }

    std::string str() const {
        switch (kind) {
            case ConeKind::GammaK: return "gamma_k:" + std::to_string(k);
            case ConeKind::PosDef: return "posdef";
            case ConeKind::AtLeastOnePositive: return "one_pos";
            case ConeKind::TraceCone: return "trace";
            case ConeKind::Negated:
                if (inner->kind == ConeKind::GammaK) return "neg_gamma_c:" + std::to_string(inner->k);
                return "neg:" + inner->str();
        }
        return "?";
    }
};

inline ConeSpec parse_cone(const std::string& text, int n) {
    auto starts = [&](const char* p) { return text.rfind(p, 0) == 0; };
    auto int_after = [&](std::size_t pos) {
        std::size_t used = 0;
        int v = std::stoi(text.substr(pos), &used);
        if (pos + used != text.size()) throw std::invalid_argument("trailing text in cone string: " + text);
        return v;
    };
    try {
        if (text == "posdef") return ConeSpec::posdef(n);
        if (text == "one_pos") return ConeSpec::one_positive(n);
        if (text == "trace") return ConeSpec::trace(n);
        if (starts("gamma_k:")) return ConeSpec::gamma_k(n, int_after(8));
        if (starts("neg_gamma_c:")) return ConeSpec::neg_gamma_complement(n, int_after(12));
        if (starts("neg:")) return ConeSpec::negated(parse_cone(text.substr(4), n));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("malformed cone string: " + text);
    }
    throw std::invalid_argument("unknown cone string: " + text);
}

// Signed slack, homogeneous of degree one: positive inside U, zero on ∂U, negative outside Ū.
// For Γ_k each σ_j is normalized as sign(σ_j)|σ_j / C(n,j)|^{1/j}.
inline double cone_slack(const Vec& lambda, const ConeSpec& U) {
    const int n = static_cast<int>(lambda.size());
    switch (U.kind) {
        case ConeKind::TraceCone: {
            double t = 0.0;
            for (double l : lambda) t += l;
            return t / n;
        }
        case ConeKind::PosDef: return *std::min_element(lambda.begin(), lambda.end());
        case ConeKind::AtLeastOnePositive: return *std::max_element(lambda.begin(), lambda.end());
        case ConeKind::GammaK: {
            Vec e = elementary_symmetric(lambda);
            double slack = INFINITY;
            for (int j = 1; j <= U.k; ++j) {
                double q = e[j] / binomial(n, j);
                double r = std::copysign(std::pow(std::abs(q), 1.0 / j), q);
                slack = std::min(slack, r);
            }
            return slack;
        }
        case ConeKind::Negated: {
            Vec neg(lambda);
            for (double& l : neg) l = -l;
            return -cone_slack(neg, *U.inner);
        }
    }
    return 0.0;
}

inline bool in_cone(const Vec& lambda, const ConeSpec& U) {
    if (U.kind == ConeKind::GammaK) {
        Vec e = elementary_symmetric(lambda);
        for (int j = 1; j <= U.k; ++j)
            if (!(e[j] > 0.0)) return false;
        return true;
    }
    return cone_slack(lambda, U) > 0.0;
}
inline bool in_cone(const Spectrum& s, const ConeSpec& U) { return in_cone(s.values, U); }

inline bool in_closure(const Vec& lambda, const ConeSpec& U) { return cone_slack(lambda, U) >= 0.0; }

enum class Verdict { Outside = 0, Boundary = 1, Interior = 2 };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Interior: return "Interior";
        case Verdict::Boundary: return "Boundary";
        case Verdict::Outside: return "Outside";
    }
    return "?";
}

struct ConeClass {
    Verdict verdict = Verdict::Boundary;
    double margin = 0.0;
};

inline ConeClass classify_spectrum(const Vec& lambda, const ConeSpec& U, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("classify: tol must be positive");
    double m = cone_slack(lambda, U);
    if (m > tol) return {Verdict::Interior, m};
    if (m < -tol) return {Verdict::Outside, m};
    return {Verdict::Boundary, m};
}

inline ConeClass classify(const SymMatrix& M, const ConeSpec& U, double tol) {
    if (U.kind == ConeKind::TraceCone) return classify_spectrum(Vec(M.n(), M.trace() / M.n()), U, tol);
    return classify_spectrum(eigen_sym(M).values, U, tol);
}

// ---------------------------------------------------------------- sampling helpers

inline SymMatrix random_orthogonal_conjugate(const Vec& spectrum, std::mt19937_64& rng) {
    const int n = static_cast<int>(spectrum.size());
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec> q(n, Vec(n));
    for (int k = 0; k < n; ++k) {
        Vec v(n);
        for (double& x : v) x = g(rng);
        for (int j = 0; j < k; ++j) v = axpy(-dot(v, q[j]), q[j], v);
        double nv = norm(v);
        q[k] = scaled(1.0 / nv, v);
    }
    SymMatrix m(n);
    for (int k = 0; k < n; ++k) m += spectrum[k] * SymMatrix::outer(q[k]);
    return m;
}

inline SymMatrix random_posdef(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    SymMatrix b = SymMatrix::scalar(n, 1e-3);
    for (int k = 0; k < n; ++k) {
        Vec v(n);
        for (double& x : v) x = g(rng);
        b += SymMatrix::outer(v);
    }
    return b;
}

// ---------------------------------------------------------------- axioms

enum class Axiom { PositiveShift, ConeScaling, ScalingBelowOne, ScalingAboveOne, PositiveTrace };

inline const char* axiom_name(Axiom a) {
    switch (a) {
        case Axiom::PositiveShift: return "A+B in U for B>0";
        case Axiom::ConeScaling: return "cA in U for c>0";
        case Axiom::ScalingBelowOne: return "cA in U for c in (0,1)";
        case Axiom::ScalingAboveOne: return "cA in U for c>1";
        case Axiom::PositiveTrace: return "tr A > 0 on U";
    }
    return "?";
}

struct AxiomOutcome {
    Axiom axiom;
    int trials = 0;
    int violations = 0;
    bool has_witness = false;
    Vec witness;  // spectrum of the offending matrix
    bool holds() const { return violations == 0; }
};

struct AxiomReport {
    std::string cone;
    int members = 0;
    std::vector<AxiomOutcome> outcomes;
    const AxiomOutcome& get(Axiom a) const {
        for (const auto& o : outcomes)
            if (o.axiom == a) return o;
        throw std::out_of_range("axiom not in report");
    }
};

// Random members are drawn as Q·diag(λ)·Qᵀ with λ = shift + spread·noise and rejection on membership.
inline AxiomReport axiom_check(const ConeSpec& U, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("axiom_check: samples must be positive");
    const int n = U.n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> shift_d(-2.0, 2.0), spread_d(0.1, 3.0), logc(-3.0, 3.0), u01(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);

    AxiomReport rep;
    rep.cone = U.str();
    for (Axiom a : {Axiom::PositiveShift, Axiom::ConeScaling, Axiom::ScalingBelowOne, Axiom::ScalingAboveOne,
                    Axiom::PositiveTrace})
        rep.outcomes.push_back({a});
    auto record = [&](Axiom a, bool ok, const SymMatrix& m) {
        for (auto& o : rep.outcomes) {
            if (o.axiom != a) continue;
            ++o.trials;
            if (!ok) {
                ++o.violations;
                if (!o.has_witness) {
                    o.has_witness = true;
                    o.witness = eigen_sym(m).values;
                }
            }
        }
    };

    const int max_attempts = 200 * samples;
    for (int attempt = 0; attempt < max_attempts && rep.members < samples; ++attempt) {
        double shift = shift_d(rng), spread = spread_d(rng);
        Vec lam(n);
        for (double& l : lam) l = shift + spread * g(rng);
        if (!in_cone(lam, U)) continue;
        ++rep.members;
        SymMatrix A = random_orthogonal_conjugate(lam, rng);
        SymMatrix B = random_posdef(n, rng);
        B *= std::pow(10.0, logc(rng));
        auto member = [&](const SymMatrix& m) { return in_cone(eigen_sym(m), U); };
        record(Axiom::PositiveShift, member(A + B), A + B);
        double c = std::pow(10.0, logc(rng));
        record(Axiom::ConeScaling, member(c * A), c * A);
        double c_low = 1e-3 + (1.0 - 2e-3) * u01(rng);
        record(Axiom::ScalingBelowOne, member(c_low * A), c_low * A);
        double c_high = 1.0 + std::pow(10.0, logc(rng));
        record(Axiom::ScalingAboveOne, member(c_high * A), c_high * A);
        record(Axiom::PositiveTrace, A.trace() > 0.0, A);
    }
    return rep;
}

}  // namespace viscone
