// viscone: command-line driver for the cone, envelope, viscosity and Perron experiments.
#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "viscone/viscone.hpp"

using namespace viscone;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kExploratory = 2;
constexpr int kUsage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
};

// Echo of the effective configuration followed by a descriptive reference line.
void write_preamble(std::ostream& os, const CLI::App& sub, const Globals& g, const std::string& ref,
                    const std::map<std::string, std::string>& effective = {}) {
    os << "# config: command=" << sub.get_name() << "\n";
    os << "# config: seed=" << g.seed << "\n";
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
        std::string value;
        auto eff = effective.find(opt->get_lnames()[0]);
        if (eff != effective.end()) {
            value = eff->second;
        } else if (opt->count() > 0) {
            auto res = opt->reduced_results();
            for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
            if (opt->get_type_size() == 0 && res.empty()) value = "true";
        } else {
            value = opt->get_default_str();
        }
        os << "# config: " << opt->get_lnames()[0] << "=" << value << "\n";
    }
    os << "# paper_ref: " << ref << "\n";
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw UsageError("cannot open output file " + path);
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

// `key=value` lines become `--key value` arguments placed ahead of the command line, so explicit flags win.
struct ConfigArgs {
    std::vector<std::string> global, sub;
};

ConfigArgs config_arguments(const std::string& path, CLI::App* sub) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    ConfigArgs out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
        std::string key = CLI::detail::trim_copy(line.substr(0, eq)), value = CLI::detail::trim_copy(line.substr(eq + 1));
        if (key == "seed" || key == "out") {
            out.global.insert(out.global.end(), {"--" + key, value});
            continue;
        }
        if (!sub) throw UsageError("config key " + key + " needs a subcommand");
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw UsageError("unknown config key: " + key);
        out.sub.push_back("--" + key);
        if (opt->get_type_size() != 0) out.sub.push_back(value);
        else if (value != "true" && value != "1") throw UsageError("flag " + key + " only accepts true");
    }
    return out;
}

// ---------------------------------------------------------------- problems

struct ProblemOptions {
    std::string problem = "annulus-psi1";
    int n = 3;
    int grid = 500;
    double tol = 1e-8;
    int max_sweeps = 20000;
    std::string order = "lex";
    std::string file;
    bool no_newton = false;
};

void add_problem_options(CLI::App* sub, ProblemOptions& o) {
    sub->add_option("--problem", o.problem, "annulus-psi1 | interval-linear | annulus2d | file")
        ->check(CLI::IsMember({"annulus-psi1", "interval-linear", "annulus2d", "file"}));
    sub->add_option("--n", o.n, "ambient dimension of the radial annulus")->check(CLI::Range(2, kMaxDim));
    sub->add_option("--grid", o.grid, "number of grid intervals per axis")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--tol", o.tol, "residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-sweeps", o.max_sweeps, "sweep limit")->check(CLI::PositiveNumber);
    sub->add_option("--order", o.order, "lex | redblack")->check(CLI::IsMember({"lex", "redblack"}));
    sub->add_option("--file", o.file, "problem CSV for --problem file");
    sub->add_flag("--no-newton", o.no_newton, "Gauss-Seidel sweeps only");
}

struct LoadedProblem {
    DirichletProblem P;
    SolverConfig cfg;
    std::optional<Vec> exact;
};

LoadedProblem load_problem(const ProblemOptions& o) {
    LoadedProblem L;
    L.cfg.tol = o.tol;
    L.cfg.max_sweeps = o.max_sweeps;
    L.cfg.sweep_order = o.order == "redblack" ? SweepOrder::RedBlack : SweepOrder::Lexicographic;
    L.cfg.newton = !o.no_newton;
    if (o.problem == "annulus-psi1") {
        L.P = problems::annulus_psi1(o.n, o.grid);
        L.exact = problems::annulus_psi1_exact(L.P);
    } else if (o.problem == "interval-linear") {
        L.P = problems::interval_linear(o.grid);
        Vec ex(L.P.grid.size());
        for (std::size_t k = 0; k < ex.size(); ++k) ex[k] = L.P.grid.coord(0, static_cast<int>(k));
        L.exact = ex;
    } else if (o.problem == "annulus2d") {
        L.P = problems::annulus_2d(o.grid);
        L.exact = problems::annulus_2d_exact(L.P);
    } else {
        if (o.file.empty()) throw UsageError("--problem file needs --file");
        std::ifstream in(o.file);
        if (!in) throw UsageError("cannot open problem file " + o.file);
        try {
            L.P = read_problem(in, L.cfg);
        } catch (const std::exception& e) {
            throw UsageError(std::string("bad problem file: ") + e.what());
        }
    }
    return L;
}

GridFn load_grid(const std::string& path) {
    try {
        return read_grid_file(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad grid file: ") + e.what());
    }
}

template <class T>
T parse_or_usage(const std::function<T()>& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------- commands

int cmd_cone_axioms(const CLI::App& sub, const Globals& g, const std::string& cone_text, int n, int samples) {
    ConeSpec U = parse_or_usage<ConeSpec>([&] { return parse_cone(cone_text, n); });
    AxiomReport rep = axiom_check(U, samples, g.seed);
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "structural axioms of an admissible matrix cone");
    os << "# cone: " << rep.cone << " members=" << rep.members << "\n";
    os << "axiom,trials,violations,holds,witness\n";
    bool all = true;
    for (const auto& o : rep.outcomes) {
        all = all && o.holds();
        os << axiom_name(o.axiom) << "," << o.trials << "," << o.violations << "," << (o.holds() ? "yes" : "no") << ",";
        for (std::size_t i = 0; i < o.witness.size(); ++i) os << (i ? " " : "") << format_real(o.witness[i]);
        os << "\n";
    }
    return all ? kPass : kExploratory;
}

int cmd_ctex(const CLI::App& sub, const Globals& g, const std::string& kind, const CLI::Option* alpha_opt, double alpha,
             double gamma, int n, int rgrid) {
    CtexKind k = kind == "beta-sign" ? CtexKind::BetaSign
                 : kind == "nondec"  ? CtexKind::NonDecL
                 : kind == "holder"  ? CtexKind::HolderRHS
                                     : CtexKind::BPrimeNonzero;
    CtexParams p;
    p.n = n;
    p.gamma = gamma;
    if (k == CtexKind::NonDecL) p.alpha = -36.0 / 25.0;
    if (alpha_opt->count() > 0) p.alpha = alpha;
    CtexCertificate c = build_counterexample(k, p, rgrid);
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "explicit radial counterexample to the comparison principle",
                   {{"alpha", format_real(p.alpha)}});
    write_certificate_csv(os, c);
    return c.pass() ? kPass : kFail;
}

int cmd_envelope(const CLI::App& sub, const Globals& g, const std::string& input, const std::vector<double>& eps,
                 const std::string& side, int stability) {
    GridFn src = input.empty() ? random_piecewise(g.seed) : load_grid(input);
    std::vector<Side> sides;
    if (side != "lower") sides.push_back(Side::Upper);
    if (side != "upper") sides.push_back(Side::Lower);
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "sup- and inf-convolution properties on a grid");
    os << "side,property,pass,worst,detail\n";
    bool all = true;
    for (Side s : sides) {
        auto rep = check_envelope_properties(src, eps, s);
        for (const auto& l : rep.lines) {
            all = all && l.pass;
            os << side_name(s) << "," << l.name << "," << (l.pass ? "yes" : "no") << "," << format_real(l.worst) << ","
               << l.detail << "\n";
        }
        if (stability > 0) {
            auto st = stability_check(src, s, stability, g.seed);
            all = all && st.pass;
            os << side_name(s) << ",stability," << (st.pass ? "yes" : "no") << "," << format_real(st.worst_excess)
               << ",trials=" << st.trials << "\n";
        }
    }
    return all ? kPass : kFail;
}

int cmd_dyadic(const CLI::App& sub, const Globals& g, int kmin, int kmax) {
    if (kmin < 1 || kmax < kmin) throw UsageError("need 1 <= kmin <= kmax");
    auto rep = dyadic_sharpness(kmin, kmax);
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "sharpness of the envelope estimates on a dyadic example");
    os << "# nodes: " << rep.nodes << "\n";
    os << "k,eps,x,env,argpt,displacement,bound_env,bound_disp,env_ok,disp_ok,window_ok\n";
    for (const auto& r : rep.rows)
        os << r.k << "," << format_real(r.eps) << "," << format_real(r.x) << "," << format_real(r.env) << ","
           << format_real(r.argpt) << "," << format_real(r.displacement) << "," << format_real(r.bound_env) << ","
           << format_real(r.bound_disp) << "," << r.env_ok << "," << r.disp_ok << "," << r.window_ok << "\n";
    return rep.pass() ? kPass : kFail;
}

int cmd_first_variation(const CLI::App& sub, const Globals& g, const std::string& op, const std::string& variant,
                        double M, double m, int samples, int n) {
    OperatorSpec F = parse_or_usage<OperatorSpec>([&] { return parse_operator(op, n); });
    std::vector<bool> which;
    if (variant != "hat") which.push_back(false);
    if (variant != "tilde") which.push_back(true);
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "first variation of the perturbed envelope operator");
    os << "variant,C,theta_bar,alpha,beta,delta,mu0,K0,calibrated,samples,worst_min_eig,pass\n";
    bool all = true;
    for (bool hat : which) {
        auto cs = search_first_variation_constants(F, M, m, hat, g.seed, n);
        auto scan = scan_first_variation(cs.params, F, hat, samples, g.seed + 1, n);
        bool ok = cs.calibrated && scan.worst >= -1e-10;
        all = all && ok;
        const auto& P = cs.params;
        os << (hat ? "hat" : "tilde") << "," << format_real(cs.C) << "," << format_real(cs.theta_bar) << ","
           << format_real(P.alpha) << "," << format_real(P.beta) << "," << format_real(P.delta) << ","
           << format_real(P.mu0) << "," << format_real(P.K0) << "," << cs.calibrated << "," << scan.samples << ","
           << format_real(scan.worst) << "," << (ok ? "yes" : "no") << "\n";
    }
    return all ? kPass : kFail;
}

int cmd_perron(const CLI::App& sub, const Globals& g, const ProblemOptions& o, const std::string& direction,
               const std::string& emit) {
    LoadedProblem L = load_problem(o);
    if (!emit.empty()) {
        std::ofstream pf(emit);
        if (!pf) throw UsageError("cannot open " + emit);
        write_problem(pf, L.P, L.cfg);
    }
    Direction dir = direction == "ascending" ? Direction::Ascending
                    : direction == "free"    ? Direction::Free
                                             : Direction::Descending;
    SolveResult R = perron_solve(L.P, L.cfg, dir);
    double K = 0.0;
    for (std::size_t k = 0; k < L.P.grid.size(); ++k)
        if (L.P.kind[k] != NodeKind::Outside) K = std::max(K, discrete_gradient(R.u, k, &L.P.kind));
    double h = L.P.grid.h(0);
    auto band = translation_gradient_bound(R.u, boundary_band(L.P), &L.P.kind);
    bool ok = R.converged && R.sandwich_ok && R.monotone_ok;
    double err = 0.0, bound = 2e-2 * K * h;
    if (L.exact) {
        err = sup_distance(R.u.values, *L.exact, L.P);
        ok = ok && err <= bound;
    }
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "monotone Perron iteration for the Dirichlet problem");
    os << "# problem: " << L.P.label << " F=" << L.P.F.name << " U=" << L.P.U.str() << "\n";
    os << "# solver: direction=" << direction_name(R.direction) << " sweeps=" << R.iterations
       << " newton_accepted=" << R.newton_accepted << " converged=" << R.converged
       << " residual=" << format_real(R.residual) << "\n";
    os << "# invariants: sandwich=" << R.sandwich_ok << " monotone=" << R.monotone_ok << "\n";
    os << "# gradient: max=" << format_real(K) << " interior=" << format_real(band.interior_max)
       << " band=" << format_real(band.band_max) << " band_bound=" << (band.pass ? "yes" : "no") << "\n";
    if (L.exact)
        os << "# sup_error: " << format_real(err) << " bound=" << format_real(bound) << " h=" << format_real(h) << "\n";
    os << "# verdict: " << (ok ? "pass" : "fail") << "\n";
    write_solution(os, L.P, R, L.exact ? &*L.exact : nullptr);
    return ok ? kPass : kFail;
}

int cmd_uniqueness(const CLI::App& sub, const Globals& g, const ProblemOptions& o, const std::vector<std::string>& inits) {
    LoadedProblem L = load_problem(o);
    auto rep = parse_or_usage<UniquenessReport>([&] { return uniqueness_experiment(L.P, L.cfg, inits); });
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "uniqueness of the discrete Dirichlet solution across initializations");
    os << "init,direction,converged,sweeps,residual\n";
    for (std::size_t i = 0; i < rep.runs.size(); ++i)
        os << inits[i] << "," << direction_name(rep.runs[i].direction) << "," << rep.runs[i].converged << ","
           << rep.runs[i].iterations << "," << format_real(rep.runs[i].residual) << "\n";
    os << "# max_distance: " << format_real(rep.max_distance) << " conclusive=" << rep.conclusive << "\n";
    if (!rep.conclusive) return kFail;
    return rep.pass ? kPass : kExploratory;
}

int cmd_kelvin(const CLI::App& sub, const Globals& g, int n, int centers, double h) {
    auto b = fields::bubble(n);
    std::mt19937_64 rng(g.seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ur(0.0, 0.5);
    std::vector<Vec> xs{Vec(n, 0.0)};
    while (static_cast<int>(xs.size()) < centers) {
        Vec d(n);
        for (double& v : d) v = nd(rng);
        xs.push_back(scaled(ur(rng) / norm(d), d));
    }
    double R = moving_sphere_check(b, n, {Vec(n, 0.0)}, {0.01}, h).R;
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < xs.size(); ++i) lambdas.push_back(R * (i % 2 ? 1.0 : 0.5));
    auto rep = moving_sphere_check(b, n, xs, lambdas, h, 1e-8, g.seed);
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "moving-sphere comparison for the Kelvin transform of a bubble");
    os << "# R=" << format_real(rep.R) << " lattice=" << rep.lattice << "\n";
    os << "center,lambda,worst_excess,sphere_error,boundary_excess\n";
    for (const auto& c : rep.cases) {
        for (std::size_t i = 0; i < c.x.size(); ++i) os << (i ? " " : "") << format_real(c.x[i]);
        os << "," << format_real(c.lambda) << "," << format_real(c.worst_excess) << "," << format_real(c.sphere_error)
           << "," << format_real(c.boundary_excess) << "\n";
    }
    return rep.pass() ? kPass : kFail;
}

int cmd_touching(const CLI::App& sub, const Globals& g, const std::string& wfile, const std::string& vfile,
                 const std::string& op, const std::string& cone, double tol) {
    bool builtin_pair = wfile.empty() && vfile.empty();
    if (!builtin_pair && (wfile.empty() || vfile.empty())) throw UsageError("--w and --v go together");
    TouchReport rep;
    GridFn w, v;
    if (builtin_pair) {
        auto c = build_counterexample(CtexKind::BetaSign, CtexParams{});
        std::tie(w, v) = certificate_pair(c);
        rep = touching_experiment(w, v, builtin::beta_sign(-3.0), ConeSpec::posdef(3), tol);
    } else {
        w = load_grid(wfile);
        v = load_grid(vfile);
        if (!w.same_layout(v)) throw UsageError("w and v grids differ");
        int n = w.geometry == Geometry::Radial ? w.ambient : w.dim();
        if (op.empty() != cone.empty()) throw UsageError("--F and --U go together");
        if (op.empty()) {
            rep = touching_experiment(w, v, tol);
        } else {
            auto F = parse_or_usage<OperatorSpec>([&] { return parse_operator(op, n); });
            auto U = parse_or_usage<ConeSpec>([&] { return parse_cone(cone, n); });
            rep = touching_experiment(w, v, F, U, tol);
        }
    }
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "strong comparison and touching of a super/sub pair");
    os << "# verdict: " << propagation_name(rep.verdict) << " min_gap=" << format_real(rep.min_gap)
       << " min_boundary_gap=" << format_real(rep.min_boundary_gap) << " interior_only=" << rep.interior_only << "\n";
    if (rep.signatures_checked)
        os << "# signatures: w_super_failures=" << rep.w_super_failures << " v_sub_failures=" << rep.v_sub_failures
           << "\n";
    os << "component,node,x" << (w.dim() == 2 ? ",y" : "") << ",boundary_contact\n";
    for (std::size_t c = 0; c < rep.components.size(); ++c)
        for (std::size_t k : rep.components[c].nodes) {
            os << c << "," << k << "," << format_real(w.coord(0, w.ix(k)));
            if (w.dim() == 2) os << "," << format_real(w.coord(1, w.iy(k)));
            os << "," << rep.components[c].boundary_contact << "\n";
        }
    if (builtin_pair) return rep.verdict == Propagation::Violated && rep.interior_only == 1 ? kPass : kFail;
    return rep.verdict == Propagation::Consistent ? kPass : kExploratory;
}

int cmd_probe(const CLI::App& sub, const Globals& g, const std::string& op, double R, double Lambda, double m,
              int samples, int n) {
    OperatorSpec F = parse_or_usage<OperatorSpec>([&] { return parse_operator(op, n); });
    auto rep = probe_L_conditions(F, R, Lambda, m, samples, g.seed, n);
    Output out(g.out);
    auto& os = out.os();
    write_preamble(os, sub, g, "structural conditions on the lower-order term");
    os << "condition,holds,fitted_C,theta_bar,witness\n";
    for (const auto& c : rep.conditions)
        os << c.name << "," << (c.holds ? "yes" : "no") << "," << format_real(c.fitted_C) << ","
           << format_real(c.theta_bar) << ",\"" << c.witness << "\"\n";
    return rep.all_hold() ? kPass : kExploratory;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-cone viscosity experiments"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Globals g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--config", g.config, "key=value file; keys are long option names of the subcommand (any position)");

    std::string cone = "gamma_k:2";
    int n = 3, samples = 2000;
    auto* s_cone = app.add_subcommand("cone-axioms", "check the structural cone axioms by sampling");
    s_cone->add_option("--cone", cone, "posdef | one_pos | trace | gamma_k:K | neg_gamma_c:K | neg:<cone>");
    s_cone->add_option("--n", n, "matrix dimension")->check(CLI::Range(1, kMaxDim));
    s_cone->add_option("--samples", samples, "random members per axiom")->check(CLI::PositiveNumber);

    std::string kind = "beta-sign";
    double alpha = -3.0, gamma = 0.5;
    int rgrid = 2001;
    auto* s_ctex = app.add_subcommand("ctex", "build and verify a radial counterexample certificate");
    s_ctex->add_option("--kind", kind, "beta-sign | nondec | holder | bprime")
        ->check(CLI::IsMember({"beta-sign", "nondec", "holder", "bprime"}));
    auto* alpha_opt = s_ctex->add_option("--alpha", alpha, "quartic parameter (nondec defaults to -36/25)");
    s_ctex->add_option("--gamma", gamma, "Holder exponent")->check(CLI::Range(0.0, 1.0));
    s_ctex->add_option("--n", n, "ambient dimension")->check(CLI::Range(2, kMaxDim));
    s_ctex->add_option("--rgrid", rgrid, "radial sample count")->check(CLI::Range(3, 10000000));

    std::string input, side = "both";
    std::vector<double> eps{0.2, 0.1, 0.05, 0.02, 0.01};
    int stability = 0;
    auto* s_env = app.add_subcommand("envelope", "check envelope properties on a grid");
    s_env->add_option("--input", input, "grid CSV (default: random piecewise grid from --seed)");
    s_env->add_option("--eps", eps, "comma-separated envelope parameters")->delimiter(',')->check(CLI::PositiveNumber);
    s_env->add_option("--side", side, "upper | lower | both")->check(CLI::IsMember({"upper", "lower", "both"}));
    s_env->add_option("--stability", stability, "stability trials per side (0 skips)")->check(CLI::NonNegativeNumber);

    int kmin = 2, kmax = 6;
    auto* s_dy = app.add_subcommand("dyadic", "dyadic sharpness example");
    s_dy->add_option("--kmin", kmin, "smallest level");
    s_dy->add_option("--kmax", kmax, "largest level");

    std::string op = "genL:tanh", variant = "both";
    double M = 1.0, m = 2.0;
    int fv_samples = 1000;
    auto* s_fv = app.add_subcommand("first-variation", "constant search and gap scan for the perturbed envelope");
    s_fv->add_option("--F", op, "operator string");
    s_fv->add_option("--variant", variant, "tilde | hat | both")->check(CLI::IsMember({"tilde", "hat", "both"}));
    s_fv->add_option("--M", M, "sup bound on the function")->check(CLI::PositiveNumber);
    s_fv->add_option("--m", m, "gradient growth exponent")->check(CLI::PositiveNumber);
    s_fv->add_option("--samples", fv_samples, "random jets")->check(CLI::PositiveNumber);
    s_fv->add_option("--n", n, "dimension")->check(CLI::Range(1, kMaxDim));

    ProblemOptions po;
    std::string direction = "descending", emit;
    auto* s_perron = app.add_subcommand("perron", "solve a discrete Dirichlet problem by monotone iteration");
    add_problem_options(s_perron, po);
    s_perron->add_option("--direction", direction, "descending | ascending | free")
        ->check(CLI::IsMember({"descending", "ascending", "free"}));
    s_perron->add_option("--emit-problem", emit, "also write the problem as a CSV file");

    ProblemOptions uo;
    std::vector<std::string> inits{"super", "sub", "mid"};
    auto* s_uni = app.add_subcommand("uniqueness", "solve from several initializations and compare");
    add_problem_options(s_uni, uo);
    s_uni->add_option("--inits", inits, "comma-separated: super, sub, mid")->delimiter(',');

    int centers = 5;
    double lattice_h = 0.05;
    auto* s_kel = app.add_subcommand("kelvin", "moving-sphere check for the bubble");
    s_kel->add_option("--n", n, "dimension")->check(CLI::Range(3, kMaxDim));
    s_kel->add_option("--centers", centers, "number of sphere centers")->check(CLI::PositiveNumber);
    s_kel->add_option("--spacing", lattice_h, "lattice spacing")->check(CLI::Range(0.005, 0.5));

    std::string wfile, vfile, t_op, t_cone;
    double t_tol = 1e-12;
    auto* s_touch = app.add_subcommand("touching", "touching-set analysis of a w >= v pair");
    s_touch->add_option("--w", wfile, "supersolution grid CSV (default: counterexample pair)");
    s_touch->add_option("--v", vfile, "subsolution grid CSV");
    s_touch->add_option("--F", t_op, "operator string for signature checks");
    s_touch->add_option("--U", t_cone, "cone string for signature checks");
    s_touch->add_option("--tol", t_tol, "touching tolerance")->check(CLI::NonNegativeNumber);

    std::string p_op = "genL:tanh";
    double R = 1.0, Lambda = 10.0, pm = 2.0;
    int p_samples = 2000;
    auto* s_probe = app.add_subcommand("probe-L", "sample the structural conditions on a lower-order term");
    s_probe->add_option("--F", p_op, "operator string");
    s_probe->add_option("--R", R, "bound on |s|")->check(CLI::PositiveNumber);
    s_probe->add_option("--Lambda", Lambda, "bound on |p|")->check(CLI::PositiveNumber);
    s_probe->add_option("--m", pm, "gradient growth exponent")->check(CLI::PositiveNumber);
    s_probe->add_option("--samples", p_samples, "random points")->check(CLI::PositiveNumber);
    s_probe->add_option("--n", n, "dimension")->check(CLI::Range(1, kMaxDim));

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        // Locate the config file and subcommand before the real parse.
        std::string config;
        CLI::App* chosen = nullptr;
        std::vector<std::string> merged;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 == args.size()) throw UsageError("--config needs a file");
                config = args[++i];
                continue;
            }
            if (args[i].rfind("--config=", 0) == 0) {
                config = args[i].substr(9);
                continue;
            }
            if (!chosen) chosen = app.get_subcommand_no_throw(args[i]);
            merged.push_back(args[i]);
        }
        g.config = config;
        if (!config.empty()) {
            ConfigArgs extra = config_arguments(config, chosen);
            auto at = chosen ? std::find(merged.begin(), merged.end(), chosen->get_name()) + 1 : merged.end();
            merged.insert(at, extra.sub.begin(), extra.sub.end());
            merged.insert(merged.begin(), extra.global.begin(), extra.global.end());
        }
        std::reverse(merged.begin(), merged.end());
        app.parse(merged);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*s_cone) return cmd_cone_axioms(*s_cone, g, cone, n, samples);
        if (*s_ctex) return cmd_ctex(*s_ctex, g, kind, alpha_opt, alpha, gamma, n, rgrid);
        if (*s_env) return cmd_envelope(*s_env, g, input, eps, side, stability);
        if (*s_dy) return cmd_dyadic(*s_dy, g, kmin, kmax);
        if (*s_fv) return cmd_first_variation(*s_fv, g, op, variant, M, m, fv_samples, n);
        if (*s_perron) return cmd_perron(*s_perron, g, po, direction, emit);
        if (*s_uni) return cmd_uniqueness(*s_uni, g, uo, inits);
        if (*s_kel) return cmd_kelvin(*s_kel, g, n, centers, lattice_h);
        if (*s_touch) return cmd_touching(*s_touch, g, wfile, vfile, t_op, t_cone, t_tol);
        if (*s_probe) return cmd_probe(*s_probe, g, p_op, R, Lambda, pm, p_samples, n);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
