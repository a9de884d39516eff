#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "viscone/radial.hpp"

using namespace viscone;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const Rational kTildeAlpha(-36, 25);
}

TEST_CASE("quartic values are exact in rational arithmetic", "[radial]") {
    auto pt = quartics::p4_tilde(kTildeAlpha);
    CHECK(quartic_eval(pt, Rational(-2)) == Rational(-85682));
    CHECK(quartic_eval(pt, Rational(-3)) == Rational(96309));
    CHECK(quartic_eval(pt, Rational(2)) == Rational(-82766));
    CHECK(quartic_eval(pt, Rational(-8, 5)) == Rational(-1966568, 25));
    CHECK(quartic_eval(pt, Rational(8, 5)) == Rational(-1908248, 25));

    auto ps = quartics::p4_shifted(Rational(-3));
    CHECK(quartic_eval(ps, Rational(-2)) == Rational(-28015));
    CHECK(quartic_eval(ps, Rational(0)) == Rational(6561));
    CHECK(quartic_eval(ps, Rational(9, 4)) == Rational(-6561));
    CHECK(quartic_eval(quartics::p4(Rational(-3)), Rational(1)) == Rational(-179));
}

TEST_CASE("double evaluation agrees with the exact value", "[radial]") {
    auto exact = quartics::p4_tilde(kTildeAlpha);
    CHECK(quartic_eval(exact, -2.0) == -85682.0);
    CHECK(quartic_eval(exact, 2.0) == -82766.0);
}

TEST_CASE("real roots with certified brackets", "[radial]") {
    auto unit = quartic_roots(QuarticSpec::from_double(1, 0, 0, -1));
    REQUIRE(unit.roots.size() == 2);
    CHECK_THAT(unit.roots[0].t, WithinAbs(-1, 1e-12));
    CHECK_THAT(unit.roots[1].t, WithinAbs(1, 1e-12));

    auto r = quartic_roots(quartics::p4_shifted(-3.0));
    REQUIRE(r.resolved());
    REQUIRE(r.roots.size() == 4);
    CHECK(r.roots[0].t < -2);
    CHECK((-2 < r.roots[1].t && r.roots[1].t < 0));
    CHECK((0 < r.roots[2].t && r.roots[2].t < 2.25));
    CHECK(2.25 < r.roots[3].t);
    for (const auto& q : r.roots) {
        CHECK(q.bracket_lo <= q.t);
        CHECK(q.t <= q.bracket_hi);
        CHECK(q.bracket_hi - q.bracket_lo <= 1e-12);
    }

    auto rt = quartic_roots(quartics::p4_tilde_shifted(-36.0 / 25.0));
    REQUIRE(rt.roots.size() == 4);
    CHECK(rt.roots[0].t < -2);
    CHECK((-2 < rt.roots[1].t && rt.roots[1].t < -1.6));
    CHECK((1.6 < rt.roots[2].t && rt.roots[2].t < 2));
    CHECK(2 < rt.roots[3].t);

    // (t² − 1)² touches zero without a sign change
    auto dbl = quartic_roots(QuarticSpec::from_double(1, -2, 0, 1));
    CHECK(dbl.roots.empty());
    CHECK_FALSE(dbl.resolved());
}

TEST_CASE("closed-form radial eigenvalues", "[radial]") {
    auto z = lambda12_t(0.0, 1.7, 1.0, -3.0, QuarticVariant::P4);
    CHECK(z.lambda1 == 0.0);
    CHECK(z.lambda2 == 0.0);

    auto one = lambda12_t(1.0, 2.0, 1.0, -3.0, QuarticVariant::P4);
    CHECK_THAT(one.lambda1, WithinRel(-2.0 * 5129.0 / 59049.0, 1e-14));
    CHECK_THROWS(lambda12_t(1.0, 1.0, 1.0, -3.0, QuarticVariant::P4));

    auto q = quartics::p4_tilde_shifted(-36.0 / 25.0);
    auto roots = quartic_roots(q);
    for (const auto& root : roots.roots)
        for (double r : {0.3, 0.9, 1.1, 2.5}) CHECK(std::abs(lambda12_root(root, q, r, 1.0, QuarticVariant::P4tilde).lambda1) <= 1e-9);
}

TEST_CASE("closed forms agree with the operator pipeline", "[radial]") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ut(-5.0, 5.0), ur(0.2, 3.0);
    for (auto v : {QuarticVariant::P4, QuarticVariant::P4tilde}) {
        double alpha = v == QuarticVariant::P4 ? -3.0 : -36.0 / 25.0;
        OperatorSpec F = v == QuarticVariant::P4 ? builtin::beta_sign(alpha) : builtin::nondec_tilde(alpha);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double t = ut(rng), r = ur(rng);
            if (std::abs(r - 1.0) < 1e-3) continue;
            auto closed = lambda12_t(t, r, 1.0, alpha, v);
            auto eig = radial_F_eigs(profiles::power_two_thirds(t, 1.0), r, F);
            double scale = 1.0 + std::abs(eig.mu) + std::abs(eig.nu);
            worst = std::max({worst, std::abs(closed.lambda1 - eig.mu) / scale, std::abs(closed.lambda2 - eig.nu) / scale});
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("radial eigenvalues of bundled profiles", "[radial]") {
    auto F = OperatorSpec::rot_inv(builtin::radial_coefficient("one"), [](double t) { return 0.25 - t; }, "test");
    auto e = radial_F_eigs(0.7, 0.0, 0.0, 0.0, F);
    CHECK(e.mu == 0.25);
    CHECK(e.nu == 0.25);
    CHECK_THROWS(radial_F_eigs(0.0, 0.0, 0.0, 0.0, F));

    auto blip = profiles::blip_ctex(3.0);
    auto Fb = builtin::blip(3.0);
    for (double r : {1.1, 1.4, 1.9}) {
        auto be = radial_F_eigs(blip, r, Fb);
        CHECK(std::abs(be.mu) <= 1e-10);
        CHECK(be.nu < 0);
    }

    auto hp = profiles::holder_ctex(0.5, 3);
    auto Fh = builtin::holder(0.5, 3);
    for (double r : {0.2, 0.5, 0.9}) {
        auto he = radial_F_eigs(hp, r, Fh, 3);
        CHECK(std::abs(he.mu + 2 * he.nu) <= 1e-10);
    }
}

TEST_CASE("interpolated term endpoint values", "[radial]") {
    CHECK(gap_endpoint_coefficient(-1, kTildeAlpha) == Rational(-245821, 364500));
    CHECK(gap_endpoint_coefficient(+1, kTildeAlpha) == Rational(238531, 364500));
    for (double pn : {0.5, 1.0, 2.0}) {
        double s = (32.0 / 45.0) / (pn * pn);
        double p4 = std::pow(pn, 4);
        CHECK_THAT(monotone_interp_L(pn, -s), WithinRel(-245821.0 / 364500.0 * p4, 1e-12));
        CHECK_THAT(monotone_interp_L(pn, s), WithinRel(238531.0 / 364500.0 * p4, 1e-12));
    }
}

TEST_CASE("interpolated term cannot be monotone with the stated endpoint values", "[radial]") {
    // The endpoint values increase from the left edge of the band to the right edge, so an interpolant
    // between them cannot be non-increasing in s.
    CHECK(gap_endpoint_coefficient(-1, kTildeAlpha) < gap_endpoint_coefficient(+1, kTildeAlpha));
}

TEST_CASE("interpolated term is non-increasing in s", "[radial][!shouldfail]") {
    bool monotone = true;
    for (int i = 0; i < 32; ++i)
        for (int k = 0; k < 32; ++k) {
            double pn = 0.25 + 2.0 * i / 31.0;
            double s = -3.0 + 6.0 * k / 31.0, ds = 1e-6;
            if (monotone_interp_L(pn, s + ds) > monotone_interp_L(pn, s) + 1e-12) monotone = false;
        }
    CHECK(monotone);
}

TEST_CASE("log-singular family solves the trace equation", "[radial]") {
    auto c0 = log_singular_check(0.0, 1.0, 0.0, 3, {0.5, 0, 0});
    CHECK(std::abs(c0.trace_residual) <= 1e-10);
    auto c1 = log_singular_check(1.0, 1.0, 0.0, 3, {0.5, 0, 0});
    CHECK(std::abs(c1.trace_residual) <= 1e-10);
    CHECK_THROWS(log_singular_check(1.0, 1.0, 0.0, 3, {0, 0, 0}));
    CHECK_THROWS(log_singular_check(1.0, 1.0, 1.0, 3, {0.5, 0, 0}));

    auto p1 = profiles::log_singular(1.0, 1.0, 0.0, 3), p0 = profiles::log_singular(0.0, 1.0, 0.0, 3);
    CHECK_THAT(p1.f(1.0) - p0.f(1.0), WithinAbs(std::log(2.0), 1e-15));
    for (double r : {0.1, 0.5, 0.99}) CHECK(p1.f(r) - p0.f(r) > 0);
}

TEST_CASE("sign-change counterexample certificate", "[radial]") {
    auto c = build_counterexample(CtexKind::BetaSign, CtexParams{});
    INFO(c.clauses.size());
    CHECK(c.pass());
    REQUIRE(c.roots.size() == 4);
    CHECK(c.max_abs_lambda1 <= 1e-9);
    REQUIRE(c.touching.size() == 1);
    CHECK(c.touching[0] == c.params.r0);
    CHECK(c.t0 < c.roots[0].t);

    std::ostringstream os;
    write_certificate_csv(os, c);
    CHECK(os.str().find("r,w,v,mu_w,nu_w,mu_v,nu_v,verdict") != std::string::npos);
    CHECK(os.str().find("i,t_i,bracket_lo,bracket_hi") != std::string::npos);
}

TEST_CASE("sign-change certificate across the admissible parameter range", "[radial]") {
    for (int i = 0; i < 20; ++i) {
        CtexParams p;
        p.alpha = -10.0 + (7.5 - 0.05) * i / 19.0;
        INFO("alpha=" << p.alpha);
        CHECK(build_counterexample(CtexKind::BetaSign, p, 501).pass());
    }
    CtexParams bad;
    bad.alpha = -2.0;
    CHECK_FALSE(build_counterexample(CtexKind::BetaSign, bad, 501).pass());
}

TEST_CASE("non-decreasing counterexample certificate", "[radial]") {
    CtexParams p;
    p.alpha = -36.0 / 25.0;
    auto c = build_counterexample(CtexKind::NonDecL, p);
    CHECK(c.pass());
    REQUIRE(c.roots.size() == 4);
    CHECK(std::abs(c.roots[1].t) > 1.6);
    CHECK(std::abs(c.roots[2].t) > 1.6);
    CHECK(c.max_abs_lambda1 <= 1e-9);
}

TEST_CASE("b-prime and Holder certificates", "[radial]") {
    auto b = build_counterexample(CtexKind::BPrimeNonzero, CtexParams{});
    CHECK(b.pass());
    CHECK(b.params.r0 == 2.0);
    for (const auto& row : b.rows) CHECK(row.nu_w <= 1e-12);
    REQUIRE(b.clause("nu vanishes at r0") != nullptr);
    CHECK(b.clause("nu vanishes at r0")->pass);

    auto h = build_counterexample(CtexKind::HolderRHS, CtexParams{});
    CHECK(h.pass());
}
