#include <catch_amalgamated.hpp>

#include <random>

#include "viscone/viscosity.hpp"

using namespace viscone;

TEST_CASE("jet classification", "[viscosity]") {
    Jet2 flat{{0.1, 0.2, 0.3}, 4.0, {0, 0, 0}, SymMatrix(3)};
    for (int k = 1; k <= 3; ++k) {
        CHECK(jet_classify(flat, OperatorSpec::quad_const(2.0, 0.3), ConeSpec::gamma_k(3, k), 1e-12).verdict ==
              Verdict::Boundary);
        CHECK(jet_classify(flat, builtin::tanh_coeff(2.0), ConeSpec::gamma_k(3, k), 1e-12).verdict == Verdict::Boundary);
    }
    Jet2 bowl{{0, 0, 0}, 0.0, {0, 0, 0}, SymMatrix::identity(3)};
    CHECK(jet_classify(bowl, OperatorSpec::quad_const(1.0, 0.0), ConeSpec::gamma_k(3, 3), 1e-12).verdict ==
          Verdict::Interior);

    auto blip = profiles::blip_ctex(3.0);
    for (double r : {1.05, 1.3, 1.7, 1.95}) {
        Jet2 j = radial_jet(r, blip.f(r), blip.d1(r), blip.d2(r), 3);
        CHECK(jet_classify(j, builtin::blip(3.0), ConeSpec::one_positive(3), 1e-10).verdict == Verdict::Boundary);
    }
}

TEST_CASE("grid verification of exact solutions", "[viscosity]") {
    for (int nodes : {101, 201}) {
        GridFn psi = GridFn::radial(0.5, 1.0, nodes, 3);
        auto prof = profiles::log_singular(1.0, 1.0, 0.0, 3);
        psi.sample([&](const Vec& x) { return prof.f(x[0]); });
        auto rep = grid_verify(psi, OperatorSpec::quad_const(1.0, 0.0), ConeSpec::trace(3), default_grid_tol(psi));
        CHECK(rep.boundary == rep.nodes.size());
        CHECK(rep.consistent_solution());
    }
    GridFn bowl = GridFn::box2d(-1, 1, -1, 1, 21, 21);
    bowl.sample([](const Vec& x) { return 0.5 * norm2(x); });
    auto rep = grid_verify(bowl, OperatorSpec::quad_const(0.0, 0.0), ConeSpec::gamma_k(2, 2), 1e-9);
    CHECK(rep.interior == rep.nodes.size());
    CHECK(rep.interior == 19u * 19u);
}

TEST_CASE("first-variation gap is non-negative with searched constants", "[viscosity]") {
    for (bool hat : {false, true}) {
        auto cs = search_first_variation_constants(builtin::tanh_coeff(2.0), 1.0, 2.0, hat, 7);
        REQUIRE(cs.calibrated);
        auto scan = scan_first_variation(cs.params, builtin::tanh_coeff(2.0), hat, 1000, 7);
        INFO((hat ? "hat" : "tilde") << " worst=" << scan.worst);
        CHECK(scan.worst >= -1e-10);
    }
}

TEST_CASE("first-variation gap vanishes as mu goes to zero", "[viscosity]") {
    auto cs = search_first_variation_constants(builtin::tanh_coeff(2.0), 1.0, 2.0, false, 7);
    std::mt19937_64 rng(4);
    PerturbationParams P = cs.params;
    Jet2 j = random_working_jet(rng, P, 3, 2.0, P.tau);
    double prev = std::numeric_limits<double>::infinity();
    for (double mu : {1e-2, 1e-4, 1e-6, 1e-8}) {
        P.mu = mu * P.mu0;
        double g = first_variation_tilde(j, P, builtin::tanh_coeff(2.0)).gap.max_abs();
        CHECK(g <= prev);
        prev = g;
    }
    CHECK(prev <= 1e-6);
}

TEST_CASE("envelope error term stays bounded", "[viscosity]") {
    GridFn psi = GridFn::radial(0.5, 1.0, 201, 3);
    auto prof = profiles::log_singular(1.0, 1.0, 0.0, 3);
    psi.sample([&](const Vec& x) { return prof.f(x[0]); });
    double amax = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        auto rep = envelope_error_check(psi, eps, OperatorSpec::quad_const(1.0, 0.0), ConeSpec::trace(3), 10.0);
        CHECK(rep.checked > 150);
        CHECK(rep.pass());
        amax = std::max(amax, rep.fitted_a);
    }
    CHECK(amax <= 10.0);
}

TEST_CASE("touching experiment on the counterexample pair", "[viscosity]") {
    auto c = build_counterexample(CtexKind::BetaSign, CtexParams{});
    auto [w, v] = certificate_pair(c);
    auto rep = touching_experiment(w, v, 1e-12);
    CHECK(rep.verdict == Propagation::Violated);
    REQUIRE(rep.components.size() == 1);
    REQUIRE(rep.components[0].nodes.size() == 1);
    CHECK(w.coord(0, static_cast<int>(rep.components[0].nodes[0])) == c.params.r0);
    CHECK_FALSE(rep.components[0].boundary_contact);

    auto withF = touching_experiment(w, v, builtin::beta_sign(-3.0), ConeSpec::posdef(3), 1e-12);
    CHECK(withF.signatures_checked);
    CHECK(withF.verdict == Propagation::Violated);
}

TEST_CASE("touching experiment on conforming pairs", "[viscosity]") {
    // positive bump vanishing only at the right end
    GridFn v = GridFn::box1d(0.0, 1.0, 101);
    v.sample([](const Vec& x) { return std::sin(3 * x[0]); });
    GridFn w = v;
    for (std::size_t k = 0; k < w.size(); ++k) w.values[k] += std::pow(1.0 - v.coord(0, static_cast<int>(k)), 2);
    auto rep = touching_experiment(w, v, 1e-12);
    CHECK(rep.verdict == Propagation::Consistent);
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.components[0].boundary_contact);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        double alpha = 1.0 + u(rng), beta = 0.05 + 0.25 * u(rng) * alpha / 3;
        double mu_v = 0.2 + u(rng), mu_w = mu_v * (1.0 + (i % 4 == 0 ? 0.0 : u(rng)));
        auto [pw, pv] = log_singular_pair(mu_w, mu_v, alpha, beta, 3, 0.5, 1.0, 201);
        auto r = touching_experiment(pw, pv, OperatorSpec::quad_const(alpha, beta), ConeSpec::trace(3), 1e-12);
        CHECK(r.verdict == Propagation::Consistent);
        CHECK(r.w_super_failures == 0);
        CHECK(r.v_sub_failures == 0);
    }
    CHECK_THROWS(touching_experiment(v, w, 1e-12));
}

TEST_CASE("punctured-ball pair approaches touching only at the puncture", "[viscosity]") {
    double prev = std::numeric_limits<double>::infinity();
    for (int nodes : {101, 1001, 10001}) {
        double h = 1.0 / nodes;
        auto [w, v] = log_singular_pair(1.0, 0.0, 1.0, 0.0, 3, h, 1.0, nodes);
        auto rep = touching_experiment(w, v, 1e-14);
        CHECK(rep.verdict == Propagation::Consistent);
        CHECK(rep.min_gap > 0);
        CHECK(rep.min_gap < prev);
        CHECK(rep.min_gap <= 1.01 * h);
        prev = rep.min_gap;
    }
}

TEST_CASE("moving spheres for the bubble", "[viscosity]") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ur(0.0, 1.0);
    std::vector<Vec> xs;
    std::vector<double> lambdas;
    double R = moving_sphere_radius(1.0, std::pow(2.0, -0.5), 3);
    for (int i = 0; i < 5; ++i) {
        Vec d{u(rng), u(rng), u(rng)};
        xs.push_back(scaled(0.5 * std::cbrt(ur(rng)) / norm(d), d));
        lambdas.push_back(R * (0.2 + 0.8 * ur(rng)));
    }
    auto rep = moving_sphere_check(fields::bubble(3), 3, xs, lambdas, 0.1);
    CHECK(rep.inequality_ok());
    CHECK(rep.sphere_ok());
    CHECK(rep.boundary_ok());
}
