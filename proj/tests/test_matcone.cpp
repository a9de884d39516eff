#include <catch_amalgamated.hpp>

#include <random>

#include "viscone/matcone.hpp"

using namespace viscone;
using Catch::Matchers::WithinAbs;

TEST_CASE("elementary symmetric functions", "[matcone]") {
    CHECK(sigma_k(Vec{1, 2, 3}, 1) == 6);
    CHECK(sigma_k(Vec{1, 2, 3}, 2) == 11);
    CHECK(sigma_k(Vec{1, 1, 1}, 3) == 1);
}

TEST_CASE("Jacobi eigenvalues", "[matcone]") {
    auto s = eigen_sym(SymMatrix::diag({3, 1, 2}));
    CHECK(s.values == Vec{1, 2, 3});
    SymMatrix swap(2);
    swap(0, 1) = 1.0;
    auto t = eigen_sym(swap);
    CHECK_THAT(t.values[0], WithinAbs(-1, 1e-14));
    CHECK_THAT(t.values[1], WithinAbs(1, 1e-14));

    std::mt19937_64 rng(11);
    for (int n = 2; n <= 6; ++n) {
        Vec planted(n);
        for (int i = 0; i < n; ++i) planted[i] = -2.0 + 1.3 * i;
        auto m = random_orthogonal_conjugate(planted, rng);
        auto got = eigen_sym(m);
        for (int i = 0; i < n; ++i) CHECK_THAT(got.values[i], WithinAbs(planted[i], 1e-12));
    }
}

TEST_CASE("cone membership", "[matcone]") {
    CHECK(in_cone(Vec{1, 1, 1}, ConeSpec::gamma_k(3, 3)));
    CHECK_FALSE(in_cone(Vec{2, 2, -1}, ConeSpec::gamma_k(3, 2)));
    CHECK(in_closure(Vec{2, 2, -1}, ConeSpec::gamma_k(3, 2)));
    CHECK(in_cone(Vec{-1, -1, 5}, ConeSpec::gamma_k(3, 1)));
    CHECK(in_cone(Vec{-1, -1, 5}, ConeSpec::one_positive(3)));
    CHECK_FALSE(in_cone(Vec{-1, -1, 5}, ConeSpec::posdef(3)));
    CHECK(in_cone(Vec{3, -1, -1}, ConeSpec::neg_gamma_complement(3, 1)));
    CHECK_FALSE(in_cone(Vec{1, -3, -3}, ConeSpec::neg_gamma_complement(3, 1)));
}

TEST_CASE("classification with tolerance", "[matcone]") {
    for (int k = 1; k <= 3; ++k) {
        auto c = classify(SymMatrix(3), ConeSpec::gamma_k(3, k), 1e-12);
        CHECK(c.verdict == Verdict::Boundary);
        CHECK(c.margin == 0.0);
    }
    CHECK(classify(SymMatrix::identity(3), ConeSpec::posdef(3), 1e-12).verdict == Verdict::Interior);
    CHECK(classify(-SymMatrix::identity(3), ConeSpec::trace(3), 1e-12).verdict == Verdict::Outside);
    CHECK_THROWS(classify(SymMatrix(3), ConeSpec::trace(3), 0.0));
}

TEST_CASE("cone specs parse and print", "[matcone]") {
    CHECK(parse_cone("gamma_k:2", 3).k == 2);
    CHECK(parse_cone("trace", 4).kind == ConeKind::TraceCone);
    CHECK(parse_cone("neg:posdef", 3).kind == ConeKind::Negated);
    CHECK(parse_cone("gamma_k:2", 3).str() == "gamma_k:2");
    CHECK_THROWS(parse_cone("gamma_k:5", 3));
    CHECK_THROWS(parse_cone("cube", 3));
}

TEST_CASE("cone axioms by sampling", "[matcone]") {
    auto g2 = axiom_check(ConeSpec::gamma_k(3, 2), 400, 5);
    for (const auto& o : g2.outcomes) CHECK(o.holds());

    auto tr = axiom_check(ConeSpec::trace(3), 400, 5);
    for (const auto& o : tr.outcomes) CHECK(o.holds());

    auto op = axiom_check(ConeSpec::one_positive(3), 400, 5);
    CHECK(op.get(Axiom::PositiveShift).holds());
    const auto& tr_axiom = op.get(Axiom::PositiveTrace);
    CHECK_FALSE(tr_axiom.holds());
    REQUIRE(tr_axiom.has_witness);
    double sum = 0;
    for (double l : tr_axiom.witness) sum += l;
    CHECK(sum < 0);
}
