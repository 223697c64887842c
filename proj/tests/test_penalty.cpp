#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entlab/instances.hpp"
#include "entlab/penalty.hpp"

using namespace entlab;

TEST_CASE("integral constants of the closed-form presets") {
    // alpha(t) = t: 1/alpha(1) + int 1/t^2 = 2
    ImproperIntegral c1 =
        c_alpha(PenaltyFn::preset("alpha:t"), CAlphaConvention::with_alpha1);
    CHECK_FALSE(c1.divergent);
    CHECK(c1.value() == doctest::Approx(2.0).epsilon(1e-9));

    // alpha(t) = ln^2(et): head 1, integral 1 after s = ln(et)
    ImproperIntegral c2 =
        c_alpha(PenaltyFn::preset("alpha:log2"), CAlphaConvention::with_alpha1);
    CHECK_FALSE(c2.divergent);
    CHECK(c2.value() == doctest::Approx(2.0).epsilon(1e-5));

    // harmonic tail
    ImproperIntegral c3 =
        c_alpha(PenaltyFn::preset("alpha:const"), CAlphaConvention::with_alpha1);
    CHECK(c3.divergent);
    CHECK(std::isinf(c3.value()));

    // ln(et) is also non-integrable
    CHECK(c_alpha(PenaltyFn::preset("alpha:log1"), CAlphaConvention::integral_only)
              .divergent);

    // bracket quality at the grid
    CHECK(c1.gap() <= 1e-6 * c1.value());
    CHECK(c2.gap() <= 1e-6 * c2.value());
}

TEST_CASE("c_alpha conventions differ by the head term") {
    PenaltyFn a = PenaltyFn::preset("alpha:t");
    double with = c_alpha(a, CAlphaConvention::with_alpha1).value();
    double without = c_alpha(a, CAlphaConvention::integral_only).value();
    CHECK(with - without == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("c_alpha is antitone in alpha") {
    PenaltyFn small = PenaltyFn::preset("alpha:t");
    PenaltyFn big = small.scaled(3.0);
    CHECK(c_alpha(big, CAlphaConvention::integral_only).value() <
          c_alpha(small, CAlphaConvention::integral_only).value());
}

TEST_CASE("a2-capped penalty integrates to one") {
    for (double cap : {1.5, 4.0, 25.0 / 16.0}) {
        PenaltyFn a = PenaltyFn::a2_capped(cap);
        CHECK(c_alpha(a, CAlphaConvention::with_alpha1).value() ==
              doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("entropy bump: constants, composition, lower bound") {
    DyadicModel m = DyadicModel::uniform(1);
    PenaltyFn a = PenaltyFn::preset("alpha:t");
    CHECK(entropy_bump(m, Weight::constant(m, 1.0), 0, a, UStarVariant::lorentz) ==
          doctest::Approx(1.0));

    // (2,0) halves, lorentz variant, alpha(t) = t: E = (ln 2e)^2
    double ln2e = std::log(2.0 * std::exp(1.0));
    CHECK(entropy_bump(m, Weight(std::vector<double>{2.0, 0.0}), 0, a, UStarVariant::lorentz) ==
          doctest::Approx(ln2e * ln2e).epsilon(1e-9));

    // E >= w_I alpha(1) since t alpha(t) increases
    Rng rng(3);
    for (int t = 0; t < 500; ++t) {
        DyadicModel mm = random_model(rng, {5, 3, 0.05, 1e-2, 1.0});
        Weight w = random_weight(rng, mm);
        int id = rng.uniform_int(0, mm.atom_count() - 1);
        double e = entropy_bump(mm, w, id, a, UStarVariant::maximal);
        CHECK(e >= average(mm, w, id) * a.alpha(1.0) * (1.0 - 1e-12));
    }
}

TEST_CASE("bump supremum: trivial cases and exhaustive cross-check") {
    DyadicModel m = DyadicModel::uniform(1);
    Weight ones = Weight::constant(m, 1.0);
    PenaltyFn a = PenaltyFn::preset("alpha:t");
    CHECK(bump_supremum(m, ones, ones, a, BumpMode::two_sided, UStarVariant::maximal)
              .value == doctest::Approx(1.0));
    CHECK(bump_supremum(m, ones, ones, a, BumpMode::one_sided_u, UStarVariant::maximal)
              .value == doctest::Approx(1.0));

    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        DyadicModel mm = random_model(rng, {5, 3, 0.05, 1e-2, 1.0});
        Weight u = random_weight(rng, mm);
        Weight v = random_weight(rng, mm);
        BumpSupremum s =
            bump_supremum(mm, u, v, a, BumpMode::two_sided, UStarVariant::lorentz);
        // independent brute-force atom scan
        double brute = 0.0;
        for (int id = 0; id < mm.atom_count(); ++id) {
            double eu = entropy_bump(mm, u, id, a, UStarVariant::lorentz);
            double ev = entropy_bump(mm, v, id, a, UStarVariant::lorentz);
            brute = std::max(brute, eu * ev);
        }
        CHECK(s.value == doctest::Approx(brute).epsilon(1e-11));
    }
}

TEST_CASE("constant penalty: two-sided supremum is c^2 sup u* v*") {
    DyadicModel m = DyadicModel::uniform(2);
    Rng rng(9);
    Weight u = random_weight(rng, m);
    Weight v = random_weight(rng, m);
    PenaltyFn c2 = PenaltyFn::preset("alpha:const").scaled(2.0);
    double sup_prod = 0.0;
    for (int id = 0; id < m.atom_count(); ++id)
        sup_prod = std::max(sup_prod, u_star(m, u, id, UStarVariant::maximal) *
                                          u_star(m, v, id, UStarVariant::maximal));
    CHECK(bump_supremum(m, u, v, c2, BumpMode::two_sided, UStarVariant::maximal).value ==
          doctest::Approx(4.0 * sup_prod).epsilon(1e-11));
}

TEST_CASE("Riemann sum comparison for every preset") {
    for (const char* name : {"alpha:t", "alpha:log2"}) {
        RiemannLemmaReport rep = riemann_sum_check(PenaltyFn::preset(name));
        CHECK(rep.holds);
        if (std::string(name) == "alpha:t") {
            CHECK(rep.sum == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(rep.two_c_alpha_upper >= 2.0 - 1e-9);
        }
    }
}

TEST_CASE("penalty validation rejects a decreasing t*alpha") {
    CHECK_THROWS_AS(PenaltyFn::from_log_rule(
                        "bad", [](double tau) { return std::exp(-2.0 * tau); }),
                    InputError);
}
