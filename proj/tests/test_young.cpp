#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entlab/instances.hpp"
#include "entlab/young.hpp"

using namespace entlab;

TEST_CASE("luxemburg norm: L2, L1 and indicator gauges") {
    DyadicModel m = DyadicModel::uniform(2);
    YoungFn t2 = YoungFn::power(2.0);

    CHECK(luxemburg_norm(m, Weight::constant(m, 3.0), 0, t2) ==
          doctest::Approx(3.0).epsilon(1e-9));

    // indicator of fraction s: norm sqrt(s) = 1/Phi^{-1}(1/s)
    Weight ind = Weight::constant(m, 0.0);
    ind[0] = 1.0;
    CHECK(luxemburg_norm(m, ind, 0, t2) == doctest::Approx(0.5).epsilon(1e-9));

    // Phi(t) = t recovers the average
    YoungFn t1 = YoungFn::preset("young:t");
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        DyadicModel mm = random_model(rng, {4, 2, 0.0, 1e-2, 1.0});
        Weight w = random_weight(rng, mm, {1e-2, 1e2, 0.0});
        CHECK(luxemburg_norm(mm, w, 0, t1) ==
              doctest::Approx(average(mm, w, 0)).epsilon(1e-8));
    }
}

TEST_CASE("orlicz_to_lorentz: closed form for t^2") {
    LorentzProfile prof = orlicz_to_lorentz(YoungFn::power(2.0));
    // Psi(s) = 2 (2s)^{-1/3}, psi(s) = 2^{2/3} s^{2/3}
    for (double s : {1e-6, 1e-4, 1e-2, 0.3}) {
        CHECK(prof.profile.Psi(s) ==
              doctest::Approx(2.0 * std::pow(2.0 * s, -1.0 / 3.0)).epsilon(1e-3));
        CHECK(prof.psi(s) ==
              doctest::Approx(std::pow(2.0, 2.0 / 3.0) * std::pow(s, 2.0 / 3.0))
                  .epsilon(1e-2));
    }
    CHECK_FALSE(prof.recip_psi_integral.divergent);
}

TEST_CASE("orlicz_to_lorentz: log bump is quasiconcave with finite recip integral") {
    LorentzProfile prof = orlicz_to_lorentz(YoungFn::preset("young:tln2"));
    CHECK_FALSE(prof.recip_psi_integral.divergent);
    // quasiconcavity was validated at construction; norm domination sampled
    YoungFn phi = YoungFn::preset("young:tln2");
    Rng rng(11);
    double worst = 0.0;
    for (int t = 0; t < 300; ++t) {
        StepFn n = random_distribution(rng);
        double lam = lambda_psi_norm(n, prof.profile);
        double lux = luxemburg_norm_of_distribution(n, phi);
        if (lux > 0.0) worst = std::max(worst, lam / lux);
    }
    CHECK(worst < kInf);
    CHECK(worst > 0.0);
}

TEST_CASE("divergent Young tails are rejected") {
    CHECK_THROWS_AS(orlicz_to_lorentz(YoungFn::preset("young:t")), DivergentYoungTail);
    CHECK_THROWS_AS(young_llogl_floor(YoungFn::preset("young:t")), DivergentYoungTail);
}

TEST_CASE("alpha_from_psi: substitution identity for the square-log profile") {
    PsiProfile p;
    p.name = "psi:ln2e";
    p.psi_of_y = [](double y) { return (1.0 + y) * (1.0 + y); };
    AlphaFromPsiResult r = alpha_from_psi(p);
    // Psi(e e^{-t}) = t^2, alpha(t) = t; sampled at table nodes
    CHECK(r.alpha.alpha(2.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.alpha.alpha(5.0) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(r.truncation_y == doctest::Approx(0.0));
    // C_alpha (integral convention) = int_0^1 ds/(s ln^2(e/s)) = 1
    CHECK(r.c_alpha_integral.value() == doctest::Approx(1.0).epsilon(1e-5));

    // constant f: predicate closes exactly
    StepFn flat({0.0, 2.5}, {1.0});
    JensenCheck c = jensen_check(flat, r.truncated, r.alpha);
    CHECK(c.holds);

    Rng rng(7);
    for (int t = 0; t < 10000; ++t) {
        StepFn n = random_distribution(rng);
        JensenCheck jc = jensen_check(n, r.truncated, r.alpha);
        CHECK(jc.holds);
    }
}

TEST_CASE("min_young: idempotence, exact crossing arithmetic, sandwich") {
    YoungFn t2 = YoungFn::power(2.0);
    MinYoungResult same = min_young(t2, t2);
    for (double t : {0.3, 1.0, 7.0}) CHECK(same.phi(t) == doctest::Approx(t * t));

    MinYoungResult mn = min_young(t2, YoungFn::power(3.0));
    REQUIRE(mn.crossings.size() == 1);
    CHECK(mn.crossings[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    // below the crossing the cubic derivative is smaller
    CHECK(mn.phi(0.5) == doctest::Approx(0.125).epsilon(1e-10));
    // above: Phi(t) = t^2 - 4/27
    for (double t : {1.0, 2.0, 50.0})
        CHECK(mn.phi(t) == doctest::Approx(t * t - 4.0 / 27.0).epsilon(1e-10));
    CHECK(mn.sandwich_c > 0.0);

    // sandwich on a log grid: c min <= Phi <= min
    for (int i = 0; i <= 60; ++i) {
        double t = std::pow(10.0, 6.0 * i / 60.0);
        double lo = std::min(t * t, t * t * t);
        CHECK(mn.phi(t) <= lo * (1.0 + 1e-9));
        CHECK(mn.phi(t) >= mn.sandwich_c * lo * (1.0 - 1e-9));
    }
}

TEST_CASE("young_llogl_floor: positive for the log bumps, growing for powers") {
    LlogLFloor f1 = young_llogl_floor(YoungFn::preset("young:tln2"));
    CHECK(f1.c > 1.0);

    LlogLFloor f2 = young_llogl_floor(YoungFn::power(2.0));
    CHECK(f2.c > 0.0);
}

TEST_CASE("alpha_from_young: full pipeline on the double-log bump") {
    YoungFn phi = YoungFn::preset("young:loglog:eps=1");
    AlphaFromYoungResult r = alpha_from_young(phi, 99);
    CHECK_FALSE(r.c_alpha_integral.divergent);
    CHECK(r.c_alpha_integral.value() > 0.0);
    CHECK(r.young_scale > 0.0);
    CHECK(r.sandwich_c > 0.0);

    // constant f
    StepFn flat({0.0, 1.0}, {1.0});
    JensenCheck c0 = orlicz_bump_check(flat, phi, r);
    CHECK(c0.ratio <= 1.0 + 1e-8);

    Rng rng(13);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        StepFn n = random_distribution(rng);
        JensenCheck c = orlicz_bump_check(n, phi, r);
        CHECK(c.ratio <= 1.0 + 1e-8);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("young validation rejects non-convex rules") {
    CHECK_THROWS_AS(YoungFn::from_rules(
                        "bad", [](double t) { return std::sqrt(t); },
                        [](double t) { return 0.5 / std::sqrt(t + 1e-12); }),
                    NonconvexYoung);
}
