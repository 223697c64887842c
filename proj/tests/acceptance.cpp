// Acceptance suite: every quantified bound the laboratory asserts, one
// pass/fail line per criterion, fixed seeds throughout.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entlab/bellman.hpp"
#include "entlab/distribution.hpp"
#include "entlab/sharpness.hpp"
#include "entlab/stopping.hpp"
#include "entlab/verify.hpp"
#include "entlab/young.hpp"

using namespace entlab;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion-%02d %-22s %s\n", pass ? "PASS" : "FAIL", idx,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

SweepConfig base_config(int trials, std::uint64_t seed, const char* alpha = "alpha:t") {
    SweepConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    cfg.depth_max = 8;
    cfg.alpha_preset = alpha;
    return cfg;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// 1. Carleson embedding, both penalty presets, plus the single-atom oracle.
void criterion_1() {
    bool pass = true;
    double worst = 0.0;
    for (const char* alpha : {"alpha:t", "alpha:log2"}) {
        VerifyResult r = run_verifier("embed-carleson", base_config(10000, 101, alpha));
        pass = pass && r.pass;
        worst = std::max(worst, r.report["details"]["max_ratio"].get<double>());
    }
    DyadicModel one = DyadicModel::uniform(0);
    Weight u1 = Weight::constant(one, 1.0);
    CarlesonSequence a = make_carleson(one, {{0, 1.0}});
    EmbeddingReport oracle =
        embedding_sum_carleson(one, u1, u1, a, PenaltyFn::preset("alpha:t"));
    bool oracle_ok = std::abs(oracle.lhs - 1.0) < 1e-12 &&
                     std::abs(oracle.rhs - 8.0) < 1e-4;
    pass = pass && oracle_ok;
    report(1, "carleson-embedding", pass,
           fmt("max_ratio=%.4f oracle lhs=%.12f rhs=%.6f", worst, oracle.lhs,
               oracle.rhs));
}

// 2. Haar embedding, Lorentz-variant u*, ratio <= 1.
void criterion_2() {
    bool pass = true;
    double worst = 0.0;
    for (const char* alpha : {"alpha:t", "alpha:log2"}) {
        VerifyResult r = run_verifier("embed-haar", base_config(10000, 202, alpha));
        pass = pass && r.pass;
        worst = std::max(worst, r.report["details"]["max_ratio"].get<double>());
    }
    report(2, "haar-embedding", pass, fmt("max_ratio=%.4f", worst));
}

// 3. End-to-end two-sided bounds (power iteration crosschecked vs dense).
void criterion_3() {
    bool pass = true;
    std::string detail;
    for (const char* id : {"lerner-2sided", "shift-2sided", "para-2sided"}) {
        VerifyResult r = run_verifier(id, base_config(10000, 303));
        pass = pass && r.pass;
        detail += fmt("%.4f/", r.report["details"]["max_ratio"].get<double>());
    }
    report(3, "two-sided-bounds", pass, "max_ratios(lerner/shift/para)=" + detail);
}

// 4. Concavity laws on midpoint pairs; Cauchy-Schwarz equality case.
void criterion_4() {
    VerifyResult r = run_verifier("conv-gap", base_config(10000, 404));
    bool eq = r.report["details"]["equality_case"].get<bool>();
    report(4, "concavity-laws", r.pass && eq,
           fmt("max_bound_to_gap=%.4f equality_case_1e-12=%d",
               r.report["details"]["max_bound_to_gap"].get<double>(), eq ? 1.0 : 0.0));
}

// 5. Bellman construction laws.
void criterion_5() {
    // the exact m1 identity on a 1000-point grid and PSD certificates are
    // inside the bellman verifier; the random sweep covers step majorants
    StepFn ind({0.0, 1.0}, {1.0});
    BellmanM m1 = build_m(ind);
    bool m1_ok = true;
    for (int i = 0; i <= 1000; ++i) {
        double y = 20.0 * i / 1000.0;
        m1_ok = m1_ok && eq_tol(m1.value(y), 4.0 / (1.0 + y));
        double lhs = 2.0 * m1.deriv(y) * m1.deriv(y);
        double rhs = m1.value(y) * m1.second(y);
        m1_ok = m1_ok && std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs);
    }
    VerifyResult r = run_verifier("bellman-m", base_config(4000, 505));
    report(5, "bellman-construction", m1_ok && r.pass,
           fmt("m1_exact=%d sweep_max_gap_ratio=%.4f", m1_ok ? 1.0 : 0.0,
               r.report["details"]["max_gap_ratio"].get<double>()));
}

// 6. Main dyadic and splitting inequalities (1/2 and 1/4 constants); n = 2
// consistency with the two-point lemma.
void criterion_6() {
    BellmanB bb(PenaltyFn::preset("alpha:t"), 1e12);
    Rng rng(606);
    bool pass = true;
    double worst = 0.0;
    for (int t = 0; t < 10000 && pass; ++t) {
        StepFn np = random_distribution(rng), nm = random_distribution(rng);
        double fp = rng.uniform(-4.0, 4.0), fm = rng.uniform(-4.0, 4.0);
        GapReport two = main_dyadic_gap(bb, fp, np, fm, nm);
        SplittingReport split = splitting_gap(bb, {fp, fm}, {np, nm}, {0.5, 0.5});
        pass = pass && two.holds && split.holds;
        pass = pass && eq_tol(split.lhs, two.lhs, 1e-9);
        pass = pass && eq_tol(split.rhs, 0.5 * two.rhs, 1e-9);
        if (two.lhs > 0) worst = std::max(worst, two.rhs / two.lhs);

        int parts = rng.uniform_int(3, 8);
        std::vector<double> fk, gamma;
        std::vector<StepFn> nk;
        double left = 1.0;
        for (int k = 0; k < parts; ++k) {
            double g = k + 1 == parts ? left : left * rng.uniform(0.1, 0.8);
            left -= g;
            gamma.push_back(g);
            fk.push_back(rng.uniform(-4.0, 4.0));
            nk.push_back(random_distribution(rng));
        }
        double gs = 0.0;
        for (double g : gamma) gs += g;
        for (auto& g : gamma) g /= gs;
        pass = pass && splitting_gap(bb, fk, nk, gamma).holds;
    }
    report(6, "gap-inequalities", pass, fmt("max rhs/lhs=%.4f", worst));
}

// 7. Sawyer transfer with the explicit K.
void criterion_7() {
    VerifyResult r = run_verifier("sawyer-K", base_config(1000, 707));
    DyadicModel one = DyadicModel::uniform(0);
    OperatorSpec op = make_sparse_op(one, {0});
    Weight ones = Weight::constant(one, 1.0);
    SawyerTransferReport t = sawyer_transfer_check(op, one, ones, ones);
    bool trivial_ok = eq_tol(t.norm_sq, 1.0, 1e-9) && t.pass;
    report(7, "sawyer-transfer", r.pass && trivial_ok,
           fmt("max norm^2/(KS)=%.5f trivial 1 <= %.2f",
               r.report["details"]["max_ratio"].get<double>(), t.k_times_s));
}

// 8. One-sided theorem: bounded fitted constant, depth trend, per-piece shape.
void criterion_8() {
    VerifyResult r = run_verifier("one-sided", base_config(1000, 808));
    bool trend = r.report["details"]["trend_ok"].get<bool>();
    bool slopes = r.report["details"]["slopes_ok"].get<bool>();
    report(8, "one-sided-testing", r.pass,
           fmt("max_ratio=%.4f trend_ok=%d slope_n=%.4f",
               r.report["details"]["max_testing_ratio"].get<double>(),
               trend ? 1.0 : 0.0,
               r.report["details"]["regression_slope_n"].get<double>()) +
               (slopes ? " slopes_ok" : " slopes_BAD"));
}

// 9. Stopping machinery: partitions, in-cell nu-Carleson, U_J bounds, the
// Riemann lemma for every preset.
void criterion_9() {
    Rng rng(909);
    PenaltyFn at = PenaltyFn::preset("alpha:t");
    bool partition = true, nu_ok = true, uj_ok = true;
    double worst_uj = 0.0;
    for (int t = 0; t < 400; ++t) {
        DyadicModel m = random_model(rng, {7, 3, 0.05, 1e-2, 1.0});
        Weight u = random_weight(rng, m, {1e-2, 1e2, 0.0});
        Weight v = random_weight(rng, m, {1e-2, 1e2, 0.0});
        SparseFamily fam = make_sparse_family(m, random_sparse_members(rng, m));
        StoppingForest f = build_stopping_forest(m, u, 0, fam.members);
        partition = partition && f.partition_ok;
        UjBoundsReport uj = uj_carleson_bounds(m, u, v, fam, 0);
        uj_ok = uj_ok && uj.per_j_pass && uj.aggregate_pass;
        worst_uj = std::max(worst_uj, uj.worst_per_j_ratio);
        OperatorSpec op = make_sparse_op(m, fam.members);
        KnSplit s = split_kn(op, m, u, v, at);
        partition = partition && s.partition_ok && s.b_k_ok;
        for (const auto& [kn, atoms] : s.cells) {
            if (atoms.size() < 2) continue;
            StoppingForest cf = build_stopping_forest(m, u, 0, atoms, atoms);
            NuCarlesonReport nr = nu_carleson_check(m, v, cf, atoms);
            nu_ok = nu_ok && nr.per_generation_pass && nr.aggregate_pass;
        }
    }
    bool riemann = true;
    for (const char* name : {"alpha:t", "alpha:log2"})
        riemann = riemann && riemann_sum_check(PenaltyFn::preset(name)).holds;
    report(9, "stopping-machinery", partition && nu_ok && uj_ok && riemann,
           fmt("worst ||U_J||^2/(C1 A1 u|J|)=%.4f", worst_uj) +
               (riemann ? " riemann_ok" : " riemann_BAD"));
}

// 10. Orlicz pipeline: floors, sandwich, the volb predicate on 1e4 functions,
// and the full alpha_from_young predicate on 1e3 functions.
void criterion_10() {
    VerifyResult r = run_verifier("orlicz-entropy", base_config(10000, 1010));
    report(10, "orlicz-pipeline", r.pass,
           fmt("volb_max=%.4f young_max=%.4f young_c_alpha=%.3f",
               r.report["details"]["volb_max_ratio"].get<double>(),
               r.report["details"]["young_max_ratio"].get<double>(),
               r.report["details"]["young_c_alpha"].get<double>()));
}

// 11. Sharpness constructions, <= 30 s.
void criterion_11() {
    double t0 = omp_get_wtime();
    bool pass = true;
    std::string detail;

    // psi(s) = s: bounded bumps, stable family, exact 2 ln X lower partial
    ContinuumWeightPair a2 = make_fundamental_pair(psi_rule_preset("psi:s"));
    BumpUniformity b = bump_uniformity(a2);
    pass = pass && b.stability < 0.01;
    auto rows = divergence_witness(a2, {1e3, 1e12});
    double expect = 2.0 * std::log(1e12) - 2.0 * std::log(1.0 + 1e-6);
    pass = pass && std::abs(rows[1].lower_partial - expect) <= 1e-8 * expect;
    pass = pass && rows[1].exact_partial > rows[1].lower_partial;

    // L log L endpoint: strict increase along the ladder
    DivergenceVerdict llogl = classify_divergence(
        make_fundamental_pair(psi_rule_preset("psi:llogl")), {1e3, 1e6, 1e9, 1e12});
    pass = pass && llogl.divergent;
    for (size_t i = 1; i < llogl.ladder.size(); ++i)
        pass = pass &&
               llogl.ladder[i].lower_partial > llogl.ladder[i - 1].lower_partial;

    // integrable side converges with a small tail bracket
    DivergenceVerdict log2 = classify_divergence(
        make_fundamental_pair(psi_rule_preset("psi:log2")), {1e3, 1e6});
    pass = pass && log2.converged && log2.tail_bracket < 1e-3;

    // entropy remark: alpha = 1 pair certified divergent with bounded bumps
    EntropySharpnessReport ent = entropy_sharpness(
        PenaltyFn::preset("alpha:const"), PenaltyFn::preset("alpha:t"), {1e3, 1e6});
    pass = pass && ent.divergence.divergent && ent.bump_sup < kInf;

    double elapsed = omp_get_wtime() - t0;
    pass = pass && elapsed <= 30.0;
    report(11, "sharpness", pass,
           fmt("B=%.3f stability=%.5f elapsed=%.1fs", b.b_observed, b.stability,
               elapsed));
}

// 12. One-weight: the provable exp-log comparison (the literal Fujii-Wilson
// form fails near characteristic 1; see the pinned counterexample test),
// plus shift fits stable across depths.
void criterion_12() {
    VerifyResult r = run_verifier("one-weight", base_config(10000, 1212));
    bool stable = r.report["details"]["fits_stable"].get<bool>();
    report(12, "one-weight", r.pass && stable,
           fmt("max FW/A2=%.4f", r.report["details"]["max_wilson_to_a2"].get<double>()) +
               (stable ? " fits_stable" : " fits_UNSTABLE"));
}

}  // namespace

int main() {
    double t0 = omp_get_wtime();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("%d/12 criteria passed (%.1f s total)\n", 12 - g_failures,
                omp_get_wtime() - t0);
    return g_failures == 0 ? 0 : 1;
}
