#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entlab/dyadic.hpp"
#include "entlab/instances.hpp"

#include <nlohmann/json.hpp>

using namespace entlab;

static DyadicModel depth1_lebesgue() { return DyadicModel::uniform(1); }

TEST_CASE("build: depth-1 binary with Lebesgue masses") {
    DyadicModel m = depth1_lebesgue();
    CHECK(m.atom_count() == 3);
    CHECK(m.leaf_count() == 2);
    CHECK(m.mass(0) == doctest::Approx(1.0));
    CHECK(m.mass(1) == doctest::Approx(0.5));
    CHECK(m.mass(2) == doctest::Approx(0.5));
}

TEST_CASE("build: depth-2 masses sum upward") {
    DyadicModel m = DyadicModel::from_shape({2, 2, 0, 0, 2, 0, 0},
                                            {0.1, 0.4, 0.3, 0.2});
    CHECK(m.mass(0) == doctest::Approx(1.0));
    CHECK(m.mass(1) == doctest::Approx(0.5));   // left internal
    CHECK(m.mass(4) == doctest::Approx(0.5));   // right internal
}

TEST_CASE("build: zero-mass atom rejected") {
    CHECK_THROWS_AS(DyadicModel::from_shape({2, 0, 0}, {0.5, 0.0}), ZeroMassAtom);
}

TEST_CASE("from_json: additivity is validated") {
    DyadicModel m = depth1_lebesgue();
    nlohmann::json j = m.to_json();
    j["atoms"][0]["mass"] = 2.0;  // root no longer the sum of its children
    CHECK_THROWS_AS(DyadicModel::from_json(j), AdditivityViolation);
    // round trip of the unmodified model
    DyadicModel back = DyadicModel::from_json(m.to_json());
    CHECK(back.atom_count() == m.atom_count());
    CHECK(back.mass(1) == doctest::Approx(m.mass(1)));
}

TEST_CASE("average: constants, arithmetic and weighted means") {
    DyadicModel m = depth1_lebesgue();
    CHECK(average(m, Weight::constant(m, 3.25), 0) == doctest::Approx(3.25));
    CHECK(average(m, Weight(std::vector<double>{1.0, 3.0}), 0) == doctest::Approx(2.0));

    DyadicModel skew = DyadicModel::from_shape({2, 0, 0}, {0.25, 0.75});
    CHECK(average(skew, Weight(std::vector<double>{4.0, 0.0}), 0) == doctest::Approx(1.0));
}

TEST_CASE("martingale difference: constants annihilated, jump split") {
    DyadicModel m = depth1_lebesgue();
    Weight zero = martingale_difference(m, Weight::constant(m, 7.0), 0);
    CHECK(zero[0] == doctest::Approx(0.0));
    CHECK(zero[1] == doctest::Approx(0.0));

    Weight d = martingale_difference(m, Weight(std::vector<double>{1.0, 3.0}), 0);
    CHECK(d[0] == doctest::Approx(-1.0));
    CHECK(d[1] == doctest::Approx(1.0));
    CHECK(martingale_difference_l1(m, Weight(std::vector<double>{1.0, 3.0}), 0) == doctest::Approx(1.0));

    // one-child atom: ch(I) = {I}, difference vanishes
    DyadicModel chain = DyadicModel::from_shape({1, 2, 0, 0}, {0.5, 0.5});
    Weight dc = martingale_difference(chain, Weight(std::vector<double>{1.0, 5.0}), 0);
    CHECK(dc[0] == doctest::Approx(0.0));
    CHECK(dc[1] == doctest::Approx(0.0));
}

TEST_CASE("maximal function: ancestor averages") {
    DyadicModel m = depth1_lebesgue();
    Weight mx = maximal_function(m, Weight::constant(m, 1.0), 0);
    CHECK(mx[0] == doctest::Approx(1.0));
    CHECK(integral_on(m, mx, 0) == doctest::Approx(1.0));

    Weight mx2 = maximal_function(m, Weight(std::vector<double>{2.0, 0.0}), 0);
    CHECK(mx2[0] == doctest::Approx(2.0));
    CHECK(mx2[1] == doctest::Approx(1.0));
    CHECK(integral_on(m, mx2, 0) == doctest::Approx(1.5));

    DyadicModel m2 = DyadicModel::uniform(2);
    Weight ind = Weight::constant(m2, 0.0);
    ind[0] = 1.0;
    Weight mx3 = maximal_function(m2, ind, 0);
    CHECK(mx3[0] == doctest::Approx(1.0));
    CHECK(mx3[1] == doctest::Approx(0.5));
    CHECK(mx3[2] == doctest::Approx(0.25));
    CHECK(mx3[3] == doctest::Approx(0.25));
    CHECK(integral_on(m2, mx3, 0) == doctest::Approx(0.5));
}

TEST_CASE("carleson norm: single entry, uniform fill, empty") {
    DyadicModel m = DyadicModel::uniform(0);
    CarlesonSequence one = make_carleson(m, {{0, 1.0}});
    CHECK(one.carleson_norm == doctest::Approx(1.0));

    DyadicModel m2 = DyadicModel::uniform(2);
    std::map<int, double> all;
    for (int id = 0; id < m2.atom_count(); ++id) all[id] = 1.0;
    CHECK(make_carleson(m2, all).carleson_norm == doctest::Approx(3.0));

    CHECK(make_carleson(m2, {}).carleson_norm == doctest::Approx(0.0));
}

TEST_CASE("carleson norm is monotone in each entry") {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        DyadicModel m = random_model(rng, {5, 3, 0.05, 1e-2, 1.0});
        CarlesonSequence a = random_carleson(rng, m);
        auto bumped = a.entries;
        int which = rng.uniform_int(0, m.atom_count() - 1);
        bumped[which] += rng.log_uniform(0.01, 1.0);
        CHECK(make_carleson(m, bumped).carleson_norm >= a.carleson_norm - kRelTol);
    }
}

TEST_CASE("sparse certificates: boundary at one half") {
    DyadicModel m = depth1_lebesgue();
    SparseCertificate root_only = check_sparse(m, {0});
    CHECK(root_only.sparse);
    CHECK(root_only.worst_ratio == doctest::Approx(0.0));

    SparseCertificate half = check_sparse(m, {0, 1});
    CHECK(half.sparse);
    CHECK(half.worst_ratio == doctest::Approx(0.5));

    SparseCertificate both = check_sparse(m, {0, 1, 2});
    CHECK_FALSE(both.sparse);
    CHECK(both.worst_ratio == doctest::Approx(1.0));
    CHECK(both.violating_atom == 0);
}

TEST_CASE("random sparse families pass their own certificate") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        DyadicModel m = random_model(rng, {6, 3, 0.05, 1e-2, 1.0});
        SparseFamily fam = make_sparse_family(m, random_sparse_members(rng, m));
        CHECK(fam.certificate.sparse);
    }
}

TEST_CASE("property: averages are a martingale and differences orthogonal") {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        DyadicModel m = random_model(rng, {6, 3, 0.08, 1e-3, 1.0});
        Weight w = random_weight(rng, m);
        for (int id = 0; id < m.atom_count(); ++id) {
            const Atom& a = m.atom(id);
            if (a.children.empty()) continue;
            double s = 0.0;
            for (int c : a.children) s += average(m, w, c) * m.mass(c);
            CHECK(s == doctest::Approx(average(m, w, id) * a.mass).epsilon(1e-12));
            Weight d = martingale_difference(m, w, id);
            CHECK(integral_on(m, d, id) ==
                  doctest::Approx(0.0).scale(average(m, w, id) * a.mass + 1.0));
        }
        Weight mx = maximal_function(m, w, 0);
        double avg = average(m, w, 0);
        for (double v : mx.values) CHECK(v >= avg - kRelTol * std::abs(avg));
    }
}

TEST_CASE("weight json round trip") {
    DyadicModel m = DyadicModel::uniform(2);
    Weight w(std::vector<double>{0.5, 0.0, 2.0, 1.5});
    Weight back = weight_from_json(m, weight_to_json(m, w));
    for (size_t i = 0; i < w.size(); ++i) CHECK(back[i] == doctest::Approx(w[i]));
}
