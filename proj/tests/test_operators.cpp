#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entlab/instances.hpp"
#include "entlab/operators.hpp"

#include <nlohmann/json.hpp>

using namespace entlab;

TEST_CASE("sparse apply: averages of constants and two-member sums") {
    DyadicModel m = DyadicModel::uniform(1);
    OperatorSpec root_only = make_sparse_op(m, {0});
    Weight r = apply(root_only, m, Weight::constant(m, 1.0));
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.0));

    OperatorSpec two = make_sparse_op(m, {0, 1});
    Weight r2 = apply(two, m, Weight::constant(m, 1.0));
    CHECK(r2[0] == doctest::Approx(2.0));
    CHECK(r2[1] == doctest::Approx(1.0));
}

TEST_CASE("haar shift apply: identity block on the difference space") {
    DyadicModel m = DyadicModel::uniform(1);
    // identity on child indicators projects to the identity on differences
    OperatorSpec shift = make_haar_shift(m, {{0, {1.0, 0.0, 0.0, 1.0}}});
    Weight g(std::vector<double>{1.0, 3.0});
    Weight out = apply(shift, m, g);
    CHECK(out[0] == doctest::Approx(-1.0));
    CHECK(out[1] == doctest::Approx(1.0));
}

TEST_CASE("block certificates: zero, multiplier, scaling") {
    DyadicModel m = DyadicModel::uniform(1);
    CHECK(block_certificate(m, 0, {0.0, 0.0, 0.0, 0.0}) == doctest::Approx(0.0));

    // multiplier eps on the difference space of the unit-mass root: the
    // extreme-point form value is eps / (4 m (1-m)) = eps here, bound 1/|I|
    std::vector<double> eps_block{0.25, 0.0, 0.0, 0.25};
    double cert = block_certificate(m, 0, eps_block);
    CHECK(cert == doctest::Approx(0.25));
    CHECK(cert <= 1.0 / m.mass(0));
    CHECK_NOTHROW(make_haar_shift(m, {{0, eps_block}}));

    std::vector<double> doubled{0.5, 0.0, 0.0, 0.5};
    CHECK(block_certificate(m, 0, doubled) == doctest::Approx(2.0 * cert));

    // an overscaled block is rejected at construction
    std::vector<double> big{3.0, 0.0, 0.0, 3.0};
    CHECK_THROWS_AS(make_haar_shift(m, {{0, big}}), NormalizationViolated);
}

TEST_CASE("paraproduct certificates: zero, single symbol, lopsided comparison") {
    DyadicModel m = DyadicModel::uniform(1);
    ParaproductCertificates zero = paraproduct_certificate(m, ParaproductOp{});
    CHECK(zero.sup_normalized == doctest::Approx(0.0));

    // b_root a Haar difference with ||b||_inf = 1 on the unit root
    OperatorSpec para = make_paraproduct(m, {{0, {1.0, -1.0}}});
    ParaproductCertificates c =
        paraproduct_certificate(m, std::get<ParaproductOp>(para.op));
    CHECK(c.sup_normalized == doctest::Approx(1.0));
    CHECK(c.classical_carleson == doctest::Approx(1.0));

    // lopsided children (1-e, e): the sup-normalized certificate dominates
    for (double eps : {0.2, 0.05, 0.01}) {
        DyadicModel lop = DyadicModel::from_shape({2, 0, 0}, {1.0 - eps, eps});
        // zero-mean symbol with sup norm 1
        double left = -eps / (1.0 - eps);
        OperatorSpec p = make_paraproduct(lop, {{0, {left, 1.0}}}, false);
        ParaproductCertificates cc =
            paraproduct_certificate(lop, std::get<ParaproductOp>(p.op));
        CHECK(cc.sup_normalized > cc.classical_carleson);
        CHECK(cc.classical_carleson == doctest::Approx(eps / (1.0 - eps)).epsilon(1e-9));
    }
}

TEST_CASE("apply is linear and positive kinds are monotone") {
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        DyadicModel m = random_model(rng, {5, 3, 0.05, 1e-2, 1.0});
        OperatorSpec ops[3] = {
            make_sparse_op(m, random_sparse_members(rng, m)),
            random_haar_shift(rng, m),
            random_paraproduct(rng, m),
        };
        Weight f = random_weight(rng, m), g = random_weight(rng, m);
        double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
        Weight combo = f;
        for (size_t p = 0; p < combo.size(); ++p) combo[p] = a * f[p] + b * g[p];
        for (const OperatorSpec& op : ops) {
            Weight lhs = apply(op, m, combo);
            Weight tf = apply(op, m, f), tg = apply(op, m, g);
            for (size_t p = 0; p < lhs.size(); ++p)
                CHECK(lhs[p] ==
                      doctest::Approx(a * tf[p] + b * tg[p]).epsilon(1e-10));
        }
        Weight pos = apply(ops[0], m, f);
        for (double x : pos.values) CHECK(x >= 0.0);
    }
}

TEST_CASE("weighted norm: averaging projection and scaling covariance") {
    DyadicModel m = DyadicModel::uniform(1);
    OperatorSpec proj = make_sparse_op(m, {0});
    Weight ones = Weight::constant(m, 1.0);
    CHECK(weighted_norm(proj, m, ones, ones).norm == doctest::Approx(1.0).epsilon(1e-9));

    Weight four = Weight::constant(m, 4.0);
    CHECK(weighted_norm(proj, m, four, ones).norm == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("weighted norm: explicit 2x2 spectral value") {
    DyadicModel m = DyadicModel::uniform(1);
    OperatorSpec op = make_sparse_op(m, {0, 1});
    Weight ones = Weight::constant(m, 1.0);
    // scaled matrix [[3/2, 1/2], [1/2, 1/2]]: largest eigenvalue 1 + 1/sqrt 2
    double expected = 1.0 + 1.0 / std::sqrt(2.0);
    CHECK(weighted_norm_dense(op, m, ones, ones) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(weighted_norm(op, m, ones, ones).norm ==
          doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("power iteration matches the dense oracle") {
    Rng rng(9);
    for (int t = 0; t < 60; ++t) {
        DyadicModel m = random_model(rng, {5, 2, 0.05, 1e-2, 1.0});
        if (m.leaf_count() > 64) continue;
        Weight u = random_weight(rng, m, {1e-2, 1e2, 0.1});
        Weight v = random_weight(rng, m, {1e-2, 1e2, 0.1});
        OperatorSpec ops[3] = {
            make_sparse_op(m, random_sparse_members(rng, m)),
            random_haar_shift(rng, m),
            random_paraproduct(rng, m),
        };
        for (const OperatorSpec& op : ops) {
            double pi = weighted_norm(op, m, u, v).norm;
            double dense = weighted_norm_dense(op, m, u, v);
            CHECK(pi == doctest::Approx(dense).epsilon(1e-9));
        }
    }
}

TEST_CASE("weighted norm is invariant under leaf refinement") {
    Rng rng(13);
    for (int t = 0; t < 40; ++t) {
        DyadicModel m = random_model(rng, {4, 2, 0.0, 1e-1, 1.0});
        Weight u = random_weight(rng, m, {1e-1, 1e1, 0.0});
        Weight v = random_weight(rng, m, {1e-1, 1e1, 0.0});
        std::vector<int> members = random_sparse_members(rng, m);
        OperatorSpec op = make_sparse_op(m, members);
        double before = weighted_norm(op, m, u, v).norm;

        // split one leaf into equal halves with equal values
        int split_leaf = m.leaf_at(rng.uniform_int(0, m.leaf_count() - 1));
        std::vector<int> arity;
        std::vector<double> masses;
        std::vector<double> nu, nv;
        std::function<void(int)> rebuild = [&](int id) {
            const Atom& a = m.atom(id);
            if (a.children.empty()) {
                if (id == split_leaf) {
                    arity.push_back(2);
                    for (int h = 0; h < 2; ++h) {
                        arity.push_back(0);
                        masses.push_back(a.mass / 2.0);
                        nu.push_back(u[static_cast<size_t>(m.leaf_pos(id))]);
                        nv.push_back(v[static_cast<size_t>(m.leaf_pos(id))]);
                    }
                } else {
                    arity.push_back(0);
                    masses.push_back(a.mass);
                    nu.push_back(u[static_cast<size_t>(m.leaf_pos(id))]);
                    nv.push_back(v[static_cast<size_t>(m.leaf_pos(id))]);
                }
                return;
            }
            arity.push_back(static_cast<int>(a.children.size()));
            for (int c : a.children) rebuild(c);
        };
        rebuild(0);
        DyadicModel refined = DyadicModel::from_shape(arity, masses);
        // member ids shift by one past the split leaf in preorder
        std::vector<int> shifted;
        for (int id : members) shifted.push_back(id > split_leaf ? id + 2 : id);
        OperatorSpec op2 = make_sparse_op(refined, shifted);
        double after = weighted_norm(op2, refined, Weight(nu), Weight(nv)).norm;
        CHECK(after == doctest::Approx(before).epsilon(1e-8));
    }
}

TEST_CASE("positive dyadic duality: norm(u,v) equals norm(v,u)") {
    Rng rng(17);
    for (int t = 0; t < 60; ++t) {
        DyadicModel m = random_model(rng, {5, 3, 0.05, 1e-2, 1.0});
        Weight u = random_weight(rng, m, {1e-2, 1e2, 0.1});
        Weight v = random_weight(rng, m, {1e-2, 1e2, 0.1});
        OperatorSpec op = make_positive_dyadic(
            m, random_carleson(rng, m).entries);
        double a = weighted_norm(op, m, u, v).norm;
        double b = weighted_norm(op, m, v, u).norm;
        CHECK(a == doctest::Approx(b).epsilon(1e-8));
    }
}

TEST_CASE("complexity-1 blocks split across interleaved filtrations") {
    Rng rng(21);
    for (int t = 0; t < 60; ++t) {
        DyadicModel m = random_model(rng, {5, 2, 0.0, 1e-2, 1.0});
        OperatorSpec shift = random_haar_shift(rng, m);
        const auto& blocks = std::get<HaarShiftOp>(shift.op).blocks;
        std::map<int, std::vector<double>> even, odd;
        for (const auto& [id, blk] : blocks)
            (m.atom(id).depth % 2 == 0 ? even : odd)[id] = blk;
        OperatorSpec even_op = make_haar_shift(m, even);
        OperatorSpec odd_op = make_haar_shift(m, odd);
        Weight f = random_weight(rng, m);
        Weight full = apply(shift, m, f);
        Weight fe = apply(even_op, m, f), fo = apply(odd_op, m, f);
        for (size_t p = 0; p < full.size(); ++p)
            CHECK(full[p] == doctest::Approx(fe[p] + fo[p]).epsilon(1e-10));
    }
}

TEST_CASE("operator json round trip") {
    Rng rng(25);
    DyadicModel m = random_model(rng, {4, 2, 0.0, 1e-1, 1.0});
    OperatorSpec ops[3] = {
        make_sparse_op(m, random_sparse_members(rng, m)),
        random_haar_shift(rng, m),
        random_paraproduct(rng, m),
    };
    Weight f = random_weight(rng, m);
    for (const OperatorSpec& op : ops) {
        OperatorSpec back = operator_from_json(m, operator_to_json(op));
        Weight a = apply(op, m, f), b = apply(back, m, f);
        for (size_t p = 0; p < a.size(); ++p)
            CHECK(a[p] == doctest::Approx(b[p]).epsilon(1e-12));
    }
}
