#include "entlab/instances.hpp"

#include <algorithm>

#include "entlab/distribution.hpp"

namespace entlab {

DyadicModel random_model(Rng& rng, const ModelLaw& law) {
    std::vector<int> arity;
    std::vector<double> masses;
    // preorder walk; guarantee at least one branching at the root when
    // depth_max allows it, so instances are not all trivial
    std::function<void(int)> rec = [&](int depth) {
        bool must_leaf = depth >= law.depth_max;
        bool leaf = must_leaf || (depth > 0 && rng.bernoulli(0.25));
        if (leaf) {
            arity.push_back(0);
            masses.push_back(rng.log_uniform(law.leaf_mass_lo, law.leaf_mass_hi));
            return;
        }
        int k;
        if (rng.bernoulli(law.single_child_p))
            k = 1;
        else
            k = rng.uniform_int(2, law.branching_max);
        arity.push_back(k);
        for (int i = 0; i < k; ++i) rec(depth + 1);
    };
    rec(0);
    return DyadicModel::from_shape(arity, masses);
}

Weight random_weight(Rng& rng, const DyadicModel& m, const WeightLaw& law) {
    Weight w = Weight::constant(m, 0.0);
    for (int p = 0; p < m.leaf_count(); ++p) {
        if (law.zero_p > 0.0 && rng.bernoulli(law.zero_p))
            w[static_cast<size_t>(p)] = 0.0;
        else
            w[static_cast<size_t>(p)] = rng.log_uniform(law.lo, law.hi);
    }
    return w;
}

std::vector<int> random_sparse_members(Rng& rng, const DyadicModel& m, double take_p) {
    std::vector<int> members{m.root()};
    // budget of the nearest family ancestor: half its mass minus what maximal
    // included descendants already consumed
    std::vector<double> budget(static_cast<size_t>(m.atom_count()), 0.0);
    budget[0] = 0.5 * m.mass(m.root());
    std::function<void(int, int)> rec = [&](int id, int anchor) {
        if (id != anchor) {
            double mass = m.mass(id);
            if (mass <= budget[static_cast<size_t>(anchor)] && rng.bernoulli(take_p)) {
                budget[static_cast<size_t>(anchor)] -= mass;
                members.push_back(id);
                budget[static_cast<size_t>(id)] = 0.5 * mass;
                anchor = id;
            }
        }
        for (int c : m.atom(id).children) rec(c, anchor);
    };
    rec(m.root(), m.root());
    return members;
}

CarlesonSequence random_carleson(Rng& rng, const DyadicModel& m, double fill_p) {
    std::map<int, double> entries;
    for (int id = 0; id < m.atom_count(); ++id)
        if (rng.bernoulli(fill_p)) entries[id] = rng.log_uniform(1e-2, 1.0);
    if (entries.empty()) entries[m.root()] = 1.0;
    return make_carleson(m, std::move(entries));
}

OperatorSpec random_haar_shift(Rng& rng, const DyadicModel& m, double fill_p) {
    std::map<int, std::vector<double>> blocks;
    for (int id = 0; id < m.atom_count(); ++id) {
        size_t c = m.atom(id).children.size();
        if (c < 2 || !rng.bernoulli(fill_p)) continue;
        std::vector<double> blk(c * c);
        for (auto& x : blk) x = rng.uniform(-1.0, 1.0);
        blocks[id] = std::move(blk);
    }
    // project without enforcement, then rescale each block inside the bound
    OperatorSpec raw = make_haar_shift(m, std::move(blocks), false);
    auto& shift = std::get<HaarShiftOp>(raw.op);
    std::map<int, std::vector<double>> scaled;
    for (auto& [id, blk] : shift.blocks) {
        double cert = block_certificate(m, id, blk);
        if (cert <= 0.0) continue;
        double target = rng.uniform(0.3, 1.0) / m.mass(id);
        double f = target / cert;
        std::vector<double> b = blk;
        for (auto& x : b) x *= f;
        scaled[id] = std::move(b);
    }
    return make_haar_shift(m, std::move(scaled), true);
}

OperatorSpec random_paraproduct(Rng& rng, const DyadicModel& m, double fill_p) {
    std::map<int, std::vector<double>> symbol;
    for (int id = 0; id < m.atom_count(); ++id) {
        size_t c = m.atom(id).children.size();
        if (c < 2 || !rng.bernoulli(fill_p)) continue;
        std::vector<double> b(c);
        for (auto& x : b) x = rng.uniform(-1.0, 1.0);
        symbol[id] = std::move(b);
    }
    if (symbol.empty()) {
        // fall back to a single root symbol when the draw came out empty
        for (int id = 0; id < m.atom_count(); ++id) {
            size_t c = m.atom(id).children.size();
            if (c >= 2) {
                std::vector<double> b(c);
                for (auto& x : b) x = rng.uniform(-1.0, 1.0);
                symbol[id] = std::move(b);
                break;
            }
        }
    }
    OperatorSpec raw = make_paraproduct(m, std::move(symbol), false);
    auto& para = std::get<ParaproductOp>(raw.op);
    double cert = paraproduct_certificate(m, para).sup_normalized;
    if (cert > 0.0) {
        double f = rng.uniform(0.5, 1.0) / std::sqrt(cert);
        for (auto& [id, vals] : para.symbol)
            for (auto& x : vals) x *= f;
    }
    return make_paraproduct(m, std::move(para.symbol), true);
}

StepFn random_distribution(Rng& rng, int max_steps, double t_hi) {
    int k = rng.uniform_int(1, max_steps);
    std::vector<double> edges{0.0}, levels;
    double t = 0.0;
    for (int j = 0; j < k; ++j) {
        t += rng.log_uniform(0.05, t_hi / max_steps);
        edges.push_back(t);
    }
    // strictly decreasing levels in (0,1]
    std::vector<double> raw(static_cast<size_t>(k));
    for (auto& x : raw) x = rng.uniform(0.02, 1.0);
    std::sort(raw.begin(), raw.end(), std::greater<>());
    for (int j = 0; j < k; ++j) {
        double lv = raw[static_cast<size_t>(j)];
        if (!levels.empty() && lv >= levels.back()) lv = levels.back() * 0.9;
        levels.push_back(lv);
    }
    StepFn n(std::move(edges), std::move(levels));
    n.normalize();
    validate_distribution(n);
    return n;
}

DesignedOneSided designed_one_sided_instance(int k_max, int n_max,
                                             const PenaltyFn& alpha) {
    // One block per (k, n): a dyadic chain of length L_k with u an indicator
    // of the chain end, so the maximal-variant ratio is exactly 1 + L_k/2,
    // placed mid-cell (about 1.5 * 2^k); v constant on the block places
    // u_I v_I at 0.9 * 2^{-n} B_k. Piece norms are then exact power laws.
    DesignedOneSided out;
    std::vector<int> chain_len;
    for (int k = 0; k <= k_max; ++k) {
        double target_rho = 1.5 * std::pow(2.0, k);
        int len = static_cast<int>(std::lround(2.0 * (target_rho - 1.0)));
        chain_len.push_back(std::max(len, 1));
    }
    int cells = (k_max + 1) * (n_max + 1);

    std::vector<int> arity{cells};
    std::vector<double> masses;
    // each block: a halving chain (chain child + sibling leaf per level),
    // chain end E first in leaf order, then siblings from the deepest up
    std::function<void(int)> emit_chain = [&](int remaining) {
        if (remaining == 0) {
            arity.push_back(0);  // E
            masses.push_back(1.0);
            return;
        }
        arity.push_back(2);
        emit_chain(remaining - 1);
        arity.push_back(0);  // sibling leaf
        masses.push_back(1.0);
    };
    for (int k = 0; k <= k_max; ++k) {
        for (int n = 0; n <= n_max; ++n) {
            (void)n;
            size_t mark = masses.size();
            int len = chain_len[static_cast<size_t>(k)];
            emit_chain(len);
            size_t count = masses.size() - mark;
            masses[mark] = std::pow(0.5, len);  // E at depth len
            for (size_t i = 1; i < count; ++i)
                masses[mark + i] =
                    std::pow(0.5, static_cast<double>(len) - static_cast<double>(i) + 1.0);
        }
    }
    out.model = DyadicModel::from_shape(arity, masses);

    // block tops are the children of the root in order
    std::vector<int> block_tops = out.model.atom(out.model.root()).children;
    out.family = block_tops;
    out.u = Weight::constant(out.model, 0.0);
    out.v = Weight::constant(out.model, 0.0);

    const double a_target = 1.0;
    int cell = 0;
    for (int k = 0; k <= k_max; ++k) {
        int len = chain_len[static_cast<size_t>(k)];
        for (int n = 0; n <= n_max; ++n, ++cell) {
            int top = block_tops[static_cast<size_t>(cell)];
            // E is the deepest leaf of the block: first leaf in the range
            const Atom& ta = out.model.atom(top);
            int e_leaf_pos = ta.leaf_begin;
            // u mass of the block proportional to 2^k: u_I |I| = 2^k * c0
            double u_i = std::pow(2.0, k);  // block mass is 1
            double h = u_i * std::pow(2.0, len);
            out.u[static_cast<size_t>(e_leaf_pos)] = h;
            double b_k = std::pow(2.0, -k) * a_target /
                         std::pow(alpha.alpha(std::pow(2.0, k)), 2);
            double uv = 0.9 * std::pow(2.0, -n) * b_k;
            double v_c = uv / u_i;
            for (int p = ta.leaf_begin; p < ta.leaf_end; ++p)
                out.v[static_cast<size_t>(p)] = v_c;
        }
    }
    return out;
}

}  // namespace entlab
