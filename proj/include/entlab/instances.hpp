#pragma once
// Seeded random instances: models, weights, operators, distribution
// functions. Trial i of a sweep draws everything from Rng(seed, i), so the
// instance stream is independent of evaluation order and parallelism.

#include "entlab/operators.hpp"
#include "entlab/penalty.hpp"
#include "entlab/stepfn.hpp"

namespace entlab {

struct ModelLaw {
    int depth_max = 8;
    int branching_max = 3;
    double single_child_p = 0.06;  // atoms allowed in several generations
    double leaf_mass_lo = 1e-3, leaf_mass_hi = 1.0;
};

struct WeightLaw {
    double lo = 1e-3, hi = 1e3;  // log-uniform leaf values
    double zero_p = 0.0;         // probability of an exact zero leaf
};

DyadicModel random_model(Rng& rng, const ModelLaw& law = {});
Weight random_weight(Rng& rng, const DyadicModel& m, const WeightLaw& law = {});

// Random sparse family containing the root; nearest-ancestor budgets keep the
// half-mass certificate valid by construction.
std::vector<int> random_sparse_members(Rng& rng, const DyadicModel& m,
                                       double take_p = 0.55);

CarlesonSequence random_carleson(Rng& rng, const DyadicModel& m, double fill_p = 0.4);

// Blocks on a random subset of branching atoms, scaled inside the L1xL1 bound.
OperatorSpec random_haar_shift(Rng& rng, const DyadicModel& m, double fill_p = 0.6);

// Symbol on a random subset, normalized to the sup-Carleson certificate <= 1.
OperatorSpec random_paraproduct(Rng& rng, const DyadicModel& m, double fill_p = 0.6);

// Random step distribution: at most `max_steps` thresholds, levels in (0,1].
StepFn random_distribution(Rng& rng, int max_steps = 6, double t_hi = 8.0);

// A designed one-sided testing instance: one sparse singleton per (k, n)
// cell, k <= k_max, n <= n_max, with exact power-law piece norms (chain
// blocks with indicator weights; see tests for the derivation).
struct DesignedOneSided {
    DyadicModel model;
    Weight u, v;
    std::vector<int> family;
};

DesignedOneSided designed_one_sided_instance(int k_max, int n_max,
                                             const PenaltyFn& alpha);

}  // namespace entlab
