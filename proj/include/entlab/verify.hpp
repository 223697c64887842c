#pragma once
// Theorem verifiers: randomized sweeps with per-trial counter-mode seeding,
// an OpenMP-parallel sweep kernel with a serial reference path, and
// delta-debugging minimization of failing instances.

#include <functional>
#include <string>
#include <vector>

#include "entlab/instances.hpp"

#include <nlohmann/json.hpp>

namespace entlab {

struct SweepConfig {
    std::uint64_t seed = 1;
    int trials = 10000;
    int depth_max = 8;
    std::string alpha_preset = "alpha:t";
    std::string young_preset = "young:tln2";
    std::string variant = "maximal";  // "maximal" | "lorentz"
    double tolerance = 1e-10;
    double cap = 1e4;  // absolute-constant cap for unquantified bounds
    int jobs = 0;      // 0 = all cores
    bool serial = false;

    nlohmann::json to_json() const;
    static SweepConfig from_json(const nlohmann::json& j);
    std::string preset_hash() const;
};

struct TrialOutcome {
    bool pass = true;
    double stat = 0.0;  // aggregated by max across trials
    nlohmann::json witness;  // instance serialization when failed
    std::string note;
};

struct SweepSummary {
    int trials = 0;
    int failures = 0;
    double max_stat = 0.0;
    int argmax_trial = -1;
    int first_fail_trial = -1;
    nlohmann::json first_witness;
};

// Data-parallel sweep over trials; results are folded by trial index, so the
// summary is identical at every parallelism degree. `serial` runs the
// reference implementation (used by tests and the benchmark).
SweepSummary run_sweep(int trials, int jobs, bool serial,
                       const std::function<TrialOutcome(std::uint64_t)>& trial_fn);

struct VerifyResult {
    std::string theorem;
    bool pass = false;
    nlohmann::json report;
};

// theorem ids: embed-carleson, embed-haar, lerner-2sided, shift-2sided,
// para-2sided, one-sided, sawyer-K, bellman-m, conv-gap, orlicz-entropy,
// one-weight
VerifyResult run_verifier(const std::string& theorem_id, const SweepConfig& cfg);
const std::vector<std::string>& verifier_ids();

// Single-instance predicate for a serialized instance; constant_factor
// rescales the theorem's right-hand constant (fault injection in tests).
struct InstanceCheck {
    bool pass = true;
    double ratio = 0.0;
};
InstanceCheck instance_predicate(const std::string& theorem_id,
                                 const nlohmann::json& instance, double tolerance);

struct MinimizeResult {
    nlohmann::json instance;
    bool still_fails = false;
    bool tolerance_artifact = false;  // vanished at 16x tighter tolerance
    int rounds = 0;
    int atoms_before = 0, atoms_after = 0;
};

// Delta-debugging over tree depth and leaf values: collapse subtrees into
// leaves carrying the subtree averages, simplify leaf values, drop operator
// entries; keeps every transformation that preserves the failure.
MinimizeResult minimize_instance(const std::string& theorem_id,
                                 nlohmann::json instance, double tolerance);

}  // namespace entlab
