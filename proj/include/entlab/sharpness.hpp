#pragma once
// Closed-form continuum counterexamples: weight pairs with uniformly bounded
// bumps whose Hilbert-transform testing integral diverges, plus the
// penalty-function and general-p variants.

#include <string>
#include <vector>

#include "entlab/penalty.hpp"

namespace entlab {

// Quasiconcave psi given with a stable log-form of psi(s)/s at s = e^{-y},
// so testing integrands can be chased far past double range in 1/s.
struct PsiRule {
    std::string name;
    std::function<double(double)> psi;      // psi(s) on (0,1]
    std::function<double(double)> L_log;    // psi(e^{-y}) e^{y}, y >= 0
    bool integrable = false;                // int_0 ds/psi finite
};

// presets: "psi:s" (A2 endpoint), "psi:llogl" (s ln(e/s)), "psi:log2"
// (s ln^2(e/s), the integrable side)
PsiRule psi_rule_preset(const std::string& name);

enum class SharpnessKind { fundamental_psi, entropy_alpha, general_p };

struct ContinuumWeightPair {
    SharpnessKind kind = SharpnessKind::fundamental_psi;
    PsiRule psi;          // fundamental_psi / general_p
    PenaltyFn alpha = PenaltyFn::preset("alpha:const");  // entropy_alpha
    double p = 2.0;       // general_p exponent

    // v(x) for |x| >= 1 (even; constant at the |x| < 1 plateau value)
    double v(double x) const;
};

ContinuumWeightPair make_fundamental_pair(const PsiRule& psi);
// Requires a non-integrable penalty with t -> e^t/(t alpha(t)) increasing;
// throws HypothesisViolated otherwise.
ContinuumWeightPair make_entropy_pair(const PenaltyFn& alpha);
ContinuumWeightPair make_general_p_pair(const PsiRule& psi, double p);

// T(1_{[-1,1]})(x) = ln|(x+1)/(x-1)| for the kernel 1/(x-y); the constant
// convention is pinned here. Throws SingularPoint at |x| = 1.
double hilbert_of_indicator(double x);

struct DivergenceWitness {
    double cutoff = 0.0;
    double lower_partial = 0.0;  // 2 int_{1+eps}^X x^{-2} v(x) dx
    double exact_partial = 0.0;  // 2 int (ln|(x+1)/(x-1)|)^2 v(x) dx
};

// Monotone-increasing partial testing integrals at the given cutoffs;
// adaptive quadrature at 1e-8 relative, eps = 1e-6 at the kernel singularity.
std::vector<DivergenceWitness> divergence_witness(const ContinuumWeightPair& pair,
                                                  const std::vector<double>& cutoffs);

struct DivergenceVerdict {
    bool divergent = false;
    bool converged = false;
    double tail_bracket = kInf;       // for the convergent verdict
    double limit_estimate = 0.0;      // partial value on the log-range
    std::vector<DivergenceWitness> ladder;
};

// Operational classification: convergent when the log-range integral settles
// with a small tail bracket; divergent when the ladder of partials keeps
// strictly increasing (or the running lower bound crosses the cap).
DivergenceVerdict classify_divergence(const ContinuumWeightPair& pair,
                                      const std::vector<double>& cutoffs,
                                      double min_increment = 0.05,
                                      double tail_tol = 1e-3);

struct BumpUniformity {
    double b_observed = 0.0;
    double worst_left = 0.0, worst_len = 0.0;  // attaining interval [a, a+len]
    double b_doubled = 0.0;  // sup after adding one dyadic scale on each side
    double stability = 0.0;  // |b_doubled - b_observed| / b_observed
};

// Deterministic interval family: dyadic lengths 2^j, j in [j_lo, j_hi],
// translates at step 2^{j-3}, clipped to intervals meeting [-1,1].
// u-norm exactly psi(|I intersect [-1,1]|/|I|), v-norm its sup on I.
BumpUniformity bump_uniformity(const ContinuumWeightPair& pair, int j_lo = -10,
                               int j_hi = 40);

struct EntropySharpnessReport {
    bool hypotheses_ok = false;
    double bump_sup = 0.0;          // sup over the family of the bump products
    double bump_sup_doubled = 0.0;
    DivergenceVerdict divergence;
};

// The penalty-function counterexample: alpha non-integrable, beta arbitrary;
// checks the two-sided bump products stay bounded over the interval family
// while the testing partials grow past every cutoff.
EntropySharpnessReport entropy_sharpness(const PenaltyFn& alpha, const PenaltyFn& beta,
                                         const std::vector<double>& cutoffs);

}  // namespace entlab
