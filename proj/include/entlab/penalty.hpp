#pragma once
// Penalty functions alpha on [1, inf) with t * alpha(t) increasing, their
// integral constants, and entropy bumps of weights.

#include <string>

#include "entlab/distribution.hpp"
#include "entlab/dyadic.hpp"

namespace entlab {

// Evaluation lives in log coordinates (tau = ln t) so that integral constants
// can be chased far beyond double range in t. Closed-form presets have
// unbounded domain; table-backed penalties extrapolate past their table by
// the last log-log slope and record the range.
class PenaltyFn {
public:
    static PenaltyFn preset(const std::string& spec);  // "alpha:t" | "alpha:log2" | "alpha:const"
    static PenaltyFn from_log_rule(std::string name, std::function<double(double)> alpha_of_tau);
    // Table of (t, gamma = t * alpha(t)) pairs, t >= 1 increasing, gamma
    // increasing; interpolated linearly in (ln t, ln gamma).
    static PenaltyFn from_gamma_table(std::string name,
                                      std::vector<std::pair<double, double>> table);
    // The one-weight penalty: t*alpha(t) = cap on [1, cap], +inf beyond.
    static PenaltyFn a2_capped(double cap);

    double alpha_log(double tau) const;
    double alpha(double t) const {
        if (t < 1.0) throw InputError("penalty argument below 1");
        return alpha_log(std::log(t));
    }
    double t_alpha(double t) const { return t * alpha(t); }

    const std::string& name() const { return name_; }
    bool nondecreasing() const { return nondecreasing_; }
    double table_tau_max() const { return table_tau_max_; }  // +inf for closed forms

    // Rescaled penalty lambda * alpha, used for C_alpha normalization.
    PenaltyFn scaled(double lambda) const;

    // Attach a precomputed integral constant (integral-only convention).
    // Used by penalties built from a Lorentz profile, where the substitution
    // s = e^{1-t} evaluates the constant in a numerically stable domain.
    PenaltyFn with_c_integral(ImproperIntegral ci) const;
    bool has_c_integral() const { return has_c_override_; }
    const ImproperIntegral& c_integral() const { return c_override_; }

private:
    void validate();

    std::string name_;
    std::function<double(double)> rule_;  // alpha(e^tau)
    bool nondecreasing_ = true;
    double table_tau_max_ = kInf;
    bool has_c_override_ = false;
    ImproperIntegral c_override_;
};

enum class CAlphaConvention { with_alpha1, integral_only };

// Integral constant of the penalty: integral_1^inf dt/(t alpha(t)), with or
// without the 1/alpha(1) head term. Divergence is reported, not thrown.
ImproperIntegral c_alpha(const PenaltyFn& a, CAlphaConvention conv,
                         const IntegralOptions& opt = {});

// Entropy bump E_I(w) = w*_I * alpha(w*_I / w_I); zero when <w>_I == 0.
double entropy_bump(const DyadicModel& m, const Weight& w, int atom_id,
                    const PenaltyFn& a, UStarVariant variant);

enum class BumpMode { two_sided, one_sided_u, one_sided_v };

struct BumpSupremum {
    double value = 0.0;
    int attaining_atom = -1;
};

// two_sided: sup_I alpha(u*/u) u* alpha(v*/v) v*
// one_sided_u: sup_I alpha(u*/u)^2 u* <v>_I   (one_sided_v: roles swapped)
BumpSupremum bump_supremum(const DyadicModel& m, const Weight& u, const Weight& v,
                           const PenaltyFn& a, BumpMode mode, UStarVariant variant);

// sum_{k>=1} 1/alpha(2^k) and the Riemann-sum comparison against
// 2 * integral_1^inf dt/(t alpha(t)).
struct RiemannLemmaReport {
    double sum = 0.0;
    double two_c_alpha_upper = 0.0;
    bool holds = false;
};
RiemannLemmaReport riemann_sum_check(const PenaltyFn& a, int k_max = 64);

}  // namespace entlab
