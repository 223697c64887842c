#pragma once
// Young functions, Luxemburg norms, and the Orlicz -> Lorentz -> penalty
// comparison pipeline.

#include <string>
#include <utility>
#include <vector>

#include "entlab/distribution.hpp"
#include "entlab/penalty.hpp"

namespace entlab {

class YoungFn {
public:
    struct Options {
        // Phi(e^tau)/e^tau in overflow-safe form, for tail integrals far
        // beyond double range in t; null restricts the tail range.
        std::function<double(double)> ratio_log;
        double ratio_increasing_from = 0.0;  // t0 with Phi(t)/(t ln t) increasing
    };

    static YoungFn from_rules(std::string name, std::function<double(double)> phi,
                              std::function<double(double)> dphi, Options opts);
    static YoungFn from_rules(std::string name, std::function<double(double)> phi,
                              std::function<double(double)> dphi);
    static YoungFn power(double p);  // t^p
    // presets: "young:t", "young:t2", "young:t3", "young:tln2",
    // "young:loglog:eps=1"
    static YoungFn preset(const std::string& name);

    double operator()(double t) const { return phi_(t); }
    double deriv(double t) const { return dphi_(t); }
    // Phi(e^tau) / e^tau
    double ratio_log(double tau) const;
    double ratio_log_range() const { return ratio_log_range_; }

    const std::string& name() const { return name_; }
    double doubling_estimate() const { return doubling_; }
    double ratio_increasing_from() const { return opts_.ratio_increasing_from; }

    // integral^inf dt/Phi(t) from t=1, in log coordinates.
    ImproperIntegral reciprocal_tail(const IntegralOptions& opt = {}) const;

private:
    void validate();

    std::string name_;
    std::function<double(double)> phi_, dphi_;
    Options opts_;
    double doubling_ = 0.0;         // sup Phi(2t)/Phi(t) on the probe grid
    double ratio_log_range_ = 690;  // tau beyond which ratio_log is unavailable
};

// Luxemburg gauge norm of w on I under the normalized measure dx/|I|.
// Exact per lambda since w is simple; bisection to 1e-10 relative.
double luxemburg_norm(const DyadicModel& m, const Weight& w, int atom_id,
                      const YoungFn& phi);

// Same gauge computed from a distribution function on a probability space.
double luxemburg_norm_of_distribution(const StepFn& n, const YoungFn& phi);

// Decreasing profile Psi on (0,1] with psi(s) = s Psi(s) increasing.
struct PsiProfile {
    std::string name;
    std::function<double(double)> psi_of_y;  // Psi(e^{-y}), y >= 0
    double y_max = kInf;                     // evaluated range in y = -ln s

    double Psi(double s) const { return psi_of_y(-std::log(s)); }
    double psi(double s) const { return s * Psi(s); }  // the Lorentz fundamental fn
};

// Lambda_psi norm of a step distribution for the profile's psi.
double lambda_psi_norm(const StepFn& n, const PsiProfile& p);

struct LorentzProfile {
    PsiProfile profile;
    QuasiconcaveFn psi;                   // grid-backed psi(s) = s Psi(s)
    ImproperIntegral recip_psi_integral;  // int_0 ds/psi(s) over the table range
};

// Parametric comparison profile of an Orlicz space: Psi(s) = Phi'(t) at
// s = 1/(Phi(t) Phi'(t)); equivalently psi(s) = 1/Phi(t). Requires an
// integrable reciprocal tail (DivergentYoungTail otherwise).
LorentzProfile orlicz_to_lorentz(const YoungFn& phi);

struct AlphaFromPsiResult {
    PenaltyFn alpha;
    double truncation_y = 0.0;           // convexity start found on the grid
    bool psi_monotone = true;            // s Psi(s) increasing held on the grid
    ImproperIntegral c_alpha_integral;   // equals int_0^1 ds/(s Psi1(s))
    PsiProfile truncated;                // the profile actually used
};

// Builds alpha(t) = Psi1(e * e^{-t}) / t from a profile whose y-form is
// convex (after truncation at the detected convexity start). Throws
// NotConvexAfterTruncation when no truncation helps.
AlphaFromPsiResult alpha_from_psi(const PsiProfile& p);

struct JensenCheck {
    double lhs = 0.0;   // alpha(||f||_*/||f||_1) * ||f||_*
    double rhs = 0.0;
    double ratio = 0.0;
    bool holds = false;
};

// Exact comparison lhs <= ||f||_{Lambda_psi} for the profile the alpha was
// built from; a theorem, any violation is a bug.
JensenCheck jensen_check(const StepFn& n, const PsiProfile& p, const PenaltyFn& alpha);

struct MinYoungResult {
    YoungFn phi;
    std::vector<double> crossings;  // where the active derivative switches
    double sandwich_c = 0.0;        // fitted c with Phi >= c * min(Phi1, Phi2)
};

// Young function below min(Phi1, Phi2) built from the min of the derivatives;
// exact segment accumulation, no quadrature.
MinYoungResult min_young(const YoungFn& p1, const YoungFn& p2);

struct LlogLFloor {
    double c = 0.0;    // largest c with Phi(t) >= c t ln t on the grid
    double at_t = 0.0;
};

// Requires an integrable reciprocal tail; throws DivergentYoungTail when the
// precondition fails and FloorViolated if the fitted floor is not positive.
LlogLFloor young_llogl_floor(const YoungFn& phi, double t_lo = std::exp(1.0),
                             double t_hi = 1e8);

struct AlphaFromYoungResult {
    PenaltyFn alpha;                    // scaled so the full predicate holds
    double young_scale = 1.0;           // fitted Lambda_psi~ <= scale * L^Phi
    PsiProfile psi_tilde;               // constructed comparison profile
    ImproperIntegral c_alpha_integral;  // of the unscaled alpha
    double t0 = 0.0;
    double sandwich_c = 0.0;
};

// Full Orlicz -> entropy pipeline: min with the t ln^2 t bump, parametric
// profile at s = 1/(t ln^4 t), concave-majorant convexification, then
// alpha_from_psi. The Lambda -> Orlicz constant is fitted on a seeded
// calibration sweep and folded into the returned alpha.
AlphaFromYoungResult alpha_from_young(const YoungFn& phi, std::uint64_t calib_seed = 17);

// Full fitted predicate for an alpha_from_young result:
// alpha(||f||_*/||f||_1) ||f||_* <= ||f||_{L^Phi}.
JensenCheck orlicz_bump_check(const StepFn& n, const YoungFn& phi,
                              const AlphaFromYoungResult& r);

}  // namespace entlab
