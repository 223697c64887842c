#pragma once
// Bellman functions built from penalty data by the layer-cake construction,
// their matrix convexity certificates, the two-point and n-point concavity
// gaps, and the two embedding sums with their explicit constants.

#include <vector>

#include "entlab/operators.hpp"
#include "entlab/penalty.hpp"
#include "entlab/stepfn.hpp"

#include <nlohmann/json_fwd.hpp>

namespace entlab {

// m(y) = sum_j mass_j * 4 / (1 + y / r_j): decreasing convex, m(0) =
// 4 * total mass, -m' convex, and 2 (m')^2 <= m m'' pointwise.
struct BellmanM {
    struct AtomRM {
        double r = 0.0, mass = 0.0;
    };
    std::vector<AtomRM> atoms;

    double value(double y) const;
    double deriv(double y) const;
    double second(double y) const;
    double total_mass() const;
};

// Layer-cake construction from a decreasing step majorant phi: each downward
// jump of height h at threshold r contributes an atom (r, r*h). Guarantees
// -m'(y) >= phi(y) for every y and m(0) = 4 ||phi||_1.
BellmanM build_m(const StepFn& phi);

// Upper step majorant of phi_alpha(t) = 1/alpha(1) on (0,1], 1/(t alpha(t))
// beyond, on a geometric grid with the given ratio, covering [0, t_max].
// Throws InputError on a divergent penalty (detected via c_alpha).
StepFn step_majorant(const PenaltyFn& alpha, double t_max, double grid_ratio = 1.0905077326652577);

struct Conv02Report {
    double min_slack = kInf;  // min over the grid of m m'' - 2 (m')^2
    bool psd = false;
};

// Pointwise matrix convexity certificate on a y-grid.
Conv02Report check_conv02(const BellmanM& m, const std::vector<double>& y_grid);

// The composite Bellman function built from a penalty normalized so that the
// discretized majorant has unit mass (m(0) == 4). Stores both the original
// penalty and the normalized one actually used in the gap inequalities.
class BellmanB {
public:
    // t_max must dominate every ratio u*(N)/u(N) the instance can produce.
    BellmanB(const PenaltyFn& alpha, double t_max);

    double value(double f, const StepFn& n) const;  // B~(f, N)
    // B(x, y) = x^2 m(y)
    double b(double x, double y) const { return x * x * m_.value(y); }

    const BellmanM& m() const { return m_; }
    const PenaltyFn& normalized_alpha() const { return alpha_norm_; }
    double normalization() const { return lambda_; }  // ||phi_step||_1 of the raw alpha
    double grid_slack() const { return grid_slack_; }

    // 1 / (alpha_n(max(r,1)) * ustar) with the normalized penalty
    double gap_coefficient(double u, double ustar) const;

private:
    BellmanM m_;
    PenaltyFn alpha_norm_;
    double lambda_ = 1.0;
    double grid_slack_ = 0.0;
};

struct GapReport {
    double lhs = 0.0;   // concavity gap of B~
    double rhs = 0.0;   // the quantitative lower bound
    bool holds = false;
};

// Two-point gap: (B~(f+,N+) + B~(f-,N-))/2 - B~(f,N) >= (f+ - f)^2 /
// (2 alpha(u*/u) u*). The center (f, N) is the midpoint of the inputs.
GapReport main_dyadic_gap(const BellmanB& bb, double f_plus, const StepFn& n_plus,
                          double f_minus, const StepFn& n_minus);

// Same with an explicitly supplied center, validated exactly; throws
// MidpointMismatch when (f, N) is not the midpoint.
GapReport main_dyadic_gap_at(const BellmanB& bb, double f, const StepFn& n,
                             double f_plus, const StepFn& n_plus, double f_minus,
                             const StepFn& n_minus);

struct SplittingReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    std::vector<double> beta;     // extremal split achieving >= half the l1(gamma) norm
    double beta_value = 0.0;      // sum gamma_k beta_k (f_k - f)
    double l1_gamma = 0.0;        // sum gamma_k |f_k - f|
};

// n-point gap with the 1/4 constant; gamma_k >= 0 summing to 1, f and N the
// gamma-averages (ConvexityDataInvalid otherwise). The extremal split is
// found by exhaustive sign enumeration for n <= 12 and by the weighted-median
// greedy beyond.
SplittingReport splitting_gap(const BellmanB& bb, const std::vector<double>& f_k,
                              const std::vector<StepFn>& n_k,
                              const std::vector<double>& gamma);

struct EmbeddingReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // lhs / rhs (0 when rhs == 0)
    bool holds = false;
    double c_alpha = 0.0;
};

// sum_I <fu>_I^2 / (alpha(u*/u) u*) a_I |I| <= 4 C_alpha ||a|| ||f||^2_{L2(u)},
// maximal-variant u*, C_alpha in the with-head convention.
EmbeddingReport embedding_sum_carleson(const DyadicModel& m, const Weight& u,
                                       const Weight& f, const CarlesonSequence& a,
                                       const PenaltyFn& alpha);

// sum_I ||D_I(fu)||^2_{L1(I)} / (alpha(u*/u) u*) |I| <= 36 C_alpha
// ||f||^2_{L2(u)}, Lorentz-variant u*.
EmbeddingReport embedding_sum_haar(const DyadicModel& m, const Weight& u,
                                   const Weight& f, const PenaltyFn& alpha);

nlohmann::json bellman_to_json(const BellmanM& m);
BellmanM bellman_from_json(const nlohmann::json& j);

}  // namespace entlab
