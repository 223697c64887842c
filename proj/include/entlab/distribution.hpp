#pragma once
// Weight functionals on normalized distribution functions: Lorentz norms,
// the mass functional, both u* variants, least concave majorants, A2 and
// Wilson A-infinity characteristics, and the midpoint concavity laws.

#include <utility>
#include <vector>

#include "entlab/dyadic.hpp"
#include "entlab/stepfn.hpp"

#include <nlohmann/json_fwd.hpp>

namespace entlab {

// Quasiconcave function on [0,1]: increasing, psi(0)=0, psi(s)/s decreasing.
// Closed-form rule or a piecewise-linear interpolant of grid samples.
class QuasiconcaveFn {
public:
    static QuasiconcaveFn from_rule(std::string name, std::function<double(double)> rule);
    // Validates the three quasiconcavity conditions on the grid.
    static QuasiconcaveFn from_grid(std::string name, std::vector<double> s,
                                    std::vector<double> psi);

    // s ln(e/s), the L log L fundamental function.
    static QuasiconcaveFn psi0();
    // s ln^2(e/s)
    static QuasiconcaveFn psi_log2();
    // s
    static QuasiconcaveFn identity();
    // name in {"psi:s","psi:llogl","psi:log2"}
    static QuasiconcaveFn preset(const std::string& name);

    double operator()(double s) const;
    const std::string& name() const { return name_; }
    bool grid_backed() const { return !grid_s_.empty(); }
    const std::vector<double>& grid_s() const { return grid_s_; }
    const std::vector<double>& grid_psi() const { return grid_psi_; }

private:
    std::string name_;
    std::function<double(double)> rule_;
    std::vector<double> grid_s_, grid_psi_;
};

inline double psi0_value(double s) { return s <= 0 ? 0.0 : s * (1.0 - std::log(s)); }

// Exact normalized distribution function of w restricted to I.
StepFn distribution_fn(const DyadicModel& m, const Weight& w, int atom_id);

// Lorentz functional: exact step sum of psi over the levels of N.
double lorentz_norm(const StepFn& n, const QuasiconcaveFn& psi);
// Specialized psi0 path used in hot loops.
double lorentz_norm_psi0(const StepFn& n);

// Mass functional: integral of N; equals <w>_I when N = N_I^w.
double mass_functional(const StepFn& n);

enum class UStarVariant { lorentz, maximal };

// The two u* variants. maximal: |I|^{-1} || M(w 1_I) ||_{L^1(I)};
// lorentz: || w ||_{Lambda_{psi0}(I)}. maximal <= lorentz always.
double u_star(const DyadicModel& m, const Weight& w, int atom_id, UStarVariant v);

// Least concave majorant of grid samples of a quasiconcave psi; the result is
// the upper concave hull, piecewise linear. Throws NotQuasiconcave when the
// grid fails the quasiconcavity conditions.
QuasiconcaveFn least_concave_majorant(const std::vector<double>& s,
                                      const std::vector<double>& psi);

struct ConcavityGap {
    double gap = 0.0;          // u*(N) - (u*(N1)+u*(N2))/2
    double lower_bound = 0.0;  // (1/2) u_delta^2 / u(N)
    double u_delta = 0.0;      // integral of |N1 - N|
    double delta_u = 0.0;      // integral of (N1 - N)
    bool holds = false;        // gap >= lower_bound up to kRelTol slack
};

// Midpoint concavity of the L log L functional. Requires N == (N1+N2)/2
// pointwise (MidpointMismatch otherwise).
ConcavityGap concavity_gap(const StepFn& n, const StepFn& n1, const StepFn& n2);

struct SecondDerivativeReport {
    struct Point {
        double theta;
        double curvature;  // integral of dN^2 / N_theta (== -d^2 u*/d theta^2)
        double bound;      // u_delta^2 / u_theta
    };
    std::vector<Point> points;
    bool holds = false;  // curvature >= bound at every grid theta
};

// Exact evaluation of the second-derivative inequality along N_theta =
// N + theta (N1 - N). Throws InvalidPath when N_theta leaves [0,1] or is not
// decreasing at some grid theta.
SecondDerivativeReport second_derivative_check(const StepFn& n, const StepFn& n1,
                                               const std::vector<double>& thetas);

struct TwoWeightCharacteristics {
    double a2 = 0.0;         // sup_I <v>_I <u>_I
    int a2_atom = -1;
    double a_infty_v = 0.0;  // sup_I ||M(1_I v)||_{L1(I)} / <v>_I (Fujii-Wilson)
    int a_infty_atom = -1;
    // sup_I <v>_I exp<ln(1/v)>_I; satisfies hruschev <= a2 exactly (Jensen),
    // while the Fujii-Wilson form can exceed a2 near characteristic 1:
    // v = (1+e, 1-e) on Lebesgue halves gives 1 + e/2 vs 1/(1-e^2).
    double hruschev_v = 0.0;
};

// u is typically v^{-1} (one-weight case); pass any pair.
TwoWeightCharacteristics a2_and_wilson(const DyadicModel& m, const Weight& v,
                                       const Weight& u);

nlohmann::json distribution_to_json(const StepFn& n);
StepFn distribution_from_json(const nlohmann::json& j);

}  // namespace entlab
