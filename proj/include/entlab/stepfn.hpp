#pragma once
// Right-continuous step functions on [0, inf) with finitely many values.
// The workhorse behind distribution functions and step majorants: every
// integral of a simple weight is an exact finite sum over these.

#include <vector>

#include "entlab/common.hpp"

namespace entlab {

// f(t) = values[i] for t in [edges[i], edges[i+1]), i < values.size(),
// f(t) = 0 for t >= edges.back(). Requires edges.front() == 0,
// edges strictly increasing, edges.size() == values.size() + 1.
struct StepFn {
    std::vector<double> edges;
    std::vector<double> values;

    StepFn() : edges{0.0} {}
    StepFn(std::vector<double> e, std::vector<double> v);

    double operator()(double t) const;
    double support_end() const { return edges.back(); }
    bool is_zero() const { return values.empty(); }

    // integral of f over [0, inf)
    double integral() const;
    // integral of |f|
    double abs_integral() const;

    StepFn scaled_values(double c) const;   // c * f(t)
    StepFn scaled_arg(double lambda) const; // f(t / lambda), thresholds t -> lambda t

    // Removes zero-height trailing/interior segments with equal neighbours.
    void normalize();
};

// Pointwise a*f + b*g on the merged edge set.
StepFn step_combine(const StepFn& f, double a, const StepFn& g, double b);

// Exact integral of h(f(t)) over the support of f, with h(0) == 0 assumed
// (segments where f == 0 contribute nothing).
double step_integral_of(const StepFn& f, const std::function<double(double)>& h);

// A normalized distribution function: decreasing, values in (0, 1].
// Throws NotDecreasing / InputError when invariants fail.
void validate_distribution(const StepFn& n);

// Validates that mid == (a + b)/2 pointwise (exactly, up to kRelTol);
// throws MidpointMismatch otherwise.
void require_midpoint(const StepFn& mid, const StepFn& a, const StepFn& b);

}  // namespace entlab
