#include "entlab/stepfn.hpp"

#include <algorithm>

namespace entlab {

StepFn::StepFn(std::vector<double> e, std::vector<double> v)
    : edges(std::move(e)), values(std::move(v)) {
    if (edges.empty() || edges.front() != 0.0 || edges.size() != values.size() + 1)
        throw InputError("step function needs edges[0]=0 and |edges| = |values|+1");
    for (size_t i = 0; i + 1 < edges.size(); ++i)
        if (!(edges[i] < edges[i + 1]))
            throw InputError("step function edges must be strictly increasing");
}

double StepFn::operator()(double t) const {
    if (values.empty() || t < 0 || t >= edges.back()) return 0.0;
    // first edge strictly greater than t, minus one
    auto it = std::upper_bound(edges.begin(), edges.end(), t);
    size_t i = static_cast<size_t>(it - edges.begin()) - 1;
    return values[i];
}

double StepFn::integral() const {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) s += values[i] * (edges[i + 1] - edges[i]);
    return s;
}

double StepFn::abs_integral() const {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i)
        s += std::abs(values[i]) * (edges[i + 1] - edges[i]);
    return s;
}

StepFn StepFn::scaled_values(double c) const {
    StepFn r = *this;
    for (auto& v : r.values) v *= c;
    r.normalize();
    return r;
}

StepFn StepFn::scaled_arg(double lambda) const {
    if (lambda <= 0) throw InputError("scaled_arg needs lambda > 0");
    StepFn r = *this;
    for (auto& e : r.edges) e *= lambda;
    return r;
}

void StepFn::normalize() {
    std::vector<double> e{0.0}, v;
    for (size_t i = 0; i < values.size(); ++i) {
        if (!v.empty() && values[i] == v.back()) {
            e.back() = edges[i + 1];
            continue;
        }
        v.push_back(values[i]);
        e.push_back(edges[i + 1]);
    }
    // drop trailing zeros
    while (!v.empty() && v.back() == 0.0) {
        v.pop_back();
        e.pop_back();
    }
    edges = std::move(e);
    values = std::move(v);
}

StepFn step_combine(const StepFn& f, double a, const StepFn& g, double b) {
    std::vector<double> edges;
    edges.reserve(f.edges.size() + g.edges.size());
    std::merge(f.edges.begin(), f.edges.end(), g.edges.begin(), g.edges.end(),
               std::back_inserter(edges));
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<double> values;
    values.reserve(edges.size());
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        double t = edges[i];
        values.push_back(a * f(t) + b * g(t));
    }
    StepFn r(std::move(edges), std::move(values));
    r.normalize();
    return r;
}

double step_integral_of(const StepFn& f, const std::function<double(double)>& h) {
    double s = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i)
        if (f.values[i] != 0.0) s += h(f.values[i]) * (f.edges[i + 1] - f.edges[i]);
    return s;
}

void validate_distribution(const StepFn& n) {
    double prev = 1.0 + kRelTol;
    for (double v : n.values) {
        if (v <= 0.0 || v > 1.0 + kRelTol)
            throw InputError("distribution level outside (0,1]");
        if (v >= prev) throw NotDecreasing("distribution levels must strictly decrease");
        prev = v;
    }
}

void require_midpoint(const StepFn& mid, const StepFn& a, const StepFn& b) {
    StepFn avg = step_combine(a, 0.5, b, 0.5);
    StepFn diff = step_combine(mid, 1.0, avg, -1.0);
    for (double v : diff.values)
        if (std::abs(v) > kRelTol) throw MidpointMismatch("mid != (a+b)/2 pointwise");
}

}  // namespace entlab
