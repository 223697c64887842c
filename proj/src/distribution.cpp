#include "entlab/distribution.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace entlab {

QuasiconcaveFn QuasiconcaveFn::from_rule(std::string name,
                                         std::function<double(double)> rule) {
    QuasiconcaveFn f;
    f.name_ = std::move(name);
    f.rule_ = std::move(rule);
    // spot-check the quasiconcavity conditions
    double prev_psi = 0.0, prev_ratio = kInf;
    for (int i = 1; i <= 64; ++i) {
        double s = static_cast<double>(i) / 64.0;
        double p = f.rule_(s);
        if (p < prev_psi - kRelTol || p <= 0.0)
            throw NotQuasiconcave(f.name_ + " is not increasing/positive");
        if (p / s > prev_ratio * (1.0 + 1e-9))
            throw NotQuasiconcave(f.name_ + ": psi(s)/s is not decreasing");
        prev_psi = p;
        prev_ratio = p / s;
    }
    return f;
}

QuasiconcaveFn QuasiconcaveFn::from_grid(std::string name, std::vector<double> s,
                                         std::vector<double> psi) {
    if (s.size() != psi.size() || s.size() < 2) throw InputError("bad psi grid");
    for (size_t i = 0; i + 1 < s.size(); ++i)
        if (!(s[i] < s[i + 1])) throw InputError("psi grid not increasing");
    double prev_ratio = kInf;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] <= 0.0) throw InputError("psi grid needs s > 0");
        if (psi[i] <= 0.0) throw NotQuasiconcave(name + ": psi must be positive");
        if (i > 0 && psi[i] < psi[i - 1] * (1.0 - 1e-12))
            throw NotQuasiconcave(name + ": not increasing");
        double r = psi[i] / s[i];
        if (r > prev_ratio * (1.0 + 1e-9))
            throw NotQuasiconcave(name + ": psi(s)/s not decreasing");
        prev_ratio = r;
    }
    QuasiconcaveFn f;
    f.name_ = std::move(name);
    f.grid_s_ = std::move(s);
    f.grid_psi_ = std::move(psi);
    return f;
}

double QuasiconcaveFn::operator()(double s) const {
    if (s <= 0.0) return 0.0;
    if (rule_) return rule_(s);
    // piecewise-linear on the grid; below the first node interpolate from
    // (0,0), beyond the last extend by the final linear piece
    const auto& xs = grid_s_;
    const auto& ys = grid_psi_;
    if (s <= xs.front()) return ys.front() * s / xs.front();
    auto it = std::lower_bound(xs.begin(), xs.end(), s);
    size_t hi = it == xs.end() ? xs.size() - 1 : static_cast<size_t>(it - xs.begin());
    if (hi == 0) hi = 1;
    size_t lo = hi - 1;
    double t = (s - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

QuasiconcaveFn QuasiconcaveFn::psi0() {
    return from_rule("psi:llogl", [](double s) { return psi0_value(s); });
}

QuasiconcaveFn QuasiconcaveFn::psi_log2() {
    return from_rule("psi:log2", [](double s) {
        if (s <= 0) return 0.0;
        double l = 1.0 - std::log(s);
        return s * l * l;
    });
}

QuasiconcaveFn QuasiconcaveFn::identity() {
    return from_rule("psi:s", [](double s) { return s; });
}

QuasiconcaveFn QuasiconcaveFn::preset(const std::string& name) {
    if (name == "psi:s") return identity();
    if (name == "psi:llogl") return psi0();
    if (name == "psi:log2") return psi_log2();
    throw InputError("unknown psi preset " + name);
}

StepFn distribution_fn(const DyadicModel& m, const Weight& w, int atom_id) {
    const Atom& a = m.atom(atom_id);
    std::vector<std::pair<double, double>> vm;  // (value, mass), values > 0
    for (int p = a.leaf_begin; p < a.leaf_end; ++p) {
        double v = w[static_cast<size_t>(p)];
        if (!(v >= 0.0)) throw InputError("distribution_fn needs a nonnegative weight");
        if (v > 0.0) vm.emplace_back(v, m.mass(m.leaf_at(p)));
    }
    std::sort(vm.begin(), vm.end());
    // N(t) = (mass of {w > t}) / |I|; thresholds at distinct values
    std::vector<double> edges{0.0}, levels;
    double remaining = 0.0;
    for (const auto& [v, mass] : vm) remaining += mass;
    double total = a.mass;
    size_t i = 0;
    while (i < vm.size()) {
        double level = remaining / total;
        double v = vm[i].first;
        while (i < vm.size() && vm[i].first == v) {
            remaining -= vm[i].second;
            ++i;
        }
        levels.push_back(level);
        edges.push_back(v);
    }
    StepFn n(std::move(edges), std::move(levels));
    n.normalize();
    validate_distribution(n);
    return n;
}

double lorentz_norm(const StepFn& n, const QuasiconcaveFn& psi) {
    return step_integral_of(n, [&](double level) { return psi(level); });
}

double lorentz_norm_psi0(const StepFn& n) {
    return step_integral_of(n, [](double level) { return psi0_value(level); });
}

double mass_functional(const StepFn& n) { return n.integral(); }

double u_star(const DyadicModel& m, const Weight& w, int atom_id, UStarVariant v) {
    if (v == UStarVariant::lorentz) {
        return lorentz_norm_psi0(distribution_fn(m, w, atom_id));
    }
    Weight mx = maximal_function(m, w, atom_id);
    return integral_on(m, mx, atom_id) / m.mass(atom_id);
}

QuasiconcaveFn least_concave_majorant(const std::vector<double>& s,
                                      const std::vector<double>& psi) {
    if (s.size() != psi.size() || s.size() < 2) throw InputError("bad LCM grid");
    // validate quasiconcavity first (throws NotQuasiconcave)
    (void)QuasiconcaveFn::from_grid("lcm-input", s, psi);

    // upper concave hull over the points (0,0), (s_i, psi_i): monotone chain
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, 0.0);
    for (size_t i = 0; i < s.size(); ++i) pts.emplace_back(s[i], psi[i]);
    std::vector<std::pair<double, double>> hull;
    auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                    const std::pair<double, double>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    for (const auto& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0)
            hull.pop_back();
        hull.push_back(p);
    }
    std::vector<double> hs, hp;
    for (const auto& [x, y] : hull) {
        if (x == 0.0) continue;  // the implicit origin
        hs.push_back(x);
        hp.push_back(y);
    }
    return QuasiconcaveFn::from_grid("lcm", std::move(hs), std::move(hp));
}

ConcavityGap concavity_gap(const StepFn& n, const StepFn& n1, const StepFn& n2) {
    validate_distribution(n1);
    validate_distribution(n2);
    require_midpoint(n, n1, n2);
    ConcavityGap g;
    StepFn dn = step_combine(n1, 1.0, n, -1.0);
    g.u_delta = dn.abs_integral();
    g.delta_u = dn.integral();
    double u = mass_functional(n);
    g.gap = lorentz_norm_psi0(n) - 0.5 * (lorentz_norm_psi0(n1) + lorentz_norm_psi0(n2));
    g.lower_bound = u > 0 ? 0.5 * g.u_delta * g.u_delta / u : 0.0;
    g.holds = g.gap >= g.lower_bound - kRelTol * tol_scale(g.gap, g.lower_bound);
    return g;
}

SecondDerivativeReport second_derivative_check(const StepFn& n, const StepFn& n1,
                                               const std::vector<double>& thetas) {
    SecondDerivativeReport rep;
    StepFn dn = step_combine(n1, 1.0, n, -1.0);
    double u_delta = dn.abs_integral();
    rep.holds = true;
    for (double th : thetas) {
        StepFn nt = step_combine(n, 1.0, dn, th);
        // N_theta must remain a distribution function
        double prev = kInf;
        for (double v : nt.values) {
            if (v < -kRelTol || v > 1.0 + kRelTol)
                throw InvalidPath("N_theta leaves [0,1] at theta=" + std::to_string(th));
            if (v > prev + kRelTol) throw InvalidPath("N_theta not decreasing");
            prev = v;
        }
        // curvature = int dN^2 / N_theta over the union partition
        std::vector<double> edges;
        std::merge(dn.edges.begin(), dn.edges.end(), nt.edges.begin(), nt.edges.end(),
                   std::back_inserter(edges));
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        double curv = 0.0;
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            double d = dn(edges[i]);
            if (d == 0.0) continue;
            double ntv = nt(edges[i]);
            if (ntv <= 0.0) {
                curv = kInf;
                break;
            }
            curv += d * d / ntv * (edges[i + 1] - edges[i]);
        }
        double ut = mass_functional(nt);
        double bound = ut > 0 ? u_delta * u_delta / ut : 0.0;
        rep.points.push_back({th, curv, bound});
        if (!(curv >= bound - kRelTol * tol_scale(curv, bound))) rep.holds = false;
    }
    return rep;
}

TwoWeightCharacteristics a2_and_wilson(const DyadicModel& m, const Weight& v,
                                       const Weight& u) {
    require_nonnegative(v, "v");
    require_nonnegative(u, "u");
    TwoWeightCharacteristics c;
    std::vector<double> vi = subtree_integrals(m, v);
    std::vector<double> ui = subtree_integrals(m, u);
    // <ln(1/v)> integrals for the exp-log characteristic; +inf when v hits 0
    bool v_positive = true;
    for (double x : v.values) v_positive = v_positive && x > 0.0;
    Weight lnv_inv = v;
    if (v_positive)
        for (auto& x : lnv_inv.values) x = -std::log(x);
    std::vector<double> li =
        v_positive ? subtree_integrals(m, lnv_inv) : std::vector<double>();

    for (int id = 0; id < m.atom_count(); ++id) {
        double mass = m.mass(id);
        double vavg = vi[static_cast<size_t>(id)] / mass;
        double prod = vavg * (ui[static_cast<size_t>(id)] / mass);
        if (prod > c.a2) {
            c.a2 = prod;
            c.a2_atom = id;
        }
        if (vavg > 0) {
            double ratio = u_star(m, v, id, UStarVariant::maximal) / vavg;
            if (ratio > c.a_infty_v) {
                c.a_infty_v = ratio;
                c.a_infty_atom = id;
            }
        }
        if (v_positive) {
            double hru = vavg * std::exp(li[static_cast<size_t>(id)] / mass);
            c.hruschev_v = std::max(c.hruschev_v, hru);
        }
    }
    return c;
}

nlohmann::json distribution_to_json(const StepFn& n) {
    nlohmann::json j = nlohmann::json::array();
    for (size_t i = 0; i < n.values.size(); ++i)
        j.push_back({n.edges[i], n.values[i]});
    j.push_back({n.edges.back(), 0.0});
    return j;
}

StepFn distribution_from_json(const nlohmann::json& j) {
    std::vector<double> edges, values;
    for (const auto& pair : j) {
        edges.push_back(pair.at(0).get<double>());
        values.push_back(pair.at(1).get<double>());
    }
    if (values.empty() || values.back() != 0.0) throw InputError("missing terminal zero level");
    values.pop_back();
    StepFn n(std::move(edges), std::move(values));
    validate_distribution(n);
    return n;
}

}  // namespace entlab
