#include "entlab/penalty.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace entlab {

void PenaltyFn::validate() {
    // t * alpha(t) must be increasing; also record whether alpha itself is
    // nondecreasing (enables rigorous integral brackets).
    double prev_gamma = -kInf, prev_alpha = -kInf;
    nondecreasing_ = true;
    double tau_hi = std::min(table_tau_max_, 64.0);
    for (int i = 0; i <= 256; ++i) {
        double tau = tau_hi * static_cast<double>(i) / 256.0;
        double a = rule_(tau);
        if (!(a > 0.0)) throw InputError(name_ + ": alpha must be positive");
        double gamma = std::exp(tau) * a;
        if (gamma < prev_gamma * (1.0 - 1e-10))
            throw InputError(name_ + ": t*alpha(t) is not increasing");
        if (a < prev_alpha * (1.0 - 1e-10)) nondecreasing_ = false;
        prev_gamma = gamma;
        prev_alpha = a;
    }
}

PenaltyFn PenaltyFn::from_log_rule(std::string name,
                                   std::function<double(double)> alpha_of_tau) {
    PenaltyFn p;
    p.name_ = std::move(name);
    p.rule_ = std::move(alpha_of_tau);
    p.validate();
    return p;
}

namespace {

PenaltyFn build_preset(const std::string& spec) {
    if (spec == "alpha:t")
        return PenaltyFn::from_log_rule(spec, [](double tau) { return std::exp(tau); });
    if (spec == "alpha:log2")
        // alpha(t) = ln^2(e t) = (1 + ln t)^2
        return PenaltyFn::from_log_rule(
            spec, [](double tau) { return (1.0 + tau) * (1.0 + tau); });
    if (spec == "alpha:const")
        return PenaltyFn::from_log_rule(spec, [](double) { return 1.0; });
    if (spec == "alpha:log1")
        // alpha(t) = ln(e t), non-integrable tail
        return PenaltyFn::from_log_rule(spec, [](double tau) { return 1.0 + tau; });
    throw InputError("unknown penalty preset " + spec);
}

}  // namespace

PenaltyFn PenaltyFn::preset(const std::string& spec) {
    // presets are evaluated once (including the integral constant, which the
    // bracketing integrator makes moderately expensive) and handed out as
    // copies; sweeps construct them per trial
    static std::mutex mu;
    static std::map<std::string, PenaltyFn> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(spec);
        if (it != cache.end()) return it->second;
    }
    PenaltyFn p = build_preset(spec);
    auto g = [&p](double tau) {
        double v = p.alpha_log(tau);
        return std::isinf(v) ? 0.0 : 1.0 / v;
    };
    p.c_override_ = integrate_tail(g, p.nondecreasing());
    p.has_c_override_ = true;
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(spec, p);
    return p;
}

PenaltyFn PenaltyFn::a2_capped(double cap) {
    if (!(cap >= 1.0)) throw InputError("A2 cap must be >= 1");
    double log_cap = std::log(cap);
    PenaltyFn p = from_log_rule("alpha:a2cap", [cap, log_cap](double tau) {
        if (tau > log_cap) return kInf;
        return cap * std::exp(-tau);  // t*alpha(t) == cap
    });
    // closed form: int_1^cap dt/cap = (cap-1)/cap, so with the head term the
    // constant is exactly 1
    ImproperIntegral exact;
    exact.lower = exact.upper = (cap - 1.0) / cap;
    return p.with_c_integral(exact);
}

PenaltyFn PenaltyFn::from_gamma_table(std::string name,
                                      std::vector<std::pair<double, double>> table) {
    if (table.size() < 2) throw InputError("gamma table too small");
    std::vector<double> ltau, lgamma;
    for (auto& [t, g] : table) {
        if (!(t >= 1.0) || !(g > 0.0)) throw InputError("bad gamma table entry");
        ltau.push_back(std::log(t));
        lgamma.push_back(std::log(g));
    }
    for (size_t i = 0; i + 1 < ltau.size(); ++i)
        if (!(ltau[i] < ltau[i + 1]) || lgamma[i + 1] < lgamma[i] - 1e-12)
            throw InputError("gamma table must increase in t and gamma");
    double tau_max = ltau.back();
    // final log-log slope for extrapolation (>= 0 keeps gamma increasing)
    size_t n = ltau.size();
    double slope = (lgamma[n - 1] - lgamma[n - 2]) /
                   std::max(ltau[n - 1] - ltau[n - 2], 1e-300);
    slope = std::max(slope, 0.0);
    auto rule = [ltau = std::move(ltau), lgamma = std::move(lgamma),
                 slope](double tau) {
        double lg;
        if (tau <= ltau.front()) {
            lg = lgamma.front();
        } else if (tau >= ltau.back()) {
            lg = lgamma.back() + slope * (tau - ltau.back());
        } else {
            auto it = std::lower_bound(ltau.begin(), ltau.end(), tau);
            size_t hi = static_cast<size_t>(it - ltau.begin());
            size_t lo = hi - 1;
            double f = (tau - ltau[lo]) / (ltau[hi] - ltau[lo]);
            lg = lgamma[lo] + f * (lgamma[hi] - lgamma[lo]);
        }
        return std::exp(lg - tau);  // alpha = gamma / t
    };
    PenaltyFn p;
    p.name_ = std::move(name);
    p.rule_ = rule;
    p.table_tau_max_ = tau_max;
    p.validate();
    return p;
}

double PenaltyFn::alpha_log(double tau) const {
    if (tau < 0.0) throw InputError("penalty argument below 1");
    return rule_(tau);
}

PenaltyFn PenaltyFn::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw InputError("penalty scale must be > 0");
    PenaltyFn p;
    p.name_ = name_ + "*" + std::to_string(lambda);
    auto base = rule_;
    p.rule_ = [base, lambda](double tau) { return lambda * base(tau); };
    p.nondecreasing_ = nondecreasing_;
    p.table_tau_max_ = table_tau_max_;
    if (has_c_override_) {
        p.has_c_override_ = true;
        p.c_override_ = c_override_;
        p.c_override_.lower /= lambda;
        p.c_override_.upper /= lambda;
        p.c_override_.tail_block /= lambda;
    }
    return p;
}

PenaltyFn PenaltyFn::with_c_integral(ImproperIntegral ci) const {
    PenaltyFn p = *this;
    p.has_c_override_ = true;
    p.c_override_ = ci;
    return p;
}

ImproperIntegral c_alpha(const PenaltyFn& a, CAlphaConvention conv,
                         const IntegralOptions& opt) {
    ImproperIntegral r;
    if (a.has_c_integral()) {
        r = a.c_integral();
    } else {
        // substitute t = e^tau: integral_1^inf dt/(t alpha(t)) =
        // integral_0^inf dtau / alpha(e^tau); the integrand is decreasing
        // iff alpha is nondecreasing
        auto g = [&a](double tau) {
            double v = a.alpha_log(tau);
            return std::isinf(v) ? 0.0 : 1.0 / v;
        };
        r = integrate_tail(g, a.nondecreasing(), opt);
    }
    if (conv == CAlphaConvention::with_alpha1) {
        double head = 1.0 / a.alpha_log(0.0);
        r.lower += head;
        r.upper += head;
    }
    return r;
}

double entropy_bump(const DyadicModel& m, const Weight& w, int atom_id,
                    const PenaltyFn& a, UStarVariant variant) {
    double wi = average(m, w, atom_id);
    if (wi == 0.0) return 0.0;
    double ws = u_star(m, w, atom_id, variant);
    double ratio = std::max(ws / wi, 1.0);
    return ws * a.alpha(ratio);
}

BumpSupremum bump_supremum(const DyadicModel& m, const Weight& u, const Weight& v,
                           const PenaltyFn& a, BumpMode mode, UStarVariant variant) {
    require_nonnegative(u, "u");
    require_nonnegative(v, "v");
    BumpSupremum out;
    std::vector<double> ui = subtree_integrals(m, u), vi = subtree_integrals(m, v);
    for (int id = 0; id < m.atom_count(); ++id) {
        double mass = m.mass(id);
        double uavg = ui[static_cast<size_t>(id)] / mass;
        double vavg = vi[static_cast<size_t>(id)] / mass;
        double val = 0.0;
        switch (mode) {
            case BumpMode::two_sided: {
                if (uavg == 0.0 || vavg == 0.0) break;
                double us = u_star(m, u, id, variant), vs = u_star(m, v, id, variant);
                val = a.alpha(std::max(us / uavg, 1.0)) * us *
                      a.alpha(std::max(vs / vavg, 1.0)) * vs;
                break;
            }
            case BumpMode::one_sided_u: {
                if (uavg == 0.0) break;
                double us = u_star(m, u, id, variant);
                double al = a.alpha(std::max(us / uavg, 1.0));
                val = al * al * us * vavg;
                break;
            }
            case BumpMode::one_sided_v: {
                if (vavg == 0.0) break;
                double vs = u_star(m, v, id, variant);
                double al = a.alpha(std::max(vs / vavg, 1.0));
                val = al * al * vs * uavg;
                break;
            }
        }
        if (val > out.value) {
            out.value = val;
            out.attaining_atom = id;
        }
    }
    return out;
}

RiemannLemmaReport riemann_sum_check(const PenaltyFn& a, int k_max) {
    RiemannLemmaReport rep;
    const double ln2 = std::log(2.0);
    for (int k = 1; k <= k_max; ++k) {
        double al = a.alpha_log(static_cast<double>(k) * ln2);
        if (std::isinf(al)) break;
        rep.sum += 1.0 / al;
    }
    ImproperIntegral ci = c_alpha(a, CAlphaConvention::integral_only);
    rep.two_c_alpha_upper = ci.divergent ? kInf : 2.0 * ci.upper;
    rep.holds = rep.sum <= rep.two_c_alpha_upper + kRelTol * tol_scale(rep.sum, rep.two_c_alpha_upper);
    return rep;
}

}  // namespace entlab
