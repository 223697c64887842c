#include "entlab/sharpness.hpp"

#include <algorithm>

#include "entlab/distribution.hpp"

namespace entlab {

PsiRule psi_rule_preset(const std::string& name) {
    PsiRule r;
    r.name = name;
    if (name == "psi:s") {
        r.psi = [](double s) { return s; };
        r.L_log = [](double) { return 1.0; };
        r.integrable = false;
        return r;
    }
    if (name == "psi:llogl") {
        r.psi = [](double s) { return psi0_value(s); };
        r.L_log = [](double y) { return 1.0 + y; };
        r.integrable = false;
        return r;
    }
    if (name == "psi:log2") {
        r.psi = [](double s) {
            double l = 1.0 - std::log(s);
            return s * l * l;
        };
        r.L_log = [](double y) { return (1.0 + y) * (1.0 + y); };
        r.integrable = true;
        return r;
    }
    throw InputError("unknown psi rule " + name);
}

double ContinuumWeightPair::v(double x) const {
    double ax = std::abs(x);
    switch (kind) {
        case SharpnessKind::fundamental_psi:
            return ax <= 1.0 ? 1.0 / psi.psi(1.0) : 1.0 / psi.psi(1.0 / ax);
        case SharpnessKind::entropy_alpha: {
            double t = ax <= 1.0 ? 1.0 : 1.0 + std::log(ax);
            double base = ax <= 1.0 ? 1.0 : ax;
            return base / (t * alpha.alpha(t));
        }
        case SharpnessKind::general_p: {
            double s = ax <= 1.0 ? 1.0 : 1.0 / ax;
            double pp = p / (p / (p - 1.0));  // p / p' = p - 1
            return std::pow(psi.psi(s), -pp);
        }
    }
    return 0.0;
}

ContinuumWeightPair make_fundamental_pair(const PsiRule& psi) {
    ContinuumWeightPair pair;
    pair.kind = SharpnessKind::fundamental_psi;
    pair.psi = psi;
    return pair;
}

ContinuumWeightPair make_entropy_pair(const PenaltyFn& alpha) {
    ImproperIntegral ci = c_alpha(alpha, CAlphaConvention::integral_only);
    if (!ci.divergent)
        throw HypothesisViolated("entropy pair needs a non-integrable penalty");
    // t -> e^t/(t alpha(t)) increasing on [1, inf): v increasing in |x|
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
        double t = 1.0 + 99.0 * i / 200.0;
        double val = std::exp(t) / (t * alpha.alpha(t));
        if (val < prev * (1.0 - 1e-9))
            throw HypothesisViolated("e^t/(t alpha(t)) must be increasing");
        prev = val;
    }
    ContinuumWeightPair pair;
    pair.kind = SharpnessKind::entropy_alpha;
    pair.alpha = alpha;
    return pair;
}

ContinuumWeightPair make_general_p_pair(const PsiRule& psi, double p) {
    if (!(p > 1.0)) throw InputError("general p needs p > 1");
    ContinuumWeightPair pair;
    pair.kind = SharpnessKind::general_p;
    pair.psi = psi;
    pair.p = p;
    return pair;
}

double hilbert_of_indicator(double x) {
    if (std::abs(std::abs(x) - 1.0) < 1e-300) throw SingularPoint("|x| = 1");
    return std::log(std::abs((x + 1.0) / (x - 1.0)));
}

namespace {

// integral of f over [a,b] with a log-substitution for long ranges
double long_range_integral(const std::function<double(double)>& f, double a, double b,
                           double rel = 1e-8) {
    double total = 0.0;
    double split = std::min(b, 4.0);
    if (a < split) total += adaptive_simpson(f, a, split, rel);
    if (split < b) {
        auto g = [&](double y) {
            double x = std::exp(y);
            return f(x) * x;
        };
        total += adaptive_simpson(g, std::log(split), std::log(b), rel);
    }
    return total;
}

// the exponent of the lower-bound integrand in y = ln x coordinates:
// x^{1-p} v(x) dx -> g(y) dy (p = 2 except for the general-p pair)
std::function<double(double)> lower_integrand_log(const ContinuumWeightPair& pair) {
    switch (pair.kind) {
        case SharpnessKind::fundamental_psi: {
            auto L = pair.psi.L_log;
            return [L](double y) { return 1.0 / L(y); };
        }
        case SharpnessKind::entropy_alpha: {
            PenaltyFn a = pair.alpha;
            return [a](double y) {
                double t = 1.0 + y;
                return 1.0 / (t * a.alpha(t));
            };
        }
        case SharpnessKind::general_p: {
            auto L = pair.psi.L_log;
            double pm1 = pair.p - 1.0;
            return [L, pm1](double y) { return std::pow(L(y), -pm1); };
        }
    }
    return {};
}

}  // namespace

std::vector<DivergenceWitness> divergence_witness(const ContinuumWeightPair& pair,
                                                  const std::vector<double>& cutoffs) {
    const double eps = 1e-6;
    double pw = pair.kind == SharpnessKind::general_p ? pair.p : 2.0;
    std::vector<DivergenceWitness> out;
    double prev_cut = 1.0 + eps, lower_acc = 0.0, exact_acc = 0.0;
    std::vector<double> sorted = cutoffs;
    std::sort(sorted.begin(), sorted.end());
    for (double X : sorted) {
        if (!(X > prev_cut)) throw InputError("cutoffs must exceed 1+eps and increase");
        lower_acc += 2.0 * long_range_integral(
                               [&](double x) { return std::pow(x, -pw) * pair.v(x); },
                               prev_cut, X);
        exact_acc += 2.0 * long_range_integral(
                               [&](double x) {
                                   return std::pow(std::abs(hilbert_of_indicator(x)), pw) *
                                          pair.v(x);
                               },
                               prev_cut, X);
        out.push_back({X, lower_acc, exact_acc});
        prev_cut = X;
    }
    return out;
}

DivergenceVerdict classify_divergence(const ContinuumWeightPair& pair,
                                      const std::vector<double>& cutoffs,
                                      double min_increment, double tail_tol) {
    DivergenceVerdict verdict;
    verdict.ladder = divergence_witness(pair, cutoffs);

    IntegralOptions opt;
    opt.tau_max = 1048576.0;  // 2^20 in y = ln x
    opt.divergence_cap = 1e3;
    opt.tail_tol = tail_tol;
    ImproperIntegral li = integrate_tail(lower_integrand_log(pair), true, opt);
    verdict.limit_estimate = 2.0 * 0.5 * (li.lower + li.upper);
    verdict.tail_bracket = 2.0 * li.tail_block;

    if (li.divergent) {
        verdict.divergent = true;
        return verdict;
    }
    verdict.converged = verdict.tail_bracket < tail_tol;
    if (!verdict.converged) {
        bool increasing = true;
        for (size_t i = 1; i < verdict.ladder.size(); ++i)
            if (verdict.ladder[i].lower_partial - verdict.ladder[i - 1].lower_partial <
                min_increment)
                increasing = false;
        verdict.divergent = increasing && verdict.ladder.size() >= 2;
    }
    return verdict;
}

namespace {

struct IntervalFamily {
    int j_lo, j_hi;
    int step_shift;  // translate step 2^{j - step_shift}

    template <typename F>
    void for_each(F&& fn) const {
        for (int j = j_lo; j <= j_hi; ++j) {
            double len = std::pow(2.0, j);
            double step = std::pow(2.0, j - step_shift);
            double first = -1.0 - len;
            long nsteps = static_cast<long>(std::ceil((1.0 - first) / step)) + 1;
            for (long i = 0; i <= nsteps; ++i) {
                double a = first + step * static_cast<double>(i);
                if (a > 1.0) break;
                if (a + len < -1.0) continue;
                fn(a, len);
            }
        }
    }
};

double overlap_with_unit(double a, double len) {
    double lo = std::max(a, -1.0), hi = std::min(a + len, 1.0);
    return std::max(hi - lo, 0.0);
}

double sup_v(const ContinuumWeightPair& pair, double a, double len) {
    return std::max(pair.v(std::abs(a)), pair.v(std::abs(a + len)));
}

double uniformity_sup(const ContinuumWeightPair& pair, const IntervalFamily& fam,
                      double* worst_a, double* worst_len) {
    double best = 0.0;
    fam.for_each([&](double a, double len) {
        double q = overlap_with_unit(a, len) / len;
        if (q <= 0.0) return;
        double prod;
        if (pair.kind == SharpnessKind::general_p) {
            // ||u||^{1/p'} ||v||^{1/p}
            double pp = pair.p / (pair.p - 1.0);
            prod = std::pow(pair.psi.psi(q), 1.0 / pp) *
                   std::pow(sup_v(pair, a, len), 1.0 / pair.p);
        } else {
            prod = pair.psi.psi(q) * sup_v(pair, a, len);
        }
        if (prod > best) {
            best = prod;
            if (worst_a) *worst_a = a;
            if (worst_len) *worst_len = len;
        }
    });
    return best;
}

}  // namespace

BumpUniformity bump_uniformity(const ContinuumWeightPair& pair, int j_lo, int j_hi) {
    BumpUniformity out;
    out.b_observed =
        uniformity_sup(pair, {j_lo, j_hi, 3}, &out.worst_left, &out.worst_len);
    out.b_doubled = uniformity_sup(pair, {j_lo - 1, j_hi + 1, 3}, nullptr, nullptr);
    out.stability = out.b_observed > 0.0
                        ? std::abs(out.b_doubled - out.b_observed) / out.b_observed
                        : 0.0;
    return out;
}

namespace {

// Lambda_{psi0} norm of v over [a, a+len] under the normalized measure:
// v is even and nondecreasing in |x|, so super-level sets are computable from
// the symmetric overlap |I intersect [-r, r]|.
double lorentz_norm_of_v(const ContinuumWeightPair& pair, double a, double len) {
    double lo = std::abs(a), hi = std::abs(a + len);
    if (a < 0.0 && a + len > 0.0) {
        lo = 0.0;
        hi = std::max(std::abs(a), a + len);
    }
    double vmin = pair.v(lo), vmax = pair.v(hi);
    double total = vmin;  // N(t) = 1 for t < vmin, psi0(1) = 1
    if (vmax <= vmin * (1.0 + 1e-14)) return total;
    // march r over [max(lo,1), hi]: t = v(r), N(t) = |{x in I : |x| > r}| / len
    double r_lo = std::max(lo, 1.0);
    const int kGrid = 1200;
    double prev_t = vmin;
    for (int i = 1; i <= kGrid; ++i) {
        double r = r_lo * std::pow(hi / r_lo, static_cast<double>(i) / kGrid);
        double t = pair.v(r);
        if (t <= prev_t) continue;
        // measure of I with |x| <= r
        double cap_lo = std::max(a, -r), cap_hi = std::min(a + len, r);
        double below = std::max(cap_hi - cap_lo, 0.0);
        double n_level = std::clamp((len - below) / len, 0.0, 1.0);
        total += psi0_value(n_level) * (t - prev_t);
        prev_t = t;
    }
    return total;
}

double average_of_v(const ContinuumWeightPair& pair, double a, double len) {
    return long_range_integral([&](double x) { return pair.v(x); }, a, a + len, 1e-9) /
           len;
}

}  // namespace

EntropySharpnessReport entropy_sharpness(const PenaltyFn& alpha, const PenaltyFn& beta,
                                         const std::vector<double>& cutoffs) {
    EntropySharpnessReport rep;
    ContinuumWeightPair pair = make_entropy_pair(alpha);  // validates hypotheses
    rep.hypotheses_ok = true;

    auto family_sup = [&](int j_lo, int j_hi) {
        double best = 0.0;
        IntervalFamily fam{j_lo, j_hi, 0};
        fam.for_each([&](double a, double len) {
            double q = overlap_with_unit(a, len) / len;
            if (q <= 0.0) return;
            double u_star = psi0_value(q);
            double u_avg = q;
            double au = alpha.alpha(std::max(u_star / u_avg, 1.0));
            double v_star = lorentz_norm_of_v(pair, a, len);
            double v_avg = average_of_v(pair, a, len);
            double bv = v_avg > 0.0 ? beta.alpha(std::max(v_star / v_avg, 1.0)) : 0.0;
            best = std::max(best, au * u_star * v_star * bv);
        });
        return best;
    };
    rep.bump_sup = family_sup(-6, 36);
    rep.bump_sup_doubled = family_sup(-7, 37);
    rep.divergence = classify_divergence(pair, cutoffs);
    return rep;
}

}  // namespace entlab
