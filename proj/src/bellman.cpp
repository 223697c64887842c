#include "entlab/bellman.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "entlab/distribution.hpp"

namespace entlab {

double BellmanM::value(double y) const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass * 4.0 / (1.0 + y / a.r);
    return s;
}

double BellmanM::deriv(double y) const {
    double s = 0.0;
    for (const auto& a : atoms) {
        double d = 1.0 + y / a.r;
        s -= a.mass * 4.0 / (a.r * d * d);
    }
    return s;
}

double BellmanM::second(double y) const {
    double s = 0.0;
    for (const auto& a : atoms) {
        double d = 1.0 + y / a.r;
        s += a.mass * 8.0 / (a.r * a.r * d * d * d);
    }
    return s;
}

double BellmanM::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

BellmanM build_m(const StepFn& phi) {
    // phi must be a decreasing step function with compact support
    double prev = kInf;
    for (double v : phi.values) {
        if (!(v >= 0.0)) throw NotDecreasing("phi must be nonnegative");
        if (v > prev + kRelTol * std::max(1.0, prev))
            throw NotDecreasing("phi must be decreasing");
        prev = v;
    }
    BellmanM m;
    // downward jump of height h at threshold r -> atom (r, r*h)
    for (size_t i = 0; i < phi.values.size(); ++i) {
        double next = i + 1 < phi.values.size() ? phi.values[i + 1] : 0.0;
        double h = phi.values[i] - next;
        double r = phi.edges[i + 1];
        if (h > 0.0) m.atoms.push_back({r, r * h});
    }
    return m;
}

StepFn step_majorant(const PenaltyFn& alpha, double t_max, double grid_ratio) {
    if (!(grid_ratio > 1.0)) throw InputError("grid ratio must exceed 1");
    ImproperIntegral ci = c_alpha(alpha, CAlphaConvention::with_alpha1);
    if (ci.divergent) throw InputError("divergent penalty has no integrable majorant");
    // phi(t) = 1/alpha(1) on (0,1], 1/(t alpha(t)) past 1; decreasing since
    // t alpha(t) increases. Upper majorant: cell value = phi(left endpoint).
    std::vector<double> edges{0.0, 1.0};
    std::vector<double> values{1.0 / alpha.alpha_log(0.0)};
    double t = 1.0;
    while (t < t_max) {
        double next = t * grid_ratio;
        values.push_back(1.0 / (t * alpha.alpha(t)));
        edges.push_back(next);
        t = next;
    }
    StepFn out(std::move(edges), std::move(values));
    out.normalize();
    return out;
}

Conv02Report check_conv02(const BellmanM& m, const std::vector<double>& y_grid) {
    Conv02Report rep;
    for (double y : y_grid) {
        double slack = m.value(y) * m.second(y) - 2.0 * m.deriv(y) * m.deriv(y);
        rep.min_slack = std::min(rep.min_slack, slack);
    }
    rep.psd = rep.min_slack >= -kRelTol;
    return rep;
}

BellmanB::BellmanB(const PenaltyFn& alpha, double t_max) : alpha_norm_(alpha) {
    StepFn phi = step_majorant(alpha, t_max);
    lambda_ = phi.integral();
    ImproperIntegral ci = c_alpha(alpha, CAlphaConvention::with_alpha1);
    grid_slack_ = lambda_ / ci.value() - 1.0;
    // normalize so the built m has m(0) = 4: the majorant mass becomes 1 and
    // the penalty is scaled by the same lambda, keeping -m' >= phi_lambda
    alpha_norm_ = alpha.scaled(lambda_);
    m_ = build_m(phi.scaled_values(1.0 / lambda_));
}

double BellmanB::value(double f, const StepFn& n) const {
    double u = mass_functional(n);
    if (!(u > 0.0)) throw InputError("B~ needs u(N) > 0");
    double ustar = lorentz_norm_psi0(n);
    double y = ustar / u;
    return 2.0 * (f * f / u) * m_.value(y) + f * f / u;
}

double BellmanB::gap_coefficient(double u, double ustar) const {
    double ratio = std::max(ustar / u, 1.0);
    return 1.0 / (alpha_norm_.alpha(ratio) * ustar);
}

GapReport main_dyadic_gap_at(const BellmanB& bb, double f, const StepFn& n,
                             double f_plus, const StepFn& n_plus, double f_minus,
                             const StepFn& n_minus) {
    if (!eq_tol(f, 0.5 * (f_plus + f_minus)))
        throw MidpointMismatch("f != (f+ + f-)/2");
    require_midpoint(n, n_plus, n_minus);
    return main_dyadic_gap(bb, f_plus, n_plus, f_minus, n_minus);
}

GapReport main_dyadic_gap(const BellmanB& bb, double f_plus, const StepFn& n_plus,
                          double f_minus, const StepFn& n_minus) {
    StepFn n = step_combine(n_plus, 0.5, n_minus, 0.5);
    validate_distribution(n_plus);
    validate_distribution(n_minus);
    double f = 0.5 * (f_plus + f_minus);
    GapReport rep;
    rep.lhs = 0.5 * (bb.value(f_plus, n_plus) + bb.value(f_minus, n_minus)) -
              bb.value(f, n);
    double u = mass_functional(n), ustar = lorentz_norm_psi0(n);
    rep.rhs = 0.5 * (f_plus - f) * (f_plus - f) * bb.gap_coefficient(u, ustar);
    rep.holds = rep.lhs >= rep.rhs - 1e-10 * tol_scale(rep.lhs, rep.rhs);
    return rep;
}

namespace {

// Maximize sum gamma_k beta_k x_k over beta in [-1,1]^n with
// sum gamma_k beta_k = 0: extreme points have all coordinates +-1 except at
// most one fractional coordinate fixed by the constraint.
std::pair<std::vector<double>, double> extremal_split_exhaustive(
    const std::vector<double>& x, const std::vector<double>& gamma) {
    size_t n = x.size();
    std::vector<double> best(n, 0.0);
    double best_val = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        for (size_t frac = 0; frac < n; ++frac) {
            if (gamma[frac] <= 0.0) continue;
            double dot = 0.0;
            std::vector<double> beta(n);
            for (size_t k = 0; k < n; ++k) {
                if (k == frac) continue;
                beta[k] = (mask >> k) & 1 ? 1.0 : -1.0;
                dot += gamma[k] * beta[k];
            }
            double bf = -dot / gamma[frac];
            if (std::abs(bf) > 1.0 + 1e-12) continue;
            beta[frac] = std::clamp(bf, -1.0, 1.0);
            double val = 0.0;
            for (size_t k = 0; k < n; ++k) val += gamma[k] * beta[k] * x[k];
            if (val > best_val) {
                best_val = val;
                best = beta;
            }
        }
    }
    return {best, best_val};
}

// Weighted-median greedy: optimal for this single-constraint polytope.
std::pair<std::vector<double>, double> extremal_split_greedy(
    const std::vector<double>& x, const std::vector<double>& gamma) {
    size_t n = x.size();
    // optimal beta = sign(x_k - c) with c a gamma-weighted median of x,
    // adjusting the median coordinate to satisfy the constraint
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
    double below = 0.0, total = 0.0;
    for (size_t i = 0; i < n; ++i) total += gamma[i];
    size_t med = idx.back();
    for (size_t pos = 0; pos < n; ++pos) {
        size_t k = idx[pos];
        if (below + gamma[k] >= total / 2.0) {
            med = k;
            break;
        }
        below += gamma[k];
    }
    std::vector<double> beta(n);
    double dot = 0.0;
    for (size_t k = 0; k < n; ++k) {
        if (k == med) continue;
        beta[k] = x[k] > x[med] ? 1.0 : -1.0;
        dot += gamma[k] * beta[k];
    }
    beta[med] = gamma[med] > 0.0 ? std::clamp(-dot / gamma[med], -1.0, 1.0) : 0.0;
    double val = 0.0;
    for (size_t k = 0; k < n; ++k) val += gamma[k] * beta[k] * x[k];
    return {beta, val};
}

}  // namespace

SplittingReport splitting_gap(const BellmanB& bb, const std::vector<double>& f_k,
                              const std::vector<StepFn>& n_k,
                              const std::vector<double>& gamma) {
    size_t n = f_k.size();
    if (n_k.size() != n || gamma.size() != n || n == 0)
        throw ConvexityDataInvalid("sizes mismatch");
    double gsum = 0.0;
    for (double g : gamma) {
        if (!(g >= 0.0)) throw ConvexityDataInvalid("gamma must be >= 0");
        gsum += g;
    }
    if (!eq_tol(gsum, 1.0)) throw ConvexityDataInvalid("gamma must sum to 1");

    double f = 0.0;
    StepFn nbar;
    for (size_t k = 0; k < n; ++k) {
        f += gamma[k] * f_k[k];
        nbar = step_combine(nbar, 1.0, n_k[k], gamma[k]);
    }

    SplittingReport rep;
    rep.lhs = -bb.value(f, nbar);
    for (size_t k = 0; k < n; ++k)
        if (gamma[k] > 0.0) rep.lhs += gamma[k] * bb.value(f_k[k], n_k[k]);

    double u = mass_functional(nbar), ustar = lorentz_norm_psi0(nbar);
    for (size_t k = 0; k < n; ++k) rep.l1_gamma += gamma[k] * std::abs(f_k[k] - f);
    rep.rhs = 0.25 * rep.l1_gamma * rep.l1_gamma * bb.gap_coefficient(u, ustar);
    rep.holds = rep.lhs >= rep.rhs - 1e-10 * tol_scale(rep.lhs, rep.rhs);

    std::vector<double> x(n);
    for (size_t k = 0; k < n; ++k) x[k] = f_k[k] - f;
    auto [beta, val] =
        n <= 12 ? extremal_split_exhaustive(x, gamma) : extremal_split_greedy(x, gamma);
    rep.beta = std::move(beta);
    rep.beta_value = val;
    return rep;
}

EmbeddingReport embedding_sum_carleson(const DyadicModel& m, const Weight& u,
                                       const Weight& f, const CarlesonSequence& a,
                                       const PenaltyFn& alpha) {
    require_nonnegative(u, "u");
    EmbeddingReport rep;
    ImproperIntegral ci = c_alpha(alpha, CAlphaConvention::with_alpha1);
    rep.c_alpha = ci.value();

    Weight fu = f;
    for (size_t p = 0; p < fu.size(); ++p) fu[p] *= u[p];
    std::vector<double> fu_ints = subtree_integrals(m, fu);
    std::vector<double> u_ints = subtree_integrals(m, u);

    for (const auto& [id, a_i] : a.entries) {
        if (a_i == 0.0) continue;
        double mass = m.mass(id);
        double favg = fu_ints[static_cast<size_t>(id)] / mass;
        if (favg == 0.0) continue;
        double uavg = u_ints[static_cast<size_t>(id)] / mass;
        if (uavg == 0.0) continue;
        double ustar = u_star(m, u, id, UStarVariant::maximal);
        double ratio = std::max(ustar / uavg, 1.0);
        rep.lhs += favg * favg / (alpha.alpha(ratio) * ustar) * a_i * mass;
    }
    double f2u = 0.0;
    for (size_t p = 0; p < f.size(); ++p)
        f2u += f[p] * f[p] * u[p] * m.mass(m.leaf_at(static_cast<int>(p)));
    rep.rhs = 4.0 * rep.c_alpha * a.carleson_norm * f2u;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
    rep.holds = leq_tol(rep.lhs, rep.rhs, 1e-10);
    return rep;
}

EmbeddingReport embedding_sum_haar(const DyadicModel& m, const Weight& u,
                                   const Weight& f, const PenaltyFn& alpha) {
    require_nonnegative(u, "u");
    EmbeddingReport rep;
    ImproperIntegral ci = c_alpha(alpha, CAlphaConvention::with_alpha1);
    rep.c_alpha = ci.value();

    Weight fu = f;
    for (size_t p = 0; p < fu.size(); ++p) fu[p] *= u[p];
    std::vector<double> u_ints = subtree_integrals(m, u);

    for (int id = 0; id < m.atom_count(); ++id) {
        if (m.atom(id).children.size() < 2) continue;
        double d1 = martingale_difference_l1(m, fu, id);
        if (d1 == 0.0) continue;
        double mass = m.mass(id);
        double uavg = u_ints[static_cast<size_t>(id)] / mass;
        if (uavg == 0.0) continue;
        double ustar = u_star(m, u, id, UStarVariant::lorentz);
        double ratio = std::max(ustar / uavg, 1.0);
        rep.lhs += d1 * d1 / (alpha.alpha(ratio) * ustar) * mass;
    }
    double f2u = 0.0;
    for (size_t p = 0; p < f.size(); ++p)
        f2u += f[p] * f[p] * u[p] * m.mass(m.leaf_at(static_cast<int>(p)));
    rep.rhs = 36.0 * rep.c_alpha * f2u;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 0.0);
    rep.holds = leq_tol(rep.lhs, rep.rhs, 1e-10);
    return rep;
}

nlohmann::json bellman_to_json(const BellmanM& m) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : m.atoms) j.push_back({a.r, a.mass});
    return j;
}

BellmanM bellman_from_json(const nlohmann::json& j) {
    BellmanM m;
    for (const auto& pair : j)
        m.atoms.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    return m;
}

}  // namespace entlab
