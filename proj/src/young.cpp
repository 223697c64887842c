#include "entlab/young.hpp"

#include <algorithm>
#include <optional>

namespace entlab {

namespace {

// ln(e + e^tau) without overflow
double softln(double tau) { return tau + std::log1p(std::exp(1.0 - tau)); }

}  // namespace

void YoungFn::validate() {
    double prev_d = 0.0;
    doubling_ = 0.0;
    for (int i = 0; i <= 240; ++i) {
        double t = std::pow(10.0, -3.0 + 12.0 * i / 240.0);  // 1e-3 .. 1e9
        double p = phi_(t), d = dphi_(t);
        if (!(p >= 0.0) || !(d >= 0.0))
            throw NonconvexYoung(name_ + ": negative value or derivative");
        if (d < prev_d * (1.0 - 1e-9))
            throw NonconvexYoung(name_ + ": derivative not increasing");
        if (p > t * d * (1.0 + 1e-9) + 1e-300)
            throw NonconvexYoung(name_ + ": Phi(t) > t Phi'(t)");
        if (p > 0.0) doubling_ = std::max(doubling_, phi_(2.0 * t) / p);
        prev_d = d;
    }
    if (std::abs(phi_(0.0)) > 0.0) throw NonconvexYoung(name_ + ": Phi(0) != 0");
}

YoungFn YoungFn::from_rules(std::string name, std::function<double(double)> phi,
                            std::function<double(double)> dphi, Options opts) {
    YoungFn f;
    f.name_ = std::move(name);
    f.phi_ = std::move(phi);
    f.dphi_ = std::move(dphi);
    f.opts_ = std::move(opts);
    if (!f.opts_.ratio_log) f.ratio_log_range_ = 690.0;
    f.validate();
    return f;
}

YoungFn YoungFn::from_rules(std::string name, std::function<double(double)> phi,
                            std::function<double(double)> dphi) {
    return from_rules(std::move(name), std::move(phi), std::move(dphi), Options{});
}

YoungFn YoungFn::power(double p) {
    if (p < 1.0) throw NonconvexYoung("power Young function needs p >= 1");
    Options o;
    o.ratio_log = [p](double tau) { return std::exp((p - 1.0) * tau); };
    return from_rules("young:t^" + std::to_string(p),
                      [p](double t) { return std::pow(t, p); },
                      [p](double t) { return p * std::pow(t, p - 1.0); }, std::move(o));
}

YoungFn YoungFn::preset(const std::string& name) {
    if (name == "young:t") {
        Options o;
        o.ratio_log = [](double) { return 1.0; };
        return from_rules(name, [](double t) { return t; }, [](double) { return 1.0; },
                          std::move(o));
    }
    if (name == "young:t2") return power(2.0);
    if (name == "young:t3") return power(3.0);
    if (name == "young:tln2") {
        // Phi(t) = t ln^2(e+t)
        Options o;
        o.ratio_log = [](double tau) {
            double l = softln(tau);
            return l * l;
        };
        o.ratio_increasing_from = 8.0;
        return from_rules(
            name,
            [](double t) {
                double l = std::log(std::exp(1.0) + t);
                return t * l * l;
            },
            [](double t) {
                double e = std::exp(1.0);
                double l = std::log(e + t);
                return l * l + 2.0 * t * l / (e + t);
            },
            std::move(o));
    }
    if (name == "young:loglog:eps=1") {
        // Phi(t) = t ln(e+t) ln^2(e + ln(e+t))
        Options o;
        o.ratio_log = [](double tau) {
            double a = softln(tau);
            double b = std::log(std::exp(1.0) + a);
            return a * b * b;
        };
        o.ratio_increasing_from = 8.0;
        return from_rules(
            name,
            [](double t) {
                double e = std::exp(1.0);
                double a = std::log(e + t);
                double b = std::log(e + a);
                return t * a * b * b;
            },
            [](double t) {
                double e = std::exp(1.0);
                double a = std::log(e + t);
                double b = std::log(e + a);
                double da = 1.0 / (e + t);
                double db = da / (e + a);
                return a * b * b + t * da * b * b + 2.0 * t * a * b * db;
            },
            std::move(o));
    }
    throw InputError("unknown Young preset " + name);
}

double YoungFn::ratio_log(double tau) const {
    if (opts_.ratio_log) return opts_.ratio_log(tau);
    if (tau > ratio_log_range_)
        throw InputError(name_ + ": ratio_log beyond evaluable range");
    double t = std::exp(tau);
    return phi_(t) / t;
}

ImproperIntegral YoungFn::reciprocal_tail(const IntegralOptions& opt) const {
    // integral_1^inf dt/Phi(t) = integral dtau t/Phi(t) at t = e^tau. Slowly
    // convergent log bumps need one more log: with sigma = ln tau the
    // integrand becomes t ln t / Phi(t), monotone exactly when Phi/(t ln t)
    // is eventually increasing, so the brackets stay rigorous and the
    // tail-block divergence rule classifies the double-log frontier
    // correctly.
    const double tau0 = 4.0;
    auto g = [this](double tau) {
        double r = ratio_log(tau);
        return r > 0.0 ? 1.0 / r : kInf;
    };
    IntegralOptions head_opt = opt;
    head_opt.tau_max = tau0;
    head_opt.range_limited = true;
    ImproperIntegral head = integrate_tail(g, false, head_opt);

    double sigma0 = std::log(tau0);
    auto g2 = [this, sigma0](double s) {
        double tau = std::exp(sigma0 + s);
        double r = ratio_log(tau);
        return r > 0.0 ? tau / r : kInf;
    };
    // monotonicity probe of t ln t / Phi(t) past tau0
    bool decreasing = true;
    double prev = kInf;
    for (int i = 0; i <= 64; ++i) {
        double v = g2(static_cast<double>(i) * 0.25);
        if (v > prev * (1.0 + 1e-9)) decreasing = false;
        prev = v;
    }
    IntegralOptions tail_opt = opt;
    if (!opts_.ratio_log)
        tail_opt.tau_max = std::min(tail_opt.tau_max,
                                    std::log(ratio_log_range_) - sigma0);
    ImproperIntegral tail = integrate_tail(g2, decreasing, tail_opt);

    ImproperIntegral out = tail;
    out.lower += head.lower;
    out.upper += head.upper;
    out.monotone = decreasing;
    return out;
}

double luxemburg_norm_of_distribution(const StepFn& n, const YoungFn& phi) {
    // reconstruct (value, mass) pairs: mass drop of N at each threshold
    std::vector<std::pair<double, double>> vm;
    for (size_t i = 0; i < n.values.size(); ++i) {
        double next = i + 1 < n.values.size() ? n.values[i + 1] : 0.0;
        double drop = n.values[i] - next;
        double value = n.edges[i + 1];
        if (drop > 0.0 && value > 0.0) vm.emplace_back(value, drop);
    }
    if (vm.empty()) return 0.0;
    auto gauge = [&](double lambda) {
        double s = 0.0;
        for (auto& [v, mass] : vm) s += phi(v / lambda) * mass;
        return s;
    };
    double lo = 0.0, hi = vm.back().first;  // largest value
    if (gauge(hi) <= 1.0) {
        // shrink: the norm is below the max value
        lo = 0.0;
    } else {
        while (gauge(hi) > 1.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) throw QuadratureFailure("luxemburg gauge does not close");
        }
    }
    if (lo == 0.0) lo = hi * 1e-18;
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (gauge(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double luxemburg_norm(const DyadicModel& m, const Weight& w, int atom_id,
                      const YoungFn& phi) {
    Weight abs_w = w;
    for (auto& v : abs_w.values) v = std::abs(v);
    return luxemburg_norm_of_distribution(distribution_fn(m, abs_w, atom_id), phi);
}

double lambda_psi_norm(const StepFn& n, const PsiProfile& p) {
    return step_integral_of(n, [&](double level) { return p.psi(level); });
}

LorentzProfile orlicz_to_lorentz(const YoungFn& phi) {
    ImproperIntegral tail = phi.reciprocal_tail();
    if (tail.divergent) throw DivergentYoungTail(phi.name());

    // t1: where Phi(t) Phi'(t) = 1, so the parametric s-range starts at 1
    double lo = 1e-12, hi = 1e12;
    auto prod = [&](double t) { return phi(t) * phi.deriv(t); };
    if (prod(lo) > 1.0 || prod(hi) < 1.0) throw InputError("cannot anchor s(t)=1");
    for (int i = 0; i < 200; ++i) {
        double mid = std::sqrt(lo * hi);
        (prod(mid) < 1.0 ? lo : hi) = mid;
    }
    double t1 = hi;

    // geometric grid in t; s = 1/(Phi Phi') decreases, psi(s) = 1/Phi(t)
    const int kN = 2400;
    double lt1 = std::log(t1), lt2 = 180.0;
    std::vector<double> ys, lnPsi, s_grid, psi_grid;
    for (int i = 0; i < kN; ++i) {
        double t = std::exp(lt1 + (lt2 - lt1) * i / (kN - 1));
        double pp = prod(t);
        double y = std::log(pp);  // y = -ln s
        if (!ys.empty() && y <= ys.back()) continue;
        ys.push_back(y);
        lnPsi.push_back(std::log(phi.deriv(t)));
        s_grid.push_back(1.0 / pp);
        psi_grid.push_back(1.0 / phi(t));
    }
    if (ys.size() < 8) throw InputError("parametric profile degenerate");

    double slope = (lnPsi.back() - lnPsi[lnPsi.size() - 2]) /
                   (ys.back() - ys[ys.size() - 2]);
    slope = std::max(slope, 0.0);
    double y_max = ys.back();
    auto psi_of_y = [ys, lnPsi, slope](double y) {
        if (y <= ys.front()) return std::exp(lnPsi.front());
        if (y >= ys.back())
            return std::exp(lnPsi.back() + slope * (y - ys.back()));
        auto it = std::lower_bound(ys.begin(), ys.end(), y);
        size_t hi_i = static_cast<size_t>(it - ys.begin());
        size_t lo_i = hi_i - 1;
        double f = (y - ys[lo_i]) / (ys[hi_i] - ys[lo_i]);
        return std::exp(lnPsi[lo_i] + f * (lnPsi[hi_i] - lnPsi[lo_i]));
    };

    LorentzProfile out;
    out.profile.name = "lorentz(" + phi.name() + ")";
    out.profile.psi_of_y = psi_of_y;
    out.profile.y_max = y_max;

    std::reverse(s_grid.begin(), s_grid.end());
    std::reverse(psi_grid.begin(), psi_grid.end());
    out.psi = QuasiconcaveFn::from_grid(out.profile.name, s_grid, psi_grid);

    IntegralOptions io;
    io.tau_max = y_max;
    io.range_limited = true;  // table range; residual recorded via tail_block
    out.recip_psi_integral =
        integrate_tail([&](double y) { return 1.0 / psi_of_y(y); }, true, io);
    return out;
}

AlphaFromPsiResult alpha_from_psi(const PsiProfile& p) {
    // sample the profile in y = -ln s; gamma(t) = t alpha(t) = Psi1(e^{1-t})
    // corresponds to gamma at t = 1 + y
    const int kN = 4096;
    const double y_hi = std::min(p.y_max + 64.0, 512.0);
    const double h = y_hi / (kN - 1);
    std::vector<double> y(kN), v(kN);
    bool psi_increasing = true;
    for (int i = 0; i < kN; ++i) {
        y[i] = h * i;
        v[i] = p.psi_of_y(y[i]);
        if (!(v[i] > 0.0)) throw HypothesisViolated(p.name + ": Psi must be positive");
        if (i > 0 && v[i] < v[i - 1] * (1.0 - 1e-10))
            throw HypothesisViolated(p.name + ": Psi(e^{-y}) must be nondecreasing");
        // s Psi(s) increasing <=> ln v(y) - y nonincreasing. Recorded, not
        // enforced: the square-log profile fails it on (1/e, 1] while the
        // construction and the Jensen comparison only need Psi decreasing.
        if (i > 0 && std::log(v[i]) - y[i] > std::log(v[i - 1]) - y[i - 1] + 1e-9)
            psi_increasing = false;
    }
    // convexity start: smallest index beyond which second differences >= 0
    int conv_from = kN - 2;
    for (int i = kN - 2; i >= 1; --i) {
        double d2 = v[i + 1] - 2.0 * v[i] + v[i - 1];
        if (d2 < -1e-9 * std::max({v[i], 1.0})) break;
        conv_from = i - 1;
    }
    if (conv_from >= kN - 8)
        throw NotConvexAfterTruncation(p.name);
    double trunc_y = y[static_cast<size_t>(conv_from)];
    if (conv_from == 0) trunc_y = 0.0;

    // truncated profile (constant below the convexity start)
    auto base = p.psi_of_y;
    auto psi1_of_y = [base, trunc_y](double yy) {
        return base(std::max(yy, trunc_y));
    };

    // piecewise-linear convex table for gamma(1 + y) = Psi1(e^{-y}) evaluated
    // at the sample nodes; final slope extends it
    std::vector<double> v1(kN);
    for (int i = 0; i < kN; ++i) v1[i] = psi1_of_y(y[i]);
    double slope = std::max((v1[kN - 1] - v1[kN - 2]) / h, 0.0);
    double y_end = y[kN - 1], v_end = v1[kN - 1];

    auto rule = [y, v1, h, slope, y_end, v_end](double tau) {
        // alpha(t) = gamma(t)/t at t = e^tau, gamma(t) = v1(t - 1)
        if (tau > 700.0) return slope;  // limit of the linear tail
        double t = std::exp(tau);
        double yy = t - 1.0;
        if (yy >= y_end) {
            return slope * (1.0 - (1.0 + y_end) / t) + v_end / t;
        }
        size_t i = static_cast<size_t>(yy / h);
        if (i + 1 >= v1.size()) i = v1.size() - 2;
        double f = (yy - y[i]) / h;
        double g = v1[i] + f * (v1[i + 1] - v1[i]);
        return g / t;
    };

    AlphaFromPsiResult out;
    out.truncation_y = trunc_y;
    out.psi_monotone = psi_increasing;
    out.truncated.name = p.name + "|trunc";
    out.truncated.psi_of_y = psi1_of_y;
    out.truncated.y_max = p.y_max;

    // C_alpha (integral convention) via the substitution s = e^{1-t}:
    // int_1^inf dt/(t alpha) = int_0^1 ds/(s Psi1) = int_0^inf dy / Psi1(e^{-y})
    IntegralOptions io;
    io.range_limited = std::isfinite(p.y_max);
    io.tau_max = std::min(p.y_max + 64.0, io.tau_max);
    out.c_alpha_integral =
        integrate_tail([&](double yy) { return 1.0 / psi1_of_y(yy); }, true, io);
    if (out.c_alpha_integral.divergent)
        throw HypothesisViolated(p.name + ": int_0 ds/(s Psi) diverges");

    out.alpha = PenaltyFn::from_log_rule("alpha(" + p.name + ")", rule)
                    .with_c_integral(out.c_alpha_integral);
    return out;
}

JensenCheck jensen_check(const StepFn& n, const PsiProfile& p, const PenaltyFn& alpha) {
    JensenCheck c;
    double f1 = mass_functional(n);
    double fstar = lorentz_norm_psi0(n);
    if (f1 <= 0.0) {
        c.holds = true;
        return c;
    }
    double r = std::max(fstar / f1, 1.0);
    c.lhs = alpha.alpha(r) * fstar;
    c.rhs = lambda_psi_norm(n, p);
    c.ratio = c.lhs / std::max(c.rhs, 1e-300);
    c.holds = leq_tol(c.lhs, c.rhs, 1e-10);
    return c;
}

MinYoungResult min_young(const YoungFn& p1, const YoungFn& p2) {
    MinYoungResult out;
    auto diff = [&](double t) { return p1.deriv(t) - p2.deriv(t); };
    // locate derivative crossings on a log grid, refine by bisection
    std::vector<double> probes;
    for (int i = 0; i <= 3000; ++i)
        probes.push_back(std::pow(10.0, -9.0 + 21.0 * i / 3000.0));  // 1e-9..1e12
    for (size_t i = 0; i + 1 < probes.size(); ++i) {
        double a = probes[i], b = probes[i + 1];
        double da = diff(a), db = diff(b);
        if (da == 0.0 || da * db >= 0.0) continue;
        for (int it = 0; it < 100; ++it) {
            double mid = std::sqrt(a * b);
            if (diff(mid) * da > 0.0)
                a = mid;
            else
                b = mid;
        }
        out.crossings.push_back(0.5 * (a + b));
    }

    // segment bounds and cumulative Phi at their left ends
    std::vector<double> bounds{0.0};
    for (double c : out.crossings) bounds.push_back(c);
    bounds.push_back(kInf);
    std::vector<int> active(bounds.size() - 1);
    std::vector<double> cum(bounds.size() - 1, 0.0);
    for (size_t k = 0; k + 1 < bounds.size(); ++k) {
        double probe = std::isinf(bounds[k + 1]) ? bounds[k] * 2.0 + 1.0
                                                 : 0.5 * (bounds[k] + bounds[k + 1]);
        active[k] = p1.deriv(probe) <= p2.deriv(probe) ? 0 : 1;
        if (k > 0) {
            const YoungFn& prev = active[k - 1] == 0 ? p1 : p2;
            cum[k] = cum[k - 1] + prev(bounds[k]) - prev(bounds[k - 1]);
        }
    }

    // capture copies; the result must not dangle into the inputs
    YoungFn f1c = p1, f2c = p2;
    auto phi = [bounds, active, cum, f1c, f2c](double t) {
        if (t <= 0.0) return 0.0;
        auto it = std::upper_bound(bounds.begin(), bounds.end(), t);
        size_t k = static_cast<size_t>(it - bounds.begin()) - 1;
        const YoungFn& f = active[k] == 0 ? f1c : f2c;
        return cum[k] + f(t) - f(bounds[k]);
    };
    auto dphi = [f1c, f2c](double t) {
        return std::min(f1c.deriv(t), f2c.deriv(t));
    };

    YoungFn::Options o;
    {
        size_t last = active.size() - 1;
        const YoungFn& f = active[last] == 0 ? f1c : f2c;
        double off = cum[last] - f(bounds[last]);
        YoungFn base = f;
        o.ratio_log = [off, base](double tau) {
            return base.ratio_log(tau) + off * std::exp(-tau);
        };
    }
    out.phi = YoungFn::from_rules("min(" + p1.name() + "," + p2.name() + ")", phi,
                                  dphi, std::move(o));

    // fitted sandwich constant on [1, 1e6]
    out.sandwich_c = kInf;
    for (int i = 0; i <= 600; ++i) {
        double t = std::pow(10.0, 6.0 * i / 600.0);
        double mn = std::min(p1(t), p2(t));
        if (mn <= 0.0) continue;
        double v = out.phi(t);
        if (v > mn * (1.0 + 1e-9))
            throw NormalizationViolated("min_young exceeds min of inputs");
        out.sandwich_c = std::min(out.sandwich_c, v / mn);
    }
    return out;
}

LlogLFloor young_llogl_floor(const YoungFn& phi, double t_lo, double t_hi) {
    ImproperIntegral tail = phi.reciprocal_tail();
    if (tail.divergent) throw DivergentYoungTail(phi.name());
    LlogLFloor out;
    out.c = kInf;
    for (int i = 0; i <= 800; ++i) {
        double t = std::exp(std::log(t_lo) + (std::log(t_hi) - std::log(t_lo)) * i / 800.0);
        double denom = t * std::log(t);
        if (denom <= 0.0) continue;
        double r = phi(t) / denom;
        if (r < out.c) {
            out.c = r;
            out.at_t = t;
        }
    }
    if (!(out.c > 0.0)) throw FloorViolated(phi.name());
    return out;
}

AlphaFromYoungResult alpha_from_young(const YoungFn& phi, std::uint64_t calib_seed) {
    AlphaFromYoungResult out;
    ImproperIntegral tail = phi.reciprocal_tail();
    if (tail.divergent) throw DivergentYoungTail(phi.name());

    // effective t0: Phi(t)/(t ln t) nondecreasing along the probe grid
    double t0 = std::max(phi.ratio_increasing_from(), std::exp(std::exp(1.0)));
    {
        double prev = 0.0;
        for (int i = 0; i <= 400; ++i) {
            double t = t0 * std::pow(1e9, i / 400.0);
            double r = phi(t) / (t * std::log(t));
            if (r < prev * (1.0 - 1e-9))
                throw HypothesisViolated(phi.name() + ": Phi/(t ln t) not increasing");
            prev = r;
        }
    }
    out.t0 = t0;

    MinYoungResult mn = min_young(phi, YoungFn::preset("young:tln2"));
    out.sandwich_c = mn.sandwich_c;
    const YoungFn& phim = mn.phi;

    // Psi0(s) = Phi_min(t)/t at s = 1/(t ln^4 t), for t >= t1; constant below
    double t1 = std::max(t0, std::exp(std::exp(1.0)));
    auto y_of_t = [](double t) { return std::log(t) + 4.0 * std::log(std::log(t)); };
    double y1 = y_of_t(t1);
    // invert y -> t by bisection in ln t
    auto t_of_y = [y_of_t, t1](double yy) {
        double lo = std::log(t1), hi = 700.0;
        if (y_of_t(std::exp(hi)) < yy) return std::exp(hi);
        for (int i = 0; i < 100; ++i) {
            double mid = 0.5 * (lo + hi);
            (y_of_t(std::exp(mid)) < yy ? lo : hi) = mid;
        }
        return std::exp(0.5 * (lo + hi));
    };
    auto psi0_of_y = [&, y1](double yy) {
        double t = t_of_y(std::max(yy, y1));
        return phim(t) / t;
    };

    // convexify: phi_inv = inverse of yy -> psi0_of_y, least concave majorant,
    // then invert the hull back
    const int kN = 1600;
    double y_lo = y1, y_hi2 = 400.0;
    std::vector<double> fy, fv;  // increasing y, increasing psi0
    for (int i = 0; i < kN; ++i) {
        double yy = y_lo + (y_hi2 - y_lo) * i / (kN - 1);
        double vv = psi0_of_y(yy);
        if (!fv.empty() && vv <= fv.back()) continue;
        fy.push_back(yy);
        fv.push_back(vv);
    }
    if (fy.size() < 16) throw HypothesisViolated("degenerate Psi0 profile");
    QuasiconcaveFn hull = least_concave_majorant(fv, fy);  // tilde(phi^{-1})

    // tilde(phi)(y) = value v with hull(v) = y, piecewise-linear monotone
    const auto& hx = hull.grid_s();   // v coordinates
    const auto& hyv = hull.grid_psi();  // y coordinates
    auto phi_tilde = [hx, hyv, y1](double yy) {
        if (yy <= hyv.front()) return hx.front() * 1.0;
        if (yy >= hyv.back()) {
            double sl = (hx.back() - hx[hx.size() - 2]) /
                        (hyv.back() - hyv[hyv.size() - 2]);
            return hx.back() + sl * (yy - hyv.back());
        }
        auto it = std::lower_bound(hyv.begin(), hyv.end(), yy);
        size_t hi_i = static_cast<size_t>(it - hyv.begin());
        size_t lo_i = hi_i == 0 ? 0 : hi_i - 1;
        if (hi_i == lo_i) return hx[lo_i] * 1.0;
        double f = (yy - hyv[lo_i]) / (hyv[hi_i] - hyv[lo_i]);
        return hx[lo_i] + f * (hx[hi_i] - hx[lo_i]);
    };

    out.psi_tilde.name = "psi~(" + phi.name() + ")";
    out.psi_tilde.psi_of_y = phi_tilde;
    out.psi_tilde.y_max = hyv.back();

    // tilde(phi) <= phi pointwise (hull above the graph of phi^{-1})
    for (size_t i = 0; i < fy.size(); i += 37) {
        if (phi_tilde(fy[i]) > fv[i] * (1.0 + 1e-6))
            throw NormalizationViolated("convexified profile exceeds Psi0");
    }

    AlphaFromPsiResult ap = alpha_from_psi(out.psi_tilde);
    out.c_alpha_integral = ap.c_alpha_integral;

    // calibration: Lambda_{psi~} <= C * L^Phi over indicators and random steps
    double c_obs = 0.0;
    for (int i = 1; i <= 200; ++i) {
        double s = std::exp(-12.0 * i / 200.0);
        StepFn ind({0.0, 1.0}, {s});
        double num = lambda_psi_norm(ind, out.psi_tilde);
        double den = luxemburg_norm_of_distribution(ind, phi);
        if (den > 0.0) c_obs = std::max(c_obs, num / den);
    }
    Rng rng(calib_seed);
    for (int trial = 0; trial < 400; ++trial) {
        int k = rng.uniform_int(1, 5);
        std::vector<double> edges{0.0}, levels;
        double t = 0.0, level = 1.0;
        for (int j = 0; j < k; ++j) {
            t += rng.log_uniform(1e-3, 1e3);
            level *= rng.uniform(0.05, 0.95);
            edges.push_back(t);
            levels.push_back(level);
        }
        std::reverse(levels.begin(), levels.end());
        for (size_t j = 0; j + 1 < levels.size(); ++j)
            if (levels[j] <= levels[j + 1]) levels[j] = levels[j + 1] * 1.5;
        if (levels.front() > 1.0) continue;
        StepFn n(edges, levels);
        double num = lambda_psi_norm(n, out.psi_tilde);
        double den = luxemburg_norm_of_distribution(n, phi);
        if (den > 0.0) c_obs = std::max(c_obs, num / den);
    }
    out.young_scale = c_obs * 1.3;
    // scaled() rescales the attached integral constant as well
    out.alpha = ap.alpha.scaled(1.0 / out.young_scale);
    return out;
}

JensenCheck orlicz_bump_check(const StepFn& n, const YoungFn& phi,
                              const AlphaFromYoungResult& r) {
    JensenCheck c;
    double f1 = mass_functional(n);
    double fstar = lorentz_norm_psi0(n);
    if (f1 <= 0.0) {
        c.holds = true;
        return c;
    }
    double rat = std::max(fstar / f1, 1.0);
    c.lhs = r.alpha.alpha(rat) * fstar;
    c.rhs = luxemburg_norm_of_distribution(n, phi);
    c.ratio = c.lhs / std::max(c.rhs, 1e-300);
    c.holds = leq_tol(c.lhs, c.rhs, 1e-8);
    return c;
}

}  // namespace entlab
