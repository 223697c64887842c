#include "entlab/common.hpp"

#include <cstdio>
#include <vector>

namespace entlab {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

// Bracketed integral of a nonnegative g over [a,b]. For decreasing g the
// brackets are rigorous Riemann bounds; otherwise they come from endpoint
// min/max per refinement cell.
void bracket_block(const std::function<double(double)>& g, double a, double b,
                   double ga, double gb, double tol, int depth, double& lo, double& hi) {
    double width = b - a;
    double block_lo = std::min(ga, gb) * width;
    double block_hi = std::max(ga, gb) * width;
    if (block_hi - block_lo <= tol || depth >= 40) {
        lo += block_lo;
        hi += block_hi;
        return;
    }
    double mid = 0.5 * (a + b);
    double gm = g(mid);
    bracket_block(g, a, mid, ga, gm, 0.5 * tol, depth + 1, lo, hi);
    bracket_block(g, mid, b, gm, gb, 0.5 * tol, depth + 1, lo, hi);
}

}  // namespace

ImproperIntegral integrate_tail(const std::function<double(double)>& g,
                                bool decreasing, const IntegralOptions& opt) {
    ImproperIntegral out;
    out.monotone = decreasing;
    // geometric blocks [0,1], [1,2], [2,4], ... up to tau_max
    std::vector<std::pair<double, double>> blocks;
    double a = 0.0, b = 1.0;
    while (a < opt.tau_max) {
        blocks.emplace_back(a, std::min(b, opt.tau_max));
        a = b;
        b *= 2.0;
    }
    double per_block_tol = opt.bracket_tol / static_cast<double>(blocks.size());
    for (size_t i = 0; i < blocks.size(); ++i) {
        auto [lo_t, hi_t] = blocks[i];
        double block_lo = 0.0, block_hi = 0.0;
        bracket_block(g, lo_t, hi_t, g(lo_t), g(hi_t), per_block_tol, 0, block_lo, block_hi);
        if (block_lo < 0)
            throw QuadratureFailure("negative integrand in tail integral");
        out.lower += block_lo;
        out.upper += block_hi;
        if (i + 1 == blocks.size()) out.tail_block = block_hi;
        if (out.lower > opt.divergence_cap) {
            out.divergent = true;
            return out;
        }
    }
    // a non-vanishing final block means the integral has not settled on the
    // evaluated range; for decreasing integrands that is the divergence signal
    if (!opt.range_limited && out.tail_block > opt.tail_tol) out.divergent = true;
    return out;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel, int max_depth) {
    struct Impl {
        const std::function<double(double)>& f;
        double rel;
        int max_depth;
        double run(double a, double b, double fa, double fm, double fb, double whole,
                   int depth) const {
            double m = 0.5 * (a + b);
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm), frm = f(rm);
            double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            double delta = left + right - whole;
            if (depth >= max_depth)
                throw QuadratureFailure("adaptive_simpson depth exceeded");
            double scale = std::max({std::abs(left + right), std::abs(whole), 1e-300});
            if (std::abs(delta) <= 15.0 * rel * scale) return left + right + delta / 15.0;
            return run(a, m, fa, flm, fm, left, depth + 1) +
                   run(m, b, fm, frm, fb, right, depth + 1);
        }
    };
    if (!(a < b)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Impl{f, rel, max_depth}.run(a, b, fa, fm, fb, whole, 0);
}

}  // namespace entlab
