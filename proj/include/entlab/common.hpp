#pragma once
// Shared numeric conventions, error types and deterministic RNG.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace entlab {

// Single relative tolerance used by all exact-identity checks: comparisons
// allow slack kRelTol * max(|a|, |b|, 1).
inline constexpr double kRelTol = 1e-12;

inline double tol_scale(double a, double b) {
    return std::max({std::abs(a), std::abs(b), 1.0});
}

// a <= b up to relative slack.
inline bool leq_tol(double a, double b, double rel = kRelTol) {
    return a <= b + rel * tol_scale(a, b);
}

inline bool eq_tol(double a, double b, double rel = kRelTol) {
    return std::abs(a - b) <= rel * tol_scale(a, b);
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Error types. Violations of *theorems* are results, not errors; these are
// for malformed inputs and genuine numerical failures.
// ---------------------------------------------------------------------------

#define ENTLAB_ERROR(Name)                                        \
    struct Name : std::runtime_error {                            \
        explicit Name(const std::string& m) : std::runtime_error(#Name ": " + m) {} \
    }

ENTLAB_ERROR(ZeroMassAtom);
ENTLAB_ERROR(AdditivityViolation);
ENTLAB_ERROR(NotQuasiconcave);
ENTLAB_ERROR(NotDecreasing);
ENTLAB_ERROR(MidpointMismatch);
ENTLAB_ERROR(InvalidPath);
ENTLAB_ERROR(DivisionByZero);
ENTLAB_ERROR(NonconvexYoung);
ENTLAB_ERROR(DivergentYoungTail);
ENTLAB_ERROR(NotConvexAfterTruncation);
ENTLAB_ERROR(FloorViolated);
ENTLAB_ERROR(NormalizationViolated);
ENTLAB_ERROR(PowerIterationStall);
ENTLAB_ERROR(ConvexityDataInvalid);
ENTLAB_ERROR(SingularPoint);
ENTLAB_ERROR(QuadratureFailure);
ENTLAB_ERROR(HypothesisViolated);
ENTLAB_ERROR(InputError);

#undef ENTLAB_ERROR

// ---------------------------------------------------------------------------
// Deterministic RNG. splitmix64 for counter-mode seeding, xoshiro256** for
// streams. Self-contained so results do not depend on the standard library's
// distribution implementations; identical seeds give identical instances on
// every platform and at every parallelism degree.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    // Counter-mode construction: trial i of a sweep uses Rng(seed, i).
    explicit Rng(std::uint64_t seed, std::uint64_t counter = 0) {
        std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (counter + 1));
        for (auto& w : s_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1).
    double u01() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * u01(); }

    // Log-uniform in [a,b), a,b > 0.
    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    bool bernoulli(double p) { return u01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// FNV-1a content hash, used for preset/config fingerprints in reports.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v);

// ---------------------------------------------------------------------------
// Bracketed improper integrals on [0, tau_max) of a positive integrand given
// in log coordinates. See quadrature.cpp.
// ---------------------------------------------------------------------------

struct ImproperIntegral {
    double lower = 0.0;       // rigorous lower Riemann bound on the grid range
    double upper = 0.0;       // matching upper bound (rigorous when monotone)
    bool divergent = false;   // running lower bound crossed the divergence cap,
                              // or the last grid block failed to decay
    double tail_block = 0.0;  // contribution of the final grid block
    bool monotone = true;     // integrand was certified decreasing on the grid

    double value() const { return divergent ? kInf : 0.5 * (lower + upper); }
    double gap() const { return upper - lower; }
};

struct IntegralOptions {
    double tau_max = 2097152.0;   // 2^21
    double divergence_cap = 1e6;  // running lower bound beyond this => divergent
    double tail_tol = 2e-6;       // non-vanishing last block => divergent
    // Riemann brackets of monotone integrands converge linearly in the cell
    // count, so the absolute gap target trades directly against evaluations;
    // 2e-7 keeps the relative gap under 1e-6 for the unit-scale constants here.
    double bracket_tol = 2e-7;
    // evaluated range is a hard table boundary: report the integral over the
    // range without reading a non-vanishing final block as divergence
    bool range_limited = false;
};

// Integrate g over [0, tau_max) in geometric blocks with monotone bracketing.
// g must be >= 0; when `decreasing` is false brackets fall back to local
// min/max sampling and `monotone` is reported false.
ImproperIntegral integrate_tail(const std::function<double(double)>& g,
                                bool decreasing, const IntegralOptions& opt = {});

// Adaptive Simpson on [a,b], relative tolerance `rel`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel = 1e-8, int max_depth = 48);

}  // namespace entlab
