#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "covdepth/analytic.hpp"
#include "covdepth/channel.hpp"
#include "covdepth/errors.hpp"

namespace covdepth {

enum class BoundKind { k1, k2, uniform_lower, uniform_upper };

inline const char* to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::k1: return "K1";
        case BoundKind::k2: return "K2";
        case BoundKind::uniform_lower: return "uniform-lower";
        case BoundKind::uniform_upper: return "uniform-upper";
    }
    return "?";
}

// One theoretical bound: the read count, its coverage depth, the
// probability ceiling (K1 only), the inputs it was computed from, and any
// hypothesis flags raised along the way.
struct BoundReport {
    BoundKind kind = BoundKind::k1;
    double k_reads = 0.0;
    double alpha = 0.0;
    std::optional<double> prob_bound;  // present iff kind == k1
    LogNormalParams params{};
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t a = 0;
    double beta = 0.0;
    std::vector<std::string> flags;
};

// First lower bound: K1 = E[1/p] (ln(1/(1-R)) - beta), together with the
// guaranteed ceiling e^{-beta} (1 + m/(n-m)) on P[K <= K1]. Negative read
// counts clamp to zero (large beta legitimately drives the bound vacuous);
// hypothesis departures are flagged, not rejected.
inline BoundReport k1_lower(const LogNormalParams& params, const CodePlan& plan, double beta) {
    plan.validate();
    const double rate_ratio = plan.rate();
    if (!(rate_ratio < 1.0)) throw domain_error("code rate must be < 1");
    if (!(beta >= 0.0)) throw domain_error("beta must be >= 0");

    BoundReport report;
    report.kind = BoundKind::k1;
    report.params = params;
    report.n = plan.n;
    report.m = plan.m;
    report.a = plan.a;
    report.beta = beta;
    if (plan.a <= 1) report.flags.push_back("a<=1 outside theorem hypothesis");
    if (beta <= 1.0) report.flags.push_back("beta<=1 outside theorem hypothesis");

    double k = mean_inv_p(params) * (std::log(1.0 / (1.0 - rate_ratio)) - beta);
    if (k < 0.0) {
        k = 0.0;
        report.flags.push_back("clamped to zero (beta exceeds ln(1/(1-R)))");
    }
    report.k_reads = k;
    report.alpha = k / static_cast<double>(plan.n);
    const double raw = std::exp(-beta) *
                       (1.0 + static_cast<double>(plan.m) / static_cast<double>(plan.n - plan.m));
    report.prob_bound = std::min(1.0, raw);
    if (raw > 1.0) report.flags.push_back("probability ceiling vacuous (clamped to 1)");
    return report;
}

// Second lower bound:
//   K2 = E[1/p] ((a-1) - ln2 ln(1-R) + (a-1) sqrt(-(2 ln2/(a-1)) ln(1-R))).
// All logarithms natural; the multiplicative constant is ln 2.
inline BoundReport k2_lower(const LogNormalParams& params, const CodePlan& plan) {
    plan.validate();
    const double rate_ratio = plan.rate();
    if (!(rate_ratio < 1.0)) throw domain_error("code rate must be < 1");
    if (plan.a <= 1) throw domain_error("second bound requires threshold a > 1");

    const double a1 = static_cast<double>(plan.a - 1);
    const double ln2 = 0.69314718055994530942;
    const double tail = -std::log1p(-rate_ratio);  // -ln(1-R) > 0
    const double k =
        mean_inv_p(params) * (a1 + ln2 * tail + a1 * std::sqrt(2.0 * ln2 * tail / a1));

    BoundReport report;
    report.kind = BoundKind::k2;
    report.params = params;
    report.n = plan.n;
    report.m = plan.m;
    report.a = plan.a;
    report.k_reads = k;
    report.alpha = k / static_cast<double>(plan.n);
    return report;
}

// Sufficient condition for E[strands with < a reads] <= n - m at budget K:
// K must clear (a-1) E[1/p] and the scaled miss rate y e^-y must sit under
// (1/e) (1-R)^{ln2/(a-1)}.
inline bool lemma1_condition(std::int64_t reads, const LogNormalParams& params,
                             const CodePlan& plan) {
    plan.validate();
    if (plan.a <= 1) throw domain_error("condition requires threshold a > 1");
    const double a1 = static_cast<double>(plan.a - 1);
    if (!(static_cast<double>(reads) > a1 * mean_inv_p(params))) return false;
    const double y = static_cast<double>(reads) * mean_p(params) / a1;
    const double ln2 = 0.69314718055994530942;
    const double rhs =
        std::exp(-1.0) * std::pow(1.0 - plan.rate(), ln2 / a1);
    return y * std::exp(-y) <= rhs;
}

// Bits-based Kullback-Leibler divergence between Bernoulli(x) and
// Bernoulli(y), with the 0 log 0 = 0 convention. Mismatched point masses
// return +infinity.
inline double kl_divergence(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("first argument must lie in [0,1]");
    if (!(y >= 0.0 && y <= 1.0)) throw domain_error("second argument must lie in [0,1]");
    const double inf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    if (x > 0.0) {
        if (y == 0.0) return inf;
        total += x * std::log2(x / y);
    }
    if (x < 1.0) {
        if (y == 1.0) return inf;
        total += (1.0 - x) * std::log2((1.0 - x) / (1.0 - y));
    }
    return total;
}

// Exact probability that a strand with per-read probability p collects
// fewer than a reads out of K: sum_{j<a} C(K,j) p^j (1-p)^{K-j}, summed in
// log space.
inline double binomial_tail_q(std::int64_t reads, double p, std::int64_t a) {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("probability must lie in (0,1)");
    if (a < 1) throw domain_error("retrieval threshold must be >= 1");
    if (reads < 0) throw domain_error("read count must be >= 0");
    if (a - 1 > reads) return 1.0;  // fewer draws than the threshold needs
    const double kd = static_cast<double>(reads);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    long double sum = 0.0L;
    for (std::int64_t j = 0; j < a; ++j) {
        const double jd = static_cast<double>(j);
        sum += std::exp(std::lgamma(kd + 1.0) - std::lgamma(jd + 1.0) - std::lgamma(kd - jd + 1.0) +
                        jd * lp + (kd - jd) * lq);
    }
    return std::min(static_cast<double>(sum), 1.0);
}

// Chernoff ceiling on the same tail: 2^{-K D((a-1)/K || p)} with the
// divergence in bits, i.e. the natural-log bound e^{-K D_nats}. Dominates
// the exact tail whenever (a-1)/K < p.
inline double chernoff_tail_q(std::int64_t reads, double p, std::int64_t a) {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("probability must lie in (0,1)");
    if (a < 1) throw domain_error("retrieval threshold must be >= 1");
    if (reads < 0) throw domain_error("read count must be >= 0");
    if (a - 1 > reads) return 1.0;
    if (reads == 0) return 1.0;
    const double x = static_cast<double>(a - 1) / static_cast<double>(reads);
    return std::exp2(-static_cast<double>(reads) * kl_divergence(x, p));
}

// Classical uniform-channel sandwich on the expected coverage depth:
//   ln(1/(1-R))  <=  E[K/n]  <=  (ln(1/(1-R)) + a ln ln n + 2 ln(a+1)) (1+2e).
// The O(1/n^2) correction on the lower side is dropped.
inline std::pair<BoundReport, BoundReport> uniform_sandwich(std::int64_t n, const CodePlan& plan,
                                                            double epsilon) {
    plan.validate();
    if (!(epsilon > 0.0)) throw domain_error("epsilon must be > 0");
    if (n < 3) throw domain_error("strand count must be >= 3 (ln ln n)");
    const double rate_ratio = plan.rate();
    if (!(rate_ratio > 0.0 && rate_ratio < 1.0)) throw domain_error("code rate must lie in (0,1)");

    const double lower_alpha = std::log(1.0 / (1.0 - rate_ratio));
    const double upper_alpha =
        (lower_alpha + static_cast<double>(plan.a) * std::log(std::log(static_cast<double>(n))) +
         2.0 * std::log(static_cast<double>(plan.a) + 1.0)) *
        (1.0 + 2.0 * epsilon);

    BoundReport lower;
    lower.kind = BoundKind::uniform_lower;
    lower.n = n;
    lower.m = plan.m;
    lower.a = plan.a;
    lower.alpha = lower_alpha;
    lower.k_reads = lower_alpha * static_cast<double>(n);

    BoundReport upper = lower;
    upper.kind = BoundKind::uniform_upper;
    upper.alpha = upper_alpha;
    upper.k_reads = upper_alpha * static_cast<double>(n);
    return {lower, upper};
}

}  // namespace covdepth
