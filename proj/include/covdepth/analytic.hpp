#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "covdepth/channel.hpp"
#include "covdepth/errors.hpp"

namespace covdepth {

// [n, m] MDS plan plus the per-strand retrieval threshold a: any m of the
// n encoded strands rebuild the data, one strand needs >= a reads.
struct CodePlan {
    std::int64_t n = 1;
    std::int64_t m = 1;
    std::int64_t a = 1;

    double rate() const { return static_cast<double>(m) / static_cast<double>(n); }

    void validate() const {
        if (n < 1) throw domain_error("encoded strand count must be >= 1");
        if (m < 1 || m > n) throw domain_error("information strand count must satisfy 1 <= m <= n");
        if (a < 1) throw domain_error("retrieval threshold must be >= 1");
    }
};

// First two moments of the number of distinct strands recovered from a
// fixed read budget.
struct RecoveredDistribution {
    double mean = 0.0;
    double variance = 0.0;
    std::int64_t reads = 0;
    std::int64_t strand_count = 0;
};

namespace detail {

// (1-p)^k without cancellation; k = 0 returns 1 even at p = 1.
inline double pow_one_minus(double p, std::int64_t k) {
    if (k == 0) return 1.0;
    if (p >= 1.0) return 0.0;
    return std::exp(static_cast<double>(k) * std::log1p(-p));
}

// Channel collapsed to (probability, multiplicity) pairs.
struct RateGroup {
    double p;
    std::int64_t count;
};

inline std::vector<RateGroup> channel_rates(const ChannelDistribution& ch) {
    switch (ch.kind()) {
        case ChannelDistribution::Kind::uniform:
            return {{1.0 / static_cast<double>(ch.strand_count()), ch.strand_count()}};
        case ChannelDistribution::Kind::lognormal:
            // Collapsed to the common mean rate; per-strand structure needs an
            // empirical realization (sample_empirical_channel).
            return {{mean_p(ch.params()), ch.strand_count()}};
        case ChannelDistribution::Kind::empirical: {
            std::vector<RateGroup> groups;
            groups.reserve(ch.probs().size());
            for (double p : ch.probs()) groups.push_back({p, 1});
            return groups;
        }
    }
    throw domain_error("unknown channel kind");
}

}  // namespace detail

// Mean and variance of the recovered-strand count after `reads` draws.
// The mean uses the exponential form 1 - exp(-K p); `exact` switches it to
// 1 - (1-p)^K. A lognormal channel is evaluated at its common mean rate.
inline RecoveredDistribution recovered_distribution(std::int64_t reads,
                                                    const ChannelDistribution& channel,
                                                    bool exact = false) {
    if (reads < 0) throw domain_error("read count must be >= 0");
    const double k = static_cast<double>(reads);
    long double mean = 0.0L, var_sum = 0.0L, weighted = 0.0L;
    for (const auto& g : detail::channel_rates(channel)) {
        if (exact && g.p > 1.0) throw domain_error("per-strand probability exceeds 1");
        const double e1 = std::exp(-k * g.p);
        const double e2 = e1 * e1;
        const double miss = exact ? detail::pow_one_minus(g.p, reads) : e1;
        const long double c = static_cast<long double>(g.count);
        mean += c * (1.0 - miss);
        var_sum += c * (e1 - e2);
        weighted += c * (g.p * e1);
    }
    RecoveredDistribution out;
    out.mean = static_cast<double>(mean);
    out.variance = static_cast<double>(var_sum - k * weighted * weighted);
    out.reads = reads;
    out.strand_count = channel.strand_count();
    return out;
}

// Closed forms for the uniform channel at coverage depth alpha = K/n:
//   mean = n (1 - e^-a), variance = n (e^-a - e^-2a - a e^-2a).
inline RecoveredDistribution recovered_distribution_uniform(double alpha, std::int64_t n) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw domain_error("coverage depth must be finite and >= 0");
    if (n < 1) throw domain_error("strand count must be >= 1");
    const double e1 = std::exp(-alpha);
    const double e2 = e1 * e1;
    RecoveredDistribution out;
    out.mean = static_cast<double>(n) * (1.0 - e1);
    out.variance = static_cast<double>(n) * (e1 - e2 - alpha * e2);
    out.reads = static_cast<std::int64_t>(std::llround(alpha * static_cast<double>(n)));
    out.strand_count = n;
    return out;
}

// Outcome of the minimal-read search: the smallest K whose expected
// recovered count reaches the target, with the coverage depth and the
// implied MDS length trade-off n*m/E[N] at that K.
struct MinReadsResult {
    std::int64_t reads = 0;
    double alpha = 0.0;
    double expected_recovered = 0.0;
    double implied_code_length = 0.0;
};

// Smallest integer K with recovered mean >= target_m. Exponential
// bracketing plus integer bisection over the monotone mean.
inline MinReadsResult invert_min_reads(const ChannelDistribution& channel, std::int64_t target_m,
                                       bool exact = false) {
    const std::int64_t n = channel.strand_count();
    if (target_m < 0) throw domain_error("target must be >= 0");

    std::int64_t positive = n;
    bool has_unit_prob = false;
    if (channel.kind() == ChannelDistribution::Kind::empirical) {
        positive = 0;
        for (double p : channel.probs()) {
            if (p > 0.0) ++positive;
            if (p >= 1.0) has_unit_prob = true;
        }
    }
    if (target_m > positive)
        throw infeasible_error("target exceeds the number of strands with positive probability");
    if (target_m == positive && !(exact && has_unit_prob))
        throw unreachable_target_error(
            "expected recovered count stays below the target at every finite read count");

    const auto mean_at = [&](std::int64_t k) { return recovered_distribution(k, channel, exact).mean; };

    MinReadsResult out;
    out.reads = 0;
    if (target_m > 0) {
        std::int64_t hi = 1;
        while (mean_at(hi) < static_cast<double>(target_m)) {
            hi *= 2;
            if (hi > (std::int64_t{1} << 60))
                throw unreachable_target_error("read target not reached while bracketing");
        }
        std::int64_t lo = hi / 2;  // mean(lo) < m <= mean(hi), with mean(0) = 0
        while (lo + 1 < hi) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            (mean_at(mid) < static_cast<double>(target_m) ? lo : hi) = mid;
        }
        out.reads = hi;
    }
    out.alpha = static_cast<double>(out.reads) / static_cast<double>(n);
    out.expected_recovered = mean_at(out.reads);
    out.implied_code_length = out.expected_recovered > 0.0
                                  ? static_cast<double>(n) * static_cast<double>(target_m) /
                                        out.expected_recovered
                                  : 0.0;
    return out;
}

// Plan-based overload; the noiseless inversion is defined at threshold 1.
inline MinReadsResult invert_min_reads(const ChannelDistribution& channel, const CodePlan& plan,
                                       bool exact = false) {
    plan.validate();
    if (plan.a != 1) throw domain_error("noiseless inversion requires threshold a = 1");
    if (plan.n != channel.strand_count()) throw domain_error("plan and channel strand counts differ");
    return invert_min_reads(channel, plan.m, exact);
}

// Per-strand variance profile at read budget K for a channel at its common
// mean rate E = mean_p(params):
//   f(K) = e^{-KE} - e^{-2KE} - (n/K) (KE)^2 e^{-2KE}.
inline double variance_profile(double reads, const LogNormalParams& params, std::int64_t n) {
    if (!(reads > 0.0)) throw domain_error("read count must be > 0");
    if (n < 1) throw domain_error("strand count must be >= 1");
    const double rate = mean_p(params);
    const double x = reads * rate;
    const double e2 = std::exp(-2.0 * x);
    return std::exp(-x) - e2 - static_cast<double>(n) * reads * rate * rate * e2;
}

// d f / d K, in closed form.
inline double variance_profile_derivative(double reads, const LogNormalParams& params,
                                          std::int64_t n) {
    if (!(reads > 0.0)) throw domain_error("read count must be > 0");
    if (n < 1) throw domain_error("strand count must be >= 1");
    const double rate = mean_p(params);
    const double x = reads * rate;
    const double e2 = std::exp(-2.0 * x);
    return -rate * std::exp(-x) + 2.0 * rate * e2 -
           static_cast<double>(n) * rate * rate * (1.0 - 2.0 * x) * e2;
}

// Read count at the profile's single local maximum. In x = K*E units the
// derivative's sign matches G(x) = -e^x + (2 - s) + 2 s x with s = n*E;
// G rises to one maximum and then falls, so the peak is the unique
// downward crossing, bracketed and bisected there. (For s > 1 the profile
// also has a tiny dip near K = 0 — an artifact of the normal
// approximation — which is a local minimum, not a peak.)
inline double variance_peak(const LogNormalParams& params, std::int64_t n) {
    if (n < 1) throw domain_error("strand count must be >= 1");
    const double rate = mean_p(params);
    const double s = static_cast<double>(n) * rate;
    const auto g = [&](double x) { return -std::exp(x) + (2.0 - s) + 2.0 * s * x; };

    const double x_top = std::max(std::log(2.0 * s), 0.0);
    if (!(g(x_top) > 0.0))
        throw no_peak_error("variance profile derivative never becomes positive");

    double lo = x_top, hi = std::max(2.0 * x_top, 1.0);
    while (g(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw no_peak_error("no sign change found while bracketing the peak");
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) / rate;
}

// Expected draws to see m distinct strands of n equally likely ones:
// n (H_n - H_{n-m}), harmonic numbers summed directly.
inline double coupon_expectation_exact(std::int64_t n, std::int64_t m) {
    if (n < 1) throw domain_error("strand count must be >= 1");
    if (m < 1 || m > n) throw domain_error("target must satisfy 1 <= m <= n");
    if (n > 1000000) throw size_error("harmonic summation capped at n = 1e6");
    long double acc = 0.0L;  // H_n - H_{n-m} = sum_{k=n-m+1..n} 1/k, small terms first
    for (std::int64_t k = n; k > n - m; --k) acc += 1.0L / static_cast<long double>(k);
    return static_cast<double>(static_cast<long double>(n) * acc);
}

// Leading terms of the threshold-a collection time for n = m:
// m ln m + m (a-1) ln ln m. The additive m*C_a term has no published
// closed form and is omitted, so this systematically undershoots.
inline double dixie_asymptotic(std::int64_t m, std::int64_t a) {
    if (m < 3) throw domain_error("asymptotic needs m >= 3");
    if (a < 1) throw domain_error("retrieval threshold must be >= 1");
    const double md = static_cast<double>(m);
    return md * std::log(md) + md * static_cast<double>(a - 1) * std::log(std::log(md));
}

// ---------------------------------------------------------------------------
// General-channel expected read count at threshold a (Poissonized survival
// integral). With unit-rate Poisson arrivals, strand i has collected < a
// reads at time r with probability
//   A_i(r) = e^{-p_i r} * sum_{j<a} (p_i r)^j / j!,
// and E[draws] = integral over r of P[fewer than m strands collected].
// The coefficient-of-v^q extraction is a degree-capped sequential product;
// since sum p_i = 1 the e^{-r} weight cancels into the factors exactly.
// ---------------------------------------------------------------------------

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::int64_t max_strands = 500;
    int max_depth = 48;
    double tail_cutoff = 1e-12;  // stop once the survival mass drops below this
};

namespace detail {

// P[Poisson(x) <= k], switching to log-space summation when the direct
// product would underflow.
inline double poisson_cdf(std::int64_t k, double x) {
    if (x <= 0.0) return 1.0;
    if (k < 0) return 0.0;
    const double kd = static_cast<double>(k);
    if (x < 650.0 && kd * std::log(std::max(x, 1.0)) < 600.0) {
        double term = std::exp(-x);
        double sum = term;
        for (std::int64_t j = 1; j <= k; ++j) {
            term *= x / static_cast<double>(j);
            sum += term;
        }
        return std::min(sum, 1.0);
    }
    double top = -x;  // j = 0 term
    for (std::int64_t j = 1; j <= k; ++j)
        top = std::max(top, static_cast<double>(j) * std::log(x) - std::lgamma(static_cast<double>(j) + 1.0) - x);
    long double sum = 0.0L;
    for (std::int64_t j = 0; j <= k; ++j)
        sum += std::exp(static_cast<double>(j) * std::log(x) -
                        std::lgamma(static_cast<double>(j) + 1.0) - x - top);
    const double v = std::exp(top) * static_cast<double>(sum);
    return std::min(v, 1.0);
}

// P[fewer than m strands have >= a reads] at Poisson time r.
inline double collection_survival(double r, const std::vector<double>& probs, std::int64_t m,
                                  std::int64_t a, std::vector<double>& coeff) {
    const std::size_t cap = static_cast<std::size_t>(m);  // coefficients v^0..v^{m-1}
    coeff.assign(cap, 0.0);
    coeff[0] = 1.0;
    std::size_t degree = 0;
    for (double p : probs) {
        const double miss = poisson_cdf(a - 1, p * r);
        const double hit = 1.0 - miss;
        const std::size_t upper = std::min(degree + 1, cap - 1);
        for (std::size_t q = upper; q >= 1; --q) coeff[q] = miss * coeff[q] + hit * coeff[q - 1];
        coeff[0] *= miss;
        degree = upper;
    }
    long double total = 0.0L;
    for (double c : coeff) total += c;
    return std::min(static_cast<double>(total), 1.0);
}

struct SimpsonState {
    std::function<double(double)> f;
    double tol = 1e-12;
    int max_depth = 48;
    long double error_acc = 0.0L;
    bool converged = true;

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol_here,
                   int depth) {
        const double mid = 0.5 * (a + b);
        const double flm = f(0.5 * (a + mid));
        const double frm = f(0.5 * (mid + b));
        const double h = b - a;
        const double left = h / 12.0 * (fa + 4.0 * flm + fm);
        const double right = h / 12.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth <= 0) {
            converged = false;
            error_acc += std::fabs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (std::fabs(delta) <= 15.0 * tol_here) {
            error_acc += std::fabs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return recurse(a, mid, fa, flm, fm, left, 0.5 * tol_here, depth - 1) +
               recurse(mid, b, fm, frm, fb, right, 0.5 * tol_here, depth - 1);
    }

    double integrate(double a, double b, double tol_here) {
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return recurse(a, b, fa, fm, fb, whole, tol_here, max_depth);
    }
};

}  // namespace detail

// E[minimum reads] for an explicit probability vector under an [n, m] plan
// with threshold a. Exact in expectation; the only error is quadrature
// error, which is tracked and raised as accuracy_error on failure.
inline double expected_reads_general(const std::vector<double>& probs, const CodePlan& plan,
                                     const QuadratureOptions& opt = {}) {
    plan.validate();
    if (static_cast<std::int64_t>(probs.size()) != plan.n)
        throw domain_error("plan and probability vector sizes differ");
    if (plan.n > opt.max_strands)
        throw size_error("strand count exceeds the quadrature cap of " +
                         std::to_string(opt.max_strands));
    long double total = 0.0L;
    for (double p : probs) {
        if (!(p > 0.0)) throw domain_error("probabilities must be positive");
        total += p;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9)
        throw domain_error("probabilities must sum to 1 within 1e-9");

    std::vector<double> coeff;
    const auto survival = [&](double r) {
        return detail::collection_survival(r, probs, plan.m, plan.a, coeff);
    };
    const auto miss_mass = [&](double r) {
        long double acc = 0.0L;
        for (double p : probs) acc += detail::poisson_cdf(plan.a - 1, p * r);
        return static_cast<double>(acc);
    };

    // Upper limit: survival <= sum of per-strand miss probabilities (Markov).
    double r_max = 1.0;
    while (miss_mass(r_max) >= opt.tail_cutoff) {
        r_max *= 2.0;
        if (r_max > 1e18)
            throw accuracy_error("survival mass failed to decay", 0.0,
                                 std::numeric_limits<double>::infinity());
    }

    // Coarse pass to scale the absolute tolerance, then the adaptive pass.
    double coarse = 0.0;
    {
        const int panels = 64;
        const double h = r_max / panels;
        double prev = survival(0.0);
        for (int i = 1; i <= panels; ++i) {
            const double cur = survival(h * static_cast<double>(i));
            coarse += 0.5 * h * (prev + cur);
            prev = cur;
        }
    }
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::max(coarse, 1.0));

    detail::SimpsonState quad;
    quad.f = survival;
    quad.max_depth = opt.max_depth;
    double estimate = quad.integrate(0.0, r_max, tol);

    // Geometric tail extension until panels stop contributing.
    double lo = r_max;
    for (int i = 0; i < 64; ++i) {
        const double hi = 2.0 * lo;
        const double piece = quad.integrate(lo, hi, tol);
        estimate += piece;
        lo = hi;
        if (std::fabs(piece) < 0.25 * tol) break;
    }

    const double achieved = static_cast<double>(quad.error_acc);
    if (!quad.converged && achieved > std::max(opt.abs_tol, opt.rel_tol * std::fabs(estimate)))
        throw accuracy_error("quadrature did not converge", estimate, achieved);
    return estimate;
}

inline double expected_reads_general(const ChannelDistribution& channel, const CodePlan& plan,
                                     const QuadratureOptions& opt = {}) {
    if (channel.kind() == ChannelDistribution::Kind::uniform) {
        std::vector<double> p(static_cast<std::size_t>(channel.strand_count()),
                              1.0 / static_cast<double>(channel.strand_count()));
        return expected_reads_general(p, plan, opt);
    }
    if (channel.kind() == ChannelDistribution::Kind::empirical)
        return expected_reads_general(channel.probs(), plan, opt);
    throw domain_error("general read expectation needs an explicit probability vector");
}

}  // namespace covdepth
