#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "covdepth/errors.hpp"
#include "covdepth/rng.hpp"

namespace covdepth {

// Parameters of a log-normal law: ln X ~ Normal(mu, sigma^2).
// sigma = 0 is the degenerate point-mass limit and is allowed.
struct LogNormalParams {
    double mu = 0.0;
    double sigma = 0.0;

    void validate() const {
        if (!std::isfinite(mu) || !std::isfinite(sigma))
            throw domain_error("log-normal parameters must be finite");
        if (sigma < 0.0) throw domain_error("log-normal sigma must be >= 0");
    }
};

// E[X] for X ~ LN(mu, sigma^2).
inline double mean_p(const LogNormalParams& params) {
    params.validate();
    return std::exp(params.mu + 0.5 * params.sigma * params.sigma);
}

// E[1/X]. Always >= 1/E[X] (Jensen), equality iff sigma = 0.
inline double mean_inv_p(const LogNormalParams& params) {
    params.validate();
    return std::exp(-params.mu + 0.5 * params.sigma * params.sigma);
}

// Synthesis copy counts, per-strand amplification efficiencies, and the
// number of amplification cycles to apply.
struct PcrModel {
    std::vector<double> copies;        // c_i > 0, initial copy numbers
    std::vector<double> efficiencies;  // r_i > -1, per-cycle fractional gain
    int cycles = 0;

    std::int64_t strand_count() const { return static_cast<std::int64_t>(copies.size()); }

    void validate() const {
        if (copies.empty()) throw domain_error("PCR model needs at least one strand");
        if (copies.size() != efficiencies.size())
            throw domain_error("copies and efficiencies must have equal length");
        if (cycles < 0) throw domain_error("cycle count must be >= 0");
        for (double c : copies)
            if (!(c > 0.0) || !std::isfinite(c)) throw domain_error("copy numbers must be positive");
        for (double r : efficiencies)
            if (!(r > -1.0) || !std::isfinite(r)) throw domain_error("efficiencies must exceed -1");
    }
};

// Expected copy number of one strand after `cycles` rounds: c * (1+r)^t.
inline double expected_copy_number(double copies, double efficiency, int cycles) {
    if (!(copies > 0.0)) throw domain_error("copy number must be positive");
    if (!(efficiency > -1.0)) throw domain_error("efficiency must exceed -1");
    if (cycles < 0) throw domain_error("cycle count must be >= 0");
    const double v = copies * std::pow(1.0 + efficiency, static_cast<double>(cycles));
    if (!std::isfinite(v))
        throw overflow_error("copy number overflow after " + std::to_string(cycles) + " cycles");
    return v;
}

// Population share of every strand after amplification:
//   p_i = c_i (1+r_i)^t / sum_j c_j (1+r_j)^t.
// Evaluated in log space with max-subtraction, so large cycle counts never
// overflow; the result sums to 1 to within accumulation rounding.
inline std::vector<double> expected_proportions(const PcrModel& model) {
    model.validate();
    const std::size_t n = model.copies.size();
    std::vector<double> log_weight(n);
    for (std::size_t i = 0; i < n; ++i)
        log_weight[i] = std::log(model.copies[i]) +
                        static_cast<double>(model.cycles) * std::log1p(model.efficiencies[i]);
    const double top = *std::max_element(log_weight.begin(), log_weight.end());
    std::vector<double> p(n);
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::exp(log_weight[i] - top);
        total += p[i];
    }
    for (double& v : p) v = static_cast<double>(v / total);
    return p;
}

// Log-normal parameters whose analytic mean/variance equal the inputs.
inline LogNormalParams lognormal_from_moments(double mean, double variance) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw domain_error("mean must be positive");
    if (!(variance >= 0.0) || !std::isfinite(variance)) throw domain_error("variance must be >= 0");
    const double s2 = std::log1p(variance / (mean * mean));
    return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
}

// Per-read sampling law over the n designed strands. Three shapes:
//   uniform    — every strand equally likely,
//   lognormal  — strand shares treated as LN(mu, sigma^2) draws,
//   empirical  — an explicit probability vector.
class ChannelDistribution {
public:
    enum class Kind { uniform, lognormal, empirical };

    static ChannelDistribution uniform(std::int64_t n) {
        require_strands(n);
        ChannelDistribution ch;
        ch.kind_ = Kind::uniform;
        ch.n_ = n;
        return ch;
    }

    static ChannelDistribution lognormal(LogNormalParams params, std::int64_t n) {
        require_strands(n);
        params.validate();
        ChannelDistribution ch;
        ch.kind_ = Kind::lognormal;
        ch.n_ = n;
        ch.params_ = params;
        return ch;
    }

    static ChannelDistribution empirical(std::vector<double> probs) {
        require_strands(static_cast<std::int64_t>(probs.size()));
        long double total = 0.0L;
        for (double v : probs) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw domain_error("empirical probabilities must be >= 0");
            total += v;
        }
        if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9)
            throw domain_error("empirical probabilities must sum to 1 within 1e-9");
        ChannelDistribution ch;
        ch.kind_ = Kind::empirical;
        ch.n_ = static_cast<std::int64_t>(probs.size());
        ch.probs_ = std::move(probs);
        return ch;
    }

    Kind kind() const { return kind_; }
    std::int64_t strand_count() const { return n_; }

    const LogNormalParams& params() const {
        if (kind_ != Kind::lognormal) throw domain_error("channel has no log-normal parameters");
        return params_;
    }

    const std::vector<double>& probs() const {
        if (kind_ != Kind::empirical) throw domain_error("channel has no explicit probability vector");
        return probs_;
    }

private:
    static void require_strands(std::int64_t n) {
        if (n < 1) throw domain_error("strand count must be >= 1");
    }

    Kind kind_ = Kind::uniform;
    std::int64_t n_ = 1;
    LogNormalParams params_{};
    std::vector<double> probs_{};
};

// One realization of an n-strand channel: i.i.d. log-normal weights
// normalized to sum 1. The location parameter cancels in the normalization;
// only sigma shapes the result.
inline std::vector<double> sample_strand_probs(const LogNormalParams& params, std::int64_t n,
                                               SplitMix64& rng) {
    params.validate();
    if (n < 1) throw domain_error("strand count must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(n));
    long double total = 0.0L;
    for (double& v : w) {
        v = std::exp(params.mu + params.sigma * rng.next_normal());
        total += v;
    }
    for (double& v : w) v = static_cast<double>(v / total);
    return w;
}

inline ChannelDistribution sample_empirical_channel(const LogNormalParams& params, std::int64_t n,
                                                    SplitMix64& rng) {
    return ChannelDistribution::empirical(sample_strand_probs(params, n, rng));
}

// Log-normal channel implied by a PCR model: per-strand shares are computed
// exactly, their across-strand mean and population variance are matched to a
// log-normal law. n = 1 degenerates to sigma = 0 rather than erroring.
inline ChannelDistribution channel_from_pcr(const PcrModel& model) {
    const std::vector<double> p = expected_proportions(model);
    const std::size_t n = p.size();
    long double acc = 0.0L;
    for (double v : p) acc += v;
    const double mean = static_cast<double>(acc / n);
    long double sq = 0.0L;
    for (double v : p) sq += (v - mean) * static_cast<long double>(v - mean);
    const double variance = static_cast<double>(sq / n);
    return ChannelDistribution::lognormal(lognormal_from_moments(mean, variance),
                                          static_cast<std::int64_t>(n));
}

// Result of a maximum-likelihood log-normal fit.
struct FitReport {
    LogNormalParams params;
    std::int64_t n_samples = 0;
    double ks_statistic = 0.0;   // one-sample KS against the fitted normal, log domain
    double log_domain_mean = 0.0;
    double log_domain_var = 0.0;  // population variance (divide by n)
};

// MLE fit of a log-normal law: mean and population variance of the
// log-transformed sample.
inline FitReport mle_fit(const std::vector<double>& samples) {
    if (samples.size() < 2) throw insufficient_data_error("log-normal fit needs at least 2 samples");
    std::vector<double> logs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i] > 0.0) || !std::isfinite(samples[i]))
            throw domain_error("log-normal samples must be positive");
        logs[i] = std::log(samples[i]);
    }
    const std::size_t n = logs.size();
    long double acc = 0.0L;
    for (double v : logs) acc += v;
    const double mu = static_cast<double>(acc / n);
    long double sq = 0.0L;
    for (double v : logs) sq += (v - mu) * static_cast<long double>(v - mu);
    const double var = static_cast<double>(sq / n);
    const double sigma = std::sqrt(var);

    std::sort(logs.begin(), logs.end());
    double ks = 0.0;
    if (sigma > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double f = norm_cdf((logs[i] - mu) / sigma);
            ks = std::max(ks, std::max(f - static_cast<double>(i) / n,
                                       static_cast<double>(i + 1) / n - f));
        }
    }
    FitReport report;
    report.params = {mu, sigma};
    report.n_samples = static_cast<std::int64_t>(n);
    report.ks_statistic = ks;
    report.log_domain_mean = mu;
    report.log_domain_var = var;
    return report;
}

// Synthesis copy-count sampler. The synthesis law is an experimental choice;
// these cover the practical shapes. Draws are clamped to > 0 copies.
struct CopyCountSampler {
    enum class Kind { constant, lognormal, negative_binomial };

    Kind kind = Kind::lognormal;
    double value = 100.0;                   // constant
    double log_mean = 4.60517018598809137;  // lognormal: ln of median copies (default 100)
    double log_sigma = 0.5;
    double nb_successes = 10.0;             // negative binomial (failures before nb_successes)
    double nb_success_prob = 0.1;

    std::vector<double> sample(std::int64_t n, SplitMix64& rng) const;
};

// Amplification efficiencies drawn uniformly from [lo, hi].
struct EfficiencySampler {
    double lo = 0.80;
    double hi = 1.10;

    std::vector<double> sample(std::int64_t n, SplitMix64& rng) const {
        if (!(lo <= hi)) throw domain_error("efficiency bounds out of order");
        if (!(lo > -1.0)) throw domain_error("efficiency bound must exceed -1");
        std::vector<double> r(static_cast<std::size_t>(n));
        for (double& v : r) v = lo + (hi - lo) * rng.next_double();
        return r;
    }
};

namespace detail {

// Marsaglia-Tsang gamma draw (shape >= 1 via squeeze; shape < 1 boosted).
inline double gamma_draw(double shape, SplitMix64& rng) {
    if (shape < 1.0) {
        const double u = rng.next_double_open();
        return gamma_draw(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_double_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// Knuth's Poisson by exponential waiting times; fine for the modest means
// used for synthesis counts.
inline std::int64_t poisson_draw(double mean, SplitMix64& rng) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = 1.0;
    std::int64_t k = 0;
    for (;;) {
        prod *= rng.next_double_open();
        if (prod <= limit) return k;
        ++k;
    }
}

}  // namespace detail

inline std::vector<double> CopyCountSampler::sample(std::int64_t n, SplitMix64& rng) const {
    if (n < 1) throw domain_error("strand count must be >= 1");
    std::vector<double> c(static_cast<std::size_t>(n));
    switch (kind) {
        case Kind::constant:
            if (!(value > 0.0)) throw domain_error("constant copy count must be positive");
            std::fill(c.begin(), c.end(), value);
            break;
        case Kind::lognormal:
            if (!(log_sigma >= 0.0)) throw domain_error("copy log-sigma must be >= 0");
            for (double& v : c) v = std::exp(log_mean + log_sigma * rng.next_normal());
            break;
        case Kind::negative_binomial: {
            if (!(nb_successes > 0.0) || !(nb_success_prob > 0.0) || !(nb_success_prob < 1.0))
                throw domain_error("negative binomial needs successes > 0 and prob in (0,1)");
            // Gamma-Poisson mixture; zero draws clamp to one copy.
            const double scale = (1.0 - nb_success_prob) / nb_success_prob;
            for (double& v : c) {
                const double g = detail::gamma_draw(nb_successes, rng) * scale;
                v = static_cast<double>(std::max<std::int64_t>(1, detail::poisson_draw(g, rng)));
            }
            break;
        }
    }
    return c;
}

// Draw a full PCR model: synthesis counts and efficiencies from their
// samplers, with the given cycle count.
inline PcrModel sample_pcr_model(std::int64_t n, int cycles, const CopyCountSampler& copies,
                                 const EfficiencySampler& efficiencies, SplitMix64& rng) {
    PcrModel model;
    model.copies = copies.sample(n, rng);
    model.efficiencies = efficiencies.sample(n, rng);
    model.cycles = cycles;
    model.validate();
    return model;
}

}  // namespace covdepth
