#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "covdepth/analytic.hpp"
#include "covdepth/channel.hpp"
#include "covdepth/errors.hpp"
#include "covdepth/rng.hpp"

namespace covdepth {

// O(1) categorical sampling (Vose alias construction).
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& probs) { build(probs); }

    std::size_t sample(SplitMix64& rng) const {
        const std::size_t slot = static_cast<std::size_t>(rng.next_below(accept_.size()));
        return rng.next_double() < accept_[slot] ? slot : alias_[slot];
    }

    std::size_t size() const { return accept_.size(); }

private:
    void build(const std::vector<double>& probs) {
        const std::size_t n = probs.size();
        if (n == 0) throw domain_error("alias table needs at least one probability");
        accept_.assign(n, 1.0);
        alias_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::uint32_t> small, large;
        small.reserve(n);
        large.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = probs[i] * static_cast<double>(n);
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            const std::uint32_t l = large.back();
            small.pop_back();
            accept_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        // Leftovers keep accept = 1 (self-aliasing), absorbing rounding.
    }

    std::vector<double> accept_;
    std::vector<std::uint32_t> alias_;
};

// Uniform fast path or alias table, behind one sampling call.
class CategoricalSampler {
public:
    static CategoricalSampler uniform(std::int64_t n) {
        CategoricalSampler s;
        s.n_ = static_cast<std::size_t>(n);
        return s;
    }

    static CategoricalSampler weighted(const std::vector<double>& probs) {
        CategoricalSampler s;
        s.n_ = probs.size();
        s.alias_.emplace(probs);
        return s;
    }

    std::size_t sample(SplitMix64& rng) const {
        return alias_ ? alias_->sample(rng) : static_cast<std::size_t>(rng.next_below(n_));
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_ = 0;
    std::optional<AliasTable> alias_;
};

// Simulation configuration. Trials derive independent random sub-streams
// from (seed, trial index), so results do not depend on execution order or
// the number of worker threads.
struct McConfig {
    ChannelDistribution channel = ChannelDistribution::uniform(1);
    CodePlan plan{};
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    // Redraw the strand probabilities per trial (log-normal channels only;
    // models run-to-run synthesis/amplification randomness).
    bool resample_p_per_trial = true;
    std::int64_t max_reads_cap = 0;  // 0 = 1000 * n * a
    int threads = 0;                 // 0 = hardware concurrency

    std::int64_t effective_cap() const {
        return max_reads_cap > 0 ? max_reads_cap : 1000 * plan.n * plan.a;
    }

    void validate() const {
        plan.validate();
        if (plan.n != channel.strand_count()) throw domain_error("plan and channel strand counts differ");
        if (trials < 1) throw domain_error("trial count must be >= 1");
        if (effective_cap() < plan.n * plan.a)
            throw domain_error("read cap must be at least n * a");
    }
};

// Aggregated per-trial minimum read counts.
struct McResult {
    std::vector<std::int64_t> k_samples;  // completed trials, in trial order
    double mean = 0.0;
    double std_err = 0.0;
    std::int64_t max = 0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
    std::int64_t trials = 0;
    std::int64_t censored_count = 0;
};

// Draw reads until m strands hold at least a reads each; the returned value
// is the first read count at which that happens, or nullopt once the cap is
// hit. `counts` is caller-provided workspace of size n (any contents).
inline std::optional<std::int64_t> run_trial(const CategoricalSampler& sampler,
                                             const CodePlan& plan, std::int64_t cap,
                                             SplitMix64& rng, std::vector<std::int32_t>& counts) {
    counts.assign(sampler.size(), 0);
    std::int64_t collected = 0;
    const std::int32_t need = static_cast<std::int32_t>(plan.a);
    for (std::int64_t k = 1; k <= cap; ++k) {
        auto& c = counts[sampler.sample(rng)];
        if (c < need && ++c == need && ++collected == plan.m) return k;
    }
    return std::nullopt;
}

// Convenience overload building the alias table from a probability vector.
inline std::optional<std::int64_t> run_trial(const std::vector<double>& probs, const CodePlan& plan,
                                             SplitMix64& rng, std::int64_t cap = 0) {
    plan.validate();
    if (static_cast<std::int64_t>(probs.size()) != plan.n)
        throw domain_error("plan and probability vector sizes differ");
    const auto sampler = CategoricalSampler::weighted(probs);
    std::vector<std::int32_t> counts;
    if (cap <= 0) cap = 1000 * plan.n * plan.a;
    return run_trial(sampler, plan, cap, rng, counts);
}

namespace detail {

// Stream tag for the shared channel draw, far outside any trial index.
inline constexpr std::uint64_t kChannelStream = 0x636f766368616e6eull;

// Runs `fn(trial_rng, sampler)` for every trial with deterministic
// per-trial sub-streams, writing fn's int64 result into slot [trial].
template <typename Fn>
inline std::vector<std::int64_t> for_each_trial(const McConfig& config, Fn&& fn) {
    config.validate();
    const std::int64_t trials = config.trials;
    std::vector<std::int64_t> results(static_cast<std::size_t>(trials), 0);

    const bool redraw = config.resample_p_per_trial &&
                        config.channel.kind() == ChannelDistribution::Kind::lognormal;

    // Fixed sampler for everything except per-trial redraw mode.
    std::optional<CategoricalSampler> fixed;
    if (!redraw) {
        switch (config.channel.kind()) {
            case ChannelDistribution::Kind::uniform:
                fixed = CategoricalSampler::uniform(config.plan.n);
                break;
            case ChannelDistribution::Kind::empirical:
                fixed = CategoricalSampler::weighted(config.channel.probs());
                break;
            case ChannelDistribution::Kind::lognormal: {
                SplitMix64 channel_rng(config.seed, kChannelStream);
                fixed = CategoricalSampler::weighted(
                    sample_strand_probs(config.channel.params(), config.plan.n, channel_rng));
                break;
            }
        }
    }

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<std::int64_t>(threads, trials));

    const auto worker = [&](int id) {
        for (std::int64_t t = id; t < trials; t += threads) {
            SplitMix64 rng(config.seed, static_cast<std::uint64_t>(t));
            if (redraw) {
                const auto sampler = CategoricalSampler::weighted(
                    sample_strand_probs(config.channel.params(), config.plan.n, rng));
                results[static_cast<std::size_t>(t)] = fn(rng, sampler);
            } else {
                results[static_cast<std::size_t>(t)] = fn(rng, *fixed);
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int id = 0; id < threads; ++id) pool.emplace_back(worker, id);
        for (auto& th : pool) th.join();
    }
    return results;
}

inline double quantile_sorted(const std::vector<std::int64_t>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return static_cast<double>(sorted.back());
    const double frac = h - static_cast<double>(lo);
    return static_cast<double>(sorted[lo]) +
           frac * static_cast<double>(sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

// Full experiment: per-trial minimum read counts plus summary statistics.
// Censored trials (cap hit) are counted and excluded from the aggregates.
inline McResult run_experiment(const McConfig& config) {
    const std::int64_t cap = config.effective_cap();
    thread_local std::vector<std::int32_t> counts;
    const auto raw = detail::for_each_trial(config, [&](SplitMix64& rng, const CategoricalSampler& s) {
        return run_trial(s, config.plan, cap, rng, counts).value_or(-1);
    });

    McResult result;
    result.trials = config.trials;
    result.k_samples.reserve(raw.size());
    for (std::int64_t k : raw) {
        if (k < 0)
            ++result.censored_count;
        else
            result.k_samples.push_back(k);
    }
    if (result.k_samples.empty())
        throw degenerate_result_error("every trial hit the read cap");

    const std::size_t n = result.k_samples.size();
    long double acc = 0.0L;
    for (std::int64_t k : result.k_samples) acc += k;
    result.mean = static_cast<double>(acc / static_cast<long double>(n));
    if (n > 1) {
        long double sq = 0.0L;
        for (std::int64_t k : result.k_samples) {
            const long double d = static_cast<long double>(k) - result.mean;
            sq += d * d;
        }
        result.std_err = std::sqrt(static_cast<double>(sq / static_cast<long double>(n - 1)) /
                                   static_cast<double>(n));
    }
    std::vector<std::int64_t> sorted = result.k_samples;
    std::sort(sorted.begin(), sorted.end());
    result.max = sorted.back();
    result.q05 = detail::quantile_sorted(sorted, 0.05);
    result.q50 = detail::quantile_sorted(sorted, 0.50);
    result.q95 = detail::quantile_sorted(sorted, 0.95);
    return result;
}

// Number of strands holding at least `plan.a` reads after exactly `reads`
// draws, one entry per trial.
inline std::vector<std::int64_t> recovered_counts_at(const McConfig& config, std::int64_t reads) {
    if (reads < 0) throw domain_error("read count must be >= 0");
    thread_local std::vector<std::int32_t> counts;
    return detail::for_each_trial(config, [&](SplitMix64& rng, const CategoricalSampler& s) {
        counts.assign(s.size(), 0);
        std::int64_t collected = 0;
        const std::int32_t need = static_cast<std::int32_t>(config.plan.a);
        for (std::int64_t k = 0; k < reads; ++k) {
            auto& c = counts[s.sample(rng)];
            if (c < need && ++c == need) ++collected;
        }
        return collected;
    });
}

// Estimated probability that a single run of exactly `reads` draws decodes
// everything (>= m strands reach the threshold), with its binomial
// standard error.
struct SuccessEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::int64_t successes = 0;
    std::int64_t trials = 0;
};

inline SuccessEstimate success_probability_at(std::int64_t reads, const McConfig& config) {
    const auto counts = recovered_counts_at(config, reads);
    SuccessEstimate est;
    est.trials = static_cast<std::int64_t>(counts.size());
    for (std::int64_t c : counts)
        if (c >= config.plan.m) ++est.successes;
    est.p_hat = static_cast<double>(est.successes) / static_cast<double>(est.trials);
    est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(est.trials));
    return est;
}

}  // namespace covdepth
