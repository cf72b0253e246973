#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "covdepth/channel.hpp"
#include "covdepth/presets.hpp"

using namespace covdepth;
using Catch::Approx;

TEST_CASE("expected_copy_number follows the amplification recurrence") {
    CHECK(expected_copy_number(100.0, 1.0, 3) == Approx(800.0));
    CHECK(expected_copy_number(42.5, 0.9, 0) == Approx(42.5));
    // nu^(q) = nu^(q-1) (1+r), applied twice by hand: 1000 * 1.9 * 1.9
    CHECK(expected_copy_number(1000.0, 0.9, 2) == Approx(3610.0));

    CHECK_THROWS_AS(expected_copy_number(0.0, 0.5, 1), domain_error);
    CHECK_THROWS_AS(expected_copy_number(1.0, -1.0, 1), domain_error);
    CHECK_THROWS_AS(expected_copy_number(1.0, 0.5, -1), domain_error);
    CHECK_THROWS_AS(expected_copy_number(1.0, 1.0, 4000), overflow_error);
}

TEST_CASE("expected_proportions matches direct evaluation") {
    SECTION("symmetric strands stay symmetric") {
        const auto p = expected_proportions({{1.0, 1.0}, {1.0, 1.0}, 5});
        CHECK(p[0] == Approx(0.5).margin(1e-15));
        CHECK(p[1] == Approx(0.5).margin(1e-15));
    }
    SECTION("zero efficiency preserves the initial ratio") {
        const auto p = expected_proportions({{1.0, 3.0}, {0.0, 0.0}, 100});
        CHECK(p[0] == Approx(0.25).margin(1e-12));
        CHECK(p[1] == Approx(0.75).margin(1e-12));
    }
    SECTION("two strands, unequal efficiency") {
        // Direct power-form oracle, no log space: p1 = 2^10 / (2^10 + 1.8^10).
        const double w1 = std::pow(2.0, 10);
        const double w2 = std::pow(1.8, 10);
        const auto p = expected_proportions({{1.0, 1.0}, {1.0, 0.8}, 10});
        CHECK(p[0] == Approx(w1 / (w1 + w2)).epsilon(1e-12));
        CHECK(p[1] == Approx(w2 / (w1 + w2)).epsilon(1e-12));
        CHECK(p[0] / p[1] == Approx(std::pow(2.0 / 1.8, 10)).epsilon(1e-12));
    }
}

TEST_CASE("expected_proportions sums to one even at large cycle counts") {
    SplitMix64 rng(2024);
    for (int cycles : {0, 1, 7, 50, 200}) {
        PcrModel model;
        const int n = 1000;
        for (int i = 0; i < n; ++i) {
            model.copies.push_back(std::exp(4.0 + rng.next_normal()));
            model.efficiencies.push_back(0.8 + 0.3 * rng.next_double());
        }
        model.cycles = cycles;
        const auto p = expected_proportions(model);
        double total = 0.0;
        for (double v : p) {
            REQUIRE(v >= 0.0);
            total += v;
        }
        CHECK(total == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("lognormal_from_moments inverts the moment identities") {
    SECTION("standard log-normal") {
        const double e = std::exp(1.0);
        const auto params = lognormal_from_moments(std::exp(0.5), (e - 1.0) * e);
        CHECK(params.mu == Approx(0.0).margin(1e-12));
        CHECK(params.sigma == Approx(1.0).margin(1e-12));
    }
    SECTION("degenerate point mass") {
        const auto params = lognormal_from_moments(5.0, 0.0);
        CHECK(params.mu == Approx(std::log(5.0)));
        CHECK(params.sigma == 0.0);
    }
    SECTION("round-trip over a parameter grid") {
        for (double mu : {-10.0, -1.0, 0.0, 2.5}) {
            for (double sigma : {0.0, 0.2, 0.86, 1.38}) {
                const double mean = std::exp(mu + 0.5 * sigma * sigma);
                const double var = (std::exp(sigma * sigma) - 1.0) * std::exp(2.0 * mu + sigma * sigma);
                const auto params = lognormal_from_moments(mean, var);
                CHECK(params.mu == Approx(mu).margin(1e-10));
                CHECK(params.sigma == Approx(sigma).margin(1e-10));
            }
        }
    }
    CHECK_THROWS_AS(lognormal_from_moments(0.0, 1.0), domain_error);
    CHECK_THROWS_AS(lognormal_from_moments(-2.0, 1.0), domain_error);
}

TEST_CASE("channel_from_pcr matches hand-computed moments") {
    SECTION("identical strands collapse to the uniform limit") {
        PcrModel model{std::vector<double>(8, 1.0), std::vector<double>(8, 1.0), 30};
        const auto channel = channel_from_pcr(model);
        CHECK(channel.params().sigma == Approx(0.0).margin(1e-12));
        CHECK(mean_p(channel.params()) == Approx(1.0 / 8.0).epsilon(1e-12));
    }
    SECTION("two-point moment computation") {
        const double w1 = std::pow(2.0, 10);
        const double w2 = std::pow(1.8, 10);
        const double p1 = w1 / (w1 + w2);
        const double mean = 0.5;
        const double var = ((p1 - mean) * (p1 - mean) + (1.0 - p1 - mean) * (1.0 - p1 - mean)) / 2.0;
        const double s2 = std::log(1.0 + var / (mean * mean));
        const auto channel = channel_from_pcr({{1.0, 1.0}, {1.0, 0.8}, 10});
        CHECK(channel.params().mu == Approx(std::log(mean) - 0.5 * s2).margin(1e-12));
        CHECK(channel.params().sigma == Approx(std::sqrt(s2)).margin(1e-12));
        // The implied mean must reproduce the sample mean of the proportions.
        CHECK(mean_p(channel.params()) == Approx(mean).margin(1e-10));
    }
    SECTION("single strand degenerates without erroring") {
        const auto channel = channel_from_pcr({{7.0}, {0.9}, 12});
        CHECK(channel.params().sigma == 0.0);
    }
}

TEST_CASE("channel_from_pcr spread grows with the cycle count") {
    SplitMix64 rng(7);
    PcrModel model;
    const int n = 11520;
    CopyCountSampler copies;  // default log-normal synthesis skew
    EfficiencySampler eff;    // default [0.8, 1.1]
    model.copies = copies.sample(n, rng);
    model.efficiencies = eff.sample(n, rng);

    model.cycles = 10;
    const double sigma10 = channel_from_pcr(model).params().sigma;
    model.cycles = 60;
    const double sigma60 = channel_from_pcr(model).params().sigma;
    CHECK(sigma10 < sigma60);
}

TEST_CASE("channel_from_pcr is invariant under uniform scaling of copies") {
    SplitMix64 rng(11);
    PcrModel model;
    for (int i = 0; i < 500; ++i) {
        model.copies.push_back(std::exp(4.0 + 0.7 * rng.next_normal()));
        model.efficiencies.push_back(0.8 + 0.3 * rng.next_double());
    }
    model.cycles = 25;
    const auto base = channel_from_pcr(model).params();
    for (double scale : {1e-6, 3.7, 1e8}) {
        PcrModel scaled = model;
        for (double& c : scaled.copies) c *= scale;
        const auto params = channel_from_pcr(scaled).params();
        CHECK(params.mu == Approx(base.mu).margin(1e-10));
        CHECK(params.sigma == Approx(base.sigma).margin(1e-10));
    }
}

TEST_CASE("mle_fit computes log-domain moments") {
    SECTION("arithmetic on logs") {
        const double e = std::exp(1.0);
        const auto report = mle_fit({e, e * e, e * e * e});
        CHECK(report.params.mu == Approx(2.0).margin(1e-12));
        CHECK(report.log_domain_var == Approx(2.0 / 3.0).margin(1e-12));
    }
    SECTION("constant sample") {
        const auto report = mle_fit({4.2, 4.2, 4.2, 4.2});
        CHECK(report.params.sigma == 0.0);
        CHECK(report.params.mu == Approx(std::log(4.2)));
        CHECK(report.ks_statistic == 0.0);
    }
    SECTION("errors") {
        CHECK_THROWS_AS(mle_fit({1.0}), insufficient_data_error);
        CHECK_THROWS_AS(mle_fit({1.0, -1.0}), domain_error);
        CHECK_THROWS_AS(mle_fit({1.0, 0.0}), domain_error);
    }
}

TEST_CASE("mle_fit recovers generating parameters at depth") {
    const LogNormalParams truth{-9.71, 0.86};
    SplitMix64 rng(20240811);
    std::vector<double> draws(100000);
    for (double& v : draws) v = std::exp(truth.mu + truth.sigma * rng.next_normal());
    const auto report = mle_fit(draws);
    CHECK(report.params.mu == Approx(truth.mu).margin(0.01));
    CHECK(report.params.sigma == Approx(truth.sigma).margin(0.01));
    CHECK(report.ks_statistic < 0.01);
}

TEST_CASE("mle_fit error shrinks with sample size") {
    const LogNormalParams truth{-9.91, 0.98};
    double prev_err = 1e9;
    for (int n : {1000, 10000, 100000}) {
        SplitMix64 rng(99, static_cast<std::uint64_t>(n));
        std::vector<double> draws(static_cast<std::size_t>(n));
        for (double& v : draws) v = std::exp(truth.mu + truth.sigma * rng.next_normal());
        const auto report = mle_fit(draws);
        const double err =
            std::fabs(report.params.mu - truth.mu) + std::fabs(report.params.sigma - truth.sigma);
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("mean_p and mean_inv_p") {
    CHECK(mean_p({0.0, 0.0}) == 1.0);
    CHECK(mean_inv_p({0.0, 0.0}) == 1.0);
    // Direct evaluation of exp(9.72 + 0.74^2/2).
    CHECK(mean_inv_p({-9.72, 0.74}) == Approx(std::exp(9.72 + 0.5 * 0.74 * 0.74)).epsilon(1e-12));
    CHECK(mean_inv_p({-9.72, 0.74}) == Approx(2.189e4).epsilon(1e-3));

    SECTION("Jensen: E[1/p] >= 1/E[p], strict for sigma > 0") {
        for (double mu : {-9.7, -1.0, 0.3}) {
            for (double sigma : {0.0, 0.4, 1.38}) {
                const LogNormalParams params{mu, sigma};
                if (sigma == 0.0)
                    CHECK(mean_inv_p(params) == Approx(1.0 / mean_p(params)).epsilon(1e-12));
                else
                    CHECK(mean_inv_p(params) > 1.0 / mean_p(params));
            }
        }
    }
}

TEST_CASE("channel distribution validation") {
    CHECK_THROWS_AS(ChannelDistribution::uniform(0), domain_error);
    CHECK_THROWS_AS(ChannelDistribution::empirical({0.5, 0.4}), domain_error);
    CHECK_THROWS_AS(ChannelDistribution::empirical({0.5, -0.1, 0.6}), domain_error);
    CHECK_THROWS_AS(ChannelDistribution::lognormal({0.0, -1.0}, 4), domain_error);
    CHECK_NOTHROW(ChannelDistribution::lognormal({0.0, 0.0}, 4));  // uniform limit

    const auto ch = ChannelDistribution::empirical({0.25, 0.25, 0.5});
    CHECK(ch.strand_count() == 3);
    CHECK_THROWS_AS(ch.params(), domain_error);
}

TEST_CASE("sampled strand probabilities are a normalized channel") {
    SplitMix64 rng(5);
    const auto p = sample_strand_probs({-9.71, 0.86}, 4096, rng);
    double total = 0.0;
    for (double v : p) {
        REQUIRE(v > 0.0);
        total += v;
    }
    CHECK(total == Approx(1.0).margin(1e-12));
    CHECK_NOTHROW(ChannelDistribution::empirical(p));
}

TEST_CASE("copy-count samplers produce valid synthesis amounts") {
    SplitMix64 rng(31);
    CopyCountSampler sampler;

    sampler.kind = CopyCountSampler::Kind::constant;
    sampler.value = 17.0;
    for (double c : sampler.sample(64, rng)) CHECK(c == 17.0);

    sampler.kind = CopyCountSampler::Kind::lognormal;
    for (double c : sampler.sample(64, rng)) CHECK(c > 0.0);

    sampler.kind = CopyCountSampler::Kind::negative_binomial;
    for (double c : sampler.sample(64, rng)) {
        CHECK(c >= 1.0);
        CHECK(c == std::floor(c));
    }

    EfficiencySampler eff;
    for (double r : eff.sample(256, rng)) {
        CHECK(r >= 0.80);
        CHECK(r <= 1.10);
    }
}

TEST_CASE("presets carry the fitted parameter table") {
    REQUIRE(preset_params("pcr10-sample").has_value());
    CHECK(preset_params("pcr10-sample")->mu == -9.71);
    CHECK(preset_params("pcr10-sample")->sigma == 0.86);
    CHECK(preset_params("pcr10-pop")->mu == -9.72);
    CHECK(preset_params("pcr10-pop")->sigma == 0.74);
    CHECK(preset_params("pcr30-sample")->mu == -9.91);
    CHECK(preset_params("pcr30-sample")->sigma == 0.98);
    CHECK(preset_params("pcr30-pop")->mu == -9.86);
    CHECK(preset_params("pcr30-pop")->sigma == 0.96);
    CHECK(preset_params("pcr60-sample")->mu == -10.38);
    CHECK(preset_params("pcr60-sample")->sigma == 1.11);
    CHECK(preset_params("pcr60-pop")->mu == -10.25);
    CHECK(preset_params("pcr60-pop")->sigma == 1.38);
    CHECK(!preset_params("pcr90-sample").has_value());
}
