// covdepth -- planning and verification tool for sequencing coverage depth
// in DNA storage pools. Subcommands: fit, depth-curve, variance-profile,
// bounds, simulate, expect, channel-from-pcr.
//
// Exit codes: 0 success, 2 input/domain error, 3 degenerate result.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "covdepth/covdepth.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (const auto& f : flags) {
        if (!out.empty()) out += "; ";
        out += f;
    }
    return out;
}

struct GlobalOpts {
    std::string format = "csv";
    std::string output;
    std::optional<std::uint64_t> seed;
    std::string preset;
    int threads = 0;
};

void emit(const GlobalOpts& opts, const std::string& content) {
    if (opts.output.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream out(opts.output, std::ios::binary);
    if (!out) throw covdepth::error("cannot open output file '" + opts.output + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::uint64_t require_seed(const GlobalOpts& opts) {
    if (!opts.seed) throw covdepth::domain_error("--seed is required for stochastic output");
    return *opts.seed;
}

covdepth::LogNormalParams params_from(const GlobalOpts& opts, std::optional<double> mu,
                                      std::optional<double> sigma) {
    if (!opts.preset.empty()) {
        if (mu || sigma)
            throw covdepth::domain_error("give either --preset or --mu/--sigma, not both");
        if (opts.preset == "uniform")
            throw covdepth::domain_error("the uniform preset has no log-normal parameters");
        const auto params = covdepth::preset_params(opts.preset);
        if (!params)
            throw covdepth::domain_error("unknown preset '" + opts.preset + "' (expected one of " +
                                         covdepth::preset_names_joined() + ", uniform)");
        return *params;
    }
    if (!mu || !sigma) throw covdepth::domain_error("need --preset or both --mu and --sigma");
    return {*mu, *sigma};
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || !(step > 0.0))
        throw covdepth::domain_error("grid must be MIN:MAX:STEP with STEP > 0");
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
    return grid;
}

covdepth::TableFormat sniff_format(const std::string& path, const std::string& forced) {
    if (forced == "tsv") return covdepth::TableFormat::tsv;
    if (forced == "csv") return covdepth::TableFormat::csv;
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return covdepth::TableFormat::csv;
    return covdepth::TableFormat::tsv;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string input_format = "auto";
    bool drop_zeros = false;
    std::string qq_out;
};

void run_fit(const GlobalOpts& opts, const FitArgs& args, bool format_given) {
    const auto table =
        covdepth::parse_read_counts_file(args.input, sniff_format(args.input, args.input_format));
    const auto report = covdepth::fit_channel(table, args.drop_zeros);

    if (!args.qq_out.empty()) {
        const auto points = covdepth::qq_points(table);
        std::ostringstream qq;
        qq << "theoretical,empirical\n";
        for (const auto& pt : points) qq << fmt(pt.theoretical) << ',' << fmt(pt.empirical) << '\n';
        std::ofstream out(args.qq_out, std::ios::binary);
        if (!out) throw covdepth::error("cannot open output file '" + args.qq_out + "'");
        const std::string text = qq.str();
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }

    std::ostringstream os;
    if (opts.format == "json") {
        json j;
        j["mu"] = report.fit.params.mu;
        j["sigma"] = report.fit.params.sigma;
        j["n_samples"] = report.fit.n_samples;
        j["ks_statistic"] = report.fit.ks_statistic;
        j["log_domain_mean"] = report.fit.log_domain_mean;
        j["log_domain_var"] = report.fit.log_domain_var;
        j["strands"] = report.strand_count;
        j["zeros_dropped"] = report.zeros_dropped;
        j["total_reads"] = report.total_reads;
        os << j.dump(2) << '\n';
    } else if (format_given && opts.format == "csv") {
        os << "mu,sigma,n_samples,ks_statistic,log_domain_mean,log_domain_var,strands,zeros_"
              "dropped,total_reads\n";
        os << fmt(report.fit.params.mu) << ',' << fmt(report.fit.params.sigma) << ','
           << report.fit.n_samples << ',' << fmt(report.fit.ks_statistic) << ','
           << fmt(report.fit.log_domain_mean) << ',' << fmt(report.fit.log_domain_var) << ','
           << report.strand_count << ',' << report.zeros_dropped << ',' << report.total_reads
           << '\n';
    } else {
        os << "mu=" << fmt(report.fit.params.mu) << '\n'
           << "sigma=" << fmt(report.fit.params.sigma) << '\n'
           << "n_samples=" << report.fit.n_samples << '\n'
           << "ks_statistic=" << fmt(report.fit.ks_statistic) << '\n'
           << "log_domain_mean=" << fmt(report.fit.log_domain_mean) << '\n'
           << "log_domain_var=" << fmt(report.fit.log_domain_var) << '\n'
           << "strands=" << report.strand_count << '\n'
           << "zeros_dropped=" << report.zeros_dropped << '\n'
           << "total_reads=" << report.total_reads << '\n';
    }
    emit(opts, os.str());
}

// ---------------------------------------------------------------------------
// depth-curve
// ---------------------------------------------------------------------------

struct DepthCurveArgs {
    std::vector<std::string> presets;
    std::optional<double> mu, sigma;
    std::int64_t n = 11520;
    std::string r_list;
    std::string r_grid;
    bool exact = false;
};

void run_depth_curve(const GlobalOpts& opts, const DepthCurveArgs& args) {
    std::vector<double> rates;
    if (!args.r_grid.empty()) rates = parse_grid(args.r_grid);
    if (!args.r_list.empty()) {
        std::istringstream in(args.r_list);
        std::string tok;
        while (std::getline(in, tok, ',')) rates.push_back(std::stod(tok));
    }
    for (double r : rates)
        if (!(r > 0.0 && r < 1.0)) throw covdepth::domain_error("code rates must lie in (0,1)");

    struct Curve {
        std::string name;
        covdepth::ChannelDistribution channel;
    };
    std::vector<Curve> curves;
    curves.push_back({"uniform", covdepth::ChannelDistribution::uniform(args.n)});

    std::vector<std::string> preset_names = args.presets;
    if (!opts.preset.empty() && opts.preset != "uniform") preset_names.push_back(opts.preset);

    std::vector<std::pair<std::string, covdepth::LogNormalParams>> param_sets;
    for (const auto& name : preset_names) {
        const auto params = covdepth::preset_params(name);
        if (!params)
            throw covdepth::domain_error("unknown preset '" + name + "' (expected one of " +
                                         covdepth::preset_names_joined() + ")");
        param_sets.emplace_back(name, *params);
    }
    if (args.mu && args.sigma)
        param_sets.emplace_back("mu=" + fmt(*args.mu) + " sigma=" + fmt(*args.sigma),
                                covdepth::LogNormalParams{*args.mu, *args.sigma});
    if (!param_sets.empty()) {
        const std::uint64_t seed = require_seed(opts);
        for (std::size_t i = 0; i < param_sets.size(); ++i) {
            covdepth::SplitMix64 rng(seed, i);
            curves.push_back({param_sets[i].first,
                              covdepth::sample_empirical_channel(param_sets[i].second, args.n, rng)});
        }
    }

    std::ostringstream os;
    json rows = json::array();
    if (opts.format != "json") os << "channel,R,alpha\n";
    for (const auto& curve : curves) {
        for (double r : rates) {
            const auto target = static_cast<std::int64_t>(
                std::llround(r * static_cast<double>(args.n)));
            const auto res = covdepth::invert_min_reads(curve.channel, target, args.exact);
            if (opts.format == "json")
                rows.push_back({{"channel", curve.name}, {"R", r}, {"alpha", res.alpha}});
            else
                os << csv_field(curve.name) << ',' << fmt(r) << ',' << fmt(res.alpha) << '\n';
        }
    }
    if (opts.format == "json") os << rows.dump(2) << '\n';
    emit(opts, os.str());
}

// ---------------------------------------------------------------------------
// variance-profile
// ---------------------------------------------------------------------------

struct VarianceProfileArgs {
    std::optional<double> mu, sigma;
    std::int64_t n = 11520;
    std::string k_list;
    std::string k_grid;
};

void run_variance_profile(const GlobalOpts& opts, const VarianceProfileArgs& args) {
    const auto params = params_from(opts, args.mu, args.sigma);
    std::vector<double> grid;
    if (!args.k_grid.empty()) grid = parse_grid(args.k_grid);
    if (!args.k_list.empty()) {
        std::istringstream in(args.k_list);
        std::string tok;
        while (std::getline(in, tok, ',')) grid.push_back(std::stod(tok));
    }

    const double peak = covdepth::variance_peak(params, args.n);

    std::ostringstream os;
    json rows = json::array();
    const auto add_row = [&](double k, const char* kind) {
        const double f = covdepth::variance_profile(k, params, args.n);
        const double fp = covdepth::variance_profile_derivative(k, params, args.n);
        if (opts.format == "json")
            rows.push_back({{"k", k}, {"f", f}, {"f_prime", fp}, {"kind", kind}});
        else
            os << fmt(k) << ',' << fmt(f) << ',' << fmt(fp) << ',' << kind << '\n';
    };
    if (opts.format != "json") os << "k,f,f_prime,kind\n";
    for (double k : grid)
        if (k > 0.0) add_row(k, "grid");
    add_row(peak, "peak");
    if (opts.format == "json") os << rows.dump(2) << '\n';
    emit(opts, os.str());
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

struct BoundsArgs {
    std::optional<double> mu, sigma;
    std::int64_t n = 11520;
    std::optional<std::int64_t> m;
    std::optional<double> rate;
    std::int64_t a = 2;
    std::optional<double> beta;
};

covdepth::CodePlan plan_from(std::int64_t n, std::optional<std::int64_t> m,
                             std::optional<double> rate, std::int64_t a) {
    covdepth::CodePlan plan;
    plan.n = n;
    plan.a = a;
    if (m && rate) throw covdepth::domain_error("give either -m or -R, not both");
    if (m)
        plan.m = *m;
    else if (rate)
        plan.m = static_cast<std::int64_t>(std::llround(*rate * static_cast<double>(n)));
    else
        throw covdepth::domain_error("need -m or -R");
    plan.validate();
    return plan;
}

void run_bounds(const GlobalOpts& opts, const BoundsArgs& args) {
    const auto params = params_from(opts, args.mu, args.sigma);
    const auto plan = plan_from(args.n, args.m, args.rate, args.a);
    if (!args.beta) throw covdepth::domain_error("--beta is required (no default is implied)");

    const auto k1 = covdepth::k1_lower(params, plan, *args.beta);
    const auto k2 = covdepth::k2_lower(params, plan);

    std::ostringstream os;
    if (opts.format == "json") {
        const auto to_json = [](const covdepth::BoundReport& r) {
            json j;
            j["kind"] = covdepth::to_string(r.kind);
            j["k_reads"] = r.k_reads;
            j["alpha"] = r.alpha;
            if (r.prob_bound) j["prob_bound"] = *r.prob_bound;
            j["mu"] = r.params.mu;
            j["sigma"] = r.params.sigma;
            j["n"] = r.n;
            j["m"] = r.m;
            j["a"] = r.a;
            j["beta"] = r.beta;
            j["flags"] = r.flags;
            return j;
        };
        json j;
        j["k1"] = to_json(k1);
        j["k2"] = to_json(k2);
        os << j.dump(2) << '\n';
    } else {
        os << "kind,k_reads,alpha,prob_bound,beta,flags\n";
        const auto row = [&](const covdepth::BoundReport& r) {
            os << covdepth::to_string(r.kind) << ',' << fmt(r.k_reads) << ',' << fmt(r.alpha) << ','
               << (r.prob_bound ? fmt(*r.prob_bound) : std::string{}) << ',' << fmt(r.beta) << ','
               << csv_field(join_flags(r.flags)) << '\n';
        };
        row(k1);
        row(k2);
    }
    emit(opts, os.str());
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::optional<double> mu, sigma;
    std::optional<std::int64_t> uniform_n;
    std::string counts_path;
    std::string counts_format = "auto";
    std::int64_t n = 11520;
    std::optional<std::int64_t> m;
    std::optional<double> rate;
    std::int64_t a = 1;
    std::int64_t trials = 1000;
    bool no_resample = false;
    std::int64_t cap = 0;
    bool emit_samples = false;
    std::optional<std::int64_t> success_at;
};

covdepth::ChannelDistribution simulate_channel(const GlobalOpts& opts, const SimulateArgs& args,
                                               std::int64_t& n_out) {
    if (args.uniform_n || opts.preset == "uniform") {
        n_out = args.uniform_n ? *args.uniform_n : args.n;
        return covdepth::ChannelDistribution::uniform(n_out);
    }
    if (!args.counts_path.empty()) {
        const auto table = covdepth::parse_read_counts_file(
            args.counts_path, sniff_format(args.counts_path, args.counts_format));
        std::vector<double> p;
        p.reserve(table.entries.size());
        for (const auto& [id, count] : table.entries)
            p.push_back(static_cast<double>(count) / static_cast<double>(table.total_reads));
        n_out = static_cast<std::int64_t>(p.size());
        return covdepth::ChannelDistribution::empirical(std::move(p));
    }
    const auto params = params_from(opts, args.mu, args.sigma);
    n_out = args.n;
    return covdepth::ChannelDistribution::lognormal(params, args.n);
}

void run_simulate(const GlobalOpts& opts, const SimulateArgs& args) {
    covdepth::McConfig config;
    std::int64_t n = 0;
    config.channel = simulate_channel(opts, args, n);
    config.plan = plan_from(n, args.m, args.rate, args.a);
    config.trials = args.trials;
    config.seed = require_seed(opts);
    config.resample_p_per_trial = !args.no_resample;
    config.max_reads_cap = args.cap;
    config.threads = opts.threads;

    std::ostringstream os;
    if (args.success_at) {
        const auto est = covdepth::success_probability_at(*args.success_at, config);
        if (opts.format == "json") {
            json j;
            j["reads"] = *args.success_at;
            j["trials"] = est.trials;
            j["successes"] = est.successes;
            j["p_hat"] = est.p_hat;
            j["std_err"] = est.std_err;
            os << j.dump(2) << '\n';
        } else {
            os << "reads,trials,successes,p_hat,std_err\n";
            os << *args.success_at << ',' << est.trials << ',' << est.successes << ','
               << fmt(est.p_hat) << ',' << fmt(est.std_err) << '\n';
        }
        emit(opts, os.str());
        return;
    }

    const auto result = covdepth::run_experiment(config);
    if (result.censored_count > 0)
        std::cerr << "warning: " << result.censored_count << " trials hit the read cap\n";

    const double nd = static_cast<double>(n);
    if (opts.format == "json") {
        json j;
        j["trials"] = result.trials;
        j["completed"] = static_cast<std::int64_t>(result.k_samples.size());
        j["censored"] = result.censored_count;
        j["mean"] = result.mean;
        j["std_err"] = result.std_err;
        j["max"] = result.max;
        j["q05"] = result.q05;
        j["q50"] = result.q50;
        j["q95"] = result.q95;
        j["mean_alpha"] = result.mean / nd;
        j["max_alpha"] = static_cast<double>(result.max) / nd;
        j["seed"] = config.seed;
        if (args.emit_samples) j["k_samples"] = result.k_samples;
        os << j.dump(2) << '\n';
    } else if (args.emit_samples) {
        os << "trial,k_reads\n";
        for (std::size_t i = 0; i < result.k_samples.size(); ++i)
            os << i << ',' << result.k_samples[i] << '\n';
    } else {
        os << "trials,completed,censored,mean,std_err,max,q05,q50,q95,mean_alpha,max_alpha\n";
        os << result.trials << ',' << result.k_samples.size() << ',' << result.censored_count << ','
           << fmt(result.mean) << ',' << fmt(result.std_err) << ',' << result.max << ','
           << fmt(result.q05) << ',' << fmt(result.q50) << ',' << fmt(result.q95) << ','
           << fmt(result.mean / nd) << ',' << fmt(static_cast<double>(result.max) / nd) << '\n';
    }
    emit(opts, os.str());
}

// ---------------------------------------------------------------------------
// expect
// ---------------------------------------------------------------------------

struct ExpectArgs {
    std::optional<double> mu, sigma;
    std::optional<std::int64_t> uniform_n;
    std::string counts_path;
    std::string counts_format = "auto";
    std::int64_t n = 11520;
    bool sample_strands = false;
    std::optional<std::int64_t> reads;
    std::optional<std::int64_t> min_m;
    bool urn = false;
    std::optional<std::int64_t> m;
    std::int64_t a = 1;
    bool exact = false;
};

covdepth::ChannelDistribution expect_channel(const GlobalOpts& opts, const ExpectArgs& args) {
    if (args.uniform_n || opts.preset == "uniform")
        return covdepth::ChannelDistribution::uniform(args.uniform_n ? *args.uniform_n : args.n);
    if (!args.counts_path.empty()) {
        const auto table = covdepth::parse_read_counts_file(
            args.counts_path, sniff_format(args.counts_path, args.counts_format));
        std::vector<double> p;
        p.reserve(table.entries.size());
        for (const auto& [id, count] : table.entries)
            p.push_back(static_cast<double>(count) / static_cast<double>(table.total_reads));
        return covdepth::ChannelDistribution::empirical(std::move(p));
    }
    const auto params = params_from(opts, args.mu, args.sigma);
    if (args.sample_strands) {
        covdepth::SplitMix64 rng(require_seed(opts), 0);
        return covdepth::sample_empirical_channel(params, args.n, rng);
    }
    return covdepth::ChannelDistribution::lognormal(params, args.n);
}

void run_expect(const GlobalOpts& opts, const ExpectArgs& args) {
    const auto channel = expect_channel(opts, args);
    const std::int64_t n = channel.strand_count();
    const int modes = (args.reads ? 1 : 0) + (args.min_m ? 1 : 0) + (args.urn ? 1 : 0);
    if (modes != 1)
        throw covdepth::domain_error("pick exactly one of --reads, --min-m, --urn");

    std::ostringstream os;
    if (args.reads) {
        const auto dist = covdepth::recovered_distribution(*args.reads, channel, args.exact);
        if (opts.format == "json") {
            json j;
            j["n"] = n;
            j["reads"] = *args.reads;
            j["alpha"] = static_cast<double>(*args.reads) / static_cast<double>(n);
            j["mean"] = dist.mean;
            j["variance"] = dist.variance;
            os << j.dump(2) << '\n';
        } else {
            os << "n,reads,alpha,mean,variance\n";
            os << n << ',' << *args.reads << ','
               << fmt(static_cast<double>(*args.reads) / static_cast<double>(n)) << ','
               << fmt(dist.mean) << ',' << fmt(dist.variance) << '\n';
        }
    } else if (args.min_m) {
        const auto res = covdepth::invert_min_reads(channel, *args.min_m, args.exact);
        if (opts.format == "json") {
            json j;
            j["n"] = n;
            j["target_m"] = *args.min_m;
            j["reads"] = res.reads;
            j["alpha"] = res.alpha;
            j["expected_recovered"] = res.expected_recovered;
            j["implied_code_length"] = res.implied_code_length;
            os << j.dump(2) << '\n';
        } else {
            os << "n,target_m,reads,alpha,expected_recovered,implied_code_length\n";
            os << n << ',' << *args.min_m << ',' << res.reads << ',' << fmt(res.alpha) << ','
               << fmt(res.expected_recovered) << ',' << fmt(res.implied_code_length) << '\n';
        }
    } else {
        if (!args.m) throw covdepth::domain_error("--urn needs -m");
        covdepth::CodePlan plan{n, *args.m, args.a};
        const double expected = covdepth::expected_reads_general(channel, plan);
        if (opts.format == "json") {
            json j;
            j["n"] = n;
            j["m"] = *args.m;
            j["a"] = args.a;
            j["expected_reads"] = expected;
            j["alpha"] = expected / static_cast<double>(n);
            os << j.dump(2) << '\n';
        } else {
            os << "n,m,a,expected_reads,alpha\n";
            os << n << ',' << *args.m << ',' << args.a << ',' << fmt(expected) << ','
               << fmt(expected / static_cast<double>(n)) << '\n';
        }
    }
    emit(opts, os.str());
}

// ---------------------------------------------------------------------------
// channel-from-pcr
// ---------------------------------------------------------------------------

struct PcrArgs {
    std::int64_t n = 11520;
    int cycles = 10;
    std::string copies = "lognormal";
    double copy_value = 100.0;
    double copy_log_mean = 4.60517018598809137;
    double copy_log_sigma = 0.5;
    double nb_successes = 10.0;
    double nb_prob = 0.1;
    double eff_lo = 0.80;
    double eff_hi = 1.10;
};

void run_channel_from_pcr(const GlobalOpts& opts, const PcrArgs& args) {
    covdepth::CopyCountSampler copies;
    if (args.copies == "constant")
        copies.kind = covdepth::CopyCountSampler::Kind::constant;
    else if (args.copies == "lognormal")
        copies.kind = covdepth::CopyCountSampler::Kind::lognormal;
    else if (args.copies == "negbinom")
        copies.kind = covdepth::CopyCountSampler::Kind::negative_binomial;
    else
        throw covdepth::domain_error("--copies must be constant, lognormal, or negbinom");
    copies.value = args.copy_value;
    copies.log_mean = args.copy_log_mean;
    copies.log_sigma = args.copy_log_sigma;
    copies.nb_successes = args.nb_successes;
    copies.nb_success_prob = args.nb_prob;
    covdepth::EfficiencySampler efficiencies{args.eff_lo, args.eff_hi};

    covdepth::SplitMix64 rng(require_seed(opts), 0);
    const auto model = covdepth::sample_pcr_model(args.n, args.cycles, copies, efficiencies, rng);
    const auto channel = covdepth::channel_from_pcr(model);
    const auto& params = channel.params();

    std::ostringstream os;
    if (opts.format == "json") {
        json j;
        j["n"] = args.n;
        j["cycles"] = args.cycles;
        j["mu"] = params.mu;
        j["sigma"] = params.sigma;
        j["mean_p"] = covdepth::mean_p(params);
        j["mean_inv_p"] = covdepth::mean_inv_p(params);
        os << j.dump(2) << '\n';
    } else {
        os << "n,cycles,mu,sigma,mean_p,mean_inv_p\n";
        os << args.n << ',' << args.cycles << ',' << fmt(params.mu) << ',' << fmt(params.sigma)
           << ',' << fmt(covdepth::mean_p(params)) << ',' << fmt(covdepth::mean_inv_p(params))
           << '\n';
    }
    emit(opts, os.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequencing coverage-depth planning toolkit for DNA storage"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; command-line flags win");

    GlobalOpts opts;
    app.add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--output", opts.output, "Write output to a file instead of stdout");
    app.add_option("--seed", opts.seed, "Seed for all stochastic operations");
    app.add_option("--preset", opts.preset,
                   "Named channel parameters: " + covdepth::preset_names_joined());
    app.add_option("--threads", opts.threads, "Worker threads (0 = hardware)");

    // fit
    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a log-normal channel to per-strand read counts");
    fit->fallthrough();
    fit->add_option("input", fit_args.input, "TSV/CSV file of strand_id<sep>count")->required();
    fit->add_option("--input-format", fit_args.input_format, "Force input format")
        ->check(CLI::IsMember({"auto", "tsv", "csv"}));
    fit->add_flag("--drop-zeros", fit_args.drop_zeros, "Drop zero-count strands before fitting");
    fit->add_option("--qq-out", fit_args.qq_out, "Also write log-domain QQ points (CSV)");

    // depth-curve
    DepthCurveArgs curve_args;
    auto* curve = app.add_subcommand(
        "depth-curve", "Coverage depth needed for expected full recovery, per code rate");
    curve->fallthrough();
    curve->add_option("--curve-preset", curve_args.presets,
                      "Channel preset (repeatable); the uniform curve is always included");
    curve->add_option("--mu", curve_args.mu, "Explicit channel mu");
    curve->add_option("--sigma", curve_args.sigma, "Explicit channel sigma");
    curve->add_option("-n,--strands", curve_args.n, "Strand count")->capture_default_str();
    curve->add_option("--r", curve_args.r_list, "Comma-separated code rates in (0,1)");
    curve->add_option("--r-grid", curve_args.r_grid, "Code-rate grid MIN:MAX:STEP");
    curve->add_flag("--exact", curve_args.exact, "Use the exact (1-p)^K recovery form");

    // variance-profile
    VarianceProfileArgs var_args;
    auto* var = app.add_subcommand("variance-profile",
                                   "Recovered-count variance profile f(K) and its derivative");
    var->fallthrough();
    var->add_option("--mu", var_args.mu, "Explicit channel mu");
    var->add_option("--sigma", var_args.sigma, "Explicit channel sigma");
    var->add_option("-n,--strands", var_args.n, "Strand count")->capture_default_str();
    var->add_option("--k", var_args.k_list, "Comma-separated read counts");
    var->add_option("--k-grid", var_args.k_grid, "Read-count grid MIN:MAX:STEP");

    // bounds
    BoundsArgs bounds_args;
    auto* bounds = app.add_subcommand("bounds", "Theoretical lower bounds K1 and K2");
    bounds->fallthrough();
    bounds->add_option("--mu", bounds_args.mu, "Explicit channel mu");
    bounds->add_option("--sigma", bounds_args.sigma, "Explicit channel sigma");
    bounds->add_option("-n,--strands", bounds_args.n, "Strand count")->capture_default_str();
    bounds->add_option("-m,--information", bounds_args.m, "Information strand count");
    bounds->add_option("-R,--rate", bounds_args.rate, "Code rate m/n");
    bounds->add_option("-a,--threshold", bounds_args.a, "Retrieval threshold")
        ->capture_default_str();
    bounds->add_option("--beta", bounds_args.beta, "Concentration parameter for K1 (required)");

    // simulate
    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Seeded urn-model Monte Carlo of sequencing runs");
    sim->fallthrough();
    sim->add_option("--mu", sim_args.mu, "Explicit channel mu");
    sim->add_option("--sigma", sim_args.sigma, "Explicit channel sigma");
    sim->add_option("--uniform-n", sim_args.uniform_n, "Uniform channel with this many strands");
    sim->add_option("--counts", sim_args.counts_path, "Empirical channel from a read-count table");
    sim->add_option("--counts-format", sim_args.counts_format, "Force counts format")
        ->check(CLI::IsMember({"auto", "tsv", "csv"}));
    sim->add_option("-n,--strands", sim_args.n, "Strand count for preset/parametric channels")
        ->capture_default_str();
    sim->add_option("-m,--information", sim_args.m, "Information strand count");
    sim->add_option("-R,--rate", sim_args.rate, "Code rate m/n");
    sim->add_option("-a,--threshold", sim_args.a, "Retrieval threshold")->capture_default_str();
    sim->add_option("--trials", sim_args.trials, "Number of trials")->capture_default_str();
    sim->add_flag("--no-resample", sim_args.no_resample,
                  "Freeze one channel realization instead of redrawing per trial");
    sim->add_option("--cap", sim_args.cap, "Per-trial read cap (0 = 1000*n*a)");
    sim->add_flag("--emit-samples", sim_args.emit_samples, "Emit per-trial read counts");
    sim->add_option("--success-at", sim_args.success_at,
                    "Estimate the success probability at exactly this many reads");

    // expect
    ExpectArgs expect_args;
    auto* expect =
        app.add_subcommand("expect", "Analytic recovery moments, minimal reads, or urn expectation");
    expect->fallthrough();
    expect->add_option("--mu", expect_args.mu, "Explicit channel mu");
    expect->add_option("--sigma", expect_args.sigma, "Explicit channel sigma");
    expect->add_option("--uniform-n", expect_args.uniform_n, "Uniform channel");
    expect->add_option("--counts", expect_args.counts_path, "Empirical channel from counts");
    expect->add_option("--counts-format", expect_args.counts_format, "Force counts format")
        ->check(CLI::IsMember({"auto", "tsv", "csv"}));
    expect->add_option("-n,--strands", expect_args.n, "Strand count for preset/parametric channels")
        ->capture_default_str();
    expect->add_flag("--sample-strands", expect_args.sample_strands,
                     "Realize the parametric channel as one seeded strand-probability draw");
    expect->add_option("--reads", expect_args.reads, "Recovered-count moments at this read budget");
    expect->add_option("--min-m", expect_args.min_m, "Minimal reads for this expected recovery");
    expect->add_flag("--urn", expect_args.urn, "Threshold-a expected read count (quadrature)");
    expect->add_option("-m,--information", expect_args.m, "Information strand count (--urn)");
    expect->add_option("-a,--threshold", expect_args.a, "Retrieval threshold (--urn)")
        ->capture_default_str();
    expect->add_flag("--exact", expect_args.exact, "Use the exact (1-p)^K recovery form");

    // channel-from-pcr
    PcrArgs pcr_args;
    auto* pcr = app.add_subcommand("channel-from-pcr",
                                   "Derive the log-normal channel from sampled synthesis/PCR inputs");
    pcr->fallthrough();
    pcr->add_option("-n,--strands", pcr_args.n, "Strand count")->capture_default_str();
    pcr->add_option("-t,--cycles", pcr_args.cycles, "Amplification cycles")->capture_default_str();
    pcr->add_option("--copies", pcr_args.copies, "Copy-count sampler: constant|lognormal|negbinom")
        ->capture_default_str();
    pcr->add_option("--copy-value", pcr_args.copy_value, "Constant copy count");
    pcr->add_option("--copy-log-mean", pcr_args.copy_log_mean, "Log-normal copies: ln median");
    pcr->add_option("--copy-log-sigma", pcr_args.copy_log_sigma, "Log-normal copies: log sigma");
    pcr->add_option("--nb-successes", pcr_args.nb_successes, "Negative binomial successes");
    pcr->add_option("--nb-prob", pcr_args.nb_prob, "Negative binomial success probability");
    pcr->add_option("--eff-lo", pcr_args.eff_lo, "Efficiency lower bound")->capture_default_str();
    pcr->add_option("--eff-hi", pcr_args.eff_hi, "Efficiency upper bound")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (fit->parsed()) run_fit(opts, fit_args, app.count("--format") > 0);
        if (curve->parsed()) run_depth_curve(opts, curve_args);
        if (var->parsed()) run_variance_profile(opts, var_args);
        if (bounds->parsed()) run_bounds(opts, bounds_args);
        if (sim->parsed()) run_simulate(opts, sim_args);
        if (expect->parsed()) run_expect(opts, expect_args);
        if (pcr->parsed()) run_channel_from_pcr(opts, pcr_args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const covdepth::degenerate_result_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
