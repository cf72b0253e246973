#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "covdepth/channel.hpp"
#include "covdepth/errors.hpp"
#include "covdepth/special.hpp"

namespace covdepth {

enum class TableFormat { tsv, csv };

// Per-strand read counts. Zero-count strands are kept; they matter for
// coverage analysis even though the log transform cannot use them.
struct ReadCountTable {
    std::vector<std::pair<std::string, std::uint64_t>> entries;
    std::uint64_t total_reads = 0;
};

namespace detail {

inline bool parse_count(std::string_view text, std::uint64_t& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace detail

// Parse `strand_id<sep>count` rows. `#`-prefixed lines are comments, blank
// lines are skipped, CRLF is accepted, and a header line is auto-detected
// by a non-numeric second field.
inline ReadCountTable parse_read_counts(std::istream& in, TableFormat format) {
    const char sep = format == TableFormat::tsv ? '\t' : ',';
    ReadCountTable table;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const std::size_t cut = line.find(sep);
        if (cut == std::string::npos) throw parse_error("missing delimiter", line_no);
        std::string id = line.substr(0, cut);
        const std::string_view rest(line.data() + cut + 1, line.size() - cut - 1);
        if (rest.find(sep) != std::string_view::npos) throw parse_error("too many fields", line_no);
        std::uint64_t count = 0;
        if (!detail::parse_count(rest, count)) {
            if (first_data_line) {  // header row
                first_data_line = false;
                continue;
            }
            throw parse_error("count is not a non-negative integer", line_no);
        }
        first_data_line = false;
        if (id.empty()) throw parse_error("empty strand id", line_no);
        if (!seen.insert(id).second) throw parse_error("duplicate strand id '" + id + "'", line_no);
        table.total_reads += count;
        table.entries.emplace_back(std::move(id), count);
    }
    if (table.entries.empty()) throw empty_input_error("input holds no data rows");
    if (table.total_reads == 0) throw insufficient_data_error("table holds no reads at all");
    return table;
}

inline ReadCountTable parse_read_counts(const std::string& text, TableFormat format) {
    std::istringstream in(text);
    return parse_read_counts(in, format);
}

inline ReadCountTable parse_read_counts_file(const std::string& path, TableFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open '" + path + "'");
    return parse_read_counts(in, format);
}

inline void write_read_counts(std::ostream& out, const ReadCountTable& table, TableFormat format) {
    const char sep = format == TableFormat::tsv ? '\t' : ',';
    for (const auto& [id, count] : table.entries) out << id << sep << count << '\n';
}

// Fit result plus what the ingest step did to get there.
struct IngestReport {
    FitReport fit;
    std::int64_t strand_count = 0;  // rows in the table
    std::int64_t zeros_dropped = 0;
    std::uint64_t total_reads = 0;
};

// Normalize counts to proportions and fit the log-normal channel.
// Zero-count strands are dropped (and counted) under drop_zeros, otherwise
// they are an error: the log transform has no value for them and no
// smoothing rule is assumed.
inline IngestReport fit_channel(const ReadCountTable& table, bool drop_zeros) {
    IngestReport report;
    report.strand_count = static_cast<std::int64_t>(table.entries.size());
    report.total_reads = table.total_reads;
    std::vector<double> proportions;
    proportions.reserve(table.entries.size());
    for (const auto& [id, count] : table.entries) {
        if (count == 0) {
            if (!drop_zeros)
                throw domain_error("zero-count strand '" + id +
                                   "' cannot enter the log transform (enable drop_zeros)");
            ++report.zeros_dropped;
            continue;
        }
        proportions.push_back(static_cast<double>(count) /
                              static_cast<double>(table.total_reads));
    }
    if (proportions.size() < 2)
        throw insufficient_data_error("need at least 2 positive counts to fit");
    report.fit = mle_fit(proportions);
    return report;
}

// Paired quantiles for a log-domain QQ check against the fitted normal:
// order statistics at plotting positions (i - 0.5)/n.
struct QqPoint {
    double theoretical;
    double empirical;
};

inline std::vector<QqPoint> qq_points(const ReadCountTable& table) {
    std::vector<double> logs;
    logs.reserve(table.entries.size());
    for (const auto& [id, count] : table.entries)
        if (count > 0)
            logs.push_back(std::log(static_cast<double>(count) /
                                    static_cast<double>(table.total_reads)));
    if (logs.size() < 10) throw insufficient_data_error("QQ needs at least 10 positive counts");
    long double acc = 0.0L;
    for (double v : logs) acc += v;
    const double mu = static_cast<double>(acc / static_cast<long double>(logs.size()));
    long double sq = 0.0L;
    for (double v : logs) sq += (v - mu) * static_cast<long double>(v - mu);
    const double sigma = std::sqrt(static_cast<double>(sq / static_cast<long double>(logs.size())));

    std::sort(logs.begin(), logs.end());
    std::vector<QqPoint> points(logs.size());
    const double n = static_cast<double>(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double pos = (static_cast<double>(i) + 0.5) / n;
        points[i] = {mu + sigma * norm_quantile(pos), logs[i]};
    }
    return points;
}

}  // namespace covdepth
