#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covdepth {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside its mathematical domain.
struct domain_error : error {
    using error::error;
};

// Arithmetic left the representable range (e.g. copy-number blow-up).
struct overflow_error : error {
    using error::error;
};

// Fewer data points than the operation needs.
struct insufficient_data_error : error {
    using error::error;
};

// Input stream held no data rows at all.
struct empty_input_error : error {
    using error::error;
};

// Malformed input text; carries the 1-based line number.
struct parse_error : error {
    parse_error(const std::string& what, std::size_t line_no)
        : error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

// Requested recovery target cannot be reached at any finite read count.
struct unreachable_target_error : error {
    using error::error;
};

// Channel cannot support the requested recovery at all.
struct infeasible_error : error {
    using error::error;
};

// Problem size exceeds a configured cap.
struct size_error : error {
    using error::error;
};

// Quadrature missed the requested tolerance; carries what it achieved.
struct accuracy_error : error {
    accuracy_error(const std::string& what, double est, double err)
        : error(what), estimate(est), error_bound(err) {}
    double estimate;
    double error_bound;
};

// Peak search found no sign change in its bracket.
struct no_peak_error : error {
    using error::error;
};

// Simulation produced no usable trials (everything censored).
struct degenerate_result_error : error {
    using error::error;
};

}  // namespace covdepth
