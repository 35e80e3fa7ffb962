#pragma once

#include <stdexcept>
#include <string>

namespace padicdyn {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inverting or reducing an element that is indistinguishable from zero.
struct division_by_zero_at_precision : error {
    division_by_zero_at_precision()
        : error("division by an element that is zero at the working precision") {}
};

// A comparison or degree decision cannot be certified at the current
// precision.  Carries the precision (base digits) a retry should use.
struct insufficient_precision : error {
    long suggested_precision;
    explicit insufficient_precision(std::string what, long suggested = 0)
        : error(std::move(what)), suggested_precision(suggested) {}
};

struct negative_valuation : error {
    negative_valuation() : error("element has negative valuation") {}
};

struct not_coprime : error {
    not_coprime() : error("numerator and denominator share a factor") {}
};

struct convergence_failure : error {
    explicit convergence_failure(std::string what) : error(std::move(what)) {}
};

struct degenerate_triple : error {
    degenerate_triple() : error("points of a Moebius triple are not pairwise distinct") {}
};

struct not_fixed : error {
    not_fixed() : error("point is not fixed by the map") {}
};

// A root or point needs an extension outside the supported tame range.
struct unsupported_extension : error {
    explicit unsupported_extension(std::string what) : error(std::move(what)) {}
};

struct parse_error : error {
    std::size_t position;
    std::string expected;
    parse_error(std::size_t pos, std::string exp)
        : error("parse error at offset " + std::to_string(pos) + ": expected " + exp),
          position(pos), expected(std::move(exp)) {}
};

} // namespace padicdyn
