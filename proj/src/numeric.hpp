// Exact integer/rational helpers on top of GMP, plus the handful of
// float conversions the estimators need.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace entdim {

using BigInt = mpz_class;
using Rational = mpq_class;

enum class ErrorCode {
    invalid_argument,
    degenerate_schedule,
    pool_overdrawn,
    tower_too_shallow,
    verify_failed,
    budget_exceeded,
    io,
    internal,
};

struct Error : std::runtime_error {
    ErrorCode code;
    Error(ErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// Reduced fraction in (0,1), used for tau. Kept in machine words; every
// place that needs tau as an exponent works with p and q directly.
struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// Parses "p/q" (or a bare integer "p" as p/1). Throws on malformed input.
Fraction parse_fraction(const std::string& text);

// b^e with 64-bit exponent.
BigInt ipow(const BigInt& base, std::uint64_t exp);

// floor(x^(1/k)) for x >= 0, k >= 1.
BigInt iroot_floor(const BigInt& x, unsigned long k);

// Largest k >= 0 with k^root_deg * den <= num, i.e. floor((num/den)^(1/root_deg)).
// Verified by multiplication on both sides of the bracket, never by floats.
BigInt floor_rational_root(const BigInt& num, const BigInt& den, unsigned long root_deg);

// log2 of a positive big integer, in long double.
long double log2_big(const BigInt& x);

long double to_longdouble(const Rational& q);

// Exact serialization: integers as decimal strings, rationals as "p/q".
std::string to_decimal(const BigInt& x);
std::string rational_str(const Rational& q);
Rational parse_rational(const std::string& text);
BigInt parse_bigint(const std::string& text);

// Returns the value as uint64 if it fits, else nullopt.
std::optional<std::uint64_t> to_u64(const BigInt& x);
std::uint64_t to_u64_or_throw(const BigInt& x, const char* what);

// Enumeration budget (cells = columns x height). ENTDIM_BUDGET overrides.
std::uint64_t enumeration_budget();

}  // namespace entdim
