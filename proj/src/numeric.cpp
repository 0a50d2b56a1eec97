#include "numeric.hpp"

#include <cmath>
#include <cstdlib>

namespace entdim {

Fraction parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            std::uint64_t p = std::stoull(text);
            if (p == 0) throw Error(ErrorCode::invalid_argument, "fraction must be positive: " + text);
            return Fraction{p, 1};
        }
        std::uint64_t p = std::stoull(text.substr(0, slash));
        std::uint64_t q = std::stoull(text.substr(slash + 1));
        if (p == 0 || q == 0) throw Error(ErrorCode::invalid_argument, "fraction must be positive: " + text);
        std::uint64_t a = p, b = q;
        while (b) { std::uint64_t t = a % b; a = b; b = t; }
        return Fraction{p / a, q / a};
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::invalid_argument, "malformed fraction: " + text);
    } catch (const std::out_of_range&) {
        throw Error(ErrorCode::invalid_argument, "fraction out of range: " + text);
    }
}

BigInt ipow(const BigInt& base, std::uint64_t exp) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(exp));
    return r;
}

BigInt iroot_floor(const BigInt& x, unsigned long k) {
    if (sgn(x) < 0) throw Error(ErrorCode::invalid_argument, "iroot of negative value");
    BigInt r;
    mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
    return r;
}

BigInt floor_rational_root(const BigInt& num, const BigInt& den, unsigned long root_deg) {
    if (sgn(den) <= 0 || sgn(num) < 0) throw Error(ErrorCode::invalid_argument, "floor_rational_root domain");
    if (root_deg == 0) throw Error(ErrorCode::invalid_argument, "zero root degree");
    BigInt k = iroot_floor(num / den, root_deg);
    // mpz_root of the floored quotient can land one off the true rational root;
    // bracket by multiplying back.
    while (ipow(k + 1, root_deg) * den <= num) ++k;
    while (k > 0 && ipow(k, root_deg) * den > num) --k;
    return k;
}

long double log2_big(const BigInt& x) {
    if (sgn(x) <= 0) throw Error(ErrorCode::invalid_argument, "log2 of non-positive value");
    long exp2 = 0;
    double mant = mpz_get_d_2exp(&exp2, x.get_mpz_t());
    return std::log2(static_cast<long double>(mant)) + static_cast<long double>(exp2);
}

long double to_longdouble(const Rational& q) {
    if (sgn(q) == 0) return 0.0L;
    long double n = log2_big(BigInt(q.get_num()));
    long double d = log2_big(BigInt(q.get_den()));
    return std::exp2(n - d);
}

std::string to_decimal(const BigInt& x) { return x.get_str(); }

std::string rational_str(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return BigInt(c.get_num()).get_str() + "/" + BigInt(c.get_den()).get_str();
}

Rational parse_rational(const std::string& text) {
    try {
        Rational q(text);
        q.canonicalize();
        return q;
    } catch (...) {
        throw Error(ErrorCode::invalid_argument, "malformed rational: " + text);
    }
}

BigInt parse_bigint(const std::string& text) {
    try {
        return BigInt(text);
    } catch (...) {
        throw Error(ErrorCode::invalid_argument, "malformed integer: " + text);
    }
}

std::optional<std::uint64_t> to_u64(const BigInt& x) {
    if (sgn(x) < 0 || !x.fits_ulong_p()) {
        // fits_ulong_p is about unsigned long (64-bit on this platform).
        if (sgn(x) < 0 || mpz_sizeinbase(x.get_mpz_t(), 2) > 64) return std::nullopt;
    }
    return static_cast<std::uint64_t>(mpz_get_ui(x.get_mpz_t()));
}

std::uint64_t to_u64_or_throw(const BigInt& x, const char* what) {
    auto v = to_u64(x);
    if (!v) throw Error(ErrorCode::budget_exceeded, std::string(what) + " exceeds 64-bit range: " + x.get_str());
    return *v;
}

std::uint64_t enumeration_budget() {
    static const std::uint64_t budget = [] {
        if (const char* env = std::getenv("ENTDIM_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
        }
        return static_cast<std::uint64_t>(10'000'000);
    }();
    return budget;
}

}  // namespace entdim
