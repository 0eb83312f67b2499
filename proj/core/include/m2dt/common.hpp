#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace m2dt {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Errc {
    OutsideSymbolicSubring,
    OddHalfPower,
    SizeLimit,
    PrimeMismatch,
    BadPrime,
    TailTooLarge,
    NotPolynomial,
    HalfPowerResidue,
    Config,
    Internal,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

// Generalized binomial C(c+m-1, m) = c(c+1)...(c+m-1)/m!, valid for any integer c.
// This is the coefficient of T^m in (1-T)^{-c}.
inline Rational rising_binomial(long long c, int m) {
    if (m == 0)
        return 1;
    Rational num = 1;
    for (int i = 0; i < m; ++i)
        num *= Rational(c + i);
    Rational den = 1;
    for (int i = 2; i <= m; ++i)
        den *= i;
    return num / den;
}

inline Int binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    Int r = 1;
    for (int i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

inline Int int_pow(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1)
            r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline bool is_prime_u32(uint32_t n) {
    if (n < 2)
        return false;
    for (uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

// FNV-1a, used for cache keys and the report checksums.
inline uint64_t fnv1a(const std::string& s, uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace m2dt
