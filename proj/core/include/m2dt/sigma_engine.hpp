#pragma once

// Exact sigma-operations on coefficients of the shape
//     sum_t (base term_t) * prod_i (1 - 1/E^{b_i})^{-1}
// where E is the geometric scalar (q symbolically, p numerically). Each base
// term carries its own T-series of sigma values; the geometric factor scales
// sigma^j by the j-th power of the expansion monomial, so the product over
// the whole (infinite) expansion resums through log/exp in T:
//
//   sigma_T(base * E^{-b m}) = A(x^m T) with A(T) = sum_j sigma^j(base) T^j
//   log prod_{m >= 0} A(x^m T) = sum_j C_j / (1 - x^j) T^j,  x = E^{-b},
//
// and multiple denominator factors contribute independent geometric sums.
// All coefficients stay exact; no truncation floor is needed.

#include "m2dt/common.hpp"

#include <vector>

namespace m2dt {

// Ops must provide: V zero(), V unit(), V add(V,V), V mul(V,V),
// V scale(V, Rational), V geom(int c) returning 1/(1 - E^{-c}).
template <class V> struct SigmaFamily {
    std::vector<V> base;     // sigma^0..sigma^n of the base term, base[0] = unit
    std::vector<int> geom_b; // denominator exponents b_i >= 1
};

template <class V, class Ops>
std::vector<V> sigma_series(const std::vector<SigmaFamily<V>>& families, int n, const Ops& ops) {
    std::vector<V> acc(n + 1, ops.zero());
    acc[0] = ops.unit();
    for (const auto& fam : families) {
        // log of the single-term series A(T)
        std::vector<V> logc(n + 1, ops.zero()); // logc[j], j >= 1
        for (int j = 1; j <= n; ++j) {
            V s = ops.scale(fam.base[j], j);
            for (int i = 1; i < j; ++i)
                s = ops.add(s, ops.scale(ops.mul(logc[i], fam.base[j - i]), -i));
            logc[j] = ops.scale(s, Rational(1, j));
        }
        // geometric resummation per T-power
        for (int j = 1; j <= n; ++j)
            for (int b : fam.geom_b)
                logc[j] = ops.mul(logc[j], ops.geom(b * j));
        // exponentiate
        std::vector<V> f(n + 1, ops.zero());
        f[0] = ops.unit();
        for (int j = 1; j <= n; ++j) {
            V s = ops.zero();
            for (int i = 1; i <= j; ++i)
                s = ops.add(s, ops.scale(ops.mul(logc[i], f[j - i]), i));
            f[j] = ops.scale(s, Rational(1, j));
        }
        // multiply into the running product
        std::vector<V> next(n + 1, ops.zero());
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j)
                next[i + j] = ops.add(next[i + j], ops.mul(acc[i], f[j]));
        acc = std::move(next);
    }
    return acc;
}

} // namespace m2dt
