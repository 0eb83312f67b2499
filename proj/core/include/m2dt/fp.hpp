#pragma once

// Dense matrices over a prime field F_p, sized for exhaustive enumeration
// (dimensions <= 4, p <= 43). Entries are stored reduced mod p.

#include "m2dt/common.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace m2dt {

inline uint32_t fp_inv(uint32_t a, uint32_t p) {
    // p is tiny; extended Euclid not worth it.
    a %= p;
    if (a == 0)
        fail(Errc::Internal, "fp_inv(0)");
    for (uint32_t x = 1; x < p; ++x)
        if (a * x % p == 1)
            return x;
    fail(Errc::Internal, "fp_inv: not invertible");
}

struct FpMat {
    int rows = 0, cols = 0;
    std::vector<uint32_t> a; // row-major, values in [0,p)

    FpMat() = default;
    FpMat(int r, int c) : rows(r), cols(c), a((size_t)r * c, 0) {}

    uint32_t& at(int i, int j) { return a[(size_t)i * cols + j]; }
    uint32_t at(int i, int j) const { return a[(size_t)i * cols + j]; }

    static FpMat identity(int n) {
        FpMat m(n, n);
        for (int i = 0; i < n; ++i)
            m.at(i, i) = 1;
        return m;
    }

    bool is_zero() const {
        for (uint32_t x : a)
            if (x)
                return false;
        return true;
    }

    bool operator==(const FpMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

inline FpMat fp_mul(const FpMat& x, const FpMat& y, uint32_t p) {
    FpMat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            uint32_t v = x.at(i, k);
            if (!v)
                continue;
            for (int j = 0; j < y.cols; ++j)
                r.at(i, j) = (r.at(i, j) + v * y.at(k, j)) % p;
        }
    return r;
}

inline FpMat fp_add(const FpMat& x, const FpMat& y, uint32_t p) {
    FpMat r(x.rows, x.cols);
    for (size_t i = 0; i < r.a.size(); ++i)
        r.a[i] = (x.a[i] + y.a[i]) % p;
    return r;
}

inline FpMat fp_sub(const FpMat& x, const FpMat& y, uint32_t p) {
    FpMat r(x.rows, x.cols);
    for (size_t i = 0; i < r.a.size(); ++i)
        r.a[i] = (x.a[i] + p - y.a[i]) % p;
    return r;
}

inline FpMat fp_scale(const FpMat& x, uint32_t c, uint32_t p) {
    FpMat r(x.rows, x.cols);
    for (size_t i = 0; i < r.a.size(); ++i)
        r.a[i] = x.a[i] * c % p;
    return r;
}

inline uint32_t fp_trace(const FpMat& x, uint32_t p) {
    uint32_t t = 0;
    for (int i = 0; i < x.rows; ++i)
        t = (t + x.at(i, i)) % p;
    return t;
}

inline FpMat fp_pow(const FpMat& x, int e, uint32_t p) {
    FpMat r = FpMat::identity(x.rows);
    for (int i = 0; i < e; ++i)
        r = fp_mul(r, x, p);
    return r;
}

// Row echelon rank; destroys a copy.
inline int fp_rank(FpMat m, uint32_t p) {
    int rank = 0;
    for (int col = 0; col < m.cols && rank < m.rows; ++col) {
        int pivot = -1;
        for (int i = rank; i < m.rows; ++i)
            if (m.at(i, col)) {
                pivot = i;
                break;
            }
        if (pivot < 0)
            continue;
        for (int j = 0; j < m.cols; ++j)
            std::swap(m.at(pivot, j), m.at(rank, j));
        uint32_t inv = fp_inv(m.at(rank, col), p);
        for (int j = col; j < m.cols; ++j)
            m.at(rank, j) = m.at(rank, j) * inv % p;
        for (int i = 0; i < m.rows; ++i) {
            if (i == rank)
                continue;
            uint32_t f = m.at(i, col);
            if (!f)
                continue;
            for (int j = col; j < m.cols; ++j)
                m.at(i, j) = (m.at(i, j) + (p - f) * m.at(rank, j)) % p;
        }
        ++rank;
    }
    return rank;
}

inline bool fp_is_nilpotent(const FpMat& x, uint32_t p) {
    FpMat y = fp_pow(x, x.rows, p);
    return y.is_zero();
}

inline bool fp_invertible(const FpMat& x, uint32_t p) {
    return x.rows == x.cols && fp_rank(x, p) == x.rows;
}

// Basis of {Z : solve a homogeneous linear system}, represented abstractly:
// callers build the system matrix themselves. Returns kernel dimension of an
// r x c system matrix acting on column vectors of length c.
inline int fp_kernel_dim(const FpMat& system, uint32_t p) {
    return system.cols - fp_rank(system, p);
}

// Characteristic polynomial of an n x n matrix (n <= 4), computed by cofactor
// expansion of det(tI - X) with degree-1 polynomial entries. Returns monic
// coefficients c[0..n], charpoly(t) = sum c[i] t^i, c[n] = 1.
inline std::vector<uint32_t> fp_charpoly(const FpMat& x, uint32_t p) {
    int n = x.rows;
    // Polynomial entries: vector of coefficients mod p, ascending.
    using Poly = std::vector<uint32_t>;
    auto pmul = [&](const Poly& a, const Poly& b) {
        Poly r(a.size() + b.size() - 1, 0);
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j)
                r[i + j] = (r[i + j] + a[i] * b[j]) % p;
        return r;
    };
    auto padd = [&](Poly a, const Poly& b, uint32_t scale) {
        if (a.size() < b.size())
            a.resize(b.size(), 0);
        for (size_t i = 0; i < b.size(); ++i)
            a[i] = (a[i] + scale * b[i]) % p;
        return a;
    };
    std::vector<Poly> entries((size_t)n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            uint32_t neg = (p - x.at(i, j)) % p;
            entries[(size_t)i * n + j] = (i == j) ? Poly{neg, 1} : Poly{neg};
        }
    // Recursive cofactor determinant over the first row of the submatrix
    // selected by live column indices.
    std::vector<int> cols(n);
    for (int i = 0; i < n; ++i)
        cols[i] = i;
    std::function<Poly(int, std::vector<int>&)> det = [&](int row, std::vector<int>& cs) -> Poly {
        if (cs.empty())
            return Poly{1};
        Poly acc{0};
        for (size_t k = 0; k < cs.size(); ++k) {
            int c = cs[k];
            const Poly& e = entries[(size_t)row * n + c];
            bool zero = true;
            for (uint32_t v : e)
                if (v)
                    zero = false;
            if (zero)
                continue;
            std::vector<int> rest;
            for (size_t t = 0; t < cs.size(); ++t)
                if (t != k)
                    rest.push_back(cs[t]);
            Poly sub = det(row + 1, rest);
            Poly term = pmul(e, sub);
            acc = padd(acc, term, (k % 2 == 0) ? 1u : p - 1u);
        }
        return acc;
    };
    Poly cp = det(0, cols);
    cp.resize(n + 1, 0);
    return cp;
}

// Iterate over every matrix of the given shape: f(m) for all p^(r*c) matrices.
template <class F> void fp_foreach_matrix(int r, int c, uint32_t p, F&& f) {
    FpMat m(r, c);
    size_t cells = m.a.size();
    while (true) {
        f(m);
        size_t i = 0;
        for (; i < cells; ++i) {
            if (++m.a[i] < p)
                break;
            m.a[i] = 0;
        }
        if (i == cells)
            break;
    }
}

} // namespace m2dt
