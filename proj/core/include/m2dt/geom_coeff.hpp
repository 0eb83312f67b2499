#pragma once

// Exact rational-function coefficients for the mu-free sectors: a Laurent
// polynomial in q divided by a product of factors (1 - q^{-b}). Closed under
// the ring operations and under sigma^n, so the diagonal-sector identities
// are checked as exact rational function identities.

#include "m2dt/common.hpp"
#include "m2dt/fqcount.hpp"

#include <map>
#include <string>
#include <vector>

namespace m2dt {

struct LaurentQ {
    std::map<int, Rational> c; // exponent -> coefficient, zero entries absent

    static LaurentQ term(const Rational& x, int e) {
        LaurentQ r;
        if (x != 0)
            r.c[e] = x;
        return r;
    }
    bool is_zero() const { return c.empty(); }
    LaurentQ operator+(const LaurentQ& o) const;
    LaurentQ operator-(const LaurentQ& o) const;
    LaurentQ operator*(const LaurentQ& o) const;
    bool operator==(const LaurentQ& o) const { return c == o.c; }
    Rational eval(const Rational& q) const;
};

class GeomCoeff {
  public:
    GeomCoeff() = default;
    static GeomCoeff zero() { return GeomCoeff(); }
    static GeomCoeff one() { return from_laurent(LaurentQ::term(1, 0)); }
    static GeomCoeff from_laurent(LaurentQ l) {
        GeomCoeff g;
        g.num_ = std::move(l);
        return g;
    }
    static GeomCoeff q_power(int e) { return from_laurent(LaurentQ::term(1, e)); }
    // 1 / (1 - q^{-b})
    static GeomCoeff geom(int b) {
        GeomCoeff g = one();
        g.denom_.push_back(b);
        return g;
    }
    // f / gl_n(q) with 1/gl_n = q^{-n^2} prod_{j<=n} (1 - q^{-j})^{-1}
    static GeomCoeff over_gl(const LaurentQ& f, int n);
    static GeomCoeff from_qpoly(const QPoly& f);

    const LaurentQ& num() const { return num_; }
    const std::vector<int>& denom_b() const { return denom_; }
    bool is_zero() const { return num_.is_zero(); }

    GeomCoeff operator+(const GeomCoeff& o) const;
    GeomCoeff operator-(const GeomCoeff& o) const;
    GeomCoeff operator*(const GeomCoeff& o) const;
    GeomCoeff scaled(const Rational& x) const;
    // Exact equality of rational functions (cross multiplied).
    bool operator==(const GeomCoeff& o) const;

    Rational eval(const Rational& q) const; // fails on a vanishing denominator

  private:
    LaurentQ num_;
    std::vector<int> denom_; // sorted exponents b of the (1 - q^{-b}) factors
};

// Exact sigma^n; base terms must have integer coefficients.
GeomCoeff sigma_geom(int n, const GeomCoeff& x);

std::string to_string(const GeomCoeff& g);

} // namespace m2dt
