#pragma once

// Symbolic coefficient ring for the motivic series: Laurent terms in
// u = -L^{1/2} with rational coefficients, each term optionally carrying a
// single root-of-unity class mu(k). Half powers of L are encoded through u:
// L = u^2, L^{1/2} = -u, L^{-1/2} = -u^{-1}.
//
// The subring is linear in the mu-classes. Multiplying two terms that both
// carry a mu(k) with k >= 2 has no symbolic normal form here and raises
// OutsideSymbolicSubring; such products are evaluated constructively in the
// realization layer instead.

#include "m2dt/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace m2dt {

struct MuSymbol {
    int order; // k >= 2 once normalized; k = 1 collapses to the ring unit
};

struct MotTerm {
    Rational coeff;
    int u_exp = 0;
    int mu = 0; // 0 = no mu factor, otherwise the order k >= 2
};

class MotExpr {
  public:
    MotExpr() = default;

    static MotExpr zero() { return MotExpr(); }
    static MotExpr one() { return from_term(1, 0, 0); }
    static MotExpr unit_u(int j) { return from_term(1, j, 0); }
    // L^j
    static MotExpr L(int j) { return from_term(1, 2 * j, 0); }
    // L^{j/2} for any integer j (odd j are genuine half powers): (-u)^j
    static MotExpr half_L(int j) { return from_term((j % 2 == 0) ? 1 : -1, j, 0); }
    // The class of the k-th roots of unity with its rotation action.
    static MotExpr mu(int k);
    static MotExpr constant(const Rational& c) { return from_term(c, 0, 0); }
    static MotExpr from_term(const Rational& c, int u_exp, int mu);

    const std::vector<MotTerm>& terms() const { return terms_; }
    std::optional<int> trunc_floor() const { return floor_; }
    void set_trunc_floor(std::optional<int> f) { floor_ = f; }

    bool is_zero() const { return terms_.empty(); }
    bool is_exact() const { return !floor_.has_value(); }
    bool has_mu() const;
    // Largest u-exponent present (requires non-zero).
    int top_degree() const;

    bool operator==(const MotExpr& o) const;

    friend MotExpr operator+(const MotExpr& a, const MotExpr& b);
    friend MotExpr operator-(const MotExpr& a, const MotExpr& b);
    friend MotExpr operator-(const MotExpr& a);
    // Distributive product; throws OutsideSymbolicSubring on mu x mu.
    friend MotExpr operator*(const MotExpr& a, const MotExpr& b);
    MotExpr scaled(const Rational& c) const;

  private:
    void canonicalize();
    std::vector<MotTerm> terms_;    // canonical: sorted by u_exp desc, mu asc
    std::optional<int> floor_;      // if set, exact only in u-degrees > floor
};

// [GL(n)] = prod_{0<=i<n} (L^n - L^i), expanded into u-monomials.
MotExpr gl_class(int n);

// sigma^n of the class mu(k): orbit decomposition of size-n multisets over
// Z/k under the rotation that adds 1 to every element. An orbit of size r
// contributes mu(r); orbits of size 1 contribute the unit.
MotExpr burnside_sigma(int n, int k);

// Symbolic sigma^n. Integer-coefficient generators only. Sums expand by the
// Cauchy rule sigma(a+b) = sigma(a) sigma(b); u-monomials follow
// sigma^i(a u^j) = sigma^i(a) u^{ij}; mu-free integer multiples use the
// (1-T)^{-c} binomial series (so negatives are the lambda-ring inverse);
// mu-carrying terms use burnside_sigma with sigma^n(-t) = (-1)^n sigma^n(t),
// which keeps the mu-linear subring closed.
MotExpr sigma(int n, const MotExpr& x);

// num * prod_b (1 - L^{-b})^{-1} expanded in descending u-degrees down to
// (strictly above) the given floor; the result carries the floor marker.
MotExpr expand_rational(const MotExpr& num, const std::vector<int>& denom_b, int floor);

// Euler-characteristic specialization u -> 1 (i.e. L^{1/2} -> -1), mu(k) -> k.
Rational chi_spec(const MotExpr& x);

struct EvalResult {
    Rational value;
    Rational tail_bound; // certified |tail| bound; 0 for exact input
};

// Numeric evaluation with L -> q and mu(k) -> k. Exact expressions must have
// even u-exponents (else OddHalfPower if strict). Truncated expressions
// return a certified tail bound sum_{deg <= floor} |coeff bound| q^{deg/2}.
EvalResult forget_monodromy_eval(const MotExpr& x, const Rational& q, bool strict = true);

// Canonical text form "c*u^j*mu(k)" with '+'-joined terms; parseable back.
std::string to_string(const MotExpr& x);
MotExpr parse_motexpr(const std::string& s);

} // namespace m2dt
