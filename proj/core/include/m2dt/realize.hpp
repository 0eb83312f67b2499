#pragma once

// Constructive realization: motivic classes over A^1 become fiber-count
// vectors over F_p modulo constants, with additive convolution as the
// product. The dictionary is pinned by enumeration (see the calibration
// operations and the acceptance suite):
//   1        -> delta_0
//   L        -> p delta_0
//   L^{1/2}  -> eps * (fiber counts of z -> z^2 on A^1), eps = +1 calibrated
//   mu(k)    -> -(fiber counts of z -> z^k on G_m), optionally twisted
// and sigma-operations on mu-classes realize through symmetric powers of
// [A^1 -> z^k]: Sym^m(A^1) = A^m with the Newton power-sum value, so
// sigma^m(1 - mu_k) realizes as the honest Sym^m fiber counts.

#include "m2dt/common.hpp"
#include "m2dt/fqcount.hpp"
#include "m2dt/mring.hpp"

#include <optional>
#include <vector>

namespace m2dt {

struct RealClass {
    CountVector vec;
    Rational tail_bound = 0; // certified; 0 = exact
    struct Norm {
        int q_exp_num = 0; // applied power of q (numerator over 2)
        std::vector<int> gl_ranks;
        int eps = 1;
    } meta;
};

struct RealizeCtx {
    uint32_t p = 5;
    int eps = 1;        // sign of the L^{1/2} vector, fixed by calibration
    int mu_sign = -1;   // dictionary sign of mu(k); -1 is the calibrated value
    // Fault injection for negative controls (selftest only).
    bool fault_mu_sign = false;
    bool fault_eps = false;

    int eff_eps() const { return fault_eps ? -eps : eps; }
    int eff_mu_sign() const { return fault_mu_sign ? -mu_sign : mu_sign; }
};

RealClass convolve(const RealClass& a, const RealClass& b);
bool equal_mod_const_real(const RealClass& a, const RealClass& b);

// Raw fiber counts of z -> z^k on G_m: vec_t = #{z in F_p^* : z^k = t}.
CountVector realize_mu(int k, uint32_t p);

// Fiber counts of z -> z^k on G_m twisted: #{z : z^k = c t}, c in F_p^*.
CountVector power_torsor_counts(int k, uint32_t p, uint32_t c);

// The realized L^{1/2}: eps * (fiber counts of z -> z^2 on A^1).
// Requires p = 1 mod 4.
RealClass realize_halfL(uint32_t p, int eps = 1);

// Rank-1 calibration: returns the unique sign for which the realized
// square root satisfies both s*s = p delta_0 (mod constants) and the
// quadratic-form unit law with a positive unit. Throws if neither works.
int calibrate_halfL(uint32_t p);

// Realize a symbolic expression. Preconditions: p = 1 mod 4 and
// p = 1 mod k for every mu(k) present. Truncated inputs yield a certified
// tail bound.
RealClass realize_expr(const MotExpr& x, const RealizeCtx& ctx);

// sigma^n applied to the expression and realized; mu-carrying terms use the
// symmetric-power counts of [A^1 -> z^k], products realize by convolution.
RealClass realize_sigma(int n, const MotExpr& x, const RealizeCtx& ctx);

// Structured coefficient (sum of base terms) * prod_b (1 - L^{-b})^{-1};
// sigma and realization are exact (geometric parts resum in closed form).
struct RBaseTerm {
    Rational coeff;
    int u_exp = 0;
    int mu_k = 0;    // 0 = none
    int mu_twist = 1; // torsor parameter c as a signed unit: +1 or -1
};
struct RCoeff {
    std::vector<RBaseTerm> terms;
    std::vector<int> geom_b;
};
RealClass realize_rc(const RCoeff& c, const RealizeCtx& ctx);
RealClass realize_sigma_rc(int n, const RCoeff& c, const RealizeCtx& ctx);

// Fiber counts of the Newton power-sum value on Sym^m(A^1) = A^m:
// G_t = #{e in F_p^m : twist * p_k(e) = t}.
CountVector sym_power_A1_counts(int m, int k, uint32_t p, uint32_t twist);

// Exact element of the p-th cyclotomic field in the basis 1, z, ..., z^{p-2}.
struct CycNum {
    uint32_t p = 0;
    std::vector<Rational> c; // length p-1

    explicit CycNum(uint32_t p_) : p(p_), c(p_ - 1, 0) {}
    static CycNum from_rational(uint32_t p, const Rational& x) {
        CycNum z(p);
        z.c[0] = x;
        return z;
    }
    CycNum operator+(const CycNum& o) const;
    CycNum operator-(const CycNum& o) const;
    CycNum operator*(const CycNum& o) const;
    bool operator==(const CycNum& o) const { return p == o.p && c == o.c; }
};

// sum_t vec_t zeta^{j t}; two classes agree modulo constants iff all
// components j = 1..p-1 agree.
CycNum fourier(const CountVector& v, uint32_t j);

// Multiply by q^{(sum r_i^2 - ambient)/2} / prod gl_order(r_i, q). The net
// exponent must be even in q^{1/2}, i.e. the integer (sum r^2 - ambient)
// must be even, unless defer_half_power is set (then the residual half power
// is recorded in meta.q_exp_num as an odd numerator).
RealClass phi_normalize(const RealClass& a, int ambient_dim, const std::vector<int>& gauge_ranks,
                        bool defer_half_power = false);

std::string realclass_to_json(const RealClass& a);

} // namespace m2dt
