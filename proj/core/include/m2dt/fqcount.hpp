#pragma once

// Exhaustive representation counting over prime fields: fiber counts of
// trace-of-potential functions, nilpotency, the Kronecker locus, commuting
// matrix counts, GL orders, conjugacy class tables and exact polynomial
// interpolation of count families.

#include "m2dt/common.hpp"
#include "m2dt/dimvec.hpp"
#include "m2dt/fp.hpp"
#include "m2dt/quiver.hpp"

#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace m2dt {

// Fiber counts of a function over A^1(F_p): a length-p vector indexed by
// t in F_p. Compared modulo globally constant vectors.
struct CountVector {
    uint32_t p = 0;
    std::vector<Rational> c;

    CountVector() = default;
    explicit CountVector(uint32_t p_) : p(p_), c(p_, 0) {}
    static CountVector delta0(uint32_t p) {
        CountVector v(p);
        v.c[0] = 1;
        return v;
    }
    static CountVector constant(uint32_t p, const Rational& x) {
        CountVector v(p);
        for (auto& e : v.c)
            e = x;
        return v;
    }

    Rational sum() const;
    CountVector& operator+=(const CountVector& o);
    CountVector operator+(const CountVector& o) const;
    CountVector operator-(const CountVector& o) const;
    CountVector scaled(const Rational& x) const;
    // Counts of t -> f(lambda^{-1} t): relabels fibers when the value
    // function is scaled by lambda.
    CountVector index_rescaled(uint32_t lambda) const;
    bool operator==(const CountVector& o) const { return p == o.p && c == o.c; }
};

// a == b modulo constant vectors, allowing per-entry slack <= tol.
bool equal_mod_const(const CountVector& a, const CountVector& b, const Rational& tol = 0);

struct Rep {
    DimVector dim;
    std::vector<FpMat> mats; // parallel to Quiver::arrows
};

int vertex_dim(const DimVector& n, int v);

// Matrix of a composable path word acting on row vectors: the rightmost
// letter acts first, so the product is M(w_last) ... M(w_0) reversed into
// multiplication order M(w_{l-1}) * ... * M(w_0).
FpMat path_matrix(const Quiver& q, const Rep& r, const Word& w, uint32_t p);

// scale * sum_i coeff_i tr(word_i) evaluated mod p. Fails if p divides a
// coefficient denominator after scaling.
uint32_t trace_potential(const Quiver& q, const Potential& w, const Rep& r, uint32_t p,
                         uint32_t scale = 1);

// True iff the image chain V_{k+1} = sum_a V_k(source a) M(a) reaches zero
// within total-dimension steps.
bool is_nilpotent(const Quiver& q, const Rep& r, uint32_t p);

enum class Sector { All, Nilpotent };

struct FiberOptions {
    uint32_t value_scale = 1;      // counts fibers of value_scale * tr(W)
    bool allow_elimination = true; // integrate out arrows linear in tr(W)
    uint64_t size_limit = 2'000'000'000ull;
    int jobs = 1;
    std::string cache_dir;         // empty = no cache
};

// N_t = #{representations in the sector with value_scale*tr W = t}, exact.
CountVector fiber_counts(const Quiver& q, const Potential& w, const DimVector& n, uint32_t p,
                         Sector sector, const FiberOptions& opt = {});

// Fiber counts over the locus M(AX)=M(YA), M(BX)=M(YB) of the Kronecker
// reduction: (X, Y) enumerated (optionally nilpotent), the (A, B) count per
// pair is p^{2 * dim ker Sylvester}. Value function
// value_scale * tr(X^{d+1} - Y^{d+1})/(d+1).
CountVector kron_locus_counts(int d, const DimVector& n, uint32_t p, bool nilpotent_xy,
                              uint32_t value_scale = 1, uint64_t size_limit = 2'000'000'000ull);

enum class CommFlags { BothFree, FirstNilpotent, BothNilpotent };
enum class CountMethod { Auto, Brute, Centralizer, ClassTable };

// Exact number of pairs (N1, N2) of commuting n x n matrices with the given
// nilpotency flags.
Int commuting_counts(int n, uint32_t p, CommFlags flags, CountMethod method = CountMethod::Auto);

Int gl_order(int n, const Int& q);

// Conjugacy classes of M_n(F_p), n <= 3: representative and class size.
// Classes are determined by the primary rational canonical form. The table
// asserts sum of sizes == p^{n^2}.
struct MatClass {
    FpMat rep;
    Int size;
    int commutant_dim = 0; // dim of {Z : Z rep = rep Z}
    bool nilpotent = false;
};
const std::vector<MatClass>& mat_conj_classes(int n, uint32_t p);

// #{x in M_n(F_p) : scale * tr(x^e) = t} via the class table.
CountVector matrix_power_trace_counts(int n, uint32_t p, int e, uint32_t scale = 1);

struct QPoly {
    std::vector<Rational> c; // ascending degree

    Rational eval(const Rational& q) const;
    bool operator==(const QPoly& o) const { return c == o.c; }
};
std::string to_string(const QPoly& f);

// Interpolate counter(p) as a polynomial in q of degree <= degree_bound from
// the first degree_bound+1 primes supplied; the remaining primes verify the
// fit. Throws NotPolynomial on a verification mismatch.
QPoly poly_interpolate_counts(const std::function<Rational(uint32_t)>& counter, int degree_bound,
                              const std::vector<uint32_t>& primes);

// Dimension vectors of all arrow-invariant subspace pairs of the
// representation. Exhaustive subspace search: total dim <= 4, p <= 3.
std::set<DimVector> subrep_dimvectors(const Quiver& q, const Rep& r, uint32_t p);

// Enumerate all representations of the quiver at the dimension vector,
// calling f on each. Used by small oracles and tests.
void foreach_rep(const Quiver& q, const DimVector& n, uint32_t p,
                 const std::function<void(const Rep&)>& f);

} // namespace m2dt
