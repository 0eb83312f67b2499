#pragma once

// Quivers, cyclic potentials and their noncommutative derivatives, the
// (-2)-curve and conifold builders, exact slope comparison for stability
// data, and Harder-Narasimhan type enumeration.

#include "m2dt/common.hpp"
#include "m2dt/dimvec.hpp"

#include <string>
#include <vector>

namespace m2dt {

struct Arrow {
    std::string name;
    int source = 0;
    int target = 0;
};

struct Quiver {
    int vertex_count = 0;
    std::vector<Arrow> arrows;

    int arrow_index(const std::string& name) const;
    const Arrow& arrow(const std::string& name) const { return arrows[arrow_index(name)]; }
    // Canonical text used in cache keys.
    std::string signature() const;
};

// A word is a sequence of arrow names; the stored order is reading order and
// the action on right modules is right to left (the last letter acts first).
using Word = std::vector<std::string>;

struct PotTerm {
    Rational coeff;
    Word word;
};

// Linear combination of cyclic words; words are kept in the lexicographically
// minimal rotation, so equality of terms is equality modulo rotation.
struct Potential {
    std::vector<PotTerm> terms;

    void add(const Rational& c, Word w); // canonicalizes and merges
    bool is_zero() const { return terms.empty(); }
    bool operator==(const Potential& o) const;
    std::string signature() const;
};

// Rotate to the lexicographically minimal rotation.
Word min_rotation(Word w);

bool word_is_closed(const Quiver& q, const Word& w);

// Noncommutative derivative dW/dE = sum over occurrences of E of the
// complementary path, extended linearly. The returned paths are honest
// (non-cyclic) paths from target(E) to source(E).
std::vector<std::pair<Rational, Word>> ncderiv(const Quiver& q, const Potential& w,
                                               const std::string& arrow);

// The (-2)-curve quiver: vertices {0,1}; A,B: 0->1; C,D: 1->0; X: 0->0;
// Y: 1->1; with potential X^{d+1}/(d+1) - Y^{d+1}/(d+1) - XCA + XDB + YAC - YBD.
std::pair<Quiver, Potential> build_minus2(int d);

// Conifold: the four arrows A,B,C,D with potential ACBD - ADBC.
std::pair<Quiver, Potential> build_conifold();

// The five-loop quiver B,C,D,X,Y on one vertex with the reduced potential
// X^{d+1}/(d+1) - Y^{d+1}/(d+1) - XC + XDB + YC - YBD.
std::pair<Quiver, Potential> build_five_loop(int d);

// Expand XDB - XBD + (X-Y)(BD - C + (X^d + X^{d-1}Y + ... + Y^d)/(d+1)) as
// cyclic words and subtract the five-loop potential; returns the residual
// (zero when the splitting telescopes).
Potential splitting_identity(int d);

struct GaussianRational {
    Rational re, im;
};

// Per-vertex stability values in the closed upper half plane minus the
// nonnegative real axis: im > 0, or im == 0 and re < 0.
struct Stability {
    std::vector<GaussianRational> values;

    GaussianRational eval(const DimVector& n) const;
    // Generic iff gamma(e0) and gamma(e1) span the plane; then dimension
    // vectors have equal slope only when proportional.
    bool is_generic() const;
};

// arg(gamma(m)) < arg(gamma(n)), exactly, via cross multiplication.
bool slope_less(const Stability& gamma, const DimVector& m, const DimVector& n);
bool slope_equal(const Stability& gamma, const DimVector& m, const DimVector& n);

struct HNType {
    std::vector<DimVector> parts; // strictly decreasing slope, summing to target
};

// All HN types for the target: ordered tuples of positive multiples of
// support vectors with strictly decreasing slope summing to the target.
std::vector<HNType> hn_types(const std::vector<DimVector>& support, const DimVector& target,
                             const Stability& gamma);

// Potential text format "c1*W1 + c2*W2" with words as concatenated arrow
// names (single-letter names assumed), canonical rotations.
std::string to_string(const Potential& w);
Potential parse_potential(const std::string& s);

} // namespace m2dt
