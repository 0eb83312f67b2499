#include "m2dt/geom_coeff.hpp"
#include "m2dt/sigma_engine.hpp"

#include <algorithm>
#include <sstream>

namespace m2dt {

LaurentQ LaurentQ::operator+(const LaurentQ& o) const {
    LaurentQ r = *this;
    for (const auto& [e, x] : o.c) {
        r.c[e] += x;
        if (r.c[e] == 0)
            r.c.erase(e);
    }
    return r;
}

LaurentQ LaurentQ::operator-(const LaurentQ& o) const {
    LaurentQ neg;
    for (const auto& [e, x] : o.c)
        neg.c[e] = -x;
    return *this + neg;
}

LaurentQ LaurentQ::operator*(const LaurentQ& o) const {
    LaurentQ r;
    for (const auto& [e1, x1] : c)
        for (const auto& [e2, x2] : o.c) {
            r.c[e1 + e2] += x1 * x2;
            if (r.c[e1 + e2] == 0)
                r.c.erase(e1 + e2);
        }
    return r;
}

Rational LaurentQ::eval(const Rational& q) const {
    Rational acc = 0;
    for (const auto& [e, x] : c) {
        Rational qe = 1;
        for (int i = 0; i < std::abs(e); ++i)
            qe *= q;
        if (e >= 0)
            acc += x * qe;
        else
            acc += x / qe;
    }
    return acc;
}

GeomCoeff GeomCoeff::over_gl(const LaurentQ& f, int n) {
    GeomCoeff g;
    g.num_ = f * LaurentQ::term(1, -n * n);
    for (int j = 1; j <= n; ++j)
        g.denom_.push_back(j);
    std::sort(g.denom_.begin(), g.denom_.end());
    return g;
}

GeomCoeff GeomCoeff::from_qpoly(const QPoly& f) {
    LaurentQ l;
    for (size_t i = 0; i < f.c.size(); ++i)
        if (f.c[i] != 0)
            l.c[(int)i] = f.c[i];
    return from_laurent(l);
}

namespace {

// (1 - q^{-b}) as a Laurent polynomial
LaurentQ denom_factor(int b) { return LaurentQ::term(1, 0) - LaurentQ::term(1, -b); }

// numerator scaled so that both operands share the union-max denominator
LaurentQ lift_num(const GeomCoeff& g, const std::vector<int>& target) {
    LaurentQ n = g.num();
    std::vector<int> mine = g.denom_b();
    // multiset difference target \ mine
    std::vector<int> extra;
    auto it = mine.begin();
    for (int b : target) {
        if (it != mine.end() && *it == b)
            ++it;
        else
            extra.push_back(b);
    }
    for (int b : extra)
        n = n * denom_factor(b);
    return n;
}

std::vector<int> denom_union(const std::vector<int>& a, const std::vector<int>& b) {
    // multiset max
    std::vector<int> out;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (i < a.size() && (j == b.size() || a[i] < b[j]))
            out.push_back(a[i]), ++i;
        else if (j < b.size() && (i == a.size() || b[j] < a[i]))
            out.push_back(b[j]), ++j;
        else {
            out.push_back(a[i]);
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

GeomCoeff GeomCoeff::operator+(const GeomCoeff& o) const {
    GeomCoeff r;
    r.denom_ = denom_union(denom_, o.denom_);
    r.num_ = lift_num(*this, r.denom_) + lift_num(o, r.denom_);
    if (r.num_.is_zero())
        r.denom_.clear();
    return r;
}

GeomCoeff GeomCoeff::operator-(const GeomCoeff& o) const { return *this + o.scaled(-1); }

GeomCoeff GeomCoeff::operator*(const GeomCoeff& o) const {
    GeomCoeff r;
    r.num_ = num_ * o.num_;
    r.denom_ = denom_;
    r.denom_.insert(r.denom_.end(), o.denom_.begin(), o.denom_.end());
    std::sort(r.denom_.begin(), r.denom_.end());
    if (r.num_.is_zero())
        r.denom_.clear();
    return r;
}

GeomCoeff GeomCoeff::scaled(const Rational& x) const {
    GeomCoeff r = *this;
    if (x == 0)
        return zero();
    for (auto& [e, c] : r.num_.c)
        c *= x;
    return r;
}

bool GeomCoeff::operator==(const GeomCoeff& o) const {
    std::vector<int> common = denom_union(denom_, o.denom_);
    return lift_num(*this, common) == lift_num(o, common);
}

Rational GeomCoeff::eval(const Rational& q) const {
    Rational d = 1;
    for (int b : denom_) {
        Rational f = denom_factor(b).eval(q);
        if (f == 0)
            fail(Errc::Config, "GeomCoeff::eval at a pole");
        d *= f;
    }
    return num_.eval(q) / d;
}

namespace {

struct GeomOps {
    GeomCoeff zero() const { return GeomCoeff::zero(); }
    GeomCoeff unit() const { return GeomCoeff::one(); }
    GeomCoeff add(const GeomCoeff& a, const GeomCoeff& b) const { return a + b; }
    GeomCoeff mul(const GeomCoeff& a, const GeomCoeff& b) const { return a * b; }
    GeomCoeff scale(const GeomCoeff& a, const Rational& x) const { return a.scaled(x); }
    GeomCoeff geom(int c) const { return GeomCoeff::geom(c); }
};

} // namespace

GeomCoeff sigma_geom(int n, const GeomCoeff& x) {
    if (n == 0)
        return GeomCoeff::one();
    if (n == 1)
        return x;
    std::vector<SigmaFamily<GeomCoeff>> fams;
    for (const auto& [e, coeff] : x.num().c) {
        if (denominator(coeff) != 1)
            fail(Errc::OutsideSymbolicSubring,
                 "sigma_geom: integer coefficients only, got " + coeff.str());
        long long c = numerator(coeff).convert_to<long long>();
        SigmaFamily<GeomCoeff> fam;
        fam.geom_b = x.denom_b();
        for (int j = 0; j <= n; ++j)
            fam.base.push_back(
                GeomCoeff::from_laurent(LaurentQ::term(rising_binomial(c, j), e * j)));
        fams.push_back(std::move(fam));
    }
    return sigma_series(fams, n, GeomOps{})[n];
}

std::string to_string(const GeomCoeff& g) {
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (const auto& [e, c] : g.num().c) {
        if (!first)
            os << " + ";
        first = false;
        os << c.str() << "*q^" << e;
    }
    if (first)
        os << "0";
    os << ")";
    for (int b : g.denom_b())
        os << "/(1-q^-" << b << ")";
    return os.str();
}

} // namespace m2dt
