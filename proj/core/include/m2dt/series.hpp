#pragma once

// Truncated power series in the dimension-vector symbols e_n over a pluggable
// coefficient ring, with Sym (plethystic exponential), its inverse log_sym,
// and power-structure exponentiation.

#include "m2dt/common.hpp"
#include "m2dt/dimvec.hpp"
#include "m2dt/geom_coeff.hpp"
#include "m2dt/mring.hpp"

#include <functional>
#include <map>
#include <string>

namespace m2dt {

template <class R> struct CoeffTraits;

template <> struct CoeffTraits<MotExpr> {
    static MotExpr zero() { return MotExpr::zero(); }
    static MotExpr one() { return MotExpr::one(); }
    static MotExpr add(const MotExpr& a, const MotExpr& b) { return a + b; }
    static MotExpr mul(const MotExpr& a, const MotExpr& b) { return a * b; }
    static MotExpr sigma_n(int n, const MotExpr& x) { return sigma(n, x); }
    static bool is_zero(const MotExpr& x) { return x.is_zero(); }
    static bool equal(const MotExpr& a, const MotExpr& b) { return a == b; }
};

template <> struct CoeffTraits<GeomCoeff> {
    static GeomCoeff zero() { return GeomCoeff::zero(); }
    static GeomCoeff one() { return GeomCoeff::one(); }
    static GeomCoeff add(const GeomCoeff& a, const GeomCoeff& b) { return a + b; }
    static GeomCoeff mul(const GeomCoeff& a, const GeomCoeff& b) { return a * b; }
    static GeomCoeff sigma_n(int n, const GeomCoeff& x) { return sigma_geom(n, x); }
    static bool is_zero(const GeomCoeff& x) { return x.is_zero(); }
    static bool equal(const GeomCoeff& a, const GeomCoeff& b) { return a == b; }
};

template <class R> class EvSeries {
  public:
    using Traits = CoeffTraits<R>;

    explicit EvSeries(int trunc = 6) : trunc_(trunc) {}

    static EvSeries unit(int trunc) {
        EvSeries s(trunc);
        s.set({0, 0}, Traits::one());
        return s;
    }

    int trunc() const { return trunc_; }
    const std::map<DimVector, R>& coeffs() const { return c_; }

    R at(const DimVector& n) const {
        auto it = c_.find(n);
        return it == c_.end() ? Traits::zero() : it->second;
    }
    void set(const DimVector& n, R v) {
        if (n.n0 < 0 || n.n1 < 0 || n.total() > trunc_)
            fail(Errc::Config, "EvSeries coefficient outside the truncation");
        if (Traits::is_zero(v))
            c_.erase(n);
        else
            c_[n] = std::move(v);
    }
    void add_to(const DimVector& n, const R& v) {
        if (n.total() > trunc_)
            return;
        set(n, Traits::add(at(n), v));
    }

    EvSeries operator+(const EvSeries& o) const {
        EvSeries r(std::min(trunc_, o.trunc_));
        for (const auto& [n, v] : c_)
            if (n.total() <= r.trunc_)
                r.add_to(n, v);
        for (const auto& [n, v] : o.c_)
            if (n.total() <= r.trunc_)
                r.add_to(n, v);
        return r;
    }

    EvSeries operator*(const EvSeries& o) const {
        EvSeries r(std::min(trunc_, o.trunc_));
        for (const auto& [n1, v1] : c_)
            for (const auto& [n2, v2] : o.c_) {
                DimVector n = n1 + n2;
                if (n.total() <= r.trunc_)
                    r.add_to(n, Traits::mul(v1, v2));
            }
        return r;
    }

    EvSeries scaled(const R& m) const {
        EvSeries r(trunc_);
        for (const auto& [n, v] : c_)
            r.add_to(n, Traits::mul(v, m));
        return r;
    }

    bool operator==(const EvSeries& o) const {
        for (const auto& [n, v] : c_)
            if (!Traits::equal(v, o.at(n)))
                return false;
        for (const auto& [n, v] : o.c_)
            if (!Traits::equal(v, at(n)))
                return false;
        return true;
    }

  private:
    int trunc_;
    std::map<DimVector, R> c_;
};

// Sym(S) for S with zero constant term: for each target n, the sum over
// multisets {(v_j, m_j)} with sum m_j v_j = n of prod sigma^{m_j}(S[v_j]).
template <class R> EvSeries<R> sym(const EvSeries<R>& s) {
    using T = CoeffTraits<R>;
    if (!T::is_zero(s.at({0, 0})))
        fail(Errc::Config, "sym needs zero constant term");
    std::vector<std::pair<DimVector, R>> support(s.coeffs().begin(), s.coeffs().end());
    // memoized sigma powers per support vector
    std::map<std::pair<size_t, int>, R> sig;
    auto sigma_of = [&](size_t i, int m) {
        auto key = std::make_pair(i, m);
        auto it = sig.find(key);
        if (it == sig.end())
            it = sig.emplace(key, T::sigma_n(m, support[i].second)).first;
        return it->second;
    };
    EvSeries<R> out(s.trunc());
    // recursive enumeration of multiplicities over the support
    std::function<void(size_t, DimVector, R)> rec = [&](size_t i, DimVector used, R prod) {
        if (i == support.size()) {
            out.add_to(used, prod);
            return;
        }
        const DimVector v = support[i].first;
        for (int m = 0;; ++m) {
            DimVector nused{used.n0 + m * v.n0, used.n1 + m * v.n1};
            if (nused.total() > s.trunc())
                break;
            R np = (m == 0) ? prod : T::mul(prod, sigma_of(i, m));
            rec(i + 1, nused, np);
            if (v.is_zero())
                break;
        }
    };
    rec(0, {0, 0}, T::one());
    return out;
}

template <class R> R minus_one();
template <> inline MotExpr minus_one<MotExpr>() { return -MotExpr::one(); }
template <> inline GeomCoeff minus_one<GeomCoeff>() { return GeomCoeff::one().scaled(-1); }

// The unique zero-constant-term series with sym(log_sym(S)) = S up to the
// truncation, computed degree by degree.
template <class R> EvSeries<R> log_sym(const EvSeries<R>& s) {
    using T = CoeffTraits<R>;
    if (!T::equal(s.at({0, 0}), T::one()))
        fail(Errc::Config, "log_sym needs constant term 1");
    EvSeries<R> l(s.trunc());
    for (int deg = 1; deg <= s.trunc(); ++deg) {
        EvSeries<R> expansion = sym(l);
        for (int a = 0; a <= deg; ++a) {
            DimVector n{a, deg - a};
            R delta = T::add(s.at(n), T::mul(expansion.at(n), minus_one<R>()));
            l.add_to(n, delta);
        }
    }
    return l;
}

// Power structure exponentiation A^m = Sym(m * log_sym(A)).
template <class R> EvSeries<R> power(const EvSeries<R>& s, const R& m) {
    return sym(log_sym(s).scaled(m));
}

std::string series_to_json(const EvSeries<MotExpr>& s);

} // namespace m2dt
