#include "m2dt/mring.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace m2dt {

MotExpr MotExpr::from_term(const Rational& c, int u_exp, int mu) {
    MotExpr e;
    if (c != 0)
        e.terms_.push_back({c, u_exp, mu == 1 ? 0 : mu});
    return e;
}

MotExpr MotExpr::mu(int k) {
    if (k < 1)
        fail(Errc::Config, "mu(k) needs k >= 1");
    return from_term(1, 0, k);
}

bool MotExpr::has_mu() const {
    for (const auto& t : terms_)
        if (t.mu)
            return true;
    return false;
}

int MotExpr::top_degree() const {
    if (terms_.empty())
        fail(Errc::Internal, "top_degree of zero expression");
    return terms_.front().u_exp;
}

void MotExpr::canonicalize() {
    std::sort(terms_.begin(), terms_.end(), [](const MotTerm& a, const MotTerm& b) {
        if (a.u_exp != b.u_exp)
            return a.u_exp > b.u_exp;
        return a.mu < b.mu;
    });
    std::vector<MotTerm> out;
    for (auto& t : terms_) {
        if (!out.empty() && out.back().u_exp == t.u_exp && out.back().mu == t.mu)
            out.back().coeff += t.coeff;
        else
            out.push_back(t);
    }
    std::erase_if(out, [](const MotTerm& t) { return t.coeff == 0; });
    if (floor_) {
        std::erase_if(out, [&](const MotTerm& t) { return t.u_exp <= *floor_; });
    }
    terms_ = std::move(out);
}

bool MotExpr::operator==(const MotExpr& o) const {
    if (floor_.has_value() != o.floor_.has_value())
        return false;
    if (floor_ && *floor_ != *o.floor_)
        return false;
    return terms_.size() == o.terms_.size() &&
           std::equal(terms_.begin(), terms_.end(), o.terms_.begin(),
                      [](const MotTerm& a, const MotTerm& b) {
                          return a.coeff == b.coeff && a.u_exp == b.u_exp && a.mu == b.mu;
                      });
}

MotExpr operator+(const MotExpr& a, const MotExpr& b) {
    MotExpr r;
    r.terms_ = a.terms_;
    r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
    if (a.floor_ || b.floor_) {
        int f = std::max(a.floor_.value_or(INT32_MIN), b.floor_.value_or(INT32_MIN));
        r.floor_ = f;
    }
    r.canonicalize();
    return r;
}

MotExpr operator-(const MotExpr& a) { return a.scaled(-1); }

MotExpr operator-(const MotExpr& a, const MotExpr& b) { return a + (-b); }

MotExpr MotExpr::scaled(const Rational& c) const {
    MotExpr r = *this;
    if (c == 0) {
        r.terms_.clear();
        return r;
    }
    for (auto& t : r.terms_)
        t.coeff *= c;
    return r;
}

MotExpr operator*(const MotExpr& a, const MotExpr& b) {
    MotExpr r;
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_) {
            int mu = 0;
            if (ta.mu && tb.mu)
                fail(Errc::OutsideSymbolicSubring,
                     "product of two monodromic classes mu(" + std::to_string(ta.mu) + ")*mu(" +
                         std::to_string(tb.mu) + ") has no symbolic form; route through realize");
            mu = ta.mu ? ta.mu : tb.mu;
            r.terms_.push_back({ta.coeff * tb.coeff, ta.u_exp + tb.u_exp, mu});
        }
    if (a.floor_ || b.floor_) {
        int f = INT32_MIN;
        if (a.floor_ && !b.is_zero())
            f = std::max(f, *a.floor_ + b.top_degree());
        if (b.floor_ && !a.is_zero())
            f = std::max(f, *b.floor_ + a.top_degree());
        if (a.is_zero() || b.is_zero())
            f = std::max(a.floor_.value_or(INT32_MIN), b.floor_.value_or(INT32_MIN));
        r.floor_ = f;
    }
    r.canonicalize();
    return r;
}

MotExpr gl_class(int n) {
    if (n < 1)
        fail(Errc::Config, "gl_class needs n >= 1");
    MotExpr r = MotExpr::one();
    for (int i = 0; i < n; ++i)
        r = r * (MotExpr::L(n) - MotExpr::L(i));
    return r;
}

namespace {

// Multisets of size n over Z/k as sorted vectors.
void multisets_rec(int n, int k, int minval, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
    if ((int)cur.size() == n) {
        out.push_back(cur);
        return;
    }
    for (int v = minval; v < k; ++v) {
        cur.push_back(v);
        multisets_rec(n, k, v, cur, out);
        cur.pop_back();
    }
}

std::vector<int> rotate_multiset(const std::vector<int>& m, int s, int k) {
    std::vector<int> r(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        r[i] = (m[i] + s) % k;
    std::sort(r.begin(), r.end());
    return r;
}

} // namespace

MotExpr burnside_sigma(int n, int k) {
    if (k < 1)
        fail(Errc::Config, "burnside_sigma needs k >= 1");
    if (n == 0)
        return MotExpr::one();
    if (k == 1)
        return MotExpr::one(); // Sym^n of a point
    std::vector<std::vector<int>> ms;
    std::vector<int> cur;
    multisets_rec(n, k, 0, cur, ms);
    // Count orbits by size: orbit size = k / #stabilizer.
    std::map<int, long long> orbit_count;
    std::map<std::vector<int>, bool> seen;
    for (const auto& m : ms) {
        // canonical representative: lexicographically minimal translate
        std::vector<int> best = m;
        int stab = 0;
        for (int s = 0; s < k; ++s) {
            auto t = rotate_multiset(m, s, k);
            if (t == m)
                ++stab;
            if (t < best)
                best = t;
        }
        if (seen[best])
            continue;
        seen[best] = true;
        orbit_count[k / stab] += 1;
    }
    MotExpr r;
    for (auto& [size, cnt] : orbit_count) {
        MotExpr cls = (size == 1) ? MotExpr::one() : MotExpr::mu(size);
        r = r + cls.scaled(Rational(cnt));
    }
    return r;
}

namespace {

long long coeff_as_int(const Rational& c) {
    if (denominator(c) != 1)
        fail(Errc::OutsideSymbolicSubring,
             "sigma restricted to integer-coefficient generators, got " + c.str());
    Int n = numerator(c);
    return n.convert_to<long long>();
}

// T-series [sigma^0(t), ..., sigma^n(t)] for a single term t = c*u^j*mu?.
std::vector<MotExpr> term_sigma_series(const MotTerm& t, int n) {
    std::vector<MotExpr> arr(n + 1);
    arr[0] = MotExpr::one();
    long long c = coeff_as_int(t.coeff);
    if (t.mu == 0) {
        for (int m = 1; m <= n; ++m)
            arr[m] = MotExpr::from_term(rising_binomial(c, m), t.u_exp * m, 0);
        return arr;
    }
    if (c != 1 && c != -1)
        fail(Errc::OutsideSymbolicSubring,
             "sigma of " + std::to_string(c) + "*mu(" + std::to_string(t.mu) +
                 "): Cauchy expansion needs mu*mu products");
    for (int m = 1; m <= n; ++m) {
        MotExpr b = burnside_sigma(m, t.mu);
        if (c == -1 && m % 2 == 1)
            b = -b;
        // u-rule
        MotExpr shift = MotExpr::unit_u(t.u_exp * m);
        arr[m] = b * shift;
    }
    return arr;
}

} // namespace

MotExpr sigma(int n, const MotExpr& x) {
    if (n < 0)
        fail(Errc::Config, "sigma order must be >= 0");
    if (n == 0)
        return MotExpr::one();
    if (n == 1)
        return x;
    if (x.is_zero())
        return MotExpr::zero();
    // Product of the per-term T-series, truncated at T^n.
    std::vector<MotExpr> acc(n + 1);
    acc[0] = MotExpr::one();
    for (const auto& t : x.terms()) {
        auto arr = term_sigma_series(t, n);
        std::vector<MotExpr> next(n + 1);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                if (acc[i].is_zero() || arr[j].is_zero())
                    continue;
                next[i + j] = next[i + j] + acc[i] * arr[j];
            }
        acc = std::move(next);
    }
    MotExpr r = acc[n];
    if (auto f = x.trunc_floor()) {
        // Worst case: n-1 known factors at the top degree combine with one
        // unknown factor at or below the floor.
        r.set_trunc_floor(*f + (n - 1) * x.top_degree());
        r = r + MotExpr::zero();
    }
    return r;
}

MotExpr expand_rational(const MotExpr& num, const std::vector<int>& denom_b, int floor) {
    if (!num.is_exact())
        fail(Errc::Config, "expand_rational: numerator must be exact");
    MotExpr r = num;
    for (int b : denom_b) {
        if (b < 1)
            fail(Errc::Config, "expand_rational: denominators are (1 - L^{-b}), b >= 1");
        if (r.is_zero())
            break;
        // Truncated geometric series for (1 - L^{-b})^{-1}: keep terms L^{-bm}
        // while top(r) - 2bm can still land above the floor.
        MotExpr geo;
        for (int m = 0; r.top_degree() - 2 * b * m > floor; ++m)
            geo = geo + MotExpr::L(-b * m);
        r = r * geo;
    }
    r.set_trunc_floor(floor);
    return r + MotExpr::zero(); // re-canonicalize: drops terms at or below floor
}

Rational chi_spec(const MotExpr& x) {
    if (!x.is_exact())
        fail(Errc::Config, "chi_spec requires an exact expression");
    Rational r = 0;
    for (const auto& t : x.terms())
        r += t.coeff * Rational(t.mu ? t.mu : 1);
    return r;
}

EvalResult forget_monodromy_eval(const MotExpr& x, const Rational& q, bool strict) {
    EvalResult res{0, 0};
    if (q <= 0)
        fail(Errc::Config, "forget_monodromy_eval needs q > 0");
    for (const auto& t : x.terms()) {
        if (t.u_exp % 2 != 0) {
            if (strict && x.is_exact())
                fail(Errc::OddHalfPower, "odd u-degree " + std::to_string(t.u_exp) +
                                             " in exact expression under strict evaluation");
            fail(Errc::OddHalfPower, "odd u-degree requires a half-power tail protocol");
        }
        int e = t.u_exp / 2;
        Rational qe = 1;
        if (e >= 0)
            for (int i = 0; i < e; ++i)
                qe *= q;
        else
            for (int i = 0; i < -e; ++i)
                qe /= q;
        res.value += t.coeff * qe * Rational(t.mu ? t.mu : 1);
    }
    if (auto f = x.trunc_floor()) {
        // Certified bound: sum_{deg <= floor} |coeff bound| q^{deg/2} with the
        // conservative per-degree coefficient bound (deg index m = -u_exp).
        // Coefficients of our geometric expansions are bounded by (m+1)^3.
        if (q <= 1)
            fail(Errc::TailTooLarge, "tail bound diverges for q <= 1");
        Rational bound = 0;
        Rational term;
        // sum_{m >= m0} (m+1)^3 q^{-m/2}: sum until the geometric majorant
        // takes over, then close the sum with it.
        long m0 = -(long)*f; // first omitted degree index (u_exp = floor)
        if (m0 < 0)
            m0 = 0;
        Rational sq = 1 / q; // q^{-1}; use q^{-m/2} <= q^{-floor(m/2)}
        for (long m = m0; m < m0 + 64; ++m) {
            Rational w = 1;
            for (long i = 0; i < m / 2; ++i)
                w *= sq;
            term = Rational((m + 1) * (m + 1) * (m + 1)) * w;
            bound += term;
        }
        // Geometric closure: for q >= 2 and m >= 64 the two-step ratio is
        // (1/q)((m+3)/(m+1))^3 <= 0.56, so the remaining sum is < 64 * term.
        bound += term * 64;
        res.tail_bound = bound;
    }
    return res;
}

std::string to_string(const MotExpr& x) {
    if (x.is_zero() && !x.trunc_floor())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : x.terms()) {
        if (!first)
            os << " + ";
        first = false;
        os << t.coeff.str();
        if (t.u_exp != 0)
            os << "*u^" << t.u_exp;
        if (t.mu)
            os << "*mu(" << t.mu << ")";
    }
    if (x.is_zero())
        os << "0";
    if (auto f = x.trunc_floor())
        os << " + O(u^" << *f << ")";
    return os.str();
}

MotExpr parse_motexpr(const std::string& s) {
    MotExpr r;
    std::string str = s;
    // Strip an O(u^f) marker if present.
    std::optional<int> floor;
    auto opos = str.find("+ O(u^");
    if (opos != std::string::npos) {
        auto close = str.find(')', opos);
        floor = std::stoi(str.substr(opos + 6, close - opos - 6));
        str = str.substr(0, opos);
    }
    std::vector<std::string> parts;
    size_t start = 0;
    while (start < str.size()) {
        auto pos = str.find(" + ", start);
        if (pos == std::string::npos) {
            parts.push_back(str.substr(start));
            break;
        }
        parts.push_back(str.substr(start, pos - start));
        start = pos + 3;
    }
    for (auto& part : parts) {
        std::string tok;
        for (char c : part)
            if (!isspace((unsigned char)c))
                tok += c;
        if (tok.empty() || tok == "0")
            continue;
        Rational coeff = 1;
        int u = 0, mu = 0;
        size_t i = 0;
        // coefficient up to first '*' that is not part of u^/mu(
        auto star = tok.find('*');
        std::string head = tok.substr(0, star == std::string::npos ? tok.size() : star);
        if (head.find("u^") == std::string::npos && head != "mu" && head.substr(0, 3) != "mu(") {
            coeff = Rational(head);
            i = (star == std::string::npos) ? tok.size() : star + 1;
        }
        while (i < tok.size()) {
            if (tok.compare(i, 2, "u^") == 0) {
                size_t j = i + 2;
                size_t k = j;
                if (k < tok.size() && (tok[k] == '-' || tok[k] == '+'))
                    ++k;
                while (k < tok.size() && isdigit((unsigned char)tok[k]))
                    ++k;
                u = std::stoi(tok.substr(j, k - j));
                i = k;
            } else if (tok.compare(i, 3, "mu(") == 0) {
                size_t j = i + 3;
                auto k = tok.find(')', j);
                mu = std::stoi(tok.substr(j, k - j));
                i = k + 1;
            } else if (tok[i] == '*') {
                ++i;
            } else {
                fail(Errc::Config, "parse_motexpr: bad token '" + tok + "'");
            }
        }
        r = r + MotExpr::from_term(coeff, u, mu);
    }
    if (floor)
        r.set_trunc_floor(floor);
    return r;
}

} // namespace m2dt
