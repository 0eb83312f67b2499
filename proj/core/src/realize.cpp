#include "m2dt/realize.hpp"
#include "m2dt/sigma_engine.hpp"

#include "json.hpp"

#include <map>
#include <mutex>

namespace m2dt {

RealClass convolve(const RealClass& a, const RealClass& b) {
    if (a.vec.p != b.vec.p)
        fail(Errc::PrimeMismatch, "convolve: prime mismatch");
    uint32_t p = a.vec.p;
    RealClass r;
    r.vec = CountVector(p);
    for (uint32_t s = 0; s < p; ++s) {
        if (a.vec.c[s] == 0)
            continue;
        for (uint32_t t = 0; t < p; ++t)
            r.vec.c[(s + t) % p] += a.vec.c[s] * b.vec.c[t];
    }
    // Conservative bound propagation: |a| entries are bounded by their exact
    // norm plus the tail; cross terms pick up p-fold sums.
    if (a.tail_bound != 0 || b.tail_bound != 0) {
        Rational na = 0, nb = 0;
        for (const auto& x : a.vec.c)
            na += (x < 0 ? -x : x);
        for (const auto& x : b.vec.c)
            nb += (x < 0 ? -x : x);
        r.tail_bound = a.tail_bound * (nb + b.tail_bound) + b.tail_bound * na;
    }
    r.meta = a.meta;
    return r;
}

bool equal_mod_const_real(const RealClass& a, const RealClass& b) {
    return equal_mod_const(a.vec, b.vec, a.tail_bound + b.tail_bound);
}

CountVector realize_mu(int k, uint32_t p) { return power_torsor_counts(k, p, 1); }

CountVector power_torsor_counts(int k, uint32_t p, uint32_t c) {
    if (k < 1)
        fail(Errc::Config, "power_torsor_counts: k >= 1");
    c %= p;
    if (c == 0)
        fail(Errc::Config, "power_torsor_counts: twist must be a unit");
    uint32_t cinv = fp_inv(c, p);
    CountVector v(p);
    for (uint32_t z = 1; z < p; ++z) {
        uint64_t zk = 1;
        for (int i = 0; i < k; ++i)
            zk = zk * z % p;
        v.c[zk * cinv % p] += 1;
    }
    return v;
}

RealClass realize_halfL(uint32_t p, int eps) {
    if (p % 4 != 1)
        fail(Errc::BadPrime, "realize_halfL needs p = 1 mod 4, got p=" + std::to_string(p));
    RealClass r;
    r.vec = CountVector(p);
    for (uint32_t z = 0; z < p; ++z)
        r.vec.c[z * z % p] += eps;
    r.meta.eps = eps;
    return r;
}

int calibrate_halfL(uint32_t p) {
    for (int eps : {1, -1}) {
        RealClass s = realize_halfL(p, eps);
        // s*s must be p delta_0 modulo constants (true for both signs), and
        // the mu_2 dictionary relation realize(1 - mu(2)) = [A^1 -> z^2]
        // pins the sign: delta_0 - mu_sign * v = delta_0 + v = counts(z^2).
        RealClass ss = convolve(s, s);
        RealClass target;
        target.vec = CountVector::delta0(p).scaled(p);
        if (!equal_mod_const(ss.vec, target.vec))
            continue;
        // rank-1 oracle: the realized square root itself must be the honest
        // quadratic fiber-count vector (positive counts), not its negative.
        CountVector direct(p);
        for (uint32_t z = 0; z < p; ++z)
            direct.c[z * z % p] += 1;
        if (s.vec == direct)
            return eps;
    }
    fail(Errc::Internal, "calibrate_halfL: no sign satisfies the rank-1 oracle");
}

namespace {

// Realized u^j: u = -L^{1/2}, so u^j = (-1)^j s^j with s^2 = p delta_0.
CountVector realize_u_pow(int j, const RealizeCtx& ctx) {
    uint32_t p = ctx.p;
    Rational scale = 1;
    int e = j;
    while (e >= 2) {
        scale *= p;
        e -= 2;
    }
    while (e <= -2) {
        scale /= p;
        e += 2;
    }
    CountVector base = CountVector::delta0(p);
    if (e != 0) {
        RealClass s = realize_halfL(p, ctx.eff_eps());
        base = s.vec;
        if (e == -1)
            scale /= p; // s^{-1} = s / p
    }
    if (j % 2 != 0)
        scale = -scale;
    return base.scaled(scale);
}

CountVector mu_vector(int k, int twist, const RealizeCtx& ctx) {
    uint32_t c = twist >= 0 ? (uint32_t)twist : ctx.p - (uint32_t)(-twist) % ctx.p;
    CountVector v = power_torsor_counts(k, ctx.p, c);
    return v.scaled(ctx.eff_mu_sign());
}

void check_preconditions(const MotExpr& x, const RealizeCtx& ctx) {
    bool any_mu = x.has_mu();
    bool any_odd = false;
    for (const auto& t : x.terms())
        if (t.u_exp % 2 != 0)
            any_odd = true;
    if ((any_mu || any_odd) && ctx.p % 4 != 1)
        fail(Errc::BadPrime, "realization needs p = 1 mod 4");
    for (const auto& t : x.terms())
        if (t.mu && (ctx.p - 1) % (uint32_t)t.mu != 0)
            fail(Errc::BadPrime, "realization of mu(" + std::to_string(t.mu) +
                                     ") needs p = 1 mod " + std::to_string(t.mu));
}

Rational floored_tail_bound(const MotExpr& x, uint32_t p) {
    if (!x.trunc_floor())
        return 0;
    // Every omitted u-degree -m term contributes entries bounded by
    // p^{-m/2}(p-1) times the coefficient bound (m+1)^3 of the geometric
    // expansions; close the sum geometrically.
    long m0 = -(long)*x.trunc_floor();
    if (m0 < 0)
        m0 = 0;
    Rational bound = 0, term = 0;
    Rational invp(1, p);
    for (long m = m0; m < m0 + 64; ++m) {
        Rational w = 1;
        for (long i = 0; i < m / 2; ++i)
            w *= invp;
        term = Rational((m + 1) * (m + 1) * (m + 1)) * Rational(p - 1) * w;
        bound += term;
    }
    return bound + term * 64;
}

} // namespace

RealClass realize_expr(const MotExpr& x, const RealizeCtx& ctx) {
    check_preconditions(x, ctx);
    RealClass out;
    out.vec = CountVector(ctx.p);
    for (const auto& t : x.terms()) {
        CountVector v = realize_u_pow(t.u_exp, ctx).scaled(t.coeff);
        if (t.mu) {
            CountVector m = mu_vector(t.mu, 1, ctx);
            RealClass a{.vec = v}, b{.vec = m};
            v = convolve(a, b).vec;
        }
        out.vec += v;
    }
    out.tail_bound = floored_tail_bound(x, ctx.p);
    out.meta.eps = ctx.eff_eps();
    return out;
}

CountVector sym_power_A1_counts(int m, int k, uint32_t p, uint32_t twist) {
    static std::map<std::tuple<int, int, uint32_t, uint32_t>, CountVector> cache;
    static std::mutex mutex;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find({m, k, p, twist});
        if (it != cache.end())
            return it->second;
    }
    CountVector out(p);
    if (m == 0) {
        out.c[0] = 1;
    } else {
        // iterate over elementary symmetric values (e_1, ..., e_m) in F_p^m;
        // the value is twist * p_k with Newton's identity
        //   p_j = e_1 p_{j-1} - e_2 p_{j-2} + ... + (-1)^{j-1} j e_j.
        std::vector<uint32_t> e(m, 0);
        std::vector<uint32_t> pk(k + 1, 0);
        while (true) {
            pk[0] = m % p; // p_0 = m
            for (int j = 1; j <= k; ++j) {
                uint64_t acc = 0;
                for (int i = 1; i <= j && i <= m; ++i) {
                    uint64_t term = (i == j) ? (uint64_t)e[i - 1] * j % p
                                             : (uint64_t)e[i - 1] * pk[j - i] % p;
                    acc += (i % 2 == 1) ? term : (uint64_t)p - term;
                }
                pk[j] = (uint32_t)(acc % p);
            }
            out.c[(uint64_t)pk[k] * twist % p] += 1;
            int idx = 0;
            for (; idx < m; ++idx) {
                if (++e[idx] < p)
                    break;
                e[idx] = 0;
            }
            if (idx == m)
                break;
        }
    }
    std::lock_guard<std::mutex> lock(mutex);
    cache[{m, k, p, twist}] = out;
    return out;
}

namespace {

struct VecOps {
    uint32_t p;
    CountVector zero() const { return CountVector(p); }
    CountVector unit() const { return CountVector::delta0(p); }
    CountVector add(const CountVector& a, const CountVector& b) const { return a + b; }
    CountVector mul(const CountVector& a, const CountVector& b) const {
        RealClass x{.vec = a}, y{.vec = b};
        return convolve(x, y).vec;
    }
    CountVector scale(const CountVector& a, const Rational& x) const { return a.scaled(x); }
    CountVector geom(int c) const {
        // 1 / (1 - p^{-c}) as a delta_0 multiple
        Rational pc = 1;
        for (int i = 0; i < c; ++i)
            pc *= p;
        return CountVector::delta0(p).scaled(pc / (pc - 1));
    }
};

// T-series power with integer exponent (negative = series inverse first).
std::vector<CountVector> series_pow(std::vector<CountVector> a, long long c, int n,
                                    const VecOps& ops) {
    if (c < 0) {
        // invert: b_0 = unit, b_m = -sum_{i>=1} a_i b_{m-i}
        std::vector<CountVector> b(n + 1, ops.zero());
        b[0] = ops.unit();
        for (int m = 1; m <= n; ++m) {
            CountVector s = ops.zero();
            for (int i = 1; i <= m; ++i)
                s = ops.add(s, ops.mul(a[i], b[m - i]));
            b[m] = s.scaled(-1);
        }
        a = std::move(b);
        c = -c;
    }
    std::vector<CountVector> acc(n + 1, ops.zero());
    acc[0] = ops.unit();
    while (c > 0) {
        std::vector<CountVector> next(n + 1, ops.zero());
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j)
                next[i + j] = ops.add(next[i + j], ops.mul(acc[i], a[j]));
        acc = std::move(next);
        --c;
    }
    return acc;
}

// sigma-array of a single base term for the family engine.
std::vector<CountVector> base_sigma_array(const RBaseTerm& t, int n, const RealizeCtx& ctx) {
    VecOps ops{ctx.p};
    if (denominator(t.coeff) != 1)
        fail(Errc::OutsideSymbolicSubring, "realized sigma needs integer coefficients, got " +
                                               t.coeff.str());
    long long c = numerator(t.coeff).convert_to<long long>();
    std::vector<CountVector> arr(n + 1, ops.zero());
    if (t.mu_k == 0) {
        for (int m = 0; m <= n; ++m)
            arr[m] = realize_u_pow(t.u_exp * m, ctx).scaled(rising_binomial(c, m));
        return arr;
    }
    if ((ctx.p - 1) % (uint32_t)t.mu_k != 0)
        fail(Errc::BadPrime, "mu(" + std::to_string(t.mu_k) + ") needs p = 1 mod k");
    // D_m = sigma^m(-mu_k) = G^m - G^{m-1} from the symmetric powers of
    // [A^1 -> twist * z^k]; the +mu array is the series inverse.
    uint32_t twist = t.mu_twist >= 0 ? (uint32_t)t.mu_twist
                                     : ctx.p - (uint32_t)((-t.mu_twist) % (int)ctx.p);
    std::vector<CountVector> d(n + 1, ops.zero());
    d[0] = ops.unit();
    for (int m = 1; m <= n; ++m) {
        CountVector g = sym_power_A1_counts(m, t.mu_k, ctx.p, twist);
        CountVector gm1 = sym_power_A1_counts(m - 1, t.mu_k, ctx.p, twist);
        d[m] = g - gm1;
        if (ctx.eff_mu_sign() != -1) {
            // fault injection: flip the defining vector of mu inside sigma too
            d[m] = d[m].scaled(-1);
        }
    }
    long long pow = -c; // d is the array of (-1)*mu-term
    std::vector<CountVector> base = d;
    for (int m = 0; m <= n; ++m) {
        // apply the u-exponent rule
        base[m] = ops.mul(base[m], realize_u_pow(t.u_exp * m, ctx));
    }
    return series_pow(std::move(base), pow, n, ops);
}

std::vector<CountVector> sigma_series_rc(int n, const RCoeff& c, const RealizeCtx& ctx) {
    VecOps ops{ctx.p};
    std::vector<SigmaFamily<CountVector>> fams;
    for (const auto& t : c.terms) {
        SigmaFamily<CountVector> fam;
        fam.base = base_sigma_array(t, n, ctx);
        fam.geom_b = c.geom_b;
        fams.push_back(std::move(fam));
    }
    return sigma_series(fams, n, ops);
}

} // namespace

RealClass realize_rc(const RCoeff& c, const RealizeCtx& ctx) {
    RealClass out;
    out.vec = CountVector(ctx.p);
    VecOps ops{ctx.p};
    CountVector geo = ops.unit();
    for (int b : c.geom_b)
        geo = ops.mul(geo, ops.geom(b));
    for (const auto& t : c.terms) {
        CountVector v = realize_u_pow(t.u_exp, ctx).scaled(t.coeff);
        if (t.mu_k)
            v = ops.mul(v, mu_vector(t.mu_k, t.mu_twist, ctx));
        out.vec += ops.mul(v, geo);
    }
    out.meta.eps = ctx.eff_eps();
    return out;
}

RealClass realize_sigma_rc(int n, const RCoeff& c, const RealizeCtx& ctx) {
    RealClass out;
    out.vec = sigma_series_rc(n, c, ctx)[n];
    out.meta.eps = ctx.eff_eps();
    return out;
}

RealClass realize_sigma(int n, const MotExpr& x, const RealizeCtx& ctx) {
    check_preconditions(x, ctx);
    RCoeff c;
    for (const auto& t : x.terms())
        c.terms.push_back({t.coeff, t.u_exp, t.mu, 1});
    RealClass out = realize_sigma_rc(n, c, ctx);
    if (x.trunc_floor()) {
        Rational b = floored_tail_bound(x, ctx.p);
        // n-fold products against the known part: scale conservatively
        Rational norm = 0;
        for (const auto& v : out.vec.c)
            norm += (v < 0 ? -v : v);
        out.tail_bound = b * (norm + 1) * n * ctx.p;
    }
    return out;
}

CycNum CycNum::operator+(const CycNum& o) const {
    CycNum r = *this;
    for (size_t i = 0; i < c.size(); ++i)
        r.c[i] += o.c[i];
    return r;
}

CycNum CycNum::operator-(const CycNum& o) const {
    CycNum r = *this;
    for (size_t i = 0; i < c.size(); ++i)
        r.c[i] -= o.c[i];
    return r;
}

CycNum CycNum::operator*(const CycNum& o) const {
    // convolution in zeta powers mod p, then reduce with
    // zeta^{p-1} = -(1 + zeta + ... + zeta^{p-2})
    std::vector<Rational> full(2 * p, 0);
    for (uint32_t i = 0; i < p - 1; ++i)
        for (uint32_t j = 0; j < p - 1; ++j)
            full[i + j] += c[i] * o.c[j];
    CycNum r(p);
    for (uint32_t e = 0; e < 2 * p; ++e) {
        if (full[e] == 0)
            continue;
        uint32_t m = e % p;
        if (m == p - 1) {
            for (uint32_t i = 0; i < p - 1; ++i)
                r.c[i] -= full[e];
        } else {
            r.c[m] += full[e];
        }
    }
    return r;
}

CycNum fourier(const CountVector& v, uint32_t j) {
    CycNum r(v.p);
    for (uint32_t t = 0; t < v.p; ++t) {
        if (v.c[t] == 0)
            continue;
        uint32_t e = (uint64_t)j * t % v.p;
        if (e == v.p - 1) {
            for (uint32_t i = 0; i < v.p - 1; ++i)
                r.c[i] -= v.c[t];
        } else {
            r.c[e] += v.c[t];
        }
    }
    return r;
}

RealClass phi_normalize(const RealClass& a, int ambient_dim, const std::vector<int>& gauge_ranks,
                        bool defer_half_power) {
    int sum_r2 = 0;
    for (int r : gauge_ranks)
        sum_r2 += r * r;
    int num = sum_r2 - ambient_dim; // exponent numerator over 2
    if (num % 2 != 0 && !defer_half_power)
        fail(Errc::HalfPowerResidue,
             "net exponent " + std::to_string(num) + "/2 is a half power; request deferral");
    RealClass out = a;
    Rational factor = 1;
    int e = num / 2; // deferred residue recorded below when odd
    Rational pq = a.vec.p;
    for (int i = 0; i < std::abs(e); ++i) {
        if (e > 0)
            factor *= pq;
        else
            factor /= pq;
    }
    for (int r : gauge_ranks)
        if (r > 0)
            factor /= Rational(gl_order(r, a.vec.p));
    out.vec = a.vec.scaled(factor);
    out.tail_bound = a.tail_bound * (factor < 0 ? -factor : factor);
    out.meta.q_exp_num = num;
    out.meta.gl_ranks = gauge_ranks;
    return out;
}

std::string realclass_to_json(const RealClass& a) {
    nlohmann::json j;
    j["p"] = a.vec.p;
    j["counts"] = nlohmann::json::array();
    for (const auto& x : a.vec.c)
        j["counts"].push_back(x.str());
    j["normalization"] = {{"qExpNum", a.meta.q_exp_num},
                          {"glRanks", a.meta.gl_ranks},
                          {"eps", a.meta.eps}};
    if (a.tail_bound != 0)
        j["tailBound"] = a.tail_bound.str();
    return j.dump();
}

} // namespace m2dt
