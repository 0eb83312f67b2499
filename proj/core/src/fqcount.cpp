#include "m2dt/fqcount.hpp"
#include "m2dt/cache.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace m2dt {

Rational CountVector::sum() const {
    Rational s = 0;
    for (const auto& x : c)
        s += x;
    return s;
}

CountVector& CountVector::operator+=(const CountVector& o) {
    if (p != o.p)
        fail(Errc::PrimeMismatch, "CountVector prime mismatch");
    for (uint32_t t = 0; t < p; ++t)
        c[t] += o.c[t];
    return *this;
}

CountVector CountVector::operator+(const CountVector& o) const {
    CountVector r = *this;
    r += o;
    return r;
}

CountVector CountVector::operator-(const CountVector& o) const {
    if (p != o.p)
        fail(Errc::PrimeMismatch, "CountVector prime mismatch");
    CountVector r = *this;
    for (uint32_t t = 0; t < p; ++t)
        r.c[t] -= o.c[t];
    return r;
}

CountVector CountVector::scaled(const Rational& x) const {
    CountVector r = *this;
    for (auto& e : r.c)
        e *= x;
    return r;
}

CountVector CountVector::index_rescaled(uint32_t lambda) const {
    lambda %= p;
    if (lambda == 0)
        fail(Errc::Config, "index_rescaled by zero");
    CountVector r(p);
    for (uint32_t t = 0; t < p; ++t)
        r.c[(uint64_t)lambda * t % p] = c[t];
    return r;
}

bool equal_mod_const(const CountVector& a, const CountVector& b, const Rational& tol) {
    if (a.p != b.p)
        fail(Errc::PrimeMismatch, "equal_mod_const prime mismatch");
    CountVector d = a - b;
    for (uint32_t t = 0; t < a.p; ++t) {
        Rational dev = d.c[t] - d.c[0];
        if (dev < 0)
            dev = -dev;
        if (dev > 2 * tol)
            return false;
    }
    return true;
}

int vertex_dim(const DimVector& n, int v) { return v == 0 ? n.n0 : n.n1; }

FpMat path_matrix(const Quiver& q, const Rep& r, const Word& w, uint32_t p) {
    if (w.empty())
        fail(Errc::Config, "path_matrix of empty word");
    FpMat m = r.mats[q.arrow_index(w.back())];
    for (int i = (int)w.size() - 2; i >= 0; --i)
        m = fp_mul(m, r.mats[q.arrow_index(w[i])], p);
    return m;
}

namespace {

uint32_t rational_mod_p(const Rational& c, uint32_t p) {
    Int num = numerator(c) % p;
    Int den = denominator(c) % p;
    if (den == 0)
        fail(Errc::Config, "coefficient denominator divisible by p=" + std::to_string(p) +
                               "; use a value scale");
    uint32_t n = (uint32_t)(((num % p) + p) % p);
    uint32_t d = (uint32_t)(((den % p) + p) % p);
    return n * fp_inv(d, p) % p;
}

} // namespace

uint32_t trace_potential(const Quiver& q, const Potential& w, const Rep& r, uint32_t p,
                         uint32_t scale) {
    // The scale folds into the coefficients over Q first, so a scale that
    // clears a denominator keeps the term well defined even when p divides
    // the scale.
    uint32_t acc = 0;
    for (const auto& t : w.terms) {
        uint32_t c = rational_mod_p(t.coeff * scale, p);
        if (!c)
            continue;
        FpMat m = path_matrix(q, r, t.word, p);
        acc = (acc + c * fp_trace(m, p)) % p;
    }
    return acc;
}

bool is_nilpotent(const Quiver& q, const Rep& r, uint32_t p) {
    int total = r.dim.total();
    if (total == 0)
        return true;
    // Per-vertex row-space bases, starting from the full spaces.
    std::vector<FpMat> basis(2);
    for (int v = 0; v < 2; ++v)
        basis[v] = FpMat::identity(vertex_dim(r.dim, v));
    auto space_dim = [&]() { return basis[0].rows + basis[1].rows; };
    for (int step = 0; step < total; ++step) {
        std::vector<std::vector<uint32_t>> rows(2);
        std::vector<int> nrows(2, 0);
        for (size_t ai = 0; ai < q.arrows.size(); ++ai) {
            const Arrow& a = q.arrows[ai];
            const FpMat& src = basis[a.source >= 1 ? 1 : a.source];
            if (src.rows == 0 || r.mats[ai].cols == 0)
                continue;
            FpMat img = fp_mul(src, r.mats[ai], p);
            int v = a.target >= 1 ? 1 : a.target;
            for (int i = 0; i < img.rows; ++i) {
                for (int j = 0; j < img.cols; ++j)
                    rows[v].push_back(img.at(i, j));
                ++nrows[v];
            }
        }
        for (int v = 0; v < 2; ++v) {
            int cols = vertex_dim(r.dim, v);
            FpMat m(nrows[v], cols);
            m.a = rows[v];
            // Echelonize; the pivot rows form the new basis.
            int rr = 0;
            for (int col = 0; col < m.cols && rr < m.rows; ++col) {
                int pivot = -1;
                for (int i = rr; i < m.rows; ++i)
                    if (m.at(i, col)) {
                        pivot = i;
                        break;
                    }
                if (pivot < 0)
                    continue;
                for (int j = 0; j < m.cols; ++j)
                    std::swap(m.at(pivot, j), m.at(rr, j));
                uint32_t inv = fp_inv(m.at(rr, col), p);
                for (int j = col; j < m.cols; ++j)
                    m.at(rr, j) = m.at(rr, j) * inv % p;
                for (int i = 0; i < m.rows; ++i) {
                    if (i == rr)
                        continue;
                    uint32_t f = m.at(i, col);
                    if (!f)
                        continue;
                    for (int j = col; j < m.cols; ++j)
                        m.at(i, j) = (m.at(i, j) + (p - f) * m.at(rr, j)) % p;
                }
                ++rr;
            }
            FpMat nb(rr, cols);
            for (int i = 0; i < rr; ++i)
                for (int j = 0; j < cols; ++j)
                    nb.at(i, j) = m.at(i, j);
            basis[v] = nb;
        }
        if (space_dim() == 0)
            return true;
    }
    return space_dim() == 0;
}

namespace {

struct Cells {
    std::vector<std::pair<int, int>> shape; // per arrow (rows, cols)
    std::vector<int> sizes;
    uint64_t total_cells = 0;
};

Cells rep_cells(const Quiver& q, const DimVector& n) {
    Cells c;
    for (const auto& a : q.arrows) {
        int r = vertex_dim(n, a.source);
        int cc = vertex_dim(n, a.target);
        c.shape.push_back({r, cc});
        c.sizes.push_back(r * cc);
        c.total_cells += (uint64_t)r * cc;
    }
    return c;
}

Rep make_zero_rep(const Quiver& q, const DimVector& n) {
    Rep r;
    r.dim = n;
    for (const auto& a : q.arrows)
        r.mats.push_back(FpMat(vertex_dim(n, a.source), vertex_dim(n, a.target)));
    return r;
}

double pow_estimate(uint32_t p, uint64_t cells) {
    double e = 1;
    for (uint64_t i = 0; i < cells; ++i)
        e *= p;
    return e;
}

// Advance the flattened entries of the arrows listed in `which` as an
// odometer; returns false on wrap-around.
bool advance(Rep& r, const std::vector<int>& which, uint32_t p) {
    for (int ai : which)
        for (auto& x : r.mats[ai].a) {
            if (++x < p)
                return true;
            x = 0;
        }
    return false;
}

// Arrows eliminable for sector All: each potential word contains at most one
// occurrence from the chosen set, and every chosen arrow is linear in W.
std::vector<int> choose_eliminable(const Quiver& q, const Potential& w, const Cells& cells) {
    // degree per arrow per word
    std::vector<int> candidates;
    for (size_t ai = 0; ai < q.arrows.size(); ++ai) {
        if (cells.sizes[ai] == 0)
            continue;
        bool linear = true;
        for (const auto& t : w.terms) {
            int deg = (int)std::count(t.word.begin(), t.word.end(), q.arrows[ai].name);
            if (deg > 1)
                linear = false;
        }
        if (linear)
            candidates.push_back((int)ai);
    }
    // Greedy: largest cell count first, respecting <= 1 eliminated letter per word.
    std::sort(candidates.begin(), candidates.end(),
              [&](int a, int b) { return cells.sizes[a] > cells.sizes[b]; });
    std::vector<int> chosen;
    for (int ai : candidates) {
        bool ok = true;
        for (const auto& t : w.terms) {
            int cnt = (int)std::count(t.word.begin(), t.word.end(), q.arrows[ai].name);
            for (int bj : chosen)
                cnt += (int)std::count(t.word.begin(), t.word.end(), q.arrows[bj].name);
            if (cnt > 1)
                ok = false;
        }
        if (ok)
            chosen.push_back(ai);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<uint64_t> count_range(const Quiver& q, const Potential& w, const DimVector& n,
                                  uint32_t p, Sector sector, uint32_t scale,
                                  const std::vector<int>& live, uint64_t lead_begin,
                                  uint64_t lead_end, int lead_arrow) {
    std::vector<uint64_t> counts(p, 0);
    Rep rep = make_zero_rep(q, n);
    std::vector<int> rest = live;
    if (lead_arrow >= 0)
        rest.erase(std::find(rest.begin(), rest.end(), lead_arrow));
    for (uint64_t lead = lead_begin; lead < lead_end; ++lead) {
        if (lead_arrow >= 0) {
            uint64_t v = lead;
            for (auto& x : rep.mats[lead_arrow].a) {
                x = (uint32_t)(v % p);
                v /= p;
            }
        }
        for (int ai : rest)
            for (auto& x : rep.mats[ai].a)
                x = 0;
        while (true) {
            if (sector == Sector::All || is_nilpotent(q, rep, p))
                ++counts[trace_potential(q, w, rep, p, scale)];
            if (rest.empty() || !advance(rep, rest, p))
                break;
        }
        if (lead_arrow < 0)
            break;
    }
    return counts;
}

} // namespace

void foreach_rep(const Quiver& q, const DimVector& n, uint32_t p,
                 const std::function<void(const Rep&)>& f) {
    Cells cells = rep_cells(q, n);
    if (pow_estimate(p, cells.total_cells) > 1e9)
        fail(Errc::SizeLimit, "foreach_rep: state space too large");
    Rep rep = make_zero_rep(q, n);
    std::vector<int> live;
    for (size_t ai = 0; ai < q.arrows.size(); ++ai)
        if (cells.sizes[ai] > 0)
            live.push_back((int)ai);
    while (true) {
        f(rep);
        if (live.empty() || !advance(rep, live, p))
            break;
    }
}

CountVector fiber_counts(const Quiver& q, const Potential& w, const DimVector& n, uint32_t p,
                         Sector sector, const FiberOptions& opt) {
    if (!is_prime_u32(p))
        fail(Errc::BadPrime, "p must be prime");
    std::string key;
    if (!opt.cache_dir.empty()) {
        key = cache_key(q.signature(), w.signature(),
                        n, p, sector == Sector::All ? "all" : "nilp", opt.value_scale);
        if (auto hit = cache_get(opt.cache_dir, key, p))
            return *hit;
    }

    Cells cells = rep_cells(q, n);
    std::vector<int> eliminated;
    if (opt.allow_elimination && sector == Sector::All)
        eliminated = choose_eliminable(q, w, cells);
    uint64_t elim_cells = 0;
    for (int ai : eliminated)
        elim_cells += cells.sizes[ai];
    uint64_t live_cells = cells.total_cells - elim_cells;
    double estimate = pow_estimate(p, live_cells);
    if (estimate > (double)opt.size_limit) {
        std::ostringstream os;
        os << "fiber_counts at " << to_string(n) << " p=" << p << ": ~" << estimate
           << " states exceeds the limit " << (double)opt.size_limit;
        fail(Errc::SizeLimit, os.str());
    }

    CountVector out(p);
    if (eliminated.empty()) {
        // Plain enumeration over all live cells, optionally split on the
        // largest arrow block across workers.
        std::vector<int> live;
        for (size_t ai = 0; ai < q.arrows.size(); ++ai)
            if (cells.sizes[ai] > 0)
                live.push_back((int)ai);
        int lead = -1;
        uint64_t lead_space = 1;
        if (!live.empty()) {
            lead = live[0];
            for (int ai : live)
                if (cells.sizes[ai] > cells.sizes[lead])
                    lead = ai;
            for (int i = 0; i < cells.sizes[lead]; ++i)
                lead_space *= p;
        }
        int jobs = std::max(1, opt.jobs);
        if (lead < 0 || lead_space < 64)
            jobs = 1;
        std::vector<std::vector<uint64_t>> partial(jobs);
        std::vector<std::thread> workers;
        for (int jw = 0; jw < jobs; ++jw) {
            uint64_t b = lead_space * jw / jobs;
            uint64_t e = lead_space * (jw + 1) / jobs;
            workers.emplace_back([&, jw, b, e]() {
                partial[jw] = count_range(q, w, n, p, sector, opt.value_scale, live, b,
                                          lead < 0 ? 1 : e, lead);
            });
            if (lead < 0)
                break;
        }
        for (auto& t : workers)
            t.join();
        for (const auto& vec : partial) {
            if (vec.empty())
                continue;
            for (uint32_t t = 0; t < p; ++t)
                out.c[t] += Rational(vec[t]);
        }
    } else {
        // Integrate out the chosen linear arrows. After rotating each word
        // containing the eliminated arrow E to start at E, the value is
        // rest + sum_E tr(K_E M(E)) with K_E the matrix of dW/dE on the
        // partial representation. Summed over all M(E): a point mass of
        // p^{cells} at rest when all K_E vanish, else a flat p^{cells-1}.
        std::vector<int> live;
        for (size_t ai = 0; ai < q.arrows.size(); ++ai)
            if (cells.sizes[ai] > 0 &&
                std::find(eliminated.begin(), eliminated.end(), (int)ai) == eliminated.end())
                live.push_back((int)ai);
        Potential rest_w;
        for (const auto& t : w.terms) {
            bool has = false;
            for (int ai : eliminated)
                if (std::count(t.word.begin(), t.word.end(), q.arrows[ai].name))
                    has = true;
            if (!has)
                rest_w.add(t.coeff, t.word);
        }
        std::vector<std::pair<int, std::vector<std::pair<Rational, Word>>>> derivs;
        for (int ai : eliminated)
            derivs.push_back({ai, ncderiv(q, w, q.arrows[ai].name)});

        Rep rep = make_zero_rep(q, n);
        Int point_mass = int_pow(p, (unsigned)elim_cells);
        Int flat_mass = int_pow(p, (unsigned)(elim_cells - 1));
        Int flat_total = 0;
        std::vector<Int> point(p, 0);
        while (true) {
            bool all_zero = true;
            for (auto& [ai, der] : derivs) {
                const Arrow& a = q.arrows[ai];
                FpMat k(vertex_dim(n, a.target), vertex_dim(n, a.source));
                for (const auto& [coeff, path] : der) {
                    uint32_t c = rational_mod_p(coeff * opt.value_scale, p);
                    if (!c)
                        continue;
                    FpMat pm = path_matrix(q, rep, path, p);
                    k = fp_add(k, fp_scale(pm, c, p), p);
                }
                if (!k.is_zero()) {
                    all_zero = false;
                    break;
                }
            }
            if (all_zero) {
                uint32_t restv = rest_w.is_zero()
                                     ? 0
                                     : trace_potential(q, rest_w, rep, p, opt.value_scale);
                point[restv] += point_mass;
            } else {
                flat_total += flat_mass;
            }
            if (live.empty() || !advance(rep, live, p))
                break;
        }
        for (uint32_t t = 0; t < p; ++t)
            out.c[t] = Rational(point[t] + flat_total);
    }

    if (!opt.cache_dir.empty())
        cache_put(opt.cache_dir, key, out);
    return out;
}

CountVector kron_locus_counts(int d, const DimVector& n, uint32_t p, bool nilpotent_xy,
                              uint32_t value_scale, uint64_t size_limit) {
    // Effective multiplier of tr(X^{d+1} - Y^{d+1}): value_scale / (d+1).
    uint32_t scale_over;
    if (value_scale % (d + 1) == 0)
        scale_over = (value_scale / (d + 1)) % p;
    else if ((d + 1) % p != 0)
        scale_over = value_scale % p * fp_inv((d + 1) % p, p) % p;
    else
        fail(Errc::Config, "1/(d+1) undefined mod p; pass a value scale divisible by d+1");
    if (scale_over == 0)
        fail(Errc::Config, "effective value scale vanishes mod p");
    int n0 = n.n0, n1 = n.n1;
    double xy = pow_estimate(p, (uint64_t)n0 * n0 + (uint64_t)n1 * n1);
    // Enumerating X by conjugacy class keeps (2,2) at p=13 tractable; the
    // value and the Sylvester kernel are invariant under conjugating X alone.
    bool use_classes = n0 >= 2 && xy > 5e6;
    if (!use_classes && xy > (double)size_limit)
        fail(Errc::SizeLimit, "kron_locus_counts: X,Y space too large");

    CountVector out(p);
    auto add_pair = [&](const FpMat& x, const FpMat& y, const Int& weight) {
        // Sylvester system X A - A Y = 0 for A of shape n0 x n1 (and the same
        // system again for B), so the fibre has p^{2k} points.
        int k = 0;
        if (n0 > 0 && n1 > 0) {
            FpMat sys(n0 * n1, n0 * n1);
            for (int i = 0; i < n0; ++i)
                for (int j = 0; j < n1; ++j) {
                    int row = i * n1 + j;
                    for (int l = 0; l < n0; ++l)
                        sys.at(row, l * n1 + j) = (sys.at(row, l * n1 + j) + x.at(i, l)) % p;
                    for (int l = 0; l < n1; ++l)
                        sys.at(row, i * n1 + l) = (sys.at(row, i * n1 + l) + p - y.at(l, j)) % p;
                }
            k = fp_kernel_dim(sys, p);
        }
        uint32_t val = (fp_trace(fp_pow(x, d + 1, p), p) + p - fp_trace(fp_pow(y, d + 1, p), p)) %
                       p;
        val = val * scale_over % p;
        out.c[val] += Rational(weight * int_pow(p, 2 * (unsigned)k));
    };

    auto foreach_y = [&](const std::function<void(const FpMat&)>& f) {
        fp_foreach_matrix(n1, n1, p, [&](const FpMat& y) {
            if (nilpotent_xy && !fp_is_nilpotent(y, p))
                return;
            f(y);
        });
    };

    if (use_classes) {
        for (const auto& cls : mat_conj_classes(n0, p)) {
            if (nilpotent_xy && !cls.nilpotent)
                continue;
            foreach_y([&](const FpMat& y) { add_pair(cls.rep, y, cls.size); });
        }
    } else {
        fp_foreach_matrix(n0, n0, p, [&](const FpMat& x) {
            if (nilpotent_xy && !fp_is_nilpotent(x, p))
                return;
            foreach_y([&](const FpMat& y) { add_pair(x, y, 1); });
        });
    }
    return out;
}

Int gl_order(int n, const Int& q) {
    if (n < 0)
        fail(Errc::Config, "gl_order needs n >= 0");
    Int r = 1;
    Int qn = int_pow(q, (unsigned)n);
    Int qi = 1;
    for (int i = 0; i < n; ++i) {
        r *= (qn - qi);
        qi *= q;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Conjugacy class tables

namespace {

using PolyP = std::vector<uint32_t>; // monic, ascending, over F_p

uint32_t poly_eval(const PolyP& f, uint32_t x, uint32_t p) {
    uint64_t acc = 0;
    for (int i = (int)f.size() - 1; i >= 0; --i)
        acc = (acc * x + f[i]) % p;
    return (uint32_t)acc;
}

PolyP poly_divide_linear(const PolyP& f, uint32_t root, uint32_t p) {
    // f / (x - root), exact
    int n = (int)f.size() - 1;
    PolyP q(n);
    uint32_t carry = f[n];
    for (int i = n - 1; i >= 0; --i) {
        q[i] = carry;
        carry = (f[i] + carry * root) % p;
    }
    if (carry != 0)
        fail(Errc::Internal, "poly_divide_linear: not a root");
    return q;
}

PolyP poly_mul(const PolyP& a, const PolyP& b, uint32_t p) {
    PolyP r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return r;
}

// Factor a monic poly of degree <= 3 into irreducibles with multiplicity.
std::map<PolyP, int> poly_factor(PolyP f, uint32_t p) {
    std::map<PolyP, int> out;
    bool progress = true;
    while (f.size() > 1 && progress) {
        progress = false;
        for (uint32_t r = 0; r < p; ++r) {
            if (poly_eval(f, r, p) == 0) {
                out[PolyP{(p - r) % p, 1}] += 1;
                f = poly_divide_linear(f, r, p);
                progress = true;
                break;
            }
        }
    }
    if (f.size() > 1)
        out[f] += 1; // rootless of degree 2 or 3: irreducible
    return out;
}

FpMat companion(const PolyP& f, uint32_t p) {
    int n = (int)f.size() - 1;
    FpMat m(n, n);
    for (int i = 0; i + 1 < n; ++i)
        m.at(i + 1, i) = 1;
    for (int i = 0; i < n; ++i)
        m.at(i, n - 1) = (p - f[i]) % p;
    return m;
}

FpMat block_diag(const std::vector<FpMat>& blocks) {
    int n = 0;
    for (const auto& b : blocks)
        n += b.rows;
    FpMat m(n, n);
    int off = 0;
    for (const auto& b : blocks) {
        for (int i = 0; i < b.rows; ++i)
            for (int j = 0; j < b.cols; ++j)
                m.at(off + i, off + j) = b.at(i, j);
        off += b.rows;
    }
    return m;
}

// |Aut| of a module of type lambda over the ring of a degree-d irreducible,
// i.e. the stabilizer contribution of one primary block (Q = p^d). Hardcoded
// for |lambda| <= 3 and validated against brute stabilizer counts in tests.
Int primary_aut_order(const std::vector<int>& lambda, const Int& Q) {
    auto key = lambda;
    std::sort(key.begin(), key.end(), std::greater<>());
    if (key == std::vector<int>{1})
        return Q - 1;
    if (key == std::vector<int>{2})
        return Q * (Q - 1);
    if (key == std::vector<int>{1, 1})
        return gl_order(2, Q);
    if (key == std::vector<int>{3})
        return Q * Q * (Q - 1);
    if (key == std::vector<int>{2, 1})
        return Q * Q * Q * (Q - 1) * (Q - 1);
    if (key == std::vector<int>{1, 1, 1})
        return gl_order(3, Q);
    fail(Errc::Internal, "primary_aut_order: partition too large");
}

std::vector<std::vector<int>> partitions_of(int e) {
    if (e == 1)
        return {{1}};
    if (e == 2)
        return {{2}, {1, 1}};
    if (e == 3)
        return {{3}, {2, 1}, {1, 1, 1}};
    fail(Errc::Internal, "partitions_of: e too large");
}

int commutant_dim(const FpMat& r, uint32_t p) {
    int n = r.rows;
    FpMat sys(n * n, n * n);
    // Z r - r Z = 0
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int row = i * n + j;
            for (int l = 0; l < n; ++l) {
                sys.at(row, i * n + l) = (sys.at(row, i * n + l) + r.at(l, j)) % p;
                sys.at(row, l * n + j) = (sys.at(row, l * n + j) + p - r.at(i, l)) % p;
            }
        }
    return fp_kernel_dim(sys, p);
}

std::map<std::pair<int, uint32_t>, std::vector<MatClass>> g_class_tables;
std::mutex g_class_mutex;

std::vector<MatClass> build_classes(int n, uint32_t p) {
    if (n > 3)
        fail(Errc::SizeLimit, "mat_conj_classes: n <= 3 only");
    std::vector<MatClass> out;
    // all monic charpolys of degree n
    std::vector<uint32_t> coeffs(n, 0);
    Int gl_n = gl_order(n, p);
    while (true) {
        PolyP f(coeffs.begin(), coeffs.end());
        f.push_back(1);
        auto factors = poly_factor(f, p);
        // choose a partition per factor
        std::vector<std::pair<PolyP, int>> fl(factors.begin(), factors.end());
        std::vector<std::vector<std::vector<int>>> choices;
        for (auto& [poly, e] : fl)
            choices.push_back(partitions_of(e));
        std::vector<size_t> idx(fl.size(), 0);
        while (true) {
            std::vector<FpMat> blocks;
            Int stab = 1;
            for (size_t fi = 0; fi < fl.size(); ++fi) {
                const auto& lambda = choices[fi][idx[fi]];
                int d = (int)fl[fi].first.size() - 1;
                for (int part : lambda) {
                    PolyP power{1};
                    for (int i = 0; i < part; ++i)
                        power = poly_mul(power, fl[fi].first, p);
                    blocks.push_back(companion(power, p));
                }
                stab *= primary_aut_order(lambda, int_pow(p, (unsigned)d));
            }
            MatClass cls;
            cls.rep = block_diag(blocks);
            if (gl_n % stab != 0)
                fail(Errc::Internal, "class table: stabilizer does not divide |GL|");
            cls.size = gl_n / stab;
            cls.commutant_dim = commutant_dim(cls.rep, p);
            cls.nilpotent = fp_is_nilpotent(cls.rep, p);
            out.push_back(std::move(cls));
            size_t k = 0;
            for (; k < idx.size(); ++k) {
                if (++idx[k] < choices[k].size())
                    break;
                idx[k] = 0;
            }
            if (k == idx.size())
                break;
        }
        size_t k = 0;
        for (; k < coeffs.size(); ++k) {
            if (++coeffs[k] < p)
                break;
            coeffs[k] = 0;
        }
        if (k == coeffs.size())
            break;
    }
    Int total = 0;
    for (const auto& c : out)
        total += c.size;
    if (total != int_pow(p, (unsigned)(n * n)))
        fail(Errc::Internal, "class table does not partition M_n(F_p)");
    return out;
}

} // namespace

const std::vector<MatClass>& mat_conj_classes(int n, uint32_t p) {
    std::lock_guard<std::mutex> lock(g_class_mutex);
    auto key = std::make_pair(n, p);
    auto it = g_class_tables.find(key);
    if (it == g_class_tables.end())
        it = g_class_tables.emplace(key, build_classes(n, p)).first;
    return it->second;
}

CountVector matrix_power_trace_counts(int n, uint32_t p, int e, uint32_t scale) {
    CountVector out(p);
    for (const auto& cls : mat_conj_classes(n, p)) {
        uint32_t val = fp_trace(fp_pow(cls.rep, e, p), p) * (scale % p) % p;
        out.c[val] += Rational(cls.size);
    }
    return out;
}

Int commuting_counts(int n, uint32_t p, CommFlags flags, CountMethod method) {
    if (n < 1)
        fail(Errc::Config, "commuting_counts needs n >= 1");
    if (method == CountMethod::Auto) {
        double space = pow_estimate(p, (uint64_t)2 * n * n);
        method = space < 5e8 ? CountMethod::Brute : CountMethod::ClassTable;
        if (flags != CommFlags::BothNilpotent && method == CountMethod::Brute &&
            pow_estimate(p, (uint64_t)n * n) > 2e6)
            method = CountMethod::Centralizer;
    }
    auto count_second = [&](const FpMat& x) -> Int {
        // centralizer dimension, and for BothNilpotent the nilpotent count
        // inside the centralizer
        int cd = commutant_dim(x, p);
        if (flags != CommFlags::BothNilpotent)
            return int_pow(p, (unsigned)cd);
        // enumerate the centralizer through its basis
        FpMat sys(n * n, n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                int row = i * n + j;
                for (int l = 0; l < n; ++l) {
                    sys.at(row, i * n + l) = (sys.at(row, i * n + l) + x.at(l, j)) % p;
                    sys.at(row, l * n + j) = (sys.at(row, l * n + j) + p - x.at(i, l)) % p;
                }
            }
        // kernel basis by elimination over the transposed system
        // brute force: enumerate all Z and test (fallback when dim large is
        // the zero matrix whose centralizer is everything)
        if (cd == n * n) {
            // centralizer is all of M_n: count nilpotent matrices
            Int cnt = 0;
            for (const auto& cls : mat_conj_classes(n, p))
                if (cls.nilpotent)
                    cnt += cls.size;
            return cnt;
        }
        // solve for a basis: collect kernel vectors by forward enumeration of
        // free variables via row echelon form
        // (dim <= n*n - 1 here; for n <= 3 and p <= 31 this stays small)
        std::vector<FpMat> basis;
        {
            FpMat m = sys;
            int rank = 0;
            std::vector<int> pivot_col;
            for (int col = 0; col < m.cols && rank < m.rows; ++col) {
                int piv = -1;
                for (int i = rank; i < m.rows; ++i)
                    if (m.at(i, col)) {
                        piv = i;
                        break;
                    }
                if (piv < 0)
                    continue;
                for (int j = 0; j < m.cols; ++j)
                    std::swap(m.at(piv, j), m.at(rank, j));
                uint32_t inv = fp_inv(m.at(rank, col), p);
                for (int j = 0; j < m.cols; ++j)
                    m.at(rank, j) = m.at(rank, j) * inv % p;
                for (int i = 0; i < m.rows; ++i) {
                    if (i == rank)
                        continue;
                    uint32_t f = m.at(i, col);
                    if (!f)
                        continue;
                    for (int j = 0; j < m.cols; ++j)
                        m.at(i, j) = (m.at(i, j) + (p - f) * m.at(rank, j)) % p;
                }
                pivot_col.push_back(col);
                ++rank;
            }
            std::vector<bool> is_pivot(m.cols, false);
            for (int c : pivot_col)
                is_pivot[c] = true;
            for (int free = 0; free < m.cols; ++free) {
                if (is_pivot[free])
                    continue;
                FpMat z(n, n);
                z.a[free] = 1;
                for (int r = 0; r < rank; ++r)
                    z.a[pivot_col[r]] = (p - m.at(r, free)) % p;
                basis.push_back(z);
            }
        }
        Int cnt = 0;
        std::vector<uint32_t> coef(basis.size(), 0);
        while (true) {
            FpMat z(n, n);
            for (size_t b = 0; b < basis.size(); ++b) {
                if (!coef[b])
                    continue;
                z = fp_add(z, fp_scale(basis[b], coef[b], p), p);
            }
            if (fp_is_nilpotent(z, p))
                ++cnt;
            size_t k = 0;
            for (; k < coef.size(); ++k) {
                if (++coef[k] < p)
                    break;
                coef[k] = 0;
            }
            if (k == coef.size())
                break;
        }
        return cnt;
    };

    Int total = 0;
    switch (method) {
    case CountMethod::Brute: {
        fp_foreach_matrix(n, n, p, [&](const FpMat& x) {
            if (flags != CommFlags::BothFree && !fp_is_nilpotent(x, p))
                return;
            fp_foreach_matrix(n, n, p, [&](const FpMat& y) {
                if (flags == CommFlags::BothNilpotent && !fp_is_nilpotent(y, p))
                    return;
                if (fp_mul(x, y, p) == fp_mul(y, x, p))
                    ++total;
            });
        });
        break;
    }
    case CountMethod::Centralizer: {
        fp_foreach_matrix(n, n, p, [&](const FpMat& x) {
            if (flags != CommFlags::BothFree && !fp_is_nilpotent(x, p))
                return;
            total += count_second(x);
        });
        break;
    }
    case CountMethod::ClassTable: {
        for (const auto& cls : mat_conj_classes(n, p)) {
            if (flags != CommFlags::BothFree && !cls.nilpotent)
                continue;
            total += cls.size * count_second(cls.rep);
        }
        break;
    }
    default:
        fail(Errc::Internal, "unreachable");
    }
    return total;
}

Rational QPoly::eval(const Rational& q) const {
    Rational acc = 0;
    for (int i = (int)c.size() - 1; i >= 0; --i)
        acc = acc * q + c[i];
    return acc;
}

std::string to_string(const QPoly& f) {
    std::ostringstream os;
    bool first = true;
    for (int i = (int)f.c.size() - 1; i >= 0; --i) {
        if (f.c[i] == 0)
            continue;
        if (!first)
            os << " + ";
        first = false;
        os << f.c[i].str() << "*q^" << i;
    }
    if (first)
        os << "0";
    return os.str();
}

QPoly poly_interpolate_counts(const std::function<Rational(uint32_t)>& counter, int degree_bound,
                              const std::vector<uint32_t>& primes) {
    if ((int)primes.size() < degree_bound + 2)
        fail(Errc::Config, "poly_interpolate_counts needs >= degree_bound + 2 primes");
    int m = degree_bound + 1;
    std::vector<Rational> xs, ys;
    for (int i = 0; i < m; ++i) {
        xs.push_back(primes[i]);
        ys.push_back(counter(primes[i]));
    }
    // Lagrange in monomial form.
    QPoly f;
    f.c.assign(m, 0);
    for (int i = 0; i < m; ++i) {
        std::vector<Rational> numer{1}; // prod_{j != i} (x - x_j)
        Rational denom = 1;
        for (int j = 0; j < m; ++j) {
            if (j == i)
                continue;
            numer.push_back(0);
            for (int k = (int)numer.size() - 1; k >= 1; --k)
                numer[k] = numer[k - 1] - xs[j] * numer[k];
            numer[0] = -xs[j] * numer[0];
            denom *= (xs[i] - xs[j]);
        }
        for (size_t k = 0; k < numer.size(); ++k)
            f.c[k] += ys[i] * numer[k] / denom;
    }
    while (!f.c.empty() && f.c.back() == 0)
        f.c.pop_back();
    for (size_t i = m; i < primes.size(); ++i) {
        if (f.eval(primes[i]) != counter(primes[i]))
            fail(Errc::NotPolynomial, "verification prime " + std::to_string(primes[i]) +
                                          " contradicts the polynomial fit");
    }
    return f;
}

namespace {

// All k-dimensional subspaces of F_p^n as RREF basis matrices.
void subspaces_of(int n, int k, uint32_t p, std::vector<FpMat>& out) {
    if (k == 0) {
        out.push_back(FpMat(0, n));
        return;
    }
    std::vector<int> pivots(k);
    std::function<void(int, int)> choose = [&](int start, int idx) {
        if (idx == k) {
            // free positions: (row i, col j) with j > pivots[i], j not a pivot
            std::vector<std::pair<int, int>> free_pos;
            std::vector<bool> is_pivot(n, false);
            for (int c : pivots)
                is_pivot[c] = true;
            for (int i = 0; i < k; ++i)
                for (int j = pivots[i] + 1; j < n; ++j)
                    if (!is_pivot[j])
                        free_pos.push_back({i, j});
            std::vector<uint32_t> vals(free_pos.size(), 0);
            while (true) {
                FpMat b(k, n);
                for (int i = 0; i < k; ++i)
                    b.at(i, pivots[i]) = 1;
                for (size_t t = 0; t < free_pos.size(); ++t)
                    b.at(free_pos[t].first, free_pos[t].second) = vals[t];
                out.push_back(b);
                size_t t = 0;
                for (; t < vals.size(); ++t) {
                    if (++vals[t] < p)
                        break;
                    vals[t] = 0;
                }
                if (t == vals.size())
                    break;
            }
            return;
        }
        for (int c = start; c < n; ++c) {
            pivots[idx] = c;
            choose(c + 1, idx + 1);
        }
    };
    choose(0, 0);
    return;
}

bool rows_in_span(const FpMat& rows, const FpMat& span, uint32_t p) {
    if (rows.rows == 0)
        return true;
    int base = fp_rank(span, p);
    FpMat stacked(span.rows + rows.rows, span.cols);
    for (int i = 0; i < span.rows; ++i)
        for (int j = 0; j < span.cols; ++j)
            stacked.at(i, j) = span.at(i, j);
    for (int i = 0; i < rows.rows; ++i)
        for (int j = 0; j < rows.cols; ++j)
            stacked.at(span.rows + i, j) = rows.at(i, j);
    return fp_rank(stacked, p) == base;
}

} // namespace

std::set<DimVector> subrep_dimvectors(const Quiver& q, const Rep& r, uint32_t p) {
    if (r.dim.total() > 4 || p > 3)
        fail(Errc::SizeLimit, "subrep_dimvectors: total dim <= 4 and p <= 3 only");
    std::set<DimVector> out;
    std::vector<std::vector<FpMat>> subs(2);
    for (int v = 0; v < 2; ++v)
        for (int k = 0; k <= vertex_dim(r.dim, v); ++k)
            subspaces_of(vertex_dim(r.dim, v), k, p, subs[v]);
    for (const auto& s0 : subs[0])
        for (const auto& s1 : subs[1]) {
            bool invariant = true;
            for (size_t ai = 0; ai < q.arrows.size() && invariant; ++ai) {
                const Arrow& a = q.arrows[ai];
                const FpMat& src = a.source == 0 ? s0 : s1;
                const FpMat& dst = a.target == 0 ? s0 : s1;
                if (src.rows == 0 || r.mats[ai].cols == 0)
                    continue;
                FpMat img = fp_mul(src, r.mats[ai], p);
                if (!rows_in_span(img, dst, p))
                    invariant = false;
            }
            if (invariant)
                out.insert({s0.rows, s1.rows});
        }
    return out;
}

} // namespace m2dt
