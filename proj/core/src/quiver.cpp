#include "m2dt/quiver.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace m2dt {

int Quiver::arrow_index(const std::string& name) const {
    for (size_t i = 0; i < arrows.size(); ++i)
        if (arrows[i].name == name)
            return (int)i;
    fail(Errc::Config, "unknown arrow '" + name + "'");
}

std::string Quiver::signature() const {
    std::ostringstream os;
    os << "v" << vertex_count;
    for (const auto& a : arrows)
        os << ";" << a.name << ":" << a.source << ">" << a.target;
    return os.str();
}

Word min_rotation(Word w) {
    if (w.empty())
        return w;
    Word best = w;
    for (size_t s = 1; s < w.size(); ++s) {
        std::rotate(w.begin(), w.begin() + 1, w.end());
        if (w < best)
            best = w;
    }
    return best;
}

bool word_is_closed(const Quiver& q, const Word& w) {
    if (w.empty())
        return false;
    for (size_t i = 0; i < w.size(); ++i) {
        const Arrow& cur = q.arrow(w[i]);
        const Arrow& next = q.arrow(w[(i + 1) % w.size()]);
        // Reading order composes right to left: the letter to the right acts
        // first, so its target must be the source of the current letter.
        if (next.target != cur.source)
            return false;
    }
    return true;
}

void Potential::add(const Rational& c, Word w) {
    if (c == 0)
        return;
    Word canon = min_rotation(std::move(w));
    for (auto& t : terms) {
        if (t.word == canon) {
            t.coeff += c;
            if (t.coeff == 0)
                terms.erase(terms.begin() + (&t - terms.data()));
            return;
        }
    }
    terms.push_back({c, std::move(canon)});
    std::sort(terms.begin(), terms.end(),
              [](const PotTerm& a, const PotTerm& b) { return a.word < b.word; });
}

bool Potential::operator==(const Potential& o) const {
    if (terms.size() != o.terms.size())
        return false;
    for (size_t i = 0; i < terms.size(); ++i)
        if (terms[i].coeff != o.terms[i].coeff || terms[i].word != o.terms[i].word)
            return false;
    return true;
}

std::string Potential::signature() const { return to_string(*this); }

std::vector<std::pair<Rational, Word>> ncderiv(const Quiver& q, const Potential& w,
                                               const std::string& arrow) {
    (void)q;
    std::map<Word, Rational> acc;
    for (const auto& t : w.terms) {
        for (size_t i = 0; i < t.word.size(); ++i) {
            if (t.word[i] != arrow)
                continue;
            // w = aEb as a linear reading; the derivative term is ba, i.e.
            // the rotation that starts right after this occurrence.
            Word r;
            for (size_t j = 1; j < t.word.size(); ++j)
                r.push_back(t.word[(i + j) % t.word.size()]);
            acc[r] += t.coeff;
        }
    }
    std::vector<std::pair<Rational, Word>> out;
    for (auto& [word, c] : acc)
        if (c != 0)
            out.push_back({c, word});
    return out;
}

std::pair<Quiver, Potential> build_minus2(int d) {
    if (d < 1)
        fail(Errc::Config, "build_minus2 needs d >= 1");
    Quiver q;
    q.vertex_count = 2;
    q.arrows = {{"A", 0, 1}, {"B", 0, 1}, {"C", 1, 0}, {"D", 1, 0}, {"X", 0, 0}, {"Y", 1, 1}};
    Potential w;
    Rational inv(1, d + 1);
    w.add(inv, Word(d + 1, "X"));
    w.add(-inv, Word(d + 1, "Y"));
    w.add(-1, {"X", "C", "A"});
    w.add(1, {"X", "D", "B"});
    w.add(1, {"Y", "A", "C"});
    w.add(-1, {"Y", "B", "D"});
    return {q, w};
}

std::pair<Quiver, Potential> build_conifold() {
    Quiver q;
    q.vertex_count = 2;
    q.arrows = {{"A", 0, 1}, {"B", 0, 1}, {"C", 1, 0}, {"D", 1, 0}};
    Potential w;
    w.add(1, {"A", "C", "B", "D"});
    w.add(-1, {"A", "D", "B", "C"});
    return {q, w};
}

std::pair<Quiver, Potential> build_five_loop(int d) {
    Quiver q;
    q.vertex_count = 1;
    q.arrows = {{"B", 0, 0}, {"C", 0, 0}, {"D", 0, 0}, {"X", 0, 0}, {"Y", 0, 0}};
    Potential w;
    Rational inv(1, d + 1);
    w.add(inv, Word(d + 1, "X"));
    w.add(-inv, Word(d + 1, "Y"));
    w.add(-1, {"X", "C"});
    w.add(1, {"X", "D", "B"});
    w.add(1, {"Y", "C"});
    w.add(-1, {"Y", "B", "D"});
    return {q, w};
}

Potential splitting_identity(int d) {
    Rational inv(1, d + 1);
    // Right hand side: XDB - XBD + (X-Y)(BD - C + (X^d + ... + Y^d)/(d+1)).
    Potential rhs;
    rhs.add(1, {"X", "D", "B"});
    rhs.add(-1, {"X", "B", "D"});
    // (X - Y) times each inner word.
    std::vector<std::pair<Rational, Word>> inner;
    inner.push_back({1, {"B", "D"}});
    inner.push_back({-1, {"C"}});
    for (int i = 0; i <= d; ++i) {
        Word m;
        for (int j = 0; j < d - i; ++j)
            m.push_back("X");
        for (int j = 0; j < i; ++j)
            m.push_back("Y");
        inner.push_back({inv, m});
    }
    for (auto& [c, m] : inner) {
        Word wx = {"X"};
        wx.insert(wx.end(), m.begin(), m.end());
        rhs.add(c, wx);
        Word wy = {"Y"};
        wy.insert(wy.end(), m.begin(), m.end());
        rhs.add(-c, wy);
    }
    // Subtract the five-loop reduced potential.
    Potential target = build_five_loop(d).second;
    Potential residual = rhs;
    for (const auto& t : target.terms)
        residual.add(-t.coeff, t.word);
    return residual;
}

GaussianRational Stability::eval(const DimVector& n) const {
    if (values.size() < 2)
        fail(Errc::Config, "stability needs a value per vertex");
    return {Rational(n.n0) * values[0].re + Rational(n.n1) * values[1].re,
            Rational(n.n0) * values[0].im + Rational(n.n1) * values[1].im};
}

bool Stability::is_generic() const {
    for (const auto& v : values)
        if (!(v.im > 0 || (v.im == 0 && v.re < 0)))
            return false;
    if (values.size() < 2)
        return false;
    return values[0].re * values[1].im - values[0].im * values[1].re != 0;
}

namespace {

// arg(z1) < arg(z2) with both in {im > 0} u {im == 0, re < 0}: within this
// half plane the cross product decides the angular order exactly.
bool arg_less(const GaussianRational& z1, const GaussianRational& z2) {
    return z1.re * z2.im - z1.im * z2.re > 0;
}

} // namespace

bool slope_less(const Stability& gamma, const DimVector& m, const DimVector& n) {
    if (m.is_zero() || n.is_zero())
        fail(Errc::Config, "slope of the zero dimension vector");
    return arg_less(gamma.eval(m), gamma.eval(n));
}

bool slope_equal(const Stability& gamma, const DimVector& m, const DimVector& n) {
    auto z1 = gamma.eval(m);
    auto z2 = gamma.eval(n);
    return z1.re * z2.im - z1.im * z2.re == 0;
}

namespace {

int igcd(int a, int b) { return b == 0 ? std::abs(a) : igcd(b, a % b); }

void hn_rec(const std::vector<DimVector>& rays, size_t i, DimVector remaining,
            std::vector<DimVector>& cur, std::vector<HNType>& out) {
    if (remaining.is_zero()) {
        out.push_back({cur});
        return;
    }
    if (i == rays.size())
        return;
    // skip this ray
    hn_rec(rays, i + 1, remaining, cur, out);
    // or take a positive multiple of it
    for (int a = 1;; ++a) {
        DimVector part = rays[i] * a;
        if (part.n0 > remaining.n0 || part.n1 > remaining.n1)
            break;
        cur.push_back(part);
        hn_rec(rays, i + 1, remaining - part, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<HNType> hn_types(const std::vector<DimVector>& support, const DimVector& target,
                             const Stability& gamma) {
    if (!gamma.is_generic())
        fail(Errc::Config, "hn_types requires a generic stability function");
    // Reduce the support to primitive ray generators; strictly decreasing
    // slopes mean at most one part per ray.
    std::vector<DimVector> rays;
    for (const auto& v : support) {
        if (v.is_zero())
            fail(Errc::Config, "zero vector in support");
        int g = igcd(v.n0, v.n1);
        DimVector prim{v.n0 / g, v.n1 / g};
        if (std::find(rays.begin(), rays.end(), prim) == rays.end())
            rays.push_back(prim);
    }
    std::sort(rays.begin(), rays.end(), [&](const DimVector& a, const DimVector& b) {
        return slope_less(gamma, b, a); // decreasing slope
    });
    std::vector<HNType> out;
    std::vector<DimVector> cur;
    hn_rec(rays, 0, target, cur, out);
    return out;
}

std::string to_string(const Potential& w) {
    if (w.terms.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : w.terms) {
        if (!first)
            os << " + ";
        first = false;
        os << t.coeff.str() << "*";
        for (const auto& a : t.word)
            os << a;
    }
    return os.str();
}

Potential parse_potential(const std::string& s) {
    Potential w;
    if (s == "0")
        return w;
    size_t start = 0;
    while (start < s.size()) {
        auto pos = s.find(" + ", start);
        std::string part = s.substr(start, pos == std::string::npos ? std::string::npos
                                                                    : pos - start);
        start = pos == std::string::npos ? s.size() : pos + 3;
        auto star = part.find('*');
        if (star == std::string::npos)
            fail(Errc::Config, "parse_potential: missing '*' in '" + part + "'");
        Rational c(part.substr(0, star));
        Word word;
        for (size_t i = star + 1; i < part.size(); ++i) {
            if (isspace((unsigned char)part[i]))
                continue;
            word.push_back(std::string(1, part[i]));
        }
        w.add(c, word);
    }
    return w;
}

} // namespace m2dt
