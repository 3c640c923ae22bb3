#pragma once

#include <adelic/rational.hpp>

#include <algorithm>
#include <cassert>
#include <functional>
#include <utility>
#include <vector>

namespace adelic {

inline bool elem_is_zero(const Rat& x) { return x == 0; }
inline bool elem_is_zero(const Int& x) { return x == 0; }

// Dense univariate polynomial, coefficients ascending. Empty vector = zero.
// T must be a (commutative) field type for divrem/gcd; +,-,* suffice elsewhere.
template <class T>
struct Poly {
    std::vector<T> c;

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }

    void trim() {
        while (!c.empty() && elem_is_zero(c.back())) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int deg() const { return static_cast<int>(c.size()) - 1; }
    const T& lc() const { return c.back(); }
    const T& operator[](size_t i) const { return c[i]; }

    T coeff_or(size_t i, const T& zero) const { return i < c.size() ? c[i] : zero; }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<T> r(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < r.size(); ++i) {
            if (i < a.c.size() && i < b.c.size()) r[i] = a.c[i] + b.c[i];
            else if (i < a.c.size()) r[i] = a.c[i];
            else r[i] = b.c[i];
        }
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<T> r(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < r.size(); ++i) {
            if (i < a.c.size() && i < b.c.size()) r[i] = a.c[i] - b.c[i];
            else if (i < a.c.size()) r[i] = a.c[i];
            else r[i] = T() - b.c[i];
        }
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> r(a.c.size() + b.c.size() - 1, T());
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (elem_is_zero(a.c[i])) continue;
            for (size_t j = 0; j < b.c.size(); ++j) {
                r[i + j] = r[i + j] + a.c[i] * b.c[j];
            }
        }
        return Poly(std::move(r));
    }
    friend Poly operator*(const T& s, const Poly& a) {
        std::vector<T> r(a.c.size());
        for (size_t i = 0; i < a.c.size(); ++i) r[i] = s * a.c[i];
        return Poly(std::move(r));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }

    T eval(const T& x) const {
        if (c.empty()) return T();
        T acc = c.back();
        for (size_t i = c.size() - 1; i-- > 0;) acc = acc * x + c[i];
        return acc;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly();
        std::vector<T> r(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) {
            T k = c[i];
            for (size_t j = 1; j < i; ++j) k = k + c[i];  // i*c[i] by repeated addition
            r[i - 1] = k;
        }
        return Poly(std::move(r));
    }

    // P(Q(x)) by Horner.
    Poly compose(const Poly& q) const {
        Poly acc;
        for (size_t i = c.size(); i-- > 0;) {
            acc = acc * q;
            if (acc.c.empty()) acc.c.push_back(c[i]);
            else acc.c[0] = acc.c[0] + c[i];
            acc.trim();
        }
        return acc;
    }
};

using QPoly = Poly<Rat>;

inline QPoly qpoly(std::vector<Rat> coeffs) { return QPoly(std::move(coeffs)); }

inline QPoly qpoly_x() { return QPoly({Rat(0), Rat(1)}); }

template <class T>
Poly<T> poly_pow(Poly<T> base, unsigned long e) {
    Poly<T> r;
    r.c = {T(1)};
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

// Quotient and remainder over a field.
template <class T>
std::pair<Poly<T>, Poly<T>> poly_divrem(const Poly<T>& a, const Poly<T>& b) {
    if (b.is_zero()) throw std::invalid_argument("poly_divrem: division by zero polynomial");
    Poly<T> r = a;
    if (a.deg() < b.deg()) return {Poly<T>(), r};
    std::vector<T> q(a.deg() - b.deg() + 1, T());
    while (!r.is_zero() && r.deg() >= b.deg()) {
        T f = r.lc() / b.lc();
        int shift = r.deg() - b.deg();
        q[shift] = f;
        for (int i = 0; i <= b.deg(); ++i) {
            r.c[i + shift] = r.c[i + shift] - f * b.c[i];
        }
        r.trim();
    }
    return {Poly<T>(std::move(q)), r};
}

template <class T>
Poly<T> poly_mod(const Poly<T>& a, const Poly<T>& b) {
    return poly_divrem(a, b).second;
}

template <class T>
Poly<T> poly_monic(const Poly<T>& a) {
    if (a.is_zero()) return a;
    T inv = T(1) / a.lc();
    return inv * a;
}

// Monic gcd over a field.
template <class T>
Poly<T> poly_gcd(Poly<T> a, Poly<T> b) {
    while (!b.is_zero()) {
        Poly<T> r = poly_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return poly_monic(a);
}

// g, u with u*a = g (mod m); used for inverses mod the minimal polynomial.
template <class T>
std::pair<Poly<T>, Poly<T>> poly_half_xgcd(Poly<T> a, Poly<T> m) {
    Poly<T> u0, u1;
    u0.c = {T(1)};
    u1 = Poly<T>();
    while (!m.is_zero()) {
        auto [q, r] = poly_divrem(a, m);
        Poly<T> u2 = u0 - q * u1;
        a = std::move(m);
        m = std::move(r);
        u0 = std::move(u1);
        u1 = std::move(u2);
    }
    return {a, u0};
}

template <class T>
Poly<T> poly_squarefree_part(const Poly<T>& a) {
    if (a.deg() <= 1) return poly_monic(a);
    Poly<T> g = poly_gcd(a, a.derivative());
    if (g.deg() == 0) return poly_monic(a);
    return poly_monic(poly_divrem(a, g).first);
}

// res(a, b) = lc(a)^deg(b) * prod b(alpha_i) over roots alpha_i of a.
template <class T>
T poly_resultant(Poly<T> a, Poly<T> b) {
    if (a.is_zero() || b.is_zero()) return T();
    T sign(1), acc(1);
    if (a.deg() < b.deg()) {
        if ((a.deg() & 1) && (b.deg() & 1)) sign = T() - sign;
        std::swap(a, b);
    }
    for (;;) {
        if (b.deg() == 0) {
            T p(1);
            for (int i = 0; i < a.deg(); ++i) p = p * b.lc();
            return sign * acc * p;
        }
        Poly<T> r = poly_mod(a, b);
        if (r.is_zero()) return T();
        T p(1);
        for (int i = 0; i < a.deg() - r.deg(); ++i) p = p * b.lc();
        acc = acc * p;
        if ((a.deg() & 1) && (b.deg() & 1)) sign = T() - sign;
        a = std::move(b);
        b = std::move(r);
    }
}

// --- rational-coefficient specifics ---------------------------------------

// (content, primitive integer coefficients): poly = content * prim, prim has
// coprime integer coefficients and positive leading coefficient.
inline std::pair<Rat, std::vector<Int>> qpoly_primitive(const QPoly& a) {
    if (a.is_zero()) return {Rat(0), {}};
    Int den(1);
    for (const Rat& q : a.c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
    std::vector<Int> z(a.c.size());
    Int g(0);
    for (size_t i = 0; i < a.c.size(); ++i) {
        z[i] = a.c[i].get_num() * (den / a.c[i].get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z[i].get_mpz_t());
    }
    if (sgn(z.back()) < 0) g = -g;
    for (auto& v : z) v /= g;
    return {make_rat(g, den), z};
}

inline QPoly qpoly_from_int(const std::vector<Int>& z) {
    std::vector<Rat> c(z.size());
    for (size_t i = 0; i < z.size(); ++i) c[i] = Rat(z[i]);
    return QPoly(std::move(c));
}

inline int qpoly_sign_at(const QPoly& f, const Rat& x) {
    Rat v = f.eval(x);
    return sgn(v);
}

// Sturm chain of a squarefree rational polynomial.
struct SturmChain {
    std::vector<QPoly> chain;

    explicit SturmChain(const QPoly& f) {
        chain.push_back(f);
        QPoly d = f.derivative();
        if (!d.is_zero()) chain.push_back(d);
        while (chain.size() >= 2) {
            QPoly r = poly_mod(chain[chain.size() - 2], chain.back());
            if (r.is_zero()) break;
            chain.push_back(Rat(-1) * r);
        }
    }

    int variations_at(const Rat& x) const {
        int var = 0, last = 0;
        for (const auto& f : chain) {
            int s = qpoly_sign_at(f, x);
            if (s != 0) {
                if (last != 0 && s != last) ++var;
                last = s;
            }
        }
        return var;
    }

    // Number of distinct real roots in (a, b], for f squarefree.
    int count_roots(const Rat& a, const Rat& b) const {
        return variations_at(a) - variations_at(b);
    }
};

// 1 + max |c_i / lc|; every real root lies in (-B, B).
inline Rat qpoly_root_bound(const QPoly& f) {
    Rat m(0);
    for (int i = 0; i < f.deg(); ++i) {
        Rat a = abs(f.c[i] / f.lc());
        if (a > m) m = a;
    }
    return 1 + m;
}

struct RootInterval {
    Rat lo, hi;          // lo == hi means an exact rational root
    bool exact() const { return lo == hi; }
};

// Isolates all real roots of a squarefree rational polynomial. Non-exact
// intervals are open, endpoints are non-roots, and each contains one root.
inline std::vector<RootInterval> isolate_real_roots(const QPoly& f) {
    std::vector<RootInterval> out;
    if (f.deg() <= 0) return out;
    SturmChain st(f);
    Rat bound = qpoly_root_bound(f);
    std::function<void(Rat, Rat, int)> rec = [&](Rat lo, Rat hi, int count) {
        if (count == 0) return;
        if (count == 1) {
            out.push_back({lo, hi});
            return;
        }
        Rat mid = (lo + hi) / 2;
        if (qpoly_sign_at(f, mid) == 0) {
            out.push_back({mid, mid});
            // nudge off the root; f squarefree so nearby points are non-roots
            Rat eps = (hi - lo) / 4;
            while (qpoly_sign_at(f, mid - eps) == 0 || qpoly_sign_at(f, mid + eps) == 0) eps /= 2;
            rec(lo, mid - eps, st.count_roots(lo, mid - eps));
            rec(mid + eps, hi, st.count_roots(mid + eps, hi));
            return;
        }
        int left = st.count_roots(lo, mid);
        rec(lo, mid, left);
        rec(mid, hi, count - left);
    };
    rec(-bound, bound, st.count_roots(-bound, bound));
    std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) {
        return a.lo < b.lo;
    });
    return out;
}

// One bisection step on an isolating interval of a squarefree polynomial.
inline RootInterval refine_root(const QPoly& f, RootInterval iv) {
    if (iv.exact()) return iv;
    Rat mid = (iv.lo + iv.hi) / 2;
    int sm = qpoly_sign_at(f, mid);
    if (sm == 0) return {mid, mid};
    if (sm == qpoly_sign_at(f, iv.lo)) return {mid, iv.hi};
    return {iv.lo, mid};
}

// Lagrange interpolation through (x_i, y_i) over a field.
template <class T>
Poly<T> poly_interpolate(const std::vector<T>& xs, const std::vector<T>& ys) {
    assert(xs.size() == ys.size());
    Poly<T> acc;            // running interpolant
    Poly<T> basis;          // prod (x - x_j) for j < i
    basis.c = {T(1)};
    for (size_t i = 0; i < xs.size(); ++i) {
        T val = acc.eval(xs[i]);
        T scale = (ys[i] - val) / basis.eval(xs[i]);
        acc = acc + scale * basis;
        Poly<T> lin;
        lin.c = {T() - xs[i], T(1)};
        basis = basis * lin;
    }
    return acc;
}

}  // namespace adelic
