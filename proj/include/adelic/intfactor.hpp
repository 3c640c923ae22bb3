#pragma once

#include <adelic/poly.hpp>
#include <adelic/rational.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace adelic {

// Polynomials over F_p (or Z/p^k), coefficients ascending in [0, m).
namespace modpoly {

using Zx = std::vector<Int>;

inline void normalize(Zx& a, const Int& m) {
    for (auto& v : a) {
        mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const Zx& a) { return static_cast<int>(a.size()) - 1; }

inline Zx from_qpoly(const QPoly& f, const Int& m) {
    Zx r(f.c.size());
    for (size_t i = 0; i < f.c.size(); ++i) {
        if (f.c[i].get_den() % m == 0) throw std::invalid_argument("from_qpoly: denominator not invertible");
        Int dinv;
        if (!mpz_invert(dinv.get_mpz_t(), f.c[i].get_den().get_mpz_t(), m.get_mpz_t()))
            throw std::invalid_argument("from_qpoly: denominator not invertible");
        r[i] = f.c[i].get_num() * dinv;
    }
    normalize(r, m);
    return r;
}

inline Zx add(Zx a, const Zx& b, const Int& m) {
    if (a.size() < b.size()) a.resize(b.size(), Int(0));
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    normalize(a, m);
    return a;
}

inline Zx sub(Zx a, const Zx& b, const Int& m) {
    if (a.size() < b.size()) a.resize(b.size(), Int(0));
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    normalize(a, m);
    return a;
}

inline Zx mul(const Zx& a, const Zx& b, const Int& m) {
    if (a.empty() || b.empty()) return {};
    Zx r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    normalize(r, m);
    return r;
}

inline Zx scale(Zx a, const Int& s, const Int& m) {
    for (auto& v : a) v *= s;
    normalize(a, m);
    return a;
}

inline Int inv_mod(const Int& a, const Int& m) {
    Int r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
        throw std::invalid_argument("inv_mod: not invertible");
    return r;
}

// Requires lc(b) invertible mod m.
inline std::pair<Zx, Zx> divrem(Zx a, const Zx& b, const Int& m) {
    if (b.empty()) throw std::invalid_argument("modpoly::divrem: zero divisor");
    normalize(a, m);
    if (deg(a) < deg(b)) return {{}, a};
    Int linv = inv_mod(b.back(), m);
    Zx q(deg(a) - deg(b) + 1, Int(0));
    while (deg(a) >= deg(b) && !a.empty()) {
        Int f = (a.back() * linv) % m;
        int shift = deg(a) - deg(b);
        q[shift] = f;
        for (size_t i = 0; i < b.size(); ++i) {
            a[i + shift] -= f * b[i];
        }
        normalize(a, m);
        if (!a.empty() && static_cast<int>(a.size()) - 1 >= shift + deg(b)) {
            // leading term must have cancelled
            throw std::logic_error("modpoly::divrem: no cancellation");
        }
    }
    normalize(q, m);
    return {q, a};
}

inline Zx monic(Zx a, const Int& m) {
    normalize(a, m);
    if (a.empty()) return a;
    return scale(a, inv_mod(a.back(), m), m);
}

inline Zx gcd(Zx a, Zx b, const Int& p) {
    normalize(a, p);
    normalize(b, p);
    while (!b.empty()) {
        Zx r = divrem(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a, p);
}

inline Zx derivative(const Zx& a, const Int& m) {
    if (a.size() <= 1) return {};
    Zx r(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<long>(i);
    normalize(r, m);
    return r;
}

inline Zx powmod(Zx base, Int e, const Zx& mod, const Int& p) {
    Zx r = {Int(1)};
    base = divrem(base, mod, p).second;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = divrem(mul(r, base, p), mod, p).second;
        base = divrem(mul(base, base, p), mod, p).second;
        e >>= 1;
    }
    return r;
}

// Deterministic pseudo-random coefficients for equal-degree splitting.
struct SplitRng {
    unsigned long state;
    explicit SplitRng(unsigned long seed) : state(seed * 2654435761UL + 1) {}
    unsigned long next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state >> 16;
    }
};

inline Zx random_poly(SplitRng& rng, int below_deg, const Int& p) {
    Zx r(below_deg);
    for (auto& v : r) v = Int(static_cast<unsigned long>(rng.next())) % p;
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// Splits a monic product of distinct irreducibles, all of degree d.
inline void equal_degree_split(const Zx& f, int d, const Int& p, SplitRng& rng,
                               std::vector<Zx>& out) {
    if (deg(f) == d) {
        out.push_back(f);
        return;
    }
    for (;;) {
        Zx a = random_poly(rng, deg(f), p);
        if (deg(a) < 1) continue;
        Zx g;
        if (p == 2) {
            // trace map relative to F_{2^d}
            Zx t = a, s = a;
            for (int i = 1; i < d; ++i) {
                s = powmod(s, Int(2), f, p);
                t = add(t, s, p);
            }
            g = gcd(t, f, p);
        } else {
            Int e = (pow_int(p, d) - 1) / 2;
            Zx b = powmod(a, e, f, p);
            b = sub(b, {Int(1)}, p);
            g = gcd(b, f, p);
        }
        if (deg(g) > 0 && deg(g) < deg(f)) {
            equal_degree_split(g, d, p, rng, out);
            equal_degree_split(divrem(f, g, p).first, d, p, rng, out);
            return;
        }
    }
}

// Distinct irreducible factors of a monic squarefree f mod p.
inline std::vector<Zx> factor_squarefree(Zx f, const Int& p, unsigned long seed) {
    std::vector<Zx> out;
    SplitRng rng(seed);
    Zx h = {Int(0), Int(1)};  // x
    const Zx x = h;
    int d = 0;
    while (deg(f) >= 1) {
        ++d;
        if (2 * d > deg(f)) {
            out.push_back(monic(f, p));
            break;
        }
        h = powmod(h, p, f, p);
        Zx g = gcd(sub(h, x, p), f, p);
        if (deg(g) > 0) {
            equal_degree_split(g, d, p, rng, out);
            f = divrem(f, g, p).first;
            h = divrem(h, f, p).second;
        }
    }
    return out;
}

// coefficient-wise p-th root of f = h(x)^p over F_p, i.e. h with h(x^p) = f
inline Zx pth_root(const Zx& f, const Int& p) {
    unsigned long pl = p.get_ui();
    Zx h((f.size() + pl - 1) / pl + 1, Int(0));
    h.assign(deg(f) / pl + 1, Int(0));
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        if (i % pl != 0) throw std::logic_error("pth_root: not a p-th power");
        h[i / pl] = f[i];
    }
    return h;
}

// Full factorization of monic f mod p: (irreducible factor, multiplicity).
inline std::vector<std::pair<Zx, int>> factor(Zx f, const Int& p, unsigned long seed = 7) {
    f = monic(f, p);
    if (deg(f) < 1) return {};
    std::vector<Zx> irr;
    Zx rem = f;
    while (deg(rem) >= 1) {
        Zx d = derivative(rem, p);
        if (d.empty()) {
            rem = pth_root(rem, p);
            continue;
        }
        Zx sqf = divrem(rem, gcd(rem, d, p), p).first;
        auto fs = factor_squarefree(sqf, p, seed);
        for (auto& u : fs) {
            irr.push_back(u);
            while (true) {
                auto [q, r] = divrem(rem, u, p);
                if (!r.empty()) break;
                rem = q;
            }
        }
    }
    std::sort(irr.begin(), irr.end());
    irr.erase(std::unique(irr.begin(), irr.end()), irr.end());
    std::vector<std::pair<Zx, int>> out;
    for (auto& u : irr) {
        int e = 0;
        Zx g = f;
        while (true) {
            auto [q, r] = divrem(g, u, p);
            if (!r.empty()) break;
            g = q;
            ++e;
        }
        out.push_back({u, e});
    }
    return out;
}

// One linear Hensel step: given monic f with f = g*h (mod p^k) and a Bezout
// identity s*g + t*h = 1 (mod p), lifts the pair to mod p^{k+1}.
inline void hensel_step(const Zx& f, Zx& g, Zx& h, const Zx& s, const Zx& t,
                        const Int& p, const Int& pk) {
    Int pk1 = pk * p;
    Zx e = sub(f, mul(g, h, pk1), pk1);  // divisible by p^k
    Zx ediv(e.size());
    for (size_t i = 0; i < e.size(); ++i) ediv[i] = e[i] / pk;
    normalize(ediv, p);
    Zx gp = g, hp = h;
    normalize(gp, p);
    normalize(hp, p);
    auto [q, dg] = divrem(mul(t, ediv, p), gp, p);  // t*e = q*g + dg
    Zx dh = add(mul(s, ediv, p), mul(q, hp, p), p);  // g*dh + h*dg = e (mod p)
    g = add(g, scale(dg, pk, pk1), pk1);
    h = add(h, scale(dh, pk, pk1), pk1);
}

// Lifts a pairwise-coprime monic factorization of monic f from mod p to mod
// p^target (target a power of p). Returns lifted monic factors.
inline std::vector<Zx> hensel_lift(const Zx& f_int, std::vector<Zx> factors,
                                   const Int& p, const Int& target) {
    if (factors.size() == 1) {
        Zx f = f_int;
        normalize(f, target);
        return {f};
    }
    // split into first factor and product of the rest, recurse
    Zx g0 = factors[0];
    Zx h0 = {Int(1)};
    for (size_t i = 1; i < factors.size(); ++i) h0 = mul(h0, factors[i], p);
    // Bezout: s*g0 + t*h0 = 1 mod p
    Zx s, t;
    {
        Zx a = g0, b = h0;
        Zx u0 = {Int(1)}, u1 = {};
        Zx v0 = {}, v1 = {Int(1)};
        while (!b.empty()) {
            auto [q, r] = divrem(a, b, p);
            Zx u2 = sub(u0, mul(q, u1, p), p);
            Zx v2 = sub(v0, mul(q, v1, p), p);
            a = b; b = r;
            u0 = u1; u1 = u2;
            v0 = v1; v1 = v2;
        }
        if (deg(a) != 0) throw std::logic_error("hensel_lift: factors not coprime mod p");
        Int ainv = inv_mod(a[0], p);
        s = scale(u0, ainv, p);
        t = scale(v0, ainv, p);
    }
    Zx g = g0, h = h0;
    Int pk = p;
    while (pk < target) {
        hensel_step(f_int, g, h, s, t, p, pk);
        pk *= p;
    }
    normalize(g, target);
    std::vector<Zx> rest_factors(factors.begin() + 1, factors.end());
    auto rest = hensel_lift(h, rest_factors, p, target);
    rest.insert(rest.begin(), g);
    return rest;
}

inline Int balanced(Int v, const Int& m) {
    mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
    if (2 * v > m) v -= m;
    return v;
}

}  // namespace modpoly

// --- factorization over Q ---------------------------------------------------

namespace detail {

inline bool zx_divides(const std::vector<Int>& f, const std::vector<Int>& g,
                       std::vector<Int>* quotient = nullptr) {
    // exact division test over Z, g | f, both with g monic or lc(g) | stuff
    QPoly qf = qpoly_from_int(f), qg = qpoly_from_int(g);
    auto [q, r] = poly_divrem(qf, qg);
    if (!r.is_zero()) return false;
    for (const Rat& c : q.c) {
        if (c.get_den() != 1) return false;
    }
    if (quotient) {
        quotient->clear();
        for (const Rat& c : q.c) quotient->push_back(c.get_num());
    }
    return true;
}

// Zassenhaus factorization of a monic squarefree integer polynomial.
inline std::vector<std::vector<Int>> factor_monic_squarefree_z(const std::vector<Int>& f) {
    using modpoly::Zx;
    int n = modpoly::deg(f);
    if (n <= 1) return {f};

    // prime with f squarefree mod p
    Int p(2);
    for (;;) {
        Zx fp = f;
        modpoly::normalize(fp, p);
        if (modpoly::deg(fp) == n) {
            Zx d = modpoly::derivative(fp, p);
            if (!d.empty() && modpoly::deg(modpoly::gcd(fp, d, p)) == 0) break;
        }
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    }

    Zx fp = f;
    modpoly::normalize(fp, p);
    auto irr = modpoly::factor_squarefree(fp, p, 11);
    if (irr.size() == 1) return {f};

    // Mignotte-style coefficient bound for monic factors
    Rat norm2_sq(0);
    for (const Int& c : f) norm2_sq += Rat(c) * Rat(c);
    Int bound(1);
    while (Rat(bound * bound) < norm2_sq) bound *= 2;
    bound = bound << (n + 1);
    Int target = p;
    while (target <= 2 * bound) target *= p;

    auto lifted = modpoly::hensel_lift(f, irr, p, target);

    std::vector<std::vector<Int>> result;
    std::vector<Zx> pool = lifted;
    std::vector<Int> rem = f;

    auto try_subset = [&](const std::vector<size_t>& subset) -> bool {
        Zx prod = {Int(1)};
        for (size_t idx : subset) prod = modpoly::mul(prod, pool[idx], target);
        for (auto& v : prod) v = modpoly::balanced(v, target);
        while (!prod.empty() && prod.back() == 0) prod.pop_back();
        std::vector<Int> quotient;
        if (zx_divides(rem, prod, &quotient)) {
            result.push_back(prod);
            rem = quotient;
            std::vector<Zx> np;
            for (size_t i = 0; i < pool.size(); ++i) {
                if (std::find(subset.begin(), subset.end(), i) == subset.end())
                    np.push_back(pool[i]);
            }
            pool = np;
            return true;
        }
        return false;
    };

    size_t card = 1;
    while (2 * card <= pool.size()) {
        bool found = true;
        while (found && 2 * card <= pool.size()) {
            found = false;
            std::vector<size_t> idx(card);
            for (size_t i = 0; i < card; ++i) idx[i] = i;
            for (;;) {
                if (try_subset(idx)) { found = true; break; }
                // next combination
                size_t i = card;
                while (i > 0) {
                    --i;
                    if (idx[i] + (card - i) < pool.size()) {
                        ++idx[i];
                        for (size_t j = i + 1; j < card; ++j) idx[j] = idx[j - 1] + 1;
                        break;
                    }
                    if (i == 0) { i = card + 1; break; }
                }
                if (i == card + 1) break;
            }
        }
        ++card;
    }
    if (modpoly::deg(rem) >= 1) result.push_back(rem);
    return result;
}

}  // namespace detail

// Irreducible factorization over Q. Returns primitive integer polynomials with
// positive leading coefficients, paired with multiplicities; constant content
// is dropped.
inline std::vector<std::pair<QPoly, int>> factor_q(const QPoly& f) {
    if (f.deg() < 1) return {};
    auto [content, prim] = qpoly_primitive(f);
    (void)content;

    // squarefree decomposition over Q (Yun)
    QPoly a = qpoly_from_int(prim);
    std::vector<std::pair<QPoly, int>> sqf;  // (squarefree part, multiplicity)
    {
        QPoly g = poly_gcd(a, a.derivative());
        if (g.deg() == 0) {
            sqf.push_back({a, 1});
        } else {
            QPoly w = poly_divrem(a, g).first;
            int m = 1;
            while (w.deg() >= 1) {
                QPoly y = poly_gcd(w, g);
                QPoly piece = poly_divrem(w, y).first;
                if (piece.deg() >= 1) sqf.push_back({piece, m});
                w = y;
                g = poly_divrem(g, y).first;
                ++m;
                if (g.deg() == 0 && w.deg() >= 1) {
                    sqf.push_back({w, m});
                    break;
                }
            }
        }
    }

    std::vector<std::pair<QPoly, int>> out;
    for (auto& [piece, mult] : sqf) {
        auto [c2, z] = qpoly_primitive(piece);
        (void)c2;
        // make monic via y = lc * x transform
        Int lc = z.back();
        std::vector<Int> monic_poly(z.size());
        // f*(y) = lc^{n-1} f(y/lc): coefficient of y^i is z[i] * lc^{n-1-i}
        int n = static_cast<int>(z.size()) - 1;
        for (int i = 0; i <= n; ++i) monic_poly[i] = z[i] * pow_int(lc, n - 1 >= i ? n - 1 - i : 0);
        if (n >= 1) monic_poly[n] = 1;

        auto factors = detail::factor_monic_squarefree_z(monic_poly);
        for (auto& g : factors) {
            // map back: h(x) = g(lc * x), then primitive part
            QPoly h;
            h.c.resize(g.size());
            Int powl(1);
            for (size_t i = 0; i < g.size(); ++i) {
                h.c[i] = Rat(g[i] * powl);
                powl *= lc;
            }
            h.trim();
            auto [c3, hz] = qpoly_primitive(h);
            (void)c3;
            out.push_back({qpoly_from_int(hz), mult});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.first.deg() != y.first.deg()) return x.first.deg() < y.first.deg();
        return x.first.c < y.first.c;
    });
    return out;
}

inline bool is_irreducible_q(const QPoly& f, QPoly* witness_factor = nullptr) {
    if (f.deg() < 1) return false;
    auto fs = factor_q(f);
    if (fs.size() == 1 && fs[0].second == 1) return true;
    if (witness_factor) *witness_factor = fs[0].first;
    return false;
}

}  // namespace adelic
