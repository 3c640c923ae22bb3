#pragma once

#include <adelic/zeta.hpp>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace adelic::ec {

// F_{p^r} for small p >= 5, elements as coefficient vectors over F_p with a
// deterministic (lexicographically least) irreducible modulus. Kept separate
// from the exact stack on purpose: this is the independent ground truth.
class FqField {
public:
    using El = std::vector<uint64_t>;

    FqField(uint64_t p, int r) : p_(p), r_(r) {
        if (r < 1) throw Error("FqField: r must be >= 1");
        if (r_ == 1) {
            mod_ = {0, 1};
            return;
        }
        // least monic irreducible of degree r by exhaustive root/factor tests
        std::vector<uint64_t> trial(r_ + 1, 0);
        trial[r_] = 1;
        for (;;) {
            if (is_irreducible(trial)) {
                mod_ = trial;
                return;
            }
            // increment the low coefficients in base p
            int i = 0;
            while (i < r_) {
                if (++trial[i] < p_) break;
                trial[i] = 0;
                ++i;
            }
            if (i == r_) throw Error("FqField: no irreducible found");
        }
    }

    uint64_t p() const { return p_; }
    int r() const { return r_; }
    uint64_t q() const {
        uint64_t v = 1;
        for (int i = 0; i < r_; ++i) v *= p_;
        return v;
    }

    El zero() const { return El(r_, 0); }
    El one() const {
        El e(r_, 0);
        e[0] = 1;
        return e;
    }
    El from_uint(uint64_t v) const {
        El e(r_, 0);
        e[0] = v % p_;
        return e;
    }
    // enumeration: index in [0, q) in base p
    El element(uint64_t idx) const {
        El e(r_, 0);
        for (int i = 0; i < r_; ++i) {
            e[i] = idx % p_;
            idx /= p_;
        }
        return e;
    }

    bool is_zero(const El& a) const {
        for (uint64_t v : a) {
            if (v) return false;
        }
        return true;
    }

    El add(const El& a, const El& b) const {
        El c(r_);
        for (int i = 0; i < r_; ++i) c[i] = (a[i] + b[i]) % p_;
        return c;
    }
    El sub(const El& a, const El& b) const {
        El c(r_);
        for (int i = 0; i < r_; ++i) c[i] = (a[i] + p_ - b[i]) % p_;
        return c;
    }
    El neg(const El& a) const { return sub(zero(), a); }

    El mul(const El& a, const El& b) const {
        std::vector<uint64_t> t(2 * r_ - 1, 0);
        for (int i = 0; i < r_; ++i) {
            if (!a[i]) continue;
            for (int j = 0; j < r_; ++j) t[i + j] = (t[i + j] + a[i] * b[j]) % p_;
        }
        // reduce by the monic modulus
        for (int k = 2 * r_ - 2; k >= r_; --k) {
            uint64_t c = t[k];
            if (!c) continue;
            t[k] = 0;
            for (int j = 0; j < r_; ++j) {
                t[k - r_ + j] = (t[k - r_ + j] + (p_ - mod_[j] % p_) * c) % p_;
            }
        }
        return El(t.begin(), t.begin() + r_);
    }

    El pow(El a, uint64_t e) const {
        El acc = one();
        while (e) {
            if (e & 1) acc = mul(acc, a);
            a = mul(a, a);
            e >>= 1;
        }
        return acc;
    }

    El inv(const El& a) const {
        if (is_zero(a)) throw Error("FqField: inverse of zero");
        return pow(a, q() - 2);
    }

    // quadratic character: 1 for nonzero squares, -1 for nonsquares, 0 at 0
    int chi(const El& a) const {
        if (is_zero(a)) return 0;
        El t = pow(a, (q() - 1) / 2);
        return t == one() ? 1 : -1;
    }

private:
    uint64_t p_;
    int r_;
    std::vector<uint64_t> mod_;

    // irreducibility over F_p via gcd(x^{p^d} - x, f) tests
    bool is_irreducible(const std::vector<uint64_t>& f) const {
        int n = static_cast<int>(f.size()) - 1;
        auto polymod = [&](std::vector<uint64_t> a) {
            for (int k = static_cast<int>(a.size()) - 1; k >= n; --k) {
                uint64_t c = a[k] % p_;
                if (!c) continue;
                a[k] = 0;
                for (int j = 0; j < n; ++j) a[k - n + j] = (a[k - n + j] + (p_ - f[j] % p_) * c) % p_;
            }
            a.resize(n);
            return a;
        };
        auto polymul = [&](const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
            std::vector<uint64_t> t(a.size() + b.size() - 1, 0);
            for (size_t i = 0; i < a.size(); ++i) {
                if (!a[i]) continue;
                for (size_t j = 0; j < b.size(); ++j) t[i + j] = (t[i + j] + a[i] * b[j]) % p_;
            }
            return polymod(t);
        };
        auto polygcd_deg = [&](std::vector<uint64_t> a, std::vector<uint64_t> b) {
            auto deg = [](const std::vector<uint64_t>& v) {
                int d = static_cast<int>(v.size()) - 1;
                while (d >= 0 && !v[d]) --d;
                return d;
            };
            while (deg(b) >= 0) {
                // a mod b
                int db = deg(b);
                uint64_t lcinv = 1;
                {  // inverse of b[db] mod p by Fermat
                    uint64_t base = b[db] % p_, e = p_ - 2, acc = 1;
                    while (e) {
                        if (e & 1) acc = acc * base % p_;
                        base = base * base % p_;
                        e >>= 1;
                    }
                    lcinv = acc;
                }
                while (deg(a) >= db) {
                    int da = deg(a);
                    uint64_t f2 = a[da] % p_ * lcinv % p_;
                    if (f2) {
                        for (int j = 0; j <= db; ++j) {
                            a[da - db + j] = (a[da - db + j] + (p_ - b[j] * f2 % p_)) % p_;
                        }
                    }
                    while (deg(a) == da) a[da] = 0;  // force progress on rounding issues
                }
                std::swap(a, b);
            }
            return deg(a);
        };
        // x^{p^d} mod f by repeated Frobenius powering
        std::vector<uint64_t> x = {0, 1};
        std::vector<uint64_t> h = x;
        for (int d = 1; d <= n / 2; ++d) {
            // h = h^p mod f
            std::vector<uint64_t> acc = {1};
            std::vector<uint64_t> base = h;
            uint64_t e = p_;
            while (e) {
                if (e & 1) acc = polymul(acc, base);
                base = polymul(base, base);
                e >>= 1;
            }
            h = acc;
            auto diff = h;
            diff.resize(std::max<size_t>(diff.size(), 2));
            diff[1] = (diff[1] + p_ - 1) % p_;
            if (polygcd_deg(f, diff) > 0) return false;
        }
        return true;
    }
};

// y^2 = x^3 + a4 x + a6 over F_p, p >= 5
struct Curve {
    uint64_t p;
    uint64_t a4, a6;

    Curve(uint64_t prime, uint64_t c4, uint64_t c6) : p(prime), a4(c4 % prime), a6(c6 % prime) {
        if (p < 5 || !is_prime(Int(static_cast<long>(p)))) throw Error("Curve: p must be a prime >= 5");
        // nonsingular: 4 a4^3 + 27 a6^2 != 0
        uint64_t d = (4 * ((a4 * a4 % p) * a4 % p) + 27 * (a6 * a6 % p)) % p;
        if (d == 0) throw Error("Curve: singular (4a4^3 + 27a6^2 = 0)");
    }
};

struct Point {
    bool inf = true;
    FqField::El x, y;
};

inline bool point_eq(const FqField& F, const Point& a, const Point& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.x == b.x && a.y == b.y;
}

inline Point point_add(const FqField& F, const Curve& E, const Point& P, const Point& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    if (P.x == Q.x) {
        if (F.is_zero(F.add(P.y, Q.y))) return Point{};  // P + (-P) = O
        // doubling
        auto num = F.add(F.mul(F.from_uint(3), F.mul(P.x, P.x)), F.from_uint(E.a4));
        auto den = F.mul(F.from_uint(2), P.y);
        auto lam = F.mul(num, F.inv(den));
        auto x3 = F.sub(F.mul(lam, lam), F.add(P.x, Q.x));
        auto y3 = F.sub(F.mul(lam, F.sub(P.x, x3)), P.y);
        return Point{false, x3, y3};
    }
    auto lam = F.mul(F.sub(Q.y, P.y), F.inv(F.sub(Q.x, P.x)));
    auto x3 = F.sub(F.sub(F.mul(lam, lam), P.x), Q.x);
    auto y3 = F.sub(F.mul(lam, F.sub(P.x, x3)), P.y);
    return Point{false, x3, y3};
}

inline Point point_scale(const FqField& F, const Curve& E, long m, Point P) {
    if (m < 0) {
        m = -m;
        if (!P.inf) P.y = F.neg(P.y);
    }
    Point acc{};
    while (m) {
        if (m & 1) acc = point_add(F, E, acc, P);
        P = point_add(F, E, P, P);
        m >>= 1;
    }
    return acc;
}

// #E(F_{p^r}) by exhaustive enumeration with the quadratic character
inline long count_points(const Curve& E, int r, uint64_t budget = 1000000) {
    FqField F(E.p, r);
    if (F.q() > budget) throw BudgetExceeded("count_points: p^r exceeds the enumeration budget");
    long count = 1;  // point at infinity
    for (uint64_t i = 0; i < F.q(); ++i) {
        auto x = F.element(i);
        auto rhs = F.add(F.mul(F.mul(x, x), x), F.add(F.mul(F.from_uint(E.a4), x), F.from_uint(E.a6)));
        count += 1 + F.chi(rhs);
    }
    return count;
}

inline std::vector<Point> all_points(const Curve& E, const FqField& F, uint64_t budget = 10000000) {
    if (F.q() * F.q() > budget) throw BudgetExceeded("all_points: p^{2r} exceeds the enumeration budget");
    std::vector<Point> pts;
    pts.push_back(Point{});
    for (uint64_t i = 0; i < F.q(); ++i) {
        auto x = F.element(i);
        auto rhs = F.add(F.mul(F.mul(x, x), x), F.add(F.mul(F.from_uint(E.a4), x), F.from_uint(E.a6)));
        for (uint64_t j = 0; j < F.q(); ++j) {
            auto y = F.element(j);
            if (F.mul(y, y) == rhs) pts.push_back(Point{false, x, y});
        }
    }
    return pts;
}

// #E[m](F_{p^r}) by enumeration and scalar multiplication
inline long torsion_count(const Curve& E, long m, int r, uint64_t budget = 10000000) {
    FqField F(E.p, r);
    auto pts = all_points(E, F, budget);
    long count = 0;
    for (const auto& P : pts) {
        if (point_scale(F, E, m, P).inf) ++count;
    }
    return count;
}

// Frobenius trace and the associated (separable) zeta data
inline long frobenius_trace(const Curve& E) {
    long n1 = count_points(E, 1);
    long a = static_cast<long>(E.p) + 1 - n1;
    // Hasse bound
    if (static_cast<double>(a) * a > 4.0 * static_cast<double>(E.p))
        throw std::logic_error("frobenius_trace: Hasse bound violated");
    return a;
}

inline bool is_supersingular(const Curve& E) { return frobenius_trace(E) % static_cast<long>(E.p) == 0; }

// ZetaSpec of the Frobenius endomorphism: xi, xi-bar roots of T^2 - aT + p;
// phi^k - 1 is separable, so r = (1), s = (0)
inline ZetaSpec frobenius_spec(const Curve& E) {
    long a = frobenius_trace(E);
    QPoly minpoly({Rat(static_cast<long>(E.p)), Rat(-a), Rat(1)});
    auto K = make_number_field(minpoly);
    auto xi = AlgebraicNumber::generator(K);
    auto xibar = AlgebraicNumber(Rat(a)) - xi;
    return ZetaSpec::make(K, {xi, xibar}, Int(static_cast<long>(E.p)), 1, {Rat(1)}, {0});
}

// ZetaSpec of the multiplication-by-m endomorphism: deg([m]^k - 1) = (m^k-1)^2
// with inseparable part p^{eps v_p(m^k - 1)}, eps = 1 (ordinary) or 2
// (supersingular); the lifting-the-exponent pattern lands in one class mod the
// multiplicative order of m.
inline ZetaSpec multiplication_spec(const Curve& E, long m) {
    if (m < 2) throw Error("multiplication_spec: need m >= 2");
    long p = static_cast<long>(E.p);
    long eps = is_supersingular(E) ? 2 : 1;
    auto q = rationals_field();
    std::vector<AlgebraicNumber> xi = {AlgebraicNumber(Rat(m)), AlgebraicNumber(Rat(m))};
    if (m % p == 0) {
        // m^k - 1 is a p-unit for every k: separable
        return ZetaSpec::make(q, xi, Int(p), 1, {Rat(1)}, {0});
    }
    // multiplicative order of m mod p
    long ord = 1;
    long cur = m % p;
    while (cur != 1) {
        cur = cur * m % p;
        ++ord;
    }
    long v0 = val_p(Int(pow_int(Int(m), ord) - 1), Int(p));
    std::vector<Rat> r(ord, Rat(1));
    std::vector<long> s(ord, 0);
    // class k = 0 mod ord sits at periodic index ord - 1
    r[ord - 1] = pow_rat(Rat(p), eps * v0);
    s[ord - 1] = -eps;
    return ZetaSpec::make(q, xi, Int(p), static_cast<unsigned long>(ord), r, s);
}

struct CrosscheckReport {
    struct Entry {
        long k;
        long enumerated;
        Rat from_degrees;
        bool match;
    };
    std::vector<Entry> entries;
    bool all_match = true;
};

// #E(F_{p^k}) by enumeration must equal prod (xi^k - 1)(xibar^k - 1) exactly
inline CrosscheckReport crosscheck_Nk(const Curve& E, int k_max, uint64_t budget = 1000000) {
    CrosscheckReport rep;
    ZetaSpec z = frobenius_spec(E);
    for (int k = 1; k <= k_max; ++k) {
        long n = count_points(E, k, budget);
        Rat d = deg_k(z, k);
        bool match = (d == Rat(n));
        rep.entries.push_back({k, n, d, match});
        if (!match) rep.all_match = false;
    }
    return rep;
}

}  // namespace adelic::ec
