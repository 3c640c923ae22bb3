#pragma once

#include <adelic/intfactor.hpp>
#include <adelic/poly.hpp>

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace adelic {

// l <= sqrt(q) <= h with h - l = 1/(den * 2^k), for q >= 0.
inline std::pair<Rat, Rat> rat_sqrt_bounds(const Rat& q, unsigned k) {
    if (q < 0) throw std::invalid_argument("rat_sqrt_bounds: negative input");
    Int num = q.get_num(), den = q.get_den();
    Int scale = pow_int(Int(2), 2 * k);
    Int s;
    mpz_sqrt(s.get_mpz_t(), Int(num * den * scale).get_mpz_t());
    Int d = den * pow_int(Int(2), k);
    return {make_rat(s, d), make_rat(s + 1, d)};
}

// Annihilator with roots {a*b : f(a)=0, g(b)=0}, via interpolated resultants.
// Requires g(0) != 0 so degrees do not collapse at sample points.
inline QPoly annihilator_product(const QPoly& f, const QPoly& g) {
    int m = f.deg(), n = g.deg();
    if (m < 1 || n < 1) throw std::invalid_argument("annihilator_product: constant input");
    if (g.c[0] == 0) throw std::invalid_argument("annihilator_product: g(0) = 0");
    int points = m * n + 1;
    std::vector<Rat> xs, ys;
    long x = 0;
    while (static_cast<int>(xs.size()) < points) {
        Rat x0(x);
        // h(t) = t^n g(x0/t) = sum_k g_k x0^k t^{n-k}
        std::vector<Rat> h(n + 1);
        Rat powx(1);
        for (int k = 0; k <= n; ++k) {
            h[n - k] = g.c[k] * powx;
            powx *= x0;
        }
        xs.push_back(x0);
        ys.push_back(poly_resultant(f, QPoly(std::move(h))));
        x = (x > 0) ? -x : -x + 1;
    }
    return poly_interpolate(xs, ys);
}

// Annihilator with roots {a+b : f(a)=0, g(b)=0}.
inline QPoly annihilator_sum(const QPoly& f, const QPoly& g) {
    int m = f.deg(), n = g.deg();
    if (m < 1 || n < 1) throw std::invalid_argument("annihilator_sum: constant input");
    int points = m * n + 1;
    std::vector<Rat> xs, ys;
    long x = 0;
    while (static_cast<int>(xs.size()) < points) {
        Rat x0(x);
        // h(t) = g(x0 - t)
        QPoly lin({x0, Rat(-1)});
        QPoly h = g.compose(lin);
        xs.push_back(x0);
        ys.push_back(poly_resultant(f, h));
        x = (x > 0) ? -x : -x + 1;
    }
    return poly_interpolate(xs, ys);
}

// A real algebraic number: an irreducible primitive annihilator plus an
// isolating interval. Rationals are stored exactly (linear annihilator).
class RealAlgebraic {
public:
    RealAlgebraic() : RealAlgebraic(Rat(0)) {}

    explicit RealAlgebraic(const Rat& q) {
        min_ = QPoly({-q, Rat(1)});
        lo_ = hi_ = q;
    }

    // value = the unique real root of `annihilator` inside (lo, hi); the
    // annihilator need not be squarefree or irreducible.
    static RealAlgebraic from_root(const QPoly& annihilator, Rat lo, Rat hi) {
        RealAlgebraic r(Rat(0));
        r.assign_root(annihilator, lo, hi);
        return r;
    }

    // as from_root, but std::nullopt when (lo, hi) does not isolate
    static std::optional<RealAlgebraic> try_from_root(const QPoly& annihilator, Rat lo, Rat hi) {
        RealAlgebraic r(Rat(0));
        if (!r.try_assign_root(annihilator, lo, hi)) return std::nullopt;
        return r;
    }

    const QPoly& min_poly() const { return min_; }
    bool is_rational() const { return min_.deg() == 1; }
    Rat rational_value() const {
        if (!is_rational()) throw std::logic_error("RealAlgebraic: not rational");
        return -min_.c[0] / min_.c[1];
    }

    std::pair<Rat, Rat> enclosure() const { return {lo_, hi_}; }

    void refine() {
        if (lo_ == hi_) return;
        Rat mid = (lo_ + hi_) / 2;
        int s = qpoly_sign_at(min_, mid);
        if (s == 0) { lo_ = hi_ = mid; return; }  // only for rational roots
        if (s == qpoly_sign_at(min_, lo_)) lo_ = mid;
        else hi_ = mid;
    }

    void refine_below(const Rat& width) const {
        auto* self = const_cast<RealAlgebraic*>(this);
        while (hi_ - lo_ > width) self->refine();
    }

    int sign() const {
        if (is_rational()) return sgn(rational_value());
        // irrational: refine until the interval excludes 0
        while (lo_ <= 0 && hi_ >= 0) const_cast<RealAlgebraic*>(this)->refine();
        return lo_ > 0 ? 1 : -1;
    }

    int compare(const Rat& q) const {
        if (is_rational()) {
            Rat v = rational_value();
            return v < q ? -1 : (v == q ? 0 : 1);
        }
        // q is not a root of an irreducible poly of degree >= 2
        while (lo_ <= q && q <= hi_) const_cast<RealAlgebraic*>(this)->refine();
        return hi_ < q ? -1 : 1;
    }

    int compare(const RealAlgebraic& other) const {
        if (other.is_rational()) return compare(other.rational_value());
        if (is_rational()) return -other.compare(rational_value());
        bool same_poly = (min_ == other.min_);
        SturmChain st(min_);
        for (;;) {
            if (hi_ < other.lo_) return -1;
            if (other.hi_ < lo_) return 1;
            if (same_poly) {
                Rat ilo = std::max(lo_, other.lo_), ihi = std::min(hi_, other.hi_);
                if (ilo < ihi && st.count_roots(ilo, ihi) >= 1) return 0;
            }
            const_cast<RealAlgebraic*>(this)->refine();
            const_cast<RealAlgebraic&>(other).refine();
        }
    }

    bool equals(const RealAlgebraic& other) const { return compare(other) == 0; }

    RealAlgebraic neg() const {
        if (is_rational()) return RealAlgebraic(-rational_value());
        QPoly f;
        f.c = min_.c;
        for (size_t i = 1; i < f.c.size(); i += 2) f.c[i] = -f.c[i];
        RealAlgebraic r(Rat(0));
        r.min_ = f;
        r.lo_ = -hi_;
        r.hi_ = -lo_;
        r.normalize_sign();
        return r;
    }

    RealAlgebraic inv() const {
        if (is_rational()) {
            Rat v = rational_value();
            if (v == 0) throw std::invalid_argument("RealAlgebraic::inv: zero");
            return RealAlgebraic(1 / v);
        }
        while (lo_ <= 0 && hi_ >= 0) const_cast<RealAlgebraic*>(this)->refine();
        // isolation is preserved: x -> 1/x is monotone on a sign-definite interval
        QPoly f;
        f.c.assign(min_.c.rbegin(), min_.c.rend());
        f.trim();
        RealAlgebraic r(Rat(0));
        r.min_ = f;
        r.lo_ = 1 / hi_;
        r.hi_ = 1 / lo_;
        r.normalize_sign();
        return r;
    }

    RealAlgebraic mul(const RealAlgebraic& other) const {
        if (is_rational()) return other.scale(rational_value());
        if (other.is_rational()) return scale(other.rational_value());
        QPoly ann = annihilator_product(min_, other.min_);
        return combine(ann, other, /*product=*/true);
    }

    RealAlgebraic add(const RealAlgebraic& other) const {
        if (is_rational()) return other.shift(rational_value());
        if (other.is_rational()) return shift(other.rational_value());
        QPoly ann = annihilator_sum(min_, other.min_);
        return combine(ann, other, /*product=*/false);
    }

    RealAlgebraic sub(const RealAlgebraic& other) const { return add(other.neg()); }

    RealAlgebraic scale(const Rat& s) const {
        if (s == 0) return RealAlgebraic(Rat(0));
        if (is_rational()) return RealAlgebraic(rational_value() * s);
        // annihilator f(x/s): coefficient i picks up s^{-i}
        QPoly f;
        f.c.resize(min_.c.size());
        Rat spow(1);
        for (size_t i = 0; i < min_.c.size(); ++i) {
            f.c[i] = min_.c[i] / spow;
            spow *= s;
        }
        f.trim();
        RealAlgebraic r(Rat(0));
        r.min_ = f;
        if (s > 0) { r.lo_ = lo_ * s; r.hi_ = hi_ * s; }
        else { r.lo_ = hi_ * s; r.hi_ = lo_ * s; }
        r.normalize_sign();
        return r;
    }

    RealAlgebraic shift(const Rat& s) const {
        if (is_rational()) return RealAlgebraic(rational_value() + s);
        QPoly lin({-s, Rat(1)});
        QPoly f = min_.compose(lin);
        RealAlgebraic r(Rat(0));
        r.min_ = f;
        r.lo_ = lo_ + s;
        r.hi_ = hi_ + s;
        r.normalize_sign();
        return r;
    }

    RealAlgebraic pow(unsigned long k) const {
        RealAlgebraic acc(Rat(1));
        RealAlgebraic base = *this;
        while (k) {
            if (k & 1) acc = acc.mul(base);
            if (k >>= 1) base = base.mul(base);
        }
        return acc;
    }

    RealAlgebraic abs() const { return sign() >= 0 ? *this : neg(); }

    // positive square root; requires value >= 0
    RealAlgebraic sqrt() const {
        int s = is_rational() && rational_value() == 0 ? 0 : sign();
        if (s < 0) throw std::invalid_argument("RealAlgebraic::sqrt: negative");
        if (s == 0) return RealAlgebraic(Rat(0));
        if (is_rational()) {
            Rat v = rational_value();
            auto nr = perfect_root(v.get_num(), 2);
            auto dr = perfect_root(v.get_den(), 2);
            if (nr && dr) return RealAlgebraic(make_rat(*nr, *dr));
        }
        // annihilator f(x^2)
        QPoly f;
        f.c.assign(2 * min_.c.size() - 1, Rat(0));
        for (size_t i = 0; i < min_.c.size(); ++i) f.c[2 * i] = min_.c[i];
        f.trim();
        refine_below(Rat(1, 64));
        unsigned prec = 8;
        for (;;) {
            auto [l1, h1] = rat_sqrt_bounds(std::max(lo_, Rat(0)), prec);
            auto [l2, h2] = rat_sqrt_bounds(hi_, prec);
            RealAlgebraic r(Rat(0));
            if (r.try_assign_root(f, l1, h2)) return r;
            const_cast<RealAlgebraic*>(this)->refine();
            prec += 4;
        }
    }

    double to_double() const {
        refine_below(Rat(1, Int(1) << 60));
        return mpq_class((lo_ + hi_) / 2).get_d();
    }

private:
    QPoly min_;
    mutable Rat lo_, hi_;

    void normalize_sign() {
        // keep primitive integer annihilator with positive leading coefficient
        auto [c, z] = qpoly_primitive(min_);
        (void)c;
        min_ = qpoly_from_int(z);
    }

    // picks the irreducible factor and tightens (lo, hi) to isolate the root
    void assign_root(const QPoly& annihilator, Rat lo, Rat hi) {
        if (!try_assign_root(annihilator, lo, hi))
            throw std::logic_error("RealAlgebraic: interval does not isolate a root");
    }

    bool try_assign_root(const QPoly& annihilator, Rat lo, Rat hi) {
        auto factors = factor_q(annihilator);
        std::vector<SturmChain> chains;
        chains.reserve(factors.size());
        for (auto& [fac, mult] : factors) chains.emplace_back(fac);
        int total = 0;
        size_t which = 0;
        for (size_t i = 0; i < factors.size(); ++i) {
            int c = chains[i].count_roots(lo, hi);
            total += c;
            if (c > 0) which = i;
        }
        if (total != 1) return false;
        const QPoly& fac = factors[which].first;
        if (fac.deg() == 1) {
            Rat v = -fac.c[0] / fac.c[1];
            min_ = QPoly({-v, Rat(1)});
            lo_ = hi_ = v;
            return true;
        }
        min_ = fac;
        // Sturm counting is on (lo, hi]; for an irreducible factor of degree
        // >= 2 the rational endpoints are never roots, so the open interval
        // isolates as well.
        lo_ = lo;
        hi_ = hi;
        return true;
    }

    // builds the result of this op other from a candidate annihilator by
    // interval-arithmetic isolation, refining operands as needed
    RealAlgebraic combine(const QPoly& annihilator, const RealAlgebraic& other, bool product) const {
        for (int round = 0;; ++round) {
            Rat lo, hi;
            if (product) {
                Rat cands[4] = {lo_ * other.lo_, lo_ * other.hi_, hi_ * other.lo_, hi_ * other.hi_};
                lo = hi = cands[0];
                for (auto& c : cands) { if (c < lo) lo = c; if (c > hi) hi = c; }
            } else {
                lo = lo_ + other.lo_;
                hi = hi_ + other.hi_;
            }
            RealAlgebraic r(Rat(0));
            // widen slightly so the true value is interior even when an
            // operand interval is degenerate
            Rat pad = (hi - lo) / 1024 + Rat(1, Int(1) << (20 + 2 * round));
            if (r.try_assign_root(annihilator, lo - pad, hi + pad)) return r;
            const_cast<RealAlgebraic*>(this)->refine();
            const_cast<RealAlgebraic&>(other).refine();
            if (round > 4096) throw std::logic_error("RealAlgebraic: isolation failed to converge");
        }
    }
};

}  // namespace adelic
