#pragma once

#include <adelic/errors.hpp>
#include <adelic/intfactor.hpp>
#include <adelic/numfield.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <vector>

namespace adelic {

// Shared data for all places of K above a rational prime p: the distinct
// irreducible factors of the minimal polynomial mod p, with Hensel lifts of
// the grouped factors g_i^{e_i} (the p-adic local factors) cached on demand.
class PAdicContext {
public:
    struct Factor {
        modpoly::Zx gbar;  // irreducible mod p
        int e, f;
    };

    static std::shared_ptr<const PAdicContext> create(FieldPtr field, const Int& p) {
        if (!is_prime(p)) throw Error("places_above: p is not prime");
        auto ctx = std::shared_ptr<PAdicContext>(new PAdicContext());
        ctx->field_ = std::move(field);
        ctx->p_ = p;
        const QPoly& m = ctx->field_->min_poly();
        if (m.deg() == 1) {
            ctx->rational_ = true;
            ctx->factors_.push_back({{}, 1, 1});
            return ctx;
        }
        for (const Rat& c : m.c) {
            if (c.get_den() != 1)
                throw IndexDivisor(
                    "minimal polynomial is not p-integral; re-present the field with an "
                    "integral generator");
        }
        // quick pass: p^2 does not divide disc(m) => p does not divide the index
        Rat disc = poly_resultant(m, m.derivative());
        bool index_ok = disc != 0 && val_p(disc.get_num(), p) <= 1;
        modpoly::Zx mbar = modpoly::from_qpoly(m, p);
        if (modpoly::deg(mbar) != m.deg()) throw Error("places_above: inconsistent reduction");
        auto fact = modpoly::factor(mbar, p, 17);
        if (!index_ok) {
            // Dedekind's criterion
            modpoly::Zx gstar = {Int(1)}, hstar = {Int(1)};
            for (auto& [gi, ei] : fact) {
                gstar = modpoly::mul(gstar, gi, p);
                for (int j = 1; j < ei; ++j) hstar = modpoly::mul(hstar, gi, p);
            }
            // T = (g* h* - m)/p over Z, using the canonical lifts in [0, p)
            QPoly gq = qpoly_from_int(std::vector<Int>(gstar.begin(), gstar.end()));
            QPoly hq = qpoly_from_int(std::vector<Int>(hstar.begin(), hstar.end()));
            QPoly T = gq * hq - m;
            std::vector<Int> tz(T.c.size());
            for (size_t i = 0; i < T.c.size(); ++i) {
                if (T.c[i].get_den() != 1 || T.c[i].get_num() % p != 0)
                    throw std::logic_error("Dedekind: T not divisible by p");
                tz[i] = T.c[i].get_num() / p;
            }
            modpoly::Zx tbar(tz.begin(), tz.end());
            modpoly::normalize(tbar, p);
            modpoly::Zx g1 = modpoly::gcd(tbar, gstar, p);
            modpoly::Zx g2 = modpoly::gcd(g1, hstar, p);
            if (modpoly::deg(g2) > 0) {
                std::ostringstream os;
                os << "p = " << p.get_str() << " divides the index [O_K : Z[theta]]";
                throw IndexDivisor(os.str());
            }
        }
        for (auto& [gi, ei] : fact) {
            ctx->factors_.push_back({gi, ei, modpoly::deg(gi)});
        }
        return ctx;
    }

    const FieldPtr& field() const { return field_; }
    const Int& p() const { return p_; }
    bool rational_field() const { return rational_; }
    size_t count() const { return factors_.size(); }
    const Factor& factor(size_t i) const { return factors_.at(i); }

    // local factor G_i = (lift of gbar_i^{e_i}) mod p^N, N = precision
    modpoly::Zx lifted_factor(size_t i, long precision) const {
        if (rational_) throw std::logic_error("lifted_factor: rational field");
        std::lock_guard<std::mutex> lock(mu_);
        if (precision <= lifted_prec_ && !lifted_.empty()) {
            Int pN = pow_int(p_, precision);
            modpoly::Zx g = lifted_[i];
            modpoly::normalize(g, pN);
            return g;
        }
        long target_prec = std::max<long>(precision, 2 * lifted_prec_);
        Int pN = pow_int(p_, target_prec);
        std::vector<modpoly::Zx> grouped;
        for (auto& fac : factors_) {
            modpoly::Zx g = {Int(1)};
            for (int j = 0; j < fac.e; ++j) g = modpoly::mul(g, fac.gbar, p_);
            grouped.push_back(g);
        }
        modpoly::Zx mbar = modpoly::from_qpoly(field_->min_poly(), pN);
        lifted_ = modpoly::hensel_lift(mbar, grouped, p_, pN);
        lifted_prec_ = target_prec;
        Int pReq = pow_int(p_, precision);
        modpoly::Zx g = lifted_[i];
        modpoly::normalize(g, pReq);
        return g;
    }

    // prime-ideal valuation v_P(a) at the i-th place, normalized v_P(pi) = 1
    long ideal_valuation(size_t i, const AlgebraicNumber& a) const {
        if (a.is_zero()) throw ZeroInput("ideal_valuation: zero input");
        if (rational_ || a.is_rational()) {
            // v_P(q) = e * v_p(q)
            return factors_[i].e * val_p(a.is_rational() ? a.as_rational() : Rat(0), p_);
        }
        // a = B(theta)/q with integer B
        Int q(1);
        for (const Rat& c : a.coords())
            mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), c.get_den().get_mpz_t());
        std::vector<Int> B(a.coords().size());
        for (size_t j = 0; j < B.size(); ++j)
            B[j] = a.coords()[j].get_num() * (q / a.coords()[j].get_den());
        long vq = val_p(q, p_);
        int f = factors_[i].f;
        for (long prec = 24;; prec *= 2) {
            if (prec > 1 << 20) throw PrecisionLoss("ideal_valuation: resultant vanishes to huge precision");
            Int pN = pow_int(p_, prec);
            modpoly::Zx G = lifted_factor(i, prec);
            QPoly Gq = qpoly_from_int(std::vector<Int>(G.begin(), G.end()));
            QPoly Bq = qpoly_from_int(B);
            Rat res = poly_resultant(Gq, Bq);
            if (res != 0) {
                long v = val_p(res.get_num(), p_);
                if (v < prec) {
                    if (v % f != 0) throw std::logic_error("ideal_valuation: norm valuation not divisible by f");
                    return v / f - factors_[i].e * vq;
                }
            }
        }
    }

private:
    PAdicContext() = default;
    FieldPtr field_;
    Int p_;
    bool rational_ = false;
    std::vector<Factor> factors_;
    mutable std::mutex mu_;
    mutable std::vector<modpoly::Zx> lifted_;
    mutable long lifted_prec_ = 0;
};

using PAdicCtxPtr = std::shared_ptr<const PAdicContext>;

// A place of a number field: an archimedean embedding or a prime-ideal datum.
struct Place {
    FieldPtr field;
    bool arch = true;
    // archimedean
    size_t emb_index = 0;
    // non-archimedean
    PAdicCtxPtr ctx;
    size_t index = 0;

    int delta() const {
        if (arch) {
            return emb_index < field->real_embedding_count() ? 1 : 2;
        }
        const auto& f = ctx->factor(index);
        return f.e * f.f;
    }
    long e() const { return arch ? 1 : ctx->factor(index).e; }
    long f() const { return arch ? 1 : ctx->factor(index).f; }
    const Int& p() const {
        if (arch) throw Error("Place::p: archimedean place");
        return ctx->p();
    }

    std::string selector() const {
        std::ostringstream os;
        if (arch) os << "inf:" << emb_index;
        else os << ctx->p().get_str() << ":" << index;
        return os.str();
    }

    friend bool operator==(const Place& a, const Place& b) {
        if (a.arch != b.arch || !same_field(a.field, b.field)) return false;
        if (a.arch) return a.emb_index == b.emb_index;
        return a.ctx->p() == b.ctx->p() && a.index == b.index;
    }
};

inline std::vector<Place> places_above(const FieldPtr& field, const Int& p) {
    auto ctx = PAdicContext::create(field, p);
    std::vector<Place> out;
    for (size_t i = 0; i < ctx->count(); ++i) {
        Place w;
        w.field = field;
        w.arch = false;
        w.ctx = ctx;
        w.index = i;
        out.push_back(w);
    }
    return out;
}

inline std::vector<Place> archimedean_places(const FieldPtr& field) {
    std::vector<Place> out;
    size_t n = field->real_embedding_count() + field->complex_pair_count();
    for (size_t k = 0; k < n; ++k) {
        Place w;
        w.field = field;
        w.arch = true;
        w.emb_index = k;
        out.push_back(w);
    }
    return out;
}

// |a|_w in the paper normalization: p^{-v_P(a)/e} at finite places (exact
// symbolic power), |sigma(a)| at archimedean ones.
struct AbsValue {
    bool arch = false;
    // non-archimedean: value = p^{-q}
    Int p = 0;
    Rat q = 0;
    // archimedean
    RealAlgebraic real;

    static AbsValue nonarch(Int prime, Rat exponent) {
        AbsValue v;
        v.arch = false;
        v.p = std::move(prime);
        v.q = std::move(exponent);
        return v;
    }
    static AbsValue archimedean(RealAlgebraic r) {
        AbsValue v;
        v.arch = true;
        v.real = std::move(r);
        return v;
    }

    bool is_one() const {
        if (arch) return real.compare(Rat(1)) == 0;
        return q == 0;
    }

    // exact comparison; both operands must be of the same kind (same p)
    int compare(const AbsValue& o) const {
        if (arch != o.arch) throw Error("AbsValue::compare: mixed kinds");
        if (arch) return real.compare(o.real);
        if (p != o.p) throw Error("AbsValue::compare: different primes");
        // p^{-q}: larger exponent = smaller value
        return q > o.q ? -1 : (q == o.q ? 0 : 1);
    }

    double to_double() const {
        if (arch) return real.to_double();
        return std::pow(p.get_d(), -mpq_class(q).get_d());
    }
};

inline AbsValue abs_value(const AlgebraicNumber& a, const Place& w) {
    if (a.is_zero()) throw ZeroInput("abs_value: zero input");
    AlgebraicNumber x = a.attached() ? a : a.promoted(w.field);
    if (w.arch) {
        return AbsValue::archimedean(abs2_at_embedding(x, w.emb_index).sqrt());
    }
    long v = w.ctx->ideal_valuation(w.index, x);
    return AbsValue::nonarch(w.ctx->p(), make_rat(Int(v), Int(w.e())));
}

// w-normalized valuation: |a|_w = p^{-val}; val extends v_p on Q.
inline Rat w_valuation(const AlgebraicNumber& a, const Place& w) {
    if (w.arch) throw Error("w_valuation: archimedean place");
    return make_rat(Int(w.ctx->ideal_valuation(w.index, a)), Int(w.e()));
}

// --- local elements ---------------------------------------------------------

// An element of the completion K_w = Q_p[t]/(G(t)), stored as
// p^{shift} * c(t) with c known modulo p^{prec}.
struct LocalElement {
    PAdicCtxPtr ctx;
    size_t index = 0;
    long prec = 0;
    long shift = 0;
    modpoly::Zx c;

    const Int& p() const { return ctx->p(); }
    long ef() const {
        const auto& f = ctx->factor(index);
        return static_cast<long>(f.e) * f.f;
    }

    bool known_zero_at_precision() const { return c.empty(); }

    // reduce c mod (G, p^prec)
    void reduce() {
        Int pN = pow_int(p(), prec);
        if (ctx->rational_field()) {
            modpoly::normalize(c, pN);
            return;
        }
        modpoly::Zx G = ctx->lifted_factor(index, prec);
        c = modpoly::divrem(c, G, pN).second;
    }

    // Pulls p factors out of the digits into the shift. Keeping digit vectors
    // p-primitive preserves relative precision across multiplications; the
    // absolute precision shift+prec is invariant.
    void canonicalize() {
        reduce();
        if (c.empty()) return;
        long dv = -1;
        for (const Int& v : c) {
            if (v == 0) continue;
            long x = val_p(v, p());
            if (dv < 0 || x < dv) dv = x;
        }
        long m = std::min(dv, prec - 1);
        if (m <= 0) return;
        Int pm = pow_int(p(), m);
        for (Int& v : c) v /= pm;
        shift += m;
        prec -= m;
    }

    // valuation in the w-normalization (extends v_p); exact flag false means
    // ">= v" only (element indistinguishable from zero at this precision)
    std::pair<Rat, bool> valuation() const {
        if (c.empty()) return {Rat(shift + prec), false};
        const auto& fac = ctx->factor(index);
        if (ctx->rational_field() || ef() == 1) {
            long v = val_p(c[0], p());
            if (v >= prec) return {Rat(shift + prec), false};
            return {Rat(shift + v), true};
        }
        // v_p(Res(G, c)) = f * v_P(c)
        Int pN = pow_int(p(), prec);
        modpoly::Zx G = ctx->lifted_factor(index, prec);
        QPoly Gq = qpoly_from_int(std::vector<Int>(G.begin(), G.end()));
        QPoly cq = qpoly_from_int(std::vector<Int>(c.begin(), c.end()));
        Rat res = poly_resultant(Gq, cq);
        // lower bound when undetermined: v_P(c) >= min coefficient valuation
        long minv = prec;
        for (const Int& v : c) {
            if (v != 0) minv = std::min(minv, val_p(v, p()));
        }
        if (res == 0) return {Rat(shift) + make_rat(Int(minv), Int(1)), false};
        long v = val_p(res.get_num(), p());
        if (v >= prec) return {Rat(shift) + make_rat(Int(minv), Int(1)), false};
        if (v % fac.f != 0) throw std::logic_error("LocalElement::valuation: not divisible by f");
        return {Rat(shift) + make_rat(Int(v / fac.f), Int(fac.e)), true};
    }

    friend LocalElement operator+(const LocalElement& a, const LocalElement& b) {
        if (a.ctx != b.ctx || a.index != b.index) throw FieldMismatch();
        LocalElement r;
        r.ctx = a.ctx;
        r.index = a.index;
        r.shift = std::min(a.shift, b.shift);
        // absolute precisions: shift+prec; result known to min of the two
        long abs_prec = std::min(a.shift + a.prec, b.shift + b.prec);
        r.prec = abs_prec - r.shift;
        if (r.prec <= 0) throw PrecisionLoss("LocalElement::add: no overlapping precision");
        Int pN = pow_int(r.p(), r.prec);
        modpoly::Zx ac = a.c, bc = b.c;
        for (Int& v : ac) v *= pow_int(r.p(), a.shift - r.shift);
        for (Int& v : bc) v *= pow_int(r.p(), b.shift - r.shift);
        r.c = modpoly::add(ac, bc, pN);
        r.reduce();
        r.canonicalize();
        return r;
    }

    friend LocalElement operator-(const LocalElement& a, const LocalElement& b) {
        LocalElement nb = b;
        if (!nb.c.empty()) {
            Int pN = pow_int(b.p(), b.prec);
            nb.c = modpoly::sub({}, b.c, pN);
        }
        return a + nb;
    }

    friend LocalElement operator*(const LocalElement& a_in, const LocalElement& b_in) {
        if (a_in.ctx != b_in.ctx || a_in.index != b_in.index) throw FieldMismatch();
        LocalElement a = a_in, b = b_in;
        a.canonicalize();
        b.canonicalize();
        LocalElement r;
        r.ctx = a.ctx;
        r.index = a.index;
        r.shift = a.shift + b.shift;
        r.prec = std::min(a.prec, b.prec);
        if (r.prec <= 0) throw PrecisionLoss("LocalElement::mul: no precision left");
        Int pN = pow_int(r.p(), r.prec);
        r.c = modpoly::mul(a.c, b.c, pN);
        r.reduce();
        return r;
    }

    // divide by a rational integer k = p^j * u
    LocalElement div_int(const Int& k) const {
        if (k == 0) throw DivisionByZero();
        LocalElement r = *this;
        r.canonicalize();
        Int u = k < 0 ? Int(-k) : k;
        long j = val_p(u, p());
        u /= pow_int(p(), j);
        r.shift -= j;
        Int pN = pow_int(p(), r.prec);
        Int uinv = modpoly::inv_mod(u % pN, pN);
        if (k < 0) uinv = pN - uinv;
        r.c = modpoly::scale(r.c, uinv, pN);
        return r;
    }

    LocalElement scale_int(const Int& k) const {
        LocalElement r = *this;
        if (k == 0) { r.c.clear(); return r; }
        Int pN = pow_int(p(), r.prec);
        r.c = modpoly::scale(r.c, k, pN);
        r.canonicalize();
        return r;
    }

    bool equals_at_min_precision(const LocalElement& o) const {
        LocalElement d = *this - o;
        return d.known_zero_at_precision();
    }
};

inline LocalElement local_zero(const PAdicCtxPtr& ctx, size_t index, long precision) {
    LocalElement r;
    r.ctx = ctx;
    r.index = index;
    r.prec = precision;
    r.shift = 0;
    return r;
}

inline LocalElement local_one(const PAdicCtxPtr& ctx, size_t index, long precision) {
    LocalElement r = local_zero(ctx, index, precision);
    r.c = {Int(1)};
    return r;
}

// Embeds a in K_w with expansion correct modulo p^{precision} (relative to
// the factored-out power of p). theta maps to the class of t.
inline LocalElement embed_local(const AlgebraicNumber& a_in, const Place& w, long precision) {
    if (w.arch) throw Error("embed_local: archimedean place");
    if (precision <= 0) throw PrecisionLoss("embed_local: nonpositive precision");
    AlgebraicNumber a = a_in.attached() ? a_in : a_in.promoted(w.field);
    LocalElement r = local_zero(w.ctx, w.index, precision);
    const Int& p = w.ctx->p();
    if (a.is_zero()) return r;
    if (w.ctx->rational_field() || a.is_rational()) {
        Rat v = a.is_rational() ? a.as_rational() : Rat(0);
        long sh = val_p(v, p);
        Rat unit = v / pow_rat(Rat(p), sh);
        Int pN = pow_int(p, precision);
        Int num = unit.get_num() % pN;
        Int dinv = modpoly::inv_mod(unit.get_den() % pN, pN);
        r.shift = sh;
        r.c = {num * dinv % pN};
        modpoly::normalize(r.c, pN);
        r.canonicalize();
        return r;
    }
    // clear denominators: a = B(theta) / q
    Int q(1);
    for (const Rat& c : a.coords())
        mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), c.get_den().get_mpz_t());
    long vq = val_p(q, p);
    Int qunit = q / pow_int(p, vq);
    Int pN = pow_int(p, precision);
    modpoly::Zx B(a.coords().size());
    for (size_t i = 0; i < B.size(); ++i)
        B[i] = a.coords()[i].get_num() * (q / a.coords()[i].get_den());
    modpoly::normalize(B, pN);
    Int qinv = modpoly::inv_mod(qunit % pN, pN);
    r.c = modpoly::scale(B, qinv, pN);
    r.shift = -vq;
    r.reduce();
    r.canonicalize();
    return r;
}

// p-adic logarithm and exponential by truncated series; the argument must lie
// in the convergence domain: v(x - 1) > 1/(p-1) for log, v(x) > 1/(p-1) for exp.
enum class LocalAnalyticMode { Log, Exp };

inline LocalElement local_log_exp(const LocalElement& x, LocalAnalyticMode mode) {
    const Int& p = x.p();
    Rat conv_bound = make_rat(Int(1), Int(p) - 1);
    // v_p(k) <= (k-1)/(p-1) for k >= 1, so with v = v(argument) > 1/(p-1) both
    // series have term valuations >= k(v - 1/(p-1)) + 1/(p-1), strictly increasing.
    if (mode == LocalAnalyticMode::Log) {
        LocalElement z = x - local_one(x.ctx, x.index, x.prec + x.shift);
        if (z.known_zero_at_precision()) return z;  // log(1) = 0 at precision
        auto [v, exact] = z.valuation();
        (void)exact;
        if (v <= conv_bound) throw OutsideConvergenceDomain("log: |x-1| too large");
        long target = x.prec + x.shift;
        LocalElement acc = local_zero(x.ctx, x.index, x.prec + x.shift);
        LocalElement zk = z;
        for (long k = 1;; ++k) {
            LocalElement term = zk.div_int(Int(k));
            if (k % 2 == 0) term = local_zero(x.ctx, x.index, term.prec + term.shift) - term;
            acc = acc + term;
            Rat later = (v - conv_bound) * (k + 1) + conv_bound;
            if (later > target) break;
            if (k > 4096) throw PrecisionLoss("log: series did not converge in budget");
            zk = zk * z;
        }
        return acc;
    }
    auto [v, exact] = x.valuation();
    (void)exact;
    if (x.known_zero_at_precision()) {
        return local_one(x.ctx, x.index, std::max<long>(1, x.prec + x.shift));
    }
    if (v <= conv_bound) throw OutsideConvergenceDomain("exp: |x| too large");
    long target = x.prec + x.shift;
    LocalElement acc = local_one(x.ctx, x.index, std::max<long>(1, target));
    LocalElement term = acc;
    for (long k = 1;; ++k) {
        term = (term * x).div_int(Int(k));
        acc = acc + term;
        Rat later = (v - conv_bound) * (k + 1) + conv_bound;
        if (later > target) break;
        if (k > 4096) throw PrecisionLoss("exp: series did not converge in budget");
    }
    return acc;
}

// multiplicative order of the residue of a w-unit in the residue field
inline unsigned long residue_order(const AlgebraicNumber& a, const Place& w) {
    if (w.arch) throw Error("residue_order: archimedean place");
    if (w_valuation(a, w) != 0) throw Error("residue_order: not a unit");
    unsigned long qf = 1;
    Int pf = pow_int(w.p(), w.f());
    if (!pf.fits_ulong_p()) throw BudgetExceeded("residue_order: residue field too large");
    qf = pf.get_ui();
    for (unsigned long n : divisors(qf - 1)) {
        AlgebraicNumber an = a.promoted(w.field).pow(static_cast<long>(n)) - AlgebraicNumber(1);
        if (an.is_zero()) return n;  // exact root of unity
        if (w_valuation(an, w) > 0) return n;
    }
    throw std::logic_error("residue_order: no order found");
}

}  // namespace adelic
