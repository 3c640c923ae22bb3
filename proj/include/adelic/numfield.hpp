#pragma once

#include <adelic/cball.hpp>
#include <adelic/errors.hpp>
#include <adelic/intfactor.hpp>
#include <adelic/poly.hpp>
#include <adelic/realalg.hpp>

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

namespace adelic {

inline std::string qpoly_to_string(const QPoly& f, const char* var = "x") {
    if (f.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = f.deg(); i >= 0; --i) {
        const Rat& c = f.c[i];
        if (c == 0) continue;
        Rat a = abs(c);
        if (!first) os << (c > 0 ? " + " : " - ");
        else if (c < 0) os << "-";
        first = false;
        if (i == 0 || a != 1) os << rat_to_string(a);
        if (i > 0) {
            if (a != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

// A number field K = Q[x]/(m(x)) for a monic irreducible m. Immutable after
// construction; the embedding cache refines lazily under a lock.
class NumberField {
public:
    static std::shared_ptr<const NumberField> create(const QPoly& min_poly) {
        if (min_poly.deg() < 1) throw NonMonic("minimal polynomial must have degree >= 1");
        if (min_poly.lc() != 1) throw NonMonic();
        if (min_poly.deg() > 1) {
            QPoly witness;
            if (!is_irreducible_q(min_poly, &witness))
                throw ReduciblePolynomial(qpoly_to_string(witness));
        }
        return std::shared_ptr<const NumberField>(new NumberField(min_poly));
    }

    int degree() const { return min_poly_.deg(); }
    const QPoly& min_poly() const { return min_poly_; }
    bool is_rationals() const { return degree() == 1; }

    size_t real_embedding_count() const { return real_count_; }
    size_t complex_pair_count() const { return pair_count_; }
    size_t embedding_count() const { return real_count_ + pair_count_; }

    // enclosures refined to at most `radius`; real roots first, then one
    // representative per conjugate pair (positive imaginary part)
    std::vector<RootEnclosure> embeddings(const Rat& radius) const {
        std::lock_guard<std::mutex> lock(mu_);
        if (emb_.empty() || emb_radius_ > radius) {
            emb_ = certified_roots(min_poly_, radius);
            emb_radius_ = radius;
        }
        for (auto& e : emb_) {
            if (e.is_real) {
                while (!e.real_iv.exact() && e.real_iv.hi - e.real_iv.lo > radius)
                    e.real_iv = refine_root(min_poly_, e.real_iv);
                Rat mid = (e.real_iv.lo + e.real_iv.hi) / 2;
                e.center = QComplex(mid, Rat(0));
                e.radius = (e.real_iv.hi - e.real_iv.lo) / 2;
            }
        }
        return emb_;
    }

    // local-value cache slot used by the places layer (keyed by prime)
    mutable std::mutex places_mu;

private:
    explicit NumberField(QPoly m) : min_poly_(std::move(m)) {
        if (degree() == 1) {
            real_count_ = 1;
            pair_count_ = 0;
        } else {
            real_count_ = isolate_real_roots(min_poly_).size();
            pair_count_ = (degree() - real_count_) / 2;
        }
    }

    QPoly min_poly_;
    size_t real_count_ = 0, pair_count_ = 0;
    mutable std::mutex mu_;
    mutable std::vector<RootEnclosure> emb_;
    mutable Rat emb_radius_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

inline FieldPtr make_number_field(const QPoly& min_poly) { return NumberField::create(min_poly); }

inline FieldPtr rationals_field() {
    static FieldPtr q = NumberField::create(QPoly({Rat(-1), Rat(1)}));
    return q;
}

inline bool same_field(const FieldPtr& a, const FieldPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->min_poly() == b->min_poly();
}

// An element of a number field in the power basis. A default-constructed or
// int/Rat-constructed value is an unattached rational constant that promotes
// to any field on contact.
class AlgebraicNumber {
public:
    AlgebraicNumber() : coords_{Rat(0)} {}
    AlgebraicNumber(int v) : coords_{Rat(v)} {}
    AlgebraicNumber(const Rat& v) : coords_{v} {}
    AlgebraicNumber(FieldPtr field, std::vector<Rat> coords)
        : field_(std::move(field)), coords_(std::move(coords)) {
        if (static_cast<int>(coords_.size()) != field_->degree())
            throw Error("AlgebraicNumber: coordinate count != field degree");
    }

    static AlgebraicNumber generator(const FieldPtr& f) {
        std::vector<Rat> c(f->degree(), Rat(0));
        if (f->degree() == 1) {
            // x = root of the degree-1 minimal polynomial
            c[0] = -f->min_poly().c[0];
        } else {
            c[1] = Rat(1);
        }
        return AlgebraicNumber(f, std::move(c));
    }

    static AlgebraicNumber from_rat(const FieldPtr& f, const Rat& v) {
        std::vector<Rat> c(f->degree(), Rat(0));
        c[0] = v;
        return AlgebraicNumber(f, std::move(c));
    }

    const FieldPtr& field() const { return field_; }
    bool attached() const { return static_cast<bool>(field_); }
    const std::vector<Rat>& coords() const { return coords_; }

    bool is_zero() const {
        for (const Rat& c : coords_) {
            if (c != 0) return false;
        }
        return true;
    }

    bool is_rational() const {
        for (size_t i = 1; i < coords_.size(); ++i) {
            if (coords_[i] != 0) return false;
        }
        return true;
    }

    Rat as_rational() const {
        if (!is_rational()) throw Error("AlgebraicNumber: not rational");
        return coords_[0];
    }

    AlgebraicNumber promoted(const FieldPtr& f) const {
        if (attached()) {
            if (!same_field(field_, f)) throw FieldMismatch();
            return *this;
        }
        return from_rat(f, coords_[0]);
    }

    friend AlgebraicNumber operator+(const AlgebraicNumber& a, const AlgebraicNumber& b) {
        auto [x, y] = align(a, b);
        for (size_t i = 0; i < x.coords_.size(); ++i) x.coords_[i] += y.coords_[i];
        return x;
    }
    friend AlgebraicNumber operator-(const AlgebraicNumber& a, const AlgebraicNumber& b) {
        auto [x, y] = align(a, b);
        for (size_t i = 0; i < x.coords_.size(); ++i) x.coords_[i] -= y.coords_[i];
        return x;
    }
    AlgebraicNumber operator-() const {
        AlgebraicNumber r = *this;
        for (auto& c : r.coords_) c = -c;
        return r;
    }
    friend AlgebraicNumber operator*(const AlgebraicNumber& a, const AlgebraicNumber& b) {
        auto [x, y] = align(a, b);
        if (!x.attached()) return AlgebraicNumber(x.coords_[0] * y.coords_[0]);
        QPoly p = QPoly(x.coords_) * QPoly(y.coords_);
        QPoly r = poly_mod(p, x.field_->min_poly());
        std::vector<Rat> c(x.field_->degree(), Rat(0));
        for (size_t i = 0; i < r.c.size(); ++i) c[i] = r.c[i];
        return AlgebraicNumber(x.field_, std::move(c));
    }
    friend AlgebraicNumber operator/(const AlgebraicNumber& a, const AlgebraicNumber& b) {
        return a * b.inverse();
    }
    friend bool operator==(const AlgebraicNumber& a, const AlgebraicNumber& b) {
        auto [x, y] = align(a, b);
        return x.coords_ == y.coords_;
    }

    AlgebraicNumber inverse() const {
        if (is_zero()) throw DivisionByZero();
        if (!attached() || is_rational()) {
            AlgebraicNumber r = *this;
            std::vector<Rat> c(coords_.size(), Rat(0));
            c[0] = 1 / coords_[0];
            r.coords_ = std::move(c);
            return r;
        }
        auto [g, u] = poly_half_xgcd(QPoly(coords_), field_->min_poly());
        // g is a nonzero constant since the minimal polynomial is irreducible
        QPoly inv = (Rat(1) / g.c[0]) * u;
        inv = poly_mod(inv, field_->min_poly());
        std::vector<Rat> c(field_->degree(), Rat(0));
        for (size_t i = 0; i < inv.c.size(); ++i) c[i] = inv.c[i];
        return AlgebraicNumber(field_, std::move(c));
    }

    AlgebraicNumber pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        AlgebraicNumber acc(1), base = *this;
        if (attached()) acc = from_rat(field_, Rat(1));
        unsigned long k = static_cast<unsigned long>(e);
        while (k) {
            if (k & 1) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }

    // monic minimal polynomial over Q of this element
    QPoly min_poly() const {
        if (!attached() || is_rational()) return QPoly({-coords_[0], Rat(1)});
        int d = field_->degree();
        std::vector<std::vector<Rat>> powers;  // coords of a^k
        std::vector<Rat> one(d, Rat(0));
        one[0] = Rat(1);
        powers.push_back(one);
        AlgebraicNumber cur = from_rat(field_, Rat(1));
        for (int k = 1; k <= d; ++k) {
            cur = cur * (*this);
            auto sol = solve_in_span(powers, cur.coords_);
            if (sol) {
                std::vector<Rat> mc(k + 1, Rat(0));
                for (int i = 0; i < k; ++i) mc[i] = -(*sol)[i];
                mc[k] = Rat(1);
                return QPoly(std::move(mc));
            }
            powers.push_back(cur.coords_);
        }
        throw std::logic_error("min_poly: no dependency up to field degree");
    }

    Rat norm() const {
        if (!attached() || is_rational()) {
            Rat v = coords_[0];
            return attached() ? pow_rat(v, field_->degree()) : v;
        }
        QPoly m = min_poly();
        int e = m.deg();
        int d = field_->degree();
        Rat base = m.c[0];
        if (e % 2 != 0) base = -base;
        return pow_rat(base, d / e);
    }

    std::string to_string() const {
        return qpoly_to_string(QPoly(coords_), "t");
    }

private:
    FieldPtr field_;
    std::vector<Rat> coords_;

    static std::pair<AlgebraicNumber, AlgebraicNumber> align(const AlgebraicNumber& a,
                                                             const AlgebraicNumber& b) {
        if (a.attached() && b.attached()) {
            if (!same_field(a.field_, b.field_)) throw FieldMismatch();
            return {a, b};
        }
        if (a.attached()) return {a, b.promoted(a.field_)};
        if (b.attached()) return {a.promoted(b.field_), b};
        return {a, b};
    }

    // x with cols * x = target, if target lies in the span
    static std::optional<std::vector<Rat>> solve_in_span(const std::vector<std::vector<Rat>>& cols,
                                                         const std::vector<Rat>& target) {
        size_t rows = target.size(), n = cols.size();
        std::vector<std::vector<Rat>> m(rows, std::vector<Rat>(n + 1, Rat(0)));
        for (size_t j = 0; j < n; ++j) {
            for (size_t i = 0; i < rows; ++i) m[i][j] = cols[j][i];
        }
        for (size_t i = 0; i < rows; ++i) m[i][n] = target[i];
        std::vector<long> pivot_col(rows, -1);
        size_t rank = 0;
        for (size_t col = 0; col < n && rank < rows; ++col) {
            size_t sel = rank;
            while (sel < rows && m[sel][col] == 0) ++sel;
            if (sel == rows) continue;
            std::swap(m[sel], m[rank]);
            Rat inv = 1 / m[rank][col];
            for (size_t j = col; j <= n; ++j) m[rank][j] *= inv;
            for (size_t i = 0; i < rows; ++i) {
                if (i != rank && m[i][col] != 0) {
                    Rat f = m[i][col];
                    for (size_t j = col; j <= n; ++j) m[i][j] -= f * m[rank][j];
                }
            }
            pivot_col[rank] = static_cast<long>(col);
            ++rank;
        }
        for (size_t i = rank; i < rows; ++i) {
            if (m[i][n] != 0) return std::nullopt;
        }
        std::vector<Rat> x(n, Rat(0));
        for (size_t i = 0; i < rank; ++i) {
            if (pivot_col[i] >= 0) x[pivot_col[i]] = m[i][n];
        }
        return x;
    }
};

inline bool elem_is_zero(const AlgebraicNumber& x) { return x.is_zero(); }

// least N with a^N = 1, searching all N with euler_phi(N) <= degree
inline std::optional<unsigned long> is_root_of_unity(const AlgebraicNumber& a) {
    if (a.is_zero()) throw ZeroInput("is_root_of_unity: zero input");
    if (a.is_rational()) {
        Rat v = a.as_rational();
        if (v == 1) return 1;
        if (v == -1) return 2;
        return std::nullopt;
    }
    Rat nrm = a.norm();
    if (nrm != 1 && nrm != -1) return std::nullopt;
    unsigned long d = a.attached() ? static_cast<unsigned long>(a.field()->degree()) : 1;
    unsigned long bound = 2 * d * d + 4;
    AlgebraicNumber one(1), cur = a;
    for (unsigned long n = 1; n <= bound; ++n) {
        if (cur == one) return n;
        cur = cur * a;
    }
    return std::nullopt;
}

// certified disc around sigma_k(a); embeddings refined to `radius`
inline QDisc embedding_disc(const AlgebraicNumber& a, size_t k, const Rat& radius) {
    if (!a.attached()) return QDisc(QComplex(a.coords()[0], Rat(0)), Rat(0));
    auto emb = a.field()->embeddings(radius);
    if (k >= emb.size()) throw Error("embedding_disc: embedding index out of range");
    QDisc theta(emb[k].center, emb[k].radius);
    return eval_poly_disc(QPoly(a.coords()), theta);
}

// |sigma_k(a)|^2 as an exact real algebraic number
inline RealAlgebraic abs2_at_embedding(const AlgebraicNumber& a, size_t k) {
    if (a.is_zero()) return RealAlgebraic(Rat(0));
    if (a.is_rational()) {
        Rat v = a.as_rational();
        return RealAlgebraic(v * v);
    }
    QPoly m = a.min_poly();
    QPoly pp = poly_squarefree_part(annihilator_product(m, m));
    Rat radius(1, 64);
    for (int round = 0; round < 200; ++round) {
        QDisc dv = embedding_disc(a, k, radius);
        auto [lo, hi] = dv.norm2_bounds();
        Rat pad = (hi - lo) / 1024;
        auto r = RealAlgebraic::try_from_root(pp, lo - pad, hi + pad);
        if (r) return *r;
        radius /= 16;
    }
    throw std::logic_error("abs2_at_embedding: could not isolate");
}

// exact trichotomy on |sigma_k(a)| vs |sigma_k(b)|
inline int compare_abs(const AlgebraicNumber& a, const AlgebraicNumber& b, size_t k) {
    if (a.attached() && b.attached() && !same_field(a.field(), b.field())) throw FieldMismatch();
    // fast path: disc separation
    Rat radius(1, 1024);
    for (int round = 0; round < 3; ++round) {
        QDisc da = embedding_disc(a, k, radius);
        QDisc db = embedding_disc(b, k, radius);
        auto [alo, ahi] = da.norm2_bounds();
        auto [blo, bhi] = db.norm2_bounds();
        if (ahi < blo) return -1;
        if (bhi < alo) return 1;
        radius = radius * radius;
    }
    RealAlgebraic a2 = abs2_at_embedding(a, k);
    RealAlgebraic b2 = abs2_at_embedding(b, k);
    return a2.compare(b2);
}

// The absolute logarithmic Weil height h(a) = log(mantissa) / divisor, with
// mantissa the Mahler measure of the primitive integer minimal polynomial.
struct Height {
    RealAlgebraic mantissa;
    unsigned long divisor = 1;

    bool is_zero() const { return mantissa.compare(Rat(1)) == 0; }

    bool equals(const Height& o) const {
        return mantissa.pow(o.divisor).equals(o.mantissa.pow(divisor));
    }

    // true iff k * (*this) == o
    bool scaled_equals(unsigned long k, const Height& o) const {
        return mantissa.pow(k * o.divisor).equals(o.mantissa.pow(divisor));
    }

    double value() const {
        double m = mantissa.to_double();
        return std::log(m) / static_cast<double>(divisor);
    }
};

inline RealAlgebraic mahler_measure(const QPoly& f_primitive) {
    RealAlgebraic measure(abs(Rat(f_primitive.lc())));
    if (f_primitive.deg() < 1) return measure;
    QPoly pp;
    if (f_primitive.deg() >= 1)
        pp = poly_squarefree_part(annihilator_product(f_primitive, f_primitive));
    Rat radius(1, 64);
    auto roots = certified_roots(f_primitive, radius);
    for (auto& e : roots) {
        if (e.is_real) {
            RealAlgebraic rho = e.real_iv.exact()
                                    ? RealAlgebraic(e.real_iv.lo)
                                    : RealAlgebraic::from_root(f_primitive, e.real_iv.lo, e.real_iv.hi);
            RealAlgebraic arho = rho.abs();
            if (arho.compare(Rat(1)) > 0) measure = measure.mul(arho);
        } else {
            // one conjugate pair contributes |sigma|^2
            for (int round = 0;; ++round) {
                QDisc d(e.center, e.radius);
                auto [lo, hi] = d.norm2_bounds();
                Rat pad = (hi - lo) / 1024;
                auto t = RealAlgebraic::try_from_root(pp, lo - pad, hi + pad);
                if (t) {
                    if (t->compare(Rat(1)) > 0) measure = measure.mul(*t);
                    break;
                }
                radius /= 16;
                auto refreshed = certified_roots(f_primitive, radius);
                // recover the matching representative by containment
                bool matched = false;
                for (auto& e2 : refreshed) {
                    if (!e2.is_real && (e2.center - e.center).norm2() <= (e.radius + e2.radius) * (e.radius + e2.radius)) {
                        e = e2;
                        matched = true;
                        break;
                    }
                }
                if (!matched || round > 100)
                    throw std::logic_error("mahler_measure: lost track of a conjugate pair");
            }
        }
    }
    return measure;
}

inline Height height(const AlgebraicNumber& a) {
    if (a.is_zero()) throw ZeroInput("height: h(0) is rejected by convention");
    QPoly m = a.min_poly();
    auto [content, prim] = qpoly_primitive(m);
    (void)content;
    Height h;
    h.mantissa = mahler_measure(qpoly_from_int(prim));
    h.divisor = static_cast<unsigned long>(m.deg());
    return h;
}

// d-th cyclotomic polynomial: (x^d - 1) / prod_{e | d, e < d} Phi_e
inline QPoly cyclotomic_poly(unsigned long d) {
    std::vector<Rat> xc(d + 1, Rat(0));
    xc[0] = Rat(-1);
    xc[d] = Rat(1);
    QPoly num(std::move(xc));
    for (unsigned long e : divisors(d)) {
        if (e == d) continue;
        num = poly_divrem(num, cyclotomic_poly(e)).first;
    }
    return num;
}

inline FieldPtr cyclotomic_field(unsigned long d) {
    if (d <= 2) return rationals_field();
    return make_number_field(cyclotomic_poly(d));
}

}  // namespace adelic
