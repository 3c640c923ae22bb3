#pragma once

#include <adelic/errors.hpp>
#include <adelic/numfield.hpp>
#include <adelic/places.hpp>

#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

namespace adelic {

using APoly = Poly<AlgebraicNumber>;

inline APoly apoly_from_q(const QPoly& f) {
    std::vector<AlgebraicNumber> c(f.c.size());
    for (size_t i = 0; i < f.c.size(); ++i) c[i] = AlgebraicNumber(f.c[i]);
    return APoly(std::move(c));
}

struct SeqTerm {
    APoly poly;
    AlgebraicNumber root;
};

// u_n = sum_i P_i(n) alpha_i^n with nonzero polynomials and distinct nonzero
// roots, in a canonical term order. The zero sequence is not a PolyExpSeq;
// operations that may cancel everything return std::nullopt.
class PolyExpSeq {
public:
    static std::optional<PolyExpSeq> make(FieldPtr field, std::vector<SeqTerm> raw) {
        std::vector<SeqTerm> merged;
        for (auto& t : raw) {
            AlgebraicNumber root = t.root.promoted(field);
            if (root.is_zero()) throw Error("PolyExpSeq: zero root");
            APoly poly = promote_poly(t.poly, field);
            bool found = false;
            for (auto& m : merged) {
                if (m.root == root) {
                    m.poly = m.poly + poly;
                    found = true;
                    break;
                }
            }
            if (!found) merged.push_back({poly, root});
        }
        std::vector<SeqTerm> kept;
        for (auto& m : merged) {
            m.poly.trim();
            if (!m.poly.is_zero()) kept.push_back(m);
        }
        if (kept.empty()) return std::nullopt;
        PolyExpSeq s;
        s.field_ = std::move(field);
        s.terms_ = std::move(kept);
        s.canonical_sort();
        return s;
    }

    // coeff * root^n
    static PolyExpSeq geometric(const FieldPtr& field, const AlgebraicNumber& root,
                                const AlgebraicNumber& coeff) {
        APoly p;
        p.c = {coeff.promoted(field)};
        auto s = make(field, {{p, root.promoted(field)}});
        if (!s) throw Error("PolyExpSeq::geometric: zero coefficient");
        return *s;
    }

    const FieldPtr& field() const { return field_; }
    const std::vector<SeqTerm>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    AlgebraicNumber term(long n) const {
        AlgebraicNumber acc = AlgebraicNumber::from_rat(field_, Rat(0));
        AlgebraicNumber nval = AlgebraicNumber::from_rat(field_, Rat(n));
        for (const auto& t : terms_) {
            acc = acc + t.poly.eval(nval) * t.root.pow(n);
        }
        return acc;
    }

    friend bool operator==(const PolyExpSeq& a, const PolyExpSeq& b) {
        if (!same_field(a.field_, b.field_) || a.terms_.size() != b.terms_.size()) return false;
        for (size_t i = 0; i < a.terms_.size(); ++i) {
            if (!(a.terms_[i].root == b.terms_[i].root)) return false;
            if (!(a.terms_[i].poly == b.terms_[i].poly)) return false;
        }
        return true;
    }

    std::string to_string() const {
        std::ostringstream os;
        for (size_t i = 0; i < terms_.size(); ++i) {
            if (i) os << " + ";
            os << "(";
            for (size_t j = 0; j < terms_[i].poly.c.size(); ++j) {
                if (j) os << " + ";
                os << terms_[i].poly.c[j].to_string() << "*n^" << j;
            }
            os << ")*(" << terms_[i].root.to_string() << ")^n";
        }
        return os.str();
    }

private:
    FieldPtr field_;
    std::vector<SeqTerm> terms_;

    static APoly promote_poly(const APoly& p, const FieldPtr& field) {
        APoly r;
        r.c.reserve(p.c.size());
        for (const auto& c : p.c) r.c.push_back(c.promoted(field));
        r.trim();
        return r;
    }

    static std::vector<Rat> root_key_minpoly(const AlgebraicNumber& a) {
        return a.min_poly().c;
    }

    void canonical_sort() {
        std::sort(terms_.begin(), terms_.end(), [](const SeqTerm& a, const SeqTerm& b) {
            std::vector<Rat> ka = root_key_minpoly(a.root), kb = root_key_minpoly(b.root);
            if (ka != kb) return ka < kb;
            return a.root.coords() < b.root.coords();
        });
    }

    friend std::optional<PolyExpSeq> seq_add(const PolyExpSeq&, const PolyExpSeq&);
    friend std::optional<PolyExpSeq> seq_mul(const PolyExpSeq&, const PolyExpSeq&);
};

using SeqOrZero = std::optional<PolyExpSeq>;

inline std::optional<PolyExpSeq> seq_add(const PolyExpSeq& a, const PolyExpSeq& b) {
    if (!same_field(a.field(), b.field())) throw FieldMismatch();
    std::vector<SeqTerm> all = a.terms_;
    all.insert(all.end(), b.terms_.begin(), b.terms_.end());
    return PolyExpSeq::make(a.field(), std::move(all));
}

inline std::optional<PolyExpSeq> seq_mul(const PolyExpSeq& a, const PolyExpSeq& b) {
    if (!same_field(a.field(), b.field())) throw FieldMismatch();
    std::vector<SeqTerm> prod;
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            prod.push_back({ta.poly * tb.poly, ta.root * tb.root});
        }
    }
    return PolyExpSeq::make(a.field(), std::move(prod));
}

inline std::optional<PolyExpSeq> seq_scale(const PolyExpSeq& a, const AlgebraicNumber& s) {
    if (s.is_zero()) return std::nullopt;
    std::vector<SeqTerm> ts = a.terms();
    for (auto& t : ts) {
        APoly q;
        q.c = {s};
        t.poly = t.poly * q;
    }
    return PolyExpSeq::make(a.field(), std::move(ts));
}

// the sequence m -> u_{am+b}, roots merged across torsion classes
inline std::optional<PolyExpSeq> section(const PolyExpSeq& u, long a, long b) {
    if (a < 1 || b < 0) throw Error("section: need a >= 1, b >= 0");
    std::vector<SeqTerm> ts;
    for (const auto& t : u.terms()) {
        AlgebraicNumber new_root = t.root.pow(a);
        AlgebraicNumber scale = t.root.pow(b);
        // P(a m + b)
        APoly lin;
        lin.c = {AlgebraicNumber(Rat(b)), AlgebraicNumber(Rat(a))};
        APoly comp = t.poly.compose(lin);
        APoly sc;
        sc.c = {scale};
        ts.push_back({comp * sc, new_root});
    }
    return PolyExpSeq::make(u.field(), std::move(ts));
}

// --- essential v-part -------------------------------------------------------

struct EssentialPart {
    Place place;
    AbsValue max_value;          // M = max_i |alpha_i|_v
    std::vector<size_t> indices; // positions in the parent's canonical term order
    PolyExpSeq sequence;
};

inline EssentialPart essential_part(const PolyExpSeq& u, const Place& w) {
    const auto& ts = u.terms();
    std::vector<size_t> best;
    if (!w.arch) {
        std::vector<Rat> vals(ts.size());
        for (size_t i = 0; i < ts.size(); ++i) vals[i] = w_valuation(ts[i].root, w);
        Rat vmin = vals[0];
        for (const Rat& v : vals) vmin = std::min(vmin, v);
        for (size_t i = 0; i < ts.size(); ++i) {
            if (vals[i] == vmin) best.push_back(i);
        }
        std::vector<SeqTerm> kept;
        for (size_t i : best) kept.push_back(ts[i]);
        auto seq = PolyExpSeq::make(u.field(), std::move(kept));
        return EssentialPart{w, AbsValue::nonarch(w.p(), vmin), best, *seq};
    }
    best.push_back(0);
    for (size_t i = 1; i < ts.size(); ++i) {
        int c = compare_abs(ts[i].root, ts[best[0]].root, w.emb_index);
        if (c > 0) best.assign(1, i);
        else if (c == 0) best.push_back(i);
    }
    std::vector<SeqTerm> kept;
    for (size_t i : best) kept.push_back(ts[i]);
    auto seq = PolyExpSeq::make(u.field(), std::move(kept));
    RealAlgebraic M = abs2_at_embedding(ts[best[0]].root, w.emb_index).sqrt();
    return EssentialPart{w, AbsValue::archimedean(M), best, *seq};
}

inline bool is_nondegenerate(const PolyExpSeq& u) {
    const auto& ts = u.terms();
    for (size_t i = 0; i < ts.size(); ++i) {
        for (size_t j = 0; j < ts.size(); ++j) {
            if (i == j) continue;
            if (is_root_of_unity(ts[i].root / ts[j].root)) return false;
        }
    }
    return true;
}

// --- v-stability --------------------------------------------------------------

struct StabilityVerdict {
    bool stable = false;
    unsigned long L = 1;                      // lcm of torsion orders among essential root ratios
    std::optional<long> witness_class;        // unstable: b with section(essential, L, b) = 0
    std::vector<PolyExpSeq> sections;         // stable: nonzero sections for b = 0..L-1
    EssentialPart essential;
};

// L as in the stability reduction: after sectioning by L, essential root
// tuples become non-degenerate, so any vanishing (a,b)-section is already
// visible at (L, b mod L).
inline unsigned long stability_lcm(const PolyExpSeq& essential_seq) {
    unsigned long L = 1;
    const auto& ts = essential_seq.terms();
    for (size_t i = 0; i < ts.size(); ++i) {
        for (size_t j = 0; j < ts.size(); ++j) {
            if (i == j) continue;
            auto ord = is_root_of_unity(ts[i].root / ts[j].root);
            if (ord) L = lcm_ul(L, *ord);
        }
    }
    return L;
}

inline StabilityVerdict is_v_stable(const PolyExpSeq& u, const Place& w) {
    StabilityVerdict v;
    v.essential = essential_part(u, w);
    v.L = stability_lcm(v.essential.sequence);
    for (long b = 0; b < static_cast<long>(v.L); ++b) {
        auto s = section(v.essential.sequence, static_cast<long>(v.L), b);
        if (!s) {
            v.stable = false;
            v.witness_class = b;
            v.sections.clear();
            return v;
        }
        v.sections.push_back(*s);
    }
    v.stable = true;
    return v;
}

// --- growth checks (Cor. 3.2 empirics) ---------------------------------------

// B = scalar * M^m_exponent where M is the maximal |root|_v
struct GrowthBound {
    Rat scalar = Rat(1);
    Rat m_exponent = Rat(0);
};

struct GrowthReport {
    long n_lo = 0, n_hi = 0;
    std::vector<long> failures;
    // first n in range after which no failures occur (n_hi+1 if the last point fails)
    long clear_from = 0;
    bool failures_in_tail = false;  // any failure in the top half of the range
};

namespace detail {

// compare s^b ? M^a exactly for a RealAlgebraic M > 0, integers a, b >= 1
inline int compare_rat_pow_vs_realalg_pow(const Rat& s, long b, const RealAlgebraic& M, long a) {
    Rat sb = pow_rat(s, b);
    if (a >= 0) return -M.pow(static_cast<unsigned long>(a)).compare(sb);
    RealAlgebraic lhs = M.pow(static_cast<unsigned long>(-a));
    // s^b ? M^a  <=>  s^b * M^{-a} ? 1
    RealAlgebraic prod = lhs.scale(sb);
    return prod.compare(Rat(1));
}

}  // namespace detail

inline GrowthReport growth_check(const PolyExpSeq& u, const Place& w, const GrowthBound& bound,
                                 long n_lo, long n_hi) {
    if (bound.scalar <= 0) throw BOutOfRange("growth_check: B must be positive");
    GrowthReport rep;
    rep.n_lo = n_lo;
    rep.n_hi = n_hi;
    EssentialPart ess = essential_part(u, w);

    if (!w.arch) {
        // M = p^{-mu}; B = s p^{-mu q}; fails iff p^{-v_n} < s^n p^{-mu q n}
        Rat mu = ess.max_value.q;
        const Int& p = w.p();
        // precondition 0 < B < M: s * M^{q} < M <=> s < M^{1-q} = p^{-mu(1-q)}
        {
            Rat r = -mu * (1 - bound.m_exponent);
            // s < p^r with r rational: s^{den} < p^{num}
            Rat sd = pow_rat(bound.scalar, static_cast<long>(r.get_den().get_si()));
            Rat pr = pow_rat(Rat(p), static_cast<long>(r.get_num().get_si()));
            if (!(sd < pr)) throw BOutOfRange("growth_check: B >= M");
        }
        for (long n = n_lo; n <= n_hi; ++n) {
            AlgebraicNumber un = u.term(n);
            bool fail;
            if (un.is_zero()) {
                fail = true;  // |0| = 0 < B^n
            } else {
                Rat vn = w_valuation(un, w);
                // p^{-vn} >= s^n p^{-mu q n}  <=>  p^{mu q n - vn} >= s^n
                Rat expo = mu * bound.m_exponent * n - vn;
                long den = static_cast<long>(expo.get_den().get_si());
                Rat lhs = pow_rat(Rat(p), static_cast<long>(expo.get_num().get_si()));
                Rat rhs = pow_rat(bound.scalar, n * den);
                fail = lhs < rhs;
            }
            if (fail) rep.failures.push_back(n);
        }
    } else {
        RealAlgebraic M = ess.max_value.real;
        RealAlgebraic M2 = M.mul(M);
        // precondition: s < M^{1-q}
        {
            Rat r = 1 - bound.m_exponent;
            long b = static_cast<long>(r.get_den().get_si());
            long a = static_cast<long>(r.get_num().get_si());
            if (detail::compare_rat_pow_vs_realalg_pow(bound.scalar, b, M, a) >= 0)
                throw BOutOfRange("growth_check: B >= M");
        }
        for (long n = n_lo; n <= n_hi; ++n) {
            AlgebraicNumber un = u.term(n);
            if (un.is_zero()) {
                rep.failures.push_back(n);
                continue;
            }
            // |u_n|^2 >= s^{2n} M^{2 q n}
            Rat qn = bound.m_exponent * n;
            long den = static_cast<long>(qn.get_den().get_si());
            long num = static_cast<long>(qn.get_num().get_si());
            Rat srhs = pow_rat(bound.scalar, 2 * n * den);
            bool decided = false, fail = false;
            // interval fast path
            Rat radius(1, 1 << 16);
            for (int round = 0; round < 3 && !decided; ++round) {
                QDisc d = embedding_disc(un, w.emb_index, radius);
                auto [lo2, hi2] = d.norm2_bounds();
                // rhs = s^{2n} * M2^{qn}: bounds via M2 enclosure
                M2.refine_below(radius);
                auto [mlo, mhi] = M2.enclosure();
                if (mlo < 0) mlo = Rat(0);
                if (num < 0 && mlo == 0) { radius /= 256; continue; }
                Rat rlo, rhi;
                if (num >= 0) {
                    rlo = srhs * pow_rat(mlo, num);
                    rhi = srhs * pow_rat(mhi, num);
                } else {
                    rlo = srhs / pow_rat(mhi, -num);
                    rhi = srhs / pow_rat(mlo, -num);
                }
                // lhs^den vs rhs-with-integer-exponents: compare via den-th powers
                Rat llo = pow_rat(lo2, den), lhi = pow_rat(hi2, den);
                if (llo >= rhi) { decided = true; fail = false; }
                else if (lhi < rlo) { decided = true; fail = true; }
                radius /= 256;
            }
            if (!decided) {
                RealAlgebraic lhs = abs2_at_embedding(un, w.emb_index).pow(den);
                RealAlgebraic rhs = num >= 0 ? M2.pow(num).scale(srhs)
                                             : M2.pow(-num).inv().scale(srhs);
                fail = lhs.compare(rhs) < 0;
            }
            if (fail) rep.failures.push_back(n);
        }
    }
    rep.clear_from = rep.failures.empty() ? n_lo : rep.failures.back() + 1;
    long mid = n_lo + (n_hi - n_lo) / 2;
    for (long f : rep.failures) {
        if (f > mid) rep.failures_in_tail = true;
    }
    return rep;
}

// u_n = prod_i (xi_i^n - 1); every input must avoid roots of unity
inline PolyExpSeq from_xi_product(const FieldPtr& field, const std::vector<AlgebraicNumber>& xi) {
    if (xi.empty()) throw Error("from_xi_product: empty xi list");
    std::optional<PolyExpSeq> acc;
    for (const auto& x : xi) {
        AlgebraicNumber xp = x.promoted(field);
        if (xp.is_zero()) throw ZeroInput("from_xi_product: zero xi");
        if (is_root_of_unity(xp)) throw RootOfUnityInput();
        APoly one, mone;
        one.c = {AlgebraicNumber(1)};
        mone.c = {AlgebraicNumber(-1)};
        auto factor = PolyExpSeq::make(field, {{one, xp}, {mone, AlgebraicNumber::from_rat(field, Rat(1))}});
        if (!acc) acc = factor;
        else acc = seq_mul(*acc, *factor);
        if (!acc) throw std::logic_error("from_xi_product: unexpected cancellation");
    }
    return *acc;
}

}  // namespace adelic
