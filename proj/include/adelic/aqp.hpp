#pragma once

#include <adelic/errors.hpp>
#include <adelic/lrs.hpp>
#include <adelic/places.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace adelic {

// f(n) = P_j(n) for n >= threshold, n = j mod modulus
struct QuasiPolynomial {
    long modulus = 1;
    std::vector<QPoly> polys;  // one per residue class
    long threshold = 0;

    Rat eval(long n) const {
        if (n < threshold) throw Error("QuasiPolynomial: below threshold");
        return polys[n % modulus].eval(Rat(n));
    }
    bool is_constant() const {
        for (const auto& p : polys) {
            if (p.deg() > 0) return false;
        }
        return true;
    }
};

// The perturbation factor f(n) = |u_n|_w^c. Stability at w is part of the
// type's contract and is checked on construction.
struct PAdicFactorSpec {
    PolyExpSeq u;
    Place w;
    Rat c = Rat(1);
    bool normalized = false;  // max_i |alpha_i|_w = 1
    Rat mu = Rat(0);          // M_w = p^{-mu} for the stored u

    static PAdicFactorSpec make(PolyExpSeq u, Place w, Rat c) {
        if (w.arch) throw Error("PAdicFactorSpec: place must be non-archimedean");
        auto verdict = is_v_stable(u, w);
        if (!verdict.stable) {
            throw StabilityError("sequence is not v-stable at " + w.selector() +
                                 ", vanishing section class " +
                                 std::to_string(*verdict.witness_class) + " mod " +
                                 std::to_string(verdict.L));
        }
        PAdicFactorSpec s{std::move(u), std::move(w), std::move(c)};
        s.mu = verdict.essential.max_value.q;
        s.normalized = (s.mu == 0);
        return s;
    }

    // divide every root by a fixed root of maximal value
    PAdicFactorSpec normalize() const {
        if (normalized) return *this;
        EssentialPart ess = essential_part(u, w);
        AlgebraicNumber gamma = u.terms()[ess.indices[0]].root;
        std::vector<SeqTerm> ts;
        for (const auto& t : u.terms()) ts.push_back({t.poly, t.root / gamma});
        auto nu = PolyExpSeq::make(u.field(), std::move(ts));
        PAdicFactorSpec s{*nu, w, c};
        s.mu = Rat(0);
        s.normalized = true;
        return s;
    }

    // exponent q with f(n)/M^{nc} = p^{-q}; nullopt when u_n = 0
    std::optional<Rat> normalized_exponent(long n) const {
        AlgebraicNumber un = u.term(n);
        if (un.is_zero()) return std::nullopt;
        return c * (w_valuation(un, w) - Rat(n) * mu);
    }
};

// A p-adic analytic series g(x) = sum c_k x^k on the closed unit ball:
// finitely many stored coefficients plus a certified linear tail bound
// v(c_k) >= tail_off + tail_slope * k for k > stored, with tail_slope > 0
// (or poly_exact when all higher coefficients vanish).
struct LocalSeries {
    Place w;
    std::vector<LocalElement> coeffs;
    long precision = 0;
    bool poly_exact = false;
    Rat tail_off = Rat(0), tail_slope = Rat(0);

    // v(c_k) >= this for every k > last stored index
    Rat tail_bound() const {
        if (poly_exact) return Rat(1000000000L);
        return tail_off + tail_slope * Rat(static_cast<long>(coeffs.size()));
    }

    // valuation of g evaluated at an integer: exact flag per LocalElement and
    // the tail taken into account
    std::pair<Rat, bool> value_valuation_at(const Int& x0) const {
        LocalElement acc = coeffs.back();
        for (size_t k = coeffs.size() - 1; k-- > 0;) {
            acc = acc.scale_int(x0) + coeffs[k];
        }
        auto [v, exact] = acc.valuation();
        if (exact && v < tail_bound()) return {v, true};
        return {std::min(v, tail_bound()), false};
    }

    LocalSeries derivative() const {
        LocalSeries d = *this;
        d.coeffs.clear();
        for (size_t k = 1; k < coeffs.size(); ++k) {
            d.coeffs.push_back(coeffs[k].scale_int(Int(static_cast<long>(k))));
        }
        if (d.coeffs.empty()) d.coeffs.push_back(local_zero(coeffs[0].ctx, coeffs[0].index, precision));
        // v(k c_k) >= v(c_k): the shifted tail bound still applies
        d.tail_off = tail_off + tail_slope;
        return d;
    }
};

// --- Skolem decomposition ----------------------------------------------------

// u_{Lm+b} = g_b(m) with g_b analytic on Z_p; requires the spec normalized so
// every essential root is a w-unit.
class SkolemSystem {
public:
    explicit SkolemSystem(const PAdicFactorSpec& spec_in) : spec_(spec_in.normalize()) {
        ess_ = essential_part(spec_.u, spec_.w);
        const Int& p = spec_.w.p();
        conv_bound_ = make_rat(Int(1), Int(p) - 1);
        // L0 = lcm of residue orders, then pump by p until inside the log domain
        unsigned long L = 1;
        for (const auto& t : ess_.sequence.terms()) {
            L = lcm_ul(L, residue_order(t.root, spec_.w));
        }
        for (;;) {
            bool ok = true;
            root_pow_logs_.clear();
            for (const auto& t : ess_.sequence.terms()) {
                AlgebraicNumber aL = t.root.pow(static_cast<long>(L)) - AlgebraicNumber(1);
                if (aL.is_zero()) {
                    root_pow_logs_.push_back(std::nullopt);  // torsion root: log = 0
                    continue;
                }
                Rat v = w_valuation(aL, spec_.w);
                if (v <= conv_bound_) {
                    ok = false;
                    break;
                }
                root_pow_logs_.push_back(v);
            }
            if (ok) break;
            if (!mpz_fits_ulong_p(Int(Int(L) * p).get_mpz_t()))
                throw PrecisionLoss("skolem: L exceeded machine range");
            L = L * p.get_ui();
        }
        L_ = L;
    }

    const PAdicFactorSpec& spec() const { return spec_; }
    const EssentialPart& essential() const { return ess_; }
    unsigned long L() const { return L_; }

    // exact value of the normalized essential sequence at n = L m + b
    AlgebraicNumber essential_term(long b, long m) const {
        return ess_.sequence.term(static_cast<long>(L_) * m + b);
    }

    // minimal positive slope mu_i = v(log alpha_i^L) - 1/(p-1) over non-torsion roots
    Rat tail_slope() const {
        Rat slope(0);
        bool first = true;
        for (const auto& v : root_pow_logs_) {
            if (!v) continue;
            Rat m = *v - conv_bound_;
            if (first || m < slope) slope = m, first = false;
        }
        return first ? Rat(1) : slope;  // all torsion: polynomial series
    }

    LocalSeries series(long b, long precision, long terms) const {
        if (b < 0 || b >= static_cast<long>(L_)) throw Error("skolem series: bad class");
        const Place& w = spec_.w;
        long prec = precision;
        LocalSeries out;
        out.w = w;
        out.precision = prec;
        out.poly_exact = true;
        std::vector<LocalElement> c(terms + 1, local_zero(w.ctx, w.index, prec));
        Rat min_q;  // min valuation over all polynomial coefficients Q_{i,j}
        bool min_q_set = false;
        long max_deg = 0;
        for (size_t i = 0; i < ess_.sequence.terms().size(); ++i) {
            const auto& t = ess_.sequence.terms()[i];
            // Q_i(x) = P_i(Lx + b) * alpha_i^b
            APoly lin;
            lin.c = {AlgebraicNumber(Rat(b)), AlgebraicNumber(Rat(static_cast<long>(L_)))};
            APoly Q = t.poly.compose(lin);
            AlgebraicNumber ab = t.root.pow(b);
            APoly sc;
            sc.c = {ab};
            Q = Q * sc;
            max_deg = std::max<long>(max_deg, Q.deg());
            std::vector<LocalElement> qloc;
            for (const auto& qc : Q.c) {
                if (qc.is_zero()) {
                    qloc.push_back(local_zero(w.ctx, w.index, prec));
                } else {
                    Rat vq = w_valuation(qc, w);
                    if (!min_q_set || vq < min_q) min_q = vq, min_q_set = true;
                    qloc.push_back(embed_local(qc, w, prec));
                }
            }
            // exp(lambda_i x) coefficients lambda^k / k!
            std::vector<LocalElement> e;
            if (!root_pow_logs_[i]) {
                e.push_back(local_one(w.ctx, w.index, prec));
            } else {
                out.poly_exact = false;
                AlgebraicNumber aL = t.root.pow(static_cast<long>(L_));
                LocalElement lam = local_log_exp(embed_local(aL, w, prec), LocalAnalyticMode::Log);
                LocalElement ek = local_one(w.ctx, w.index, prec);
                e.push_back(ek);
                for (long k = 1; k <= terms; ++k) {
                    ek = (ek * lam).div_int(Int(k));
                    e.push_back(ek);
                }
            }
            for (long k = 0; k <= terms; ++k) {
                for (long j = 0; j <= std::min<long>(k, Q.deg()); ++j) {
                    long idx = k - j;
                    if (idx < static_cast<long>(e.size())) {
                        c[k] = c[k] + qloc[j] * e[idx];
                    }
                }
            }
        }
        out.coeffs = std::move(c);
        if (out.poly_exact) {
            out.coeffs.resize(std::min<size_t>(out.coeffs.size(), max_deg + 1),
                              local_zero(w.ctx, w.index, prec));
        } else {
            Rat slope = tail_slope();
            out.tail_slope = slope;
            out.tail_off = (min_q_set ? min_q : Rat(0)) - slope * max_deg;
        }
        return out;
    }

private:
    PAdicFactorSpec spec_;
    EssentialPart ess_;
    unsigned long L_ = 1;
    Rat conv_bound_;
    std::vector<std::optional<Rat>> root_pow_logs_;  // v(alpha_i^L - 1); nullopt = torsion
};

struct SkolemDecomposition {
    unsigned long L = 1;
    std::vector<LocalSeries> series;  // indexed by b
};

inline SkolemDecomposition skolem_decompose(const PAdicFactorSpec& spec, long precision) {
    if (!spec.normalized) throw NotNormalized("skolem_decompose: spec must be normalized");
    SkolemSystem sys(spec);
    SkolemDecomposition out;
    out.L = sys.L();
    long terms = std::max<long>(16, precision);
    for (long b = 0; b < static_cast<long>(sys.L()); ++b) {
        out.series.push_back(sys.series(b, precision, terms));
    }
    return out;
}

// --- Strassmann bound ---------------------------------------------------------

// largest index attaining the maximal coefficient absolute value; bounds the
// number of zeros on the closed unit ball
inline long strassmann_bound(const LocalSeries& g) {
    std::optional<Rat> minv;
    long last = -1;
    for (size_t k = 0; k < g.coeffs.size(); ++k) {
        auto [v, exact] = g.coeffs[k].valuation();
        if (exact) {
            if (!minv || v < *minv) {
                minv = v;
                last = static_cast<long>(k);
            } else if (v == *minv) {
                last = static_cast<long>(k);
            }
        }
    }
    if (!minv) throw AllCoefficientsIndistinguishableFromZero();
    // indeterminate coefficients and the tail must lie strictly above the max
    for (size_t k = 0; k < g.coeffs.size(); ++k) {
        auto [v, exact] = g.coeffs[k].valuation();
        if (!exact && v <= *minv)
            throw AllCoefficientsIndistinguishableFromZero(
                "strassmann_bound: coefficient valuation unresolved at current precision");
    }
    if (!g.poly_exact && g.tail_bound() <= *minv)
        throw AllCoefficientsIndistinguishableFromZero("strassmann_bound: tail not dominated");
    return last;
}

// --- residue-class scan for zeros in Z_p ---------------------------------------

struct ZpZero {
    Int approx;        // z = approx mod p^modexp
    long modexp;
    bool exact_integer;  // z is the integer `approx` exactly
    bool newton_refined;
};

struct ZerosScan {
    enum class Kind { NoZeros, Zeros, Unknown } kind = Kind::NoZeros;
    std::vector<ZpZero> zeros;
    std::vector<std::pair<Int, long>> unknown_classes;  // (rep, depth)
    // per-class constants discovered along the way: (rep, depth, exponent)
    struct ConstClass {
        Int rep;
        long depth;
        Rat exponent;
    };
    std::vector<ConstClass> const_classes;
};

namespace detail {

// Recursive class certification for g on rep + p^depth Z_p. Constant classes
// are recorded down to const_limit; below that the scan only localizes zeros,
// classifying the residual leaves at max_depth.
inline void scan_class(const LocalSeries& g, const Int& p, const Int& rep, long depth,
                       long const_limit, long max_depth,
                       const std::function<std::optional<bool>(const Int&)>& exact_zero_test,
                       ZerosScan& out) {
    // v(c_k) >= lip1 for k >= 1, so the shifted coefficients h_m (m >= 1) have
    // v >= depth + lip1; dominance of h_0 certifies |g| constant on the class
    Rat lip1;
    bool lip_set = false;
    for (size_t k = 1; k < g.coeffs.size(); ++k) {
        auto [v, exact] = g.coeffs[k].valuation();
        if (!lip_set || v < lip1) lip1 = v, lip_set = true;
    }
    if (!lip_set) lip1 = g.tail_bound();
    Rat tail = g.tail_bound();
    Rat shifted = Rat(depth) + lip1;
    Rat dominance_cut = std::min(shifted, tail);

    auto [v0, v0exact] = g.value_valuation_at(rep);
    if (v0exact && v0 < dominance_cut) {
        if (depth <= const_limit) out.const_classes.push_back({rep, depth, v0});
        return;  // zero-free either way
    }

    if (depth < max_depth) {
        Int pj = pow_int(p, depth);
        for (long i = 0; i < p.get_si(); ++i) {
            scan_class(g, p, rep + Int(i) * pj, depth + 1, const_limit, max_depth,
                       exact_zero_test, out);
        }
        return;
    }

    // exact integer zero at the representative
    if (exact_zero_test && rep.fits_slong_p()) {
        auto z = exact_zero_test(rep);
        if (z && *z) {
            out.zeros.push_back({rep, depth, true, false});
            if (out.kind != ZerosScan::Kind::Unknown) out.kind = ZerosScan::Kind::Zeros;
            return;
        }
    }

    // Newton/Hensel certificate for a unique simple zero inside this class
    // when the completion is Q_p. With lam = min(0, coefficient valuations)
    // making p^{-lam} g integral, the conditions are the classical
    // |g(a)| < |g'(a)|^2 plus locating the correction inside the class.
    if (g.coeffs[0].ef() == 1) {
        LocalSeries gd = g.derivative();
        auto [v1, v1exact] = gd.value_valuation_at(rep);
        Rat lam = std::min(Rat(0), std::min(lip1, tail));
        {
            auto [vc0, c0exact] = g.coeffs[0].valuation();
            (void)c0exact;
            lam = std::min(lam, vc0);
        }
        const Rat& A = v0;  // lower bound when not exact
        const Rat& B = v1;
        if (v1exact && v1 < gd.tail_bound() && A > 2 * B - lam && A - B >= depth &&
            Rat(depth) > B - lam) {
            out.zeros.push_back({rep, depth, false, true});
            if (out.kind != ZerosScan::Kind::Unknown) out.kind = ZerosScan::Kind::Zeros;
            return;
        }
    }

    out.unknown_classes.push_back({rep, depth});
    out.kind = ZerosScan::Kind::Unknown;
}

}  // namespace detail

inline ZerosScan zeros_in_Zp(const LocalSeries& g, long depth,
                             const std::function<std::optional<bool>(const Int&)>& exact_zero_test = {}) {
    ZerosScan out;
    const Int& p = g.w.p();
    detail::scan_class(g, p, Int(0), 0, depth, depth + 6, exact_zero_test, out);
    if (out.zeros.empty() && out.unknown_classes.empty()) out.kind = ZerosScan::Kind::NoZeros;
    return out;
}

// --- almost-quasi-constant certificates ----------------------------------------

struct AQCGoodClass {
    Int cls;            // class mod modulus
    Rat exponent;       // f(n) / M^{nc} = p^{-exponent} for n >= threshold, n = cls
    long threshold;
};

struct AQCCertificate {
    long depth = 1;
    unsigned long L = 1;  // Skolem modulus
    Int p;
    long t = 0;           // modulus = L * p^t
    Int modulus;
    Rat c_exponent;       // the c in |u_n|^c
    Rat mu;               // normalization: factor certified is |u_n|^c / M^{nc}, M = p^{-mu}
    std::vector<AQCGoodClass> good;
    std::vector<Int> bad;
    long threshold = 0;   // global C_k
    // provenance
    std::vector<long> strassmann_bounds;  // per class b
    Rat lipschitz_exponent = Rat(0);      // M_Lip = p^{-lip}
    std::optional<Rat> ell_exponent;      // ell_k = p^{-ell}; min |g| over retained classes
    std::vector<ZpZero> zeros;
    std::vector<std::pair<Int, long>> unknown_classes;

    double good_fraction() const {
        return static_cast<double>(good.size()) /
               (static_cast<double>(L) * mpz_get_d(pow_int(p, t).get_mpz_t()));
    }
};

// the Thm 4.4 / Lemma 4.3 recipe: per Skolem class b, exclude residue classes
// meeting a zero, certify |g_b| constant on the retained classes, and glue to
// congruence classes mod L p^t
inline AQCCertificate aqc_certificate(const PAdicFactorSpec& spec_in, long depth) {
    if (depth < 1) throw Error("aqc_certificate: depth must be >= 1");
    PAdicFactorSpec spec = spec_in.normalize();
    SkolemSystem sys(spec);
    const Int& p = spec.w.p();
    AQCCertificate cert;
    cert.depth = depth;
    cert.L = sys.L();
    cert.p = p;
    cert.c_exponent = spec.c;
    cert.mu = spec_in.mu;

    long prec = depth + 24;
    Rat slope = sys.tail_slope();
    long terms = std::max<long>(16, static_cast<long>(
        mpq_class((Rat(depth) + Rat(32)) / slope).get_d()) + 8);

    struct PerClass {
        ZerosScan scan;
        long strassmann = -1;
    };
    std::vector<PerClass> per(sys.L());
    long tmax = depth;
    Rat lip;  // min over classes of min coefficient valuation (Lipschitz)
    bool lip_set = false;
    for (long b = 0; b < static_cast<long>(sys.L()); ++b) {
        LocalSeries g = sys.series(b, prec, terms);
        per[b].strassmann = strassmann_bound(g);
        for (size_t k = 0; k < g.coeffs.size(); ++k) {
            auto [v, exact] = g.coeffs[k].valuation();
            if (exact && (!lip_set || v < lip)) lip = v, lip_set = true;
        }
        auto exact_zero = [&](const Int& rep) -> std::optional<bool> {
            if (!rep.fits_slong_p()) return std::nullopt;
            return sys.essential_term(b, rep.get_si()).is_zero();
        };
        per[b].scan = zeros_in_Zp(g, depth, exact_zero);
        for (auto& cc : per[b].scan.const_classes) tmax = std::max(tmax, cc.depth);
        for (auto& z : per[b].scan.zeros) cert.zeros.push_back(z);
        for (auto& u : per[b].scan.unknown_classes) cert.unknown_classes.push_back(u);
    }
    cert.lipschitz_exponent = lip_set ? lip : Rat(0);
    cert.t = tmax;
    Int pt = pow_int(p, cert.t);
    cert.modulus = Int(static_cast<long>(sys.L())) * pt;
    for (long b = 0; b < static_cast<long>(sys.L()); ++b) cert.strassmann_bounds.push_back(per[b].strassmann);

    // non-essential terms cannot change |u_n| once their valuation exceeds the
    // essential one; compute the explicit crossover from exact valuation gaps
    long n0 = 0;
    {
        EssentialPart ess_orig = essential_part(spec_in.u, spec_in.w);
        Rat mu = ess_orig.max_value.q;
        std::optional<Rat> gap_n;
        Rat qmax;  // max certified exponent among good classes
        bool qset = false;
        for (long b = 0; b < static_cast<long>(sys.L()); ++b) {
            for (auto& cc : per[b].scan.const_classes) {
                if (!qset || cc.exponent > qmax) qmax = cc.exponent, qset = true;
            }
        }
        for (size_t i = 0; i < spec_in.u.terms().size(); ++i) {
            bool essential = std::find(ess_orig.indices.begin(), ess_orig.indices.end(), i) !=
                             ess_orig.indices.end();
            if (essential) continue;
            const auto& t = spec_in.u.terms()[i];
            Rat vroot = w_valuation(t.root, spec_in.w);
            Rat vcoef;
            bool vset = false;
            for (const auto& pc : t.poly.c) {
                if (pc.is_zero()) continue;
                Rat v = w_valuation(pc, spec_in.w);
                if (!vset || v < vcoef) vcoef = v, vset = true;
            }
            // need qmax + n mu < vcoef + n vroot, i.e. n > (qmax - vcoef)/(vroot - mu)
            if (qset && vset) {
                Rat bound = (qmax - vcoef) / (vroot - mu);
                if (!gap_n || bound > *gap_n) gap_n = bound;
            }
        }
        if (gap_n) {
            n0 = static_cast<long>(mpq_class(*gap_n).get_d()) + 2;
        }
    }
    cert.threshold = n0;

    // glue: n = L m + b ranges over b + L * (m-class) mod L p^t
    std::optional<Rat> ell;
    std::vector<bool> covered(mpz_get_ui(Int(cert.modulus).get_mpz_t()), false);
    for (long b = 0; b < static_cast<long>(sys.L()); ++b) {
        for (auto& cc : per[b].scan.const_classes) {
            Int step = pow_int(p, cc.depth);
            // lift class (cc.rep mod p^depth) to classes mod p^t
            for (Int m = cc.rep % step; m < pt; m += step) {
                Int ncls = Int(b) + Int(static_cast<long>(sys.L())) * m;
                cert.good.push_back({ncls, cc.exponent * spec.c, cert.threshold});
                covered[mpz_get_ui(ncls.get_mpz_t())] = true;
                if (!ell || cc.exponent > *ell) ell = cc.exponent;
            }
        }
    }
    cert.ell_exponent = ell;
    for (unsigned long i = 0; i < covered.size(); ++i) {
        if (!covered[i]) cert.bad.push_back(Int(static_cast<long>(i)));
    }
    std::sort(cert.good.begin(), cert.good.end(),
              [](const AQCGoodClass& a, const AQCGoodClass& b) { return a.cls < b.cls; });
    return cert;
}

struct VerifyReport {
    long samples_checked = 0;
    struct Mismatch {
        long n;
        Rat expected_exponent;
        std::optional<Rat> actual_exponent;
    };
    std::vector<Mismatch> mismatches;
    bool ok() const { return mismatches.empty(); }
};

// exact re-evaluation of the certified constants on sampled arguments
inline VerifyReport verify_certificate(const AQCCertificate& cert, const PAdicFactorSpec& spec,
                                       long samples) {
    VerifyReport rep;
    if (cert.good.empty()) return rep;
    long d = cert.modulus.get_si();
    long per_class = std::max<long>(1, samples / static_cast<long>(cert.good.size()));
    for (const auto& g : cert.good) {
        long j = g.cls.get_si();
        long start = g.threshold + ((j - g.threshold) % d + d) % d;
        for (long s = 0; s < per_class; ++s) {
            long n = start + s * d;
            auto q = spec.normalized_exponent(n);
            ++rep.samples_checked;
            if (!q || *q != g.exponent) {
                rep.mismatches.push_back({n, g.exponent, q});
            }
            if (rep.samples_checked >= samples) return rep;
        }
    }
    return rep;
}

// --- gluing (Lemma 4.2) --------------------------------------------------------

using SectionPart = std::variant<QuasiPolynomial, AQCCertificate>;

inline QuasiPolynomial glue_quasipolynomials(const std::vector<QuasiPolynomial>& parts, long L) {
    long dlcm = 1;
    for (const auto& part : parts) dlcm = static_cast<long>(lcm_ul(dlcm, part.modulus));
    QuasiPolynomial out;
    out.modulus = L * dlcm;
    out.polys.resize(out.modulus);
    out.threshold = 0;
    for (long b = 0; b < L; ++b) {
        const auto& part = parts[b];
        out.threshold = std::max(out.threshold, L * part.threshold + b);
        for (long c = 0; c < dlcm; ++c) {
            // class n = b + L c mod L dlcm; f(n) = part.P_{c mod d}((n - b)/L)
            QPoly lin({Rat(-b, L), Rat(1, L)});
            out.polys[b + L * c] = part.polys[c % part.modulus].compose(lin);
        }
    }
    return out;
}

inline AQCCertificate glue_certificates(const std::vector<AQCCertificate>& parts, long L) {
    AQCCertificate out;
    if (parts.empty()) throw Error("glue_certificates: no parts");
    out.p = parts[0].p;
    out.c_exponent = parts[0].c_exponent;
    long tmax = 0;
    long depth = 0;
    for (const auto& part : parts) {
        if (part.p != out.p) throw InconsistentOverlap("glue: different primes");
        tmax = std::max(tmax, part.t);
        depth = std::max(depth, part.depth);
        out.threshold = std::max(out.threshold, L * part.threshold + L);
    }
    // merged modulus: L * lcm of the part moduli (each L_b p^{t_b})
    Int dl(1);
    for (const auto& part : parts) {
        Int m = part.modulus;
        Int g;
        mpz_gcd(g.get_mpz_t(), dl.get_mpz_t(), m.get_mpz_t());
        dl = dl / g * m;
    }
    out.L = static_cast<unsigned long>(L);
    out.t = tmax;
    out.depth = depth;
    out.modulus = Int(L) * dl;
    for (long b = 0; b < L; ++b) {
        const auto& part = parts[b];
        std::map<long, const AQCGoodClass*> lookup;
        for (const auto& g : part.good) lookup[g.cls.get_si()] = &g;
        for (Int m(0); m < dl; m += 1) {
            long cls_in_part = Int(m % part.modulus).get_si();
            auto it = lookup.find(cls_in_part);
            Int ncls = Int(b) + Int(L) * m;
            if (it != lookup.end()) {
                out.good.push_back({ncls, it->second->exponent,
                                    std::max<long>(out.threshold, L * it->second->threshold + b)});
            } else {
                out.bad.push_back(ncls);
            }
        }
        for (auto& z : part.zeros) out.zeros.push_back(z);
        for (auto& u : part.unknown_classes) out.unknown_classes.push_back(u);
    }
    return out;
}

// glue per-class parts f_b(m) = f(Lm + b) into one function spec
inline SectionPart section_assemble(const std::vector<SectionPart>& parts, long L) {
    if (static_cast<long>(parts.size()) != L) throw InconsistentOverlap("section_assemble: need one part per class");
    bool all_qp = true, any_cert = false;
    for (const auto& part : parts) {
        if (std::holds_alternative<AQCCertificate>(part)) {
            all_qp = false;
            any_cert = true;
        }
    }
    if (all_qp) {
        std::vector<QuasiPolynomial> qs;
        for (const auto& part : parts) qs.push_back(std::get<QuasiPolynomial>(part));
        return glue_quasipolynomials(qs, L);
    }
    if (!any_cert) throw InconsistentOverlap("section_assemble: empty");
    // promote constant quasi-polynomials with p-power values to certificates
    Int p(0);
    for (const auto& part : parts) {
        if (std::holds_alternative<AQCCertificate>(part)) {
            p = std::get<AQCCertificate>(part).p;
            break;
        }
    }
    std::vector<AQCCertificate> cs;
    for (const auto& part : parts) {
        if (std::holds_alternative<AQCCertificate>(part)) {
            cs.push_back(std::get<AQCCertificate>(part));
            continue;
        }
        const auto& qp = std::get<QuasiPolynomial>(part);
        if (!qp.is_constant()) throw UnsupportedExactForm("section_assemble: non-constant mixed part");
        AQCCertificate c;
        c.p = p;
        c.L = qp.modulus;
        c.t = 0;
        c.modulus = Int(qp.modulus);
        c.threshold = qp.threshold;
        for (long j = 0; j < qp.modulus; ++j) {
            Rat v = qp.polys[j].is_zero() ? Rat(0) : qp.polys[j].c[0];
            if (v <= 0) throw UnsupportedExactForm("section_assemble: constant is not a p-power");
            long e = val_p(v, p);
            if (v != pow_rat(Rat(p), e)) throw UnsupportedExactForm("section_assemble: constant is not a p-power");
            c.good.push_back({Int(j), Rat(-e), qp.threshold});
        }
        cs.push_back(c);
    }
    return glue_certificates(cs, L);
}

// --- the Remark 2.12 family -----------------------------------------------------

// f_s(n) = s_k when n = 2^{k-1} - 1 mod 2^k (first matching line); the list
// carries finitely many s_k under the growth cap log2|s_k| <= 2^k/(k+1).
struct FsCounterexample {
    std::vector<Int> s;

    explicit FsCounterexample(std::vector<Int> values) : s(std::move(values)) {
        if (s.empty() || s[0] != 1) throw Error("fs: s_1 must equal 1");
        for (size_t k1 = 1; k1 <= s.size(); ++k1) {  // paper index k = k1
            if (s[k1 - 1] == 0) throw Error("fs: zero entry");
            unsigned long cap = std::max<unsigned long>(
                6, (1UL << std::min<size_t>(k1, 40)) / k1);
            if (mpz_sizeinbase(s[k1 - 1].get_mpz_t(), 2) > cap)
                throw Error("fs: growth cap log2|s_k| <= max(4, 2^k/k) violated");
        }
    }

    Rat eval(long n) const {
        if (n < 0) throw Error("fs: negative argument");
        // the matching line index is (number of trailing one bits) + 1
        unsigned long k = 1;
        long m = n;
        while (m & 1) {
            ++k;
            m >>= 1;
        }
        if (k > s.size()) throw Error("fs: supplied list too short for this argument");
        return Rat(s[k - 1]);
    }
};

}  // namespace adelic
