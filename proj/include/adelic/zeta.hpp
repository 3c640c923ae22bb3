#pragma once

#include <adelic/dichotomy.hpp>
#include <adelic/numfield.hpp>

#include <sstream>
#include <vector>

namespace adelic {

// Dynamical zeta data: deg(phi^k - 1) = prod (xi_i^k - 1) and the periodic
// inseparability pattern deg_i(phi^k - 1) = r_k |k|_p^{s_k}.
struct ZetaSpec {
    FieldPtr field;
    std::vector<AlgebraicNumber> xi;  // 2g values, none a root of unity
    size_t arch_index = 0;
    Int p = Int(2);
    unsigned long L = 1;
    std::vector<Rat> r;   // size L; r_k = r[(k-1) mod L]
    std::vector<long> s;  // size L; s_k = s[(k-1) mod L], each <= 0

    static ZetaSpec make(FieldPtr field, std::vector<AlgebraicNumber> xi, Int p, unsigned long L,
                         std::vector<Rat> r, std::vector<long> s, size_t arch_index = 0) {
        ZetaSpec z;
        z.field = std::move(field);
        z.xi = std::move(xi);
        z.p = std::move(p);
        z.L = L;
        z.r = std::move(r);
        z.s = std::move(s);
        z.arch_index = arch_index;
        if (!is_prime(z.p)) throw Error("ZetaSpec: p must be prime");
        if (z.r.size() != L || z.s.size() != L || L < 1) throw Error("ZetaSpec: periodic data size");
        for (auto& v : z.xi) {
            AlgebraicNumber a = v.promoted(z.field);
            if (a.is_zero()) throw ZeroInput("ZetaSpec: zero xi");
            if (is_root_of_unity(a)) throw RootOfUnityInput();
            v = a;
        }
        for (const Rat& rv : z.r) {
            if (rv <= 0) throw Error("ZetaSpec: r_k must be positive");
        }
        for (long sv : z.s) {
            if (sv > 0) throw Error("ZetaSpec: s_k must be nonpositive");
        }
        return z;
    }

    Rat r_at(long k) const { return r[static_cast<size_t>((k - 1) % static_cast<long>(L))]; }
    long s_at(long k) const { return s[static_cast<size_t>((k - 1) % static_cast<long>(L))]; }
};

// deg(phi^k - 1) as an exact rational (the xi multiset is Galois-stable in
// any consistent spec, so the product collapses to Q)
inline Rat deg_k(const ZetaSpec& z, long k) {
    if (k < 1) throw Error("deg_k: k must be >= 1");
    AlgebraicNumber prod = AlgebraicNumber::from_rat(z.field, Rat(1));
    for (const auto& xi : z.xi) {
        prod = prod * (xi.pow(k) - AlgebraicNumber(1));
    }
    if (!prod.is_rational()) throw NonIntegerDegree("deg_k: product is not rational");
    Rat v = prod.as_rational();
    if (v <= 0 || v.get_den() != 1) throw NonIntegerDegree("deg_k: not a positive integer");
    return v;
}

// deg_i(phi^k - 1) = r_k |k|_p^{s_k}; must be a positive integer dividing deg_k
inline Rat insep_k(const ZetaSpec& z, long k) {
    if (k < 1) throw Error("insep_k: k must be >= 1");
    long vp = val_p(Int(k), z.p);
    // |k|_p^{s_k} = p^{-vp s_k}
    Rat val = z.r_at(k) * pow_rat(Rat(z.p), -vp * z.s_at(k));
    if (val.get_den() != 1 || val < 1)
        throw NonIntegerFixedPointCount("insep_k: inseparability degree is not a positive integer");
    Rat n = deg_k(z, k) / val;
    if (n.get_den() != 1 || n < 1)
        throw NonIntegerFixedPointCount("insep_k: N_k = deg/deg_i is not a positive integer");
    return val;
}

inline Rat fixed_point_count(const ZetaSpec& z, long k) { return deg_k(z, k) / insep_k(z, k); }

// certified interval for 1/Lambda, Lambda = prod max(|xi_i|, 1)
inline RadiusInterval lambda_radius(const ZetaSpec& z) {
    RealAlgebraic lam((Rat(1)));
    for (const auto& xi : z.xi) {
        RealAlgebraic a = abs2_at_embedding(xi, z.arch_index).sqrt();
        if (a.compare(Rat(1)) > 0) lam = lam.mul(a);
    }
    lam.refine_below(Rat(1, Int(1) << 48));
    auto [lo, hi] = lam.enclosure();
    return RadiusInterval{1 / hi, 1 / lo};
}

// coefficients of Z(x) = exp(sum_k N_k x^k / k) to order N
inline std::vector<Rat> zeta_coeffs(const ZetaSpec& z, long N) {
    if (N < 1) throw Error("zeta_coeffs: N must be >= 1");
    std::vector<Rat> nk;
    for (long k = 1; k <= N; ++k) nk.push_back(fixed_point_count(z, k));
    return exp_series_from_logderiv(nk, N);
}

// Thm 1.2 classifier: natural boundary at radius 1/Lambda iff some iterate is
// inseparable. The periodic data reduce this to a finite test per residue
// class mod L, using which p-valuations are achievable inside the class.
inline DichotomyVerdict classify_zeta(const ZetaSpec& z) {
    DichotomyVerdict v;
    v.radius_interval = lambda_radius(z);
    // validation scan: N_k integrality over one full period times p
    long scan = static_cast<long>(z.L) * z.p.get_si();
    for (long k = 1; k <= scan; ++k) (void)insep_k(z, k);

    long beta = val_p(Int(static_cast<long>(z.L)), z.p);
    std::ostringstream note;
    bool nb = false;
    for (long b = 1; b <= static_cast<long>(z.L) && !nb; ++b) {
        long sb = z.s_at(b);
        Rat rb = z.r_at(b);
        long alpha = val_p(Int(b), z.p);  // v_p of the class representative
        if (sb == 0) {
            if (rb != 1) {
                nb = true;
                note << "class " << b << " mod " << z.L << ": deg_i = " << rat_to_string(rb) << " > 1";
            }
        } else {
            // v_p(k) is constant alpha on the class when alpha < beta,
            // otherwise unbounded along p-power multiples
            if (alpha < beta) {
                Rat val = rb * pow_rat(Rat(z.p), -alpha * sb);
                if (val != 1) {
                    nb = true;
                    note << "class " << b << " mod " << z.L << ": deg_i = " << rat_to_string(val)
                         << " > 1";
                }
            } else {
                nb = true;
                note << "class " << b << " mod " << z.L << ": s = " << sb
                     << " < 0 forces deg_i unbounded along p-power multiples";
            }
        }
    }
    if (nb) {
        v.kind = DichotomyVerdict::Kind::NaturalBoundary;
        v.witness = note.str();
    } else {
        v.kind = DichotomyVerdict::Kind::Rational;
        v.witness = "phi^k - 1 separable for every k; zeta is rational";
    }
    return v;
}

}  // namespace adelic
