#pragma once

#include <adelic/poly.hpp>
#include <adelic/realalg.hpp>

#include <complex>
#include <stdexcept>
#include <vector>

namespace adelic {

struct QComplex {
    Rat re, im;

    QComplex() : re(0), im(0) {}
    QComplex(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    friend QComplex operator+(const QComplex& a, const QComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend QComplex operator-(const QComplex& a, const QComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend QComplex operator*(const QComplex& a, const QComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    QComplex conj() const { return {re, -im}; }
    Rat norm2() const { return re * re + im * im; }

    QComplex operator/(const QComplex& b) const {
        Rat n = b.norm2();
        if (n == 0) throw std::invalid_argument("QComplex: division by zero");
        QComplex t = *this * b.conj();
        return {t.re / n, t.im / n};
    }
};

// nearest multiple of 2^-bits
inline Rat dyadic_round(const Rat& q, unsigned bits) {
    Int scale = pow_int(Int(2), bits);
    Rat s = q * Rat(scale);
    Int rounded;
    Int num2 = 2 * s.get_num() + s.get_den();  // floor(s + 1/2)
    mpz_fdiv_q(rounded.get_mpz_t(), num2.get_mpz_t(), Int(2 * s.get_den()).get_mpz_t());
    return make_rat(rounded, scale);
}

// a rational r with r^k >= value and r within a factor ~1.001 of value^{1/k}
inline Rat upper_kth_root(const Rat& value, unsigned long k) {
    if (value < 0) throw std::invalid_argument("upper_kth_root: negative input");
    if (value == 0) return Rat(0);
    // e2 = smallest integer with value <= 2^e2, via limb sizes
    long bn = static_cast<long>(mpz_sizeinbase(value.get_num().get_mpz_t(), 2));
    long bd = static_cast<long>(mpz_sizeinbase(value.get_den().get_mpz_t(), 2));
    long e2 = bn - bd + 1;
    long re = e2 >= 0 ? (e2 + static_cast<long>(k) - 1) / static_cast<long>(k)
                      : -((-e2) / static_cast<long>(k));
    Rat hi = re >= 0 ? Rat(pow_int(Int(2), re)) : make_rat(Int(1), pow_int(Int(2), -re));
    Rat lo = hi / 2;
    for (int i = 0; i < 16; ++i) {
        Rat mid = (lo + hi) / 2;
        if (pow_rat(mid, static_cast<long>(k)) >= value) hi = mid;
        else lo = mid;
    }
    return hi;
}

// A certified complex root of a squarefree rational polynomial: the true root
// lies within `radius` of `center`. Real roots carry radius 0 in the imaginary
// direction via is_real plus an exact Sturm-refined interval in real_iv.
struct RootEnclosure {
    QComplex center;
    Rat radius;
    bool is_real = false;
    RootInterval real_iv{Rat(0), Rat(0)};
};

// Closed disc with exact rational center/radius; radius bookkeeping is
// conservative, so every op encloses the exact image set.
struct QDisc {
    QComplex c;
    Rat r;

    QDisc() : r(0) {}
    QDisc(QComplex center, Rat radius) : c(std::move(center)), r(std::move(radius)) {}

    Rat abs_upper() const { return upper_kth_root(c.norm2(), 2) + r; }

    friend QDisc operator+(const QDisc& a, const QDisc& b) { return {a.c + b.c, a.r + b.r}; }
    friend QDisc operator*(const QDisc& a, const QDisc& b) {
        Rat ua = upper_kth_root(a.c.norm2(), 2);
        Rat ub = upper_kth_root(b.c.norm2(), 2);
        return {a.c * b.c, ua * b.r + ub * a.r + a.r * b.r};
    }

    // exact rational bounds on |z|^2 over the disc
    std::pair<Rat, Rat> norm2_bounds() const {
        Rat n2 = c.norm2();
        auto [l, u] = rat_sqrt_bounds(n2, 32);
        Rat lo = l - r;
        if (lo < 0) lo = Rat(0);
        Rat hi = u + r;
        return {lo * lo, hi * hi};
    }
};

// polynomial with rational coefficients evaluated over a disc
inline QDisc eval_poly_disc(const QPoly& f, const QDisc& x) {
    QDisc acc;
    if (f.is_zero()) return acc;
    acc = QDisc(QComplex(f.lc(), Rat(0)), Rat(0));
    for (int i = f.deg() - 1; i >= 0; --i) {
        acc = acc * x;
        acc.c.re += f.c[i];
    }
    return acc;
}

namespace detail {

inline std::vector<std::complex<double>> durand_kerner(const QPoly& f) {
    int n = f.deg();
    std::vector<std::complex<double>> coef(n + 1);
    for (int i = 0; i <= n; ++i) coef[i] = mpq_class(f.c[i] / f.lc()).get_d();
    double bound = 1.0;
    for (int i = 0; i < n; ++i) bound = std::max(bound, 2.0 * std::abs(coef[i]));
    std::vector<std::complex<double>> z(n);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> cur(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        cur *= seed;
        z[i] = bound * cur * (1.0 + 0.03 * i);
    }
    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc = coef[n];
        for (int i = n - 1; i >= 0; --i) acc = acc * x + coef[i];
        return acc;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> den(1.0, 0.0);
            for (int j = 0; j < n; ++j) {
                if (j != i) den *= (z[i] - z[j]);
            }
            if (std::abs(den) < 1e-300) continue;
            std::complex<double> delta = eval(z[i]) / den;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

inline QComplex eval_poly(const QPoly& f, const QComplex& x) {
    QComplex acc;
    if (f.is_zero()) return acc;
    acc = QComplex(f.lc(), Rat(0));
    for (int i = f.deg() - 1; i >= 0; --i) {
        acc = acc * x;
        acc.re += f.c[i];
    }
    return acc;
}

}  // namespace detail

// Certified enclosures for all complex roots of a squarefree polynomial,
// in the order: real roots ascending, then one representative per conjugate
// pair (positive imaginary part) sorted by (re, im).
inline std::vector<RootEnclosure> certified_roots(const QPoly& f, const Rat& target_radius) {
    int n = f.deg();
    if (n < 1) return {};
    std::vector<RootEnclosure> out;
    if (n == 1) {
        RootEnclosure e;
        Rat v = -f.c[0] / f.c[1];
        e.center = QComplex(v, Rat(0));
        e.radius = Rat(0);
        e.is_real = true;
        e.real_iv = {v, v};
        out.push_back(e);
        return out;
    }

    auto real_ivs = isolate_real_roots(f);
    size_t n_real = real_ivs.size();
    QPoly fd = f.derivative();

    auto approx = detail::durand_kerner(f);
    std::vector<QComplex> z(n);
    for (int i = 0; i < n; ++i) {
        z[i] = QComplex(dyadic_round(Rat(approx[i].real()), 60), dyadic_round(Rat(approx[i].imag()), 60));
    }

    Rat lc2 = f.lc() * f.lc();
    unsigned prec = 80;
    for (int attempt = 0; attempt < 64; ++attempt) {
        // Newton polish in exact arithmetic with dyadic rounding
        for (int round = 0; round < 2 + attempt; ++round) {
            for (int i = 0; i < n; ++i) {
                QComplex fv = detail::eval_poly(f, z[i]);
                QComplex dv = detail::eval_poly(fd, z[i]);
                if (dv.norm2() == 0) continue;
                QComplex step = fv / dv;
                z[i] = QComplex(dyadic_round(z[i].re - step.re, prec), dyadic_round(z[i].im - step.im, prec));
            }
        }
        // a-posteriori radii: min-distance-to-root <= (|f(z)|/|lc|)^{1/n}
        std::vector<Rat> rad(n);
        bool small_enough = true;
        for (int i = 0; i < n; ++i) {
            Rat F = detail::eval_poly(f, z[i]).norm2() / lc2;
            Rat r2 = upper_kth_root(F, n);  // r2 >= F^{1/n} >= (min dist)^2
            rad[i] = upper_kth_root(r2, 2);
            if (rad[i] > target_radius) small_enough = false;
        }
        bool ok = small_enough;
        // pairwise disjoint
        for (int i = 0; ok && i < n; ++i) {
            for (int j = i + 1; ok && j < n; ++j) {
                Rat d2 = (z[i] - z[j]).norm2();
                Rat s = rad[i] + rad[j];
                if (d2 <= s * s) ok = false;
            }
        }
        // conjugate pairing: each disc's conjugate must meet exactly one disc
        std::vector<int> mate(n, -1);
        for (int i = 0; ok && i < n; ++i) {
            QComplex zc = z[i].conj();
            int found = -1;
            for (int j = 0; j < n; ++j) {
                Rat d2 = (zc - z[j]).norm2();
                Rat s = rad[i] + rad[j];
                if (d2 <= s * s) {
                    if (found != -1) { ok = false; break; }
                    found = j;
                }
            }
            if (found == -1) ok = false;
            mate[i] = found;
        }
        // self-paired discs are the real roots; count must match Sturm
        if (ok) {
            size_t self_count = 0;
            for (int i = 0; i < n; ++i) {
                if (mate[i] == i) ++self_count;
            }
            if (self_count != n_real) ok = false;
        }
        if (ok) {
            std::vector<std::pair<Rat, int>> reals;   // (center.re, index)
            std::vector<int> reps;
            for (int i = 0; i < n; ++i) {
                if (mate[i] == i) reals.push_back({z[i].re, i});
                else if (z[i].im > 0) reps.push_back(i);
            }
            std::sort(reals.begin(), reals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            // order is stable under refinement: compare by re only when the
            // re-ranges are disjoint, else the im-ranges must be
            std::sort(reps.begin(), reps.end(), [&](int a, int b) {
                Rat s = rad[a] + rad[b];
                if (abs(z[a].re - z[b].re) > s) return z[a].re < z[b].re;
                return z[a].im < z[b].im;
            });
            out.clear();
            for (size_t k = 0; k < reals.size(); ++k) {
                RootEnclosure e;
                int i = reals[k].second;
                e.center = QComplex(z[i].re, Rat(0));
                e.radius = rad[i] + abs(z[i].im);  // recentered onto the axis
                e.is_real = true;
                e.real_iv = real_ivs[k];  // same ascending order
                out.push_back(e);
            }
            for (int i : reps) {
                RootEnclosure e;
                e.center = z[i];
                e.radius = rad[i];
                out.push_back(e);
            }
            return out;
        }
        prec += 40;
    }
    throw std::logic_error("certified_roots: failed to certify root enclosures");
}

}  // namespace adelic
