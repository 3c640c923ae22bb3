#pragma once

#include <adelic/poly.hpp>

#include <optional>
#include <vector>

namespace adelic {

template <class F>
struct BMResult {
    Poly<F> connection;  // C(x) with C(0) = 1; sum_j C_j s_{n-j} = 0 for L <= n < N
    size_t complexity = 0;
};

// Berlekamp-Massey over a field; `zero`/`one` seed the arithmetic so that
// field types needing context (e.g. number field elements) work unchanged.
template <class F>
BMResult<F> berlekamp_massey(const std::vector<F>& s, const F& zero, const F& one) {
    Poly<F> C, B;
    C.c = {one};
    B.c = {one};
    size_t L = 0, m = 1;
    F b = one;
    for (size_t n = 0; n < s.size(); ++n) {
        F d = zero;
        for (size_t i = 0; i <= L && i < C.c.size(); ++i) {
            d = d + C.c[i] * s[n - i];
        }
        if (elem_is_zero(d)) {
            ++m;
            continue;
        }
        F coef = d / b;
        Poly<F> xmB;
        xmB.c.assign(m, zero);
        xmB.c.insert(xmB.c.end(), B.c.begin(), B.c.end());
        Poly<F> scaled;
        scaled.c.resize(xmB.c.size());
        for (size_t i = 0; i < xmB.c.size(); ++i) scaled.c[i] = coef * xmB.c[i];
        if (2 * L <= n) {
            Poly<F> T = C;
            C = C - scaled;
            L = n + 1 - L;
            B = T;
            b = d;
            m = 1;
        } else {
            C = C - scaled;
            ++m;
        }
    }
    return {C, L};
}

// linear complexity of the prefix; the "observed Hankel rank" used in reports
template <class F>
size_t linear_complexity(const std::vector<F>& s, const F& zero, const F& one) {
    return berlekamp_massey(s, zero, one).complexity;
}

// exact rank of the k x k Hankel matrix (s_{i+j}) by Gaussian elimination;
// an independent cross-check for the BM-based complexity
template <class F>
size_t hankel_rank_direct(const std::vector<F>& s, size_t k, const F& zero) {
    if (2 * k - 1 > s.size()) throw std::invalid_argument("hankel_rank_direct: need 2k-1 terms");
    std::vector<std::vector<F>> m(k, std::vector<F>(k, zero));
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) m[i][j] = s[i + j];
    }
    size_t rank = 0;
    for (size_t col = 0; col < k && rank < k; ++col) {
        size_t sel = rank;
        while (sel < k && elem_is_zero(m[sel][col])) ++sel;
        if (sel == k) continue;
        std::swap(m[sel], m[rank]);
        for (size_t i = rank + 1; i < k; ++i) {
            if (!elem_is_zero(m[i][col])) {
                F f = m[i][col] / m[rank][col];
                for (size_t j = col; j < k; ++j) m[i][j] = m[i][j] - f * m[rank][j];
            }
        }
        ++rank;
    }
    return rank;
}

template <class F>
struct RationalFunction {
    Poly<F> num, den;  // den(0) = 1
};

// expand num/den as a power series to N coefficients
template <class F>
std::vector<F> expand_rational(const RationalFunction<F>& r, size_t N, const F& zero) {
    std::vector<F> out(N, zero);
    for (size_t n = 0; n < N; ++n) {
        F acc = n < r.num.c.size() ? r.num.c[n] : zero;
        for (size_t j = 1; j < r.den.c.size() && j <= n; ++j) {
            acc = acc - r.den.c[j] * out[n - j];
        }
        out[n] = acc;  // den(0) = 1
    }
    return out;
}

// Minimal rational function fitting the coefficient list, accepted only when
// the data exceeds the recurrence order with a safety margin.
template <class F>
std::optional<RationalFunction<F>> rationality_test(const std::vector<F>& coeffs, size_t max_order,
                                                    const F& zero, const F& one, size_t guard = 8) {
    if (coeffs.size() < 2) return std::nullopt;
    auto bm = berlekamp_massey(coeffs, zero, one);
    size_t L = bm.complexity;
    if (L > max_order) return std::nullopt;
    if (coeffs.size() < 2 * L + guard) return std::nullopt;
    // numerator = C * S truncated below L; the tail vanishes by construction
    Poly<F> num;
    num.c.assign(L == 0 ? 0 : L, zero);
    for (size_t k = 0; k < L; ++k) {
        F acc = zero;
        for (size_t j = 0; j < bm.connection.c.size() && j <= k; ++j) {
            acc = acc + bm.connection.c[j] * coeffs[k - j];
        }
        num.c[k] = acc;
    }
    num.trim();
    RationalFunction<F> r{num, bm.connection};
    // verify against the entire input
    auto back = expand_rational(r, coeffs.size(), zero);
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (!elem_is_zero(back[i] - coeffs[i])) return std::nullopt;
    }
    return r;
}

}  // namespace adelic
