#pragma once

#include <complex>
#include <vector>

namespace adelic {

// Numeric Pade pole evidence. Double precision throughout; results are
// diagnostics, never part of a verdict.
struct PadeEntry {
    int L = 0, M = 0;
    bool ok = false;  // normal equations well-conditioned enough to trust
    std::vector<std::complex<double>> poles;
};

namespace detail {

// roots of a polynomial with complex double coefficients (ascending) by
// Durand-Kerner; good enough for the small denominator degrees used here
inline std::vector<std::complex<double>> dk_roots(std::vector<std::complex<double>> c) {
    while (!c.empty() && std::abs(c.back()) < 1e-300) c.pop_back();
    int n = static_cast<int>(c.size()) - 1;
    if (n < 1) return {};
    for (auto& v : c) v /= c.back();
    double bound = 1.0;
    for (int i = 0; i < n; ++i) bound = std::max(bound, 2.0 * std::abs(c[i]));
    std::vector<std::complex<double>> z(n);
    std::complex<double> seed(0.4, 0.9), cur(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        cur *= seed;
        z[i] = bound * cur * (1.0 + 0.02 * i);
    }
    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc = c[n];
        for (int i = n - 1; i >= 0; --i) acc = acc * x + c[i];
        return acc;
    };
    for (int iter = 0; iter < 400; ++iter) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> den(1.0, 0.0);
            for (int j = 0; j < n; ++j) {
                if (j != i) den *= (z[i] - z[j]);
            }
            if (std::abs(den) < 1e-280) continue;
            auto delta = eval(z[i]) / den;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-13) break;
    }
    return z;
}

}  // namespace detail

// Padé [L/M] denominators from the linear Toeplitz system; poles returned per
// order, with degenerate systems flagged and skipped.
inline std::vector<PadeEntry> pade_boundary_scan(const std::vector<double>& coeffs,
                                                 const std::vector<std::pair<int, int>>& orders) {
    std::vector<PadeEntry> out;
    for (auto [L, M] : orders) {
        PadeEntry e;
        e.L = L;
        e.M = M;
        if (static_cast<size_t>(L + M + 1) > coeffs.size() || M < 1) {
            out.push_back(e);
            continue;
        }
        // Degenerate systems signal a Padé block (the function is rational of
        // lower order); deflate the denominator degree until well-conditioned.
        for (int n = M; n >= 1; --n) {
            // solve sum_{k=1}^{n} b_k c_{L+j-k} = -c_{L+j}, j = 1..n
            std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
            for (int j = 1; j <= n; ++j) {
                for (int k = 1; k <= n; ++k) {
                    int idx = L + j - k;
                    a[j - 1][k - 1] = idx >= 0 ? coeffs[idx] : 0.0;
                }
                a[j - 1][n] = -coeffs[L + j];
            }
            bool singular = false;
            double min_pivot = 1e300, max_pivot = 0.0;
            for (int col = 0; col < n; ++col) {
                int sel = col;
                for (int r = col + 1; r < n; ++r) {
                    if (std::abs(a[r][col]) > std::abs(a[sel][col])) sel = r;
                }
                std::swap(a[sel], a[col]);
                double piv = a[col][col];
                if (std::abs(piv) < 1e-280) {
                    singular = true;
                    break;
                }
                min_pivot = std::min(min_pivot, std::abs(piv));
                max_pivot = std::max(max_pivot, std::abs(piv));
                for (int r = col + 1; r < n; ++r) {
                    double f = a[r][col] / piv;
                    for (int cix = col; cix <= n; ++cix) a[r][cix] -= f * a[col][cix];
                }
            }
            if (singular || (max_pivot > 0 && min_pivot / max_pivot < 1e-12)) continue;
            std::vector<double> b(n, 0.0);
            for (int r = n - 1; r >= 0; --r) {
                double acc = a[r][n];
                for (int cix = r + 1; cix < n; ++cix) acc -= a[r][cix] * b[cix];
                b[r] = acc / a[r][r];
            }
            std::vector<std::complex<double>> den(n + 1);
            den[0] = 1.0;
            for (int k = 1; k <= n; ++k) den[k] = b[k - 1];
            e.poles = detail::dk_roots(den);
            e.ok = true;
            break;
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace adelic
