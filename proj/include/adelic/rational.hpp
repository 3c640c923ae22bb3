#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adelic {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Parses "num", "num/den", or "-num/den" with arbitrary-size integers.
inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

inline std::string rat_to_string(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Int pow_int(Int base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rat pow_rat(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0) {
        if (e < 0) throw std::invalid_argument("pow_rat: 0^negative");
        return Rat(0);
    }
    unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
    Rat r = make_rat(pow_int(base.get_num(), a), pow_int(base.get_den(), a));
    if (e < 0) r = 1 / r;
    return r;
}

// v_p of a nonzero integer.
inline long val_p(Int n, const Int& p) {
    if (n == 0) throw std::invalid_argument("val_p: zero input");
    long v = 0;
    Int q, r;
    for (;;) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
        if (r != 0) return v;
        n = q;
        ++v;
    }
}

// v_p of a nonzero rational.
inline long val_p(const Rat& q, const Int& p) {
    if (q == 0) throw std::invalid_argument("val_p: zero input");
    long v = 0;
    if (q.get_num() % p == 0) v = val_p(q.get_num(), p);
    else if (q.get_den() % p == 0) v = -val_p(q.get_den(), p);
    return v;
}

inline bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

inline unsigned long euler_phi(unsigned long n) {
    unsigned long result = n;
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

inline unsigned long gcd_ul(unsigned long a, unsigned long b) {
    while (b) { unsigned long t = a % b; a = b; b = t; }
    return a;
}

inline unsigned long lcm_ul(unsigned long a, unsigned long b) {
    if (a == 0 || b == 0) return 0;
    return a / gcd_ul(a, b) * b;
}

inline std::vector<unsigned long> divisors(unsigned long n) {
    std::vector<unsigned long> small, big;
    for (unsigned long d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            small.push_back(d);
            if (d != n / d) big.push_back(n / d);
        }
    }
    for (auto it = big.rbegin(); it != big.rend(); ++it) small.push_back(*it);
    return small;
}

// Exact integer k-th root when n is a perfect k-th power.
inline std::optional<Int> perfect_root(const Int& n, unsigned long k) {
    Int r;
    int exact = mpz_root(r.get_mpz_t(), n.get_mpz_t(), k);
    if (exact) return r;
    return std::nullopt;
}

}  // namespace adelic
