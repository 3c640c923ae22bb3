#include <adelic/aqp.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace adelic;

static FieldPtr QQ() { return rationals_field(); }

static PolyExpSeq geo(const FieldPtr& f, Rat root, Rat coeff = Rat(1)) {
    return PolyExpSeq::geometric(f, AlgebraicNumber(root), AlgebraicNumber(coeff));
}

// u_n = n as a polynomial-exponential sequence
static PolyExpSeq seq_n(const FieldPtr& f) {
    APoly id;
    id.c = {AlgebraicNumber(0), AlgebraicNumber(1)};
    return *PolyExpSeq::make(f, {{id, AlgebraicNumber(1)}});
}

// v_3(2^n - 1) by lifting the exponent: 0 for odd n, 1 + v_3(n/2)... = 1 + v_3(n) for even n
static long lte_v3_2n_minus_1(long n) {
    if (n % 2 == 1) return 0;
    long v = 1;
    while (n % 3 == 0) {
        ++v;
        n /= 3;
    }
    return v;
}

TEST_CASE("skolem decomposition of 2^n - 1 at p = 3") {
    auto q = QQ();
    auto u = from_xi_product(q, {AlgebraicNumber(2)});
    auto w3 = places_above(q, Int(3))[0];
    auto spec = PAdicFactorSpec::make(u, w3, Rat(1));
    REQUIRE(spec.normalized);  // both roots are 3-adic units

    auto dec = skolem_decompose(spec, 12);
    CHECK(dec.L == 2);
    REQUIRE(dec.series.size() == 2);

    // g_0(m) = 4^m - 1 has g_0(0) = 0; its Strassmann bound is 1
    auto [v0, e0] = dec.series[0].coeffs[0].valuation();
    CHECK_FALSE(e0);  // indistinguishable from zero
    CHECK(strassmann_bound(dec.series[0]) == 1);

    // g_1(m) = 2*4^m - 1 is a unit everywhere: bound 0
    CHECK(strassmann_bound(dec.series[1]) == 0);

    // Skolem soundness: g_b(m) matches u_{Lm+b} locally for m <= 20
    SkolemSystem sys(spec);
    for (long b = 0; b < 2; ++b) {
        LocalSeries g = sys.series(b, 12, 40);
        for (long m = 0; m <= 20; ++m) {
            AlgebraicNumber exact = sys.essential_term(b, m);
            auto [gv, gexact] = g.value_valuation_at(Int(m));
            if (exact.is_zero()) {
                CHECK_FALSE(gexact);
            } else {
                REQUIRE(gexact);
                CHECK(gv == w_valuation(exact, w3));
            }
        }
    }
}

TEST_CASE("skolem with all roots congruent to 1 takes L = 1") {
    auto q = QQ();
    auto u = *seq_add(geo(q, Rat(4)), geo(q, Rat(1)));  // 4^n + 1 at p = 3
    auto w3 = places_above(q, Int(3))[0];
    auto spec = PAdicFactorSpec::make(u, w3, Rat(1));
    auto dec = skolem_decompose(spec, 10);
    CHECK(dec.L == 1);
}

TEST_CASE("skolem L divisible by the residue order") {
    auto q = QQ();
    // 2 has order 4 mod 5
    auto u = from_xi_product(q, {AlgebraicNumber(2)});
    auto w5 = places_above(q, Int(5))[0];
    auto spec = PAdicFactorSpec::make(u, w5, Rat(1));
    auto dec = skolem_decompose(spec, 10);
    CHECK(dec.L % 4 == 0);
}

TEST_CASE("strassmann bound basics") {
    auto q = QQ();
    auto w5 = places_above(q, Int(5))[0];
    // handcrafted series 3 - x: coefficients embed exactly
    LocalSeries g;
    g.w = w5;
    g.precision = 8;
    g.poly_exact = true;
    g.coeffs = {embed_local(AlgebraicNumber(3), w5, 8), embed_local(AlgebraicNumber(-1), w5, 8)};
    CHECK(strassmann_bound(g) == 1);

    LocalSeries c2;
    c2.w = w5;
    c2.precision = 8;
    c2.poly_exact = true;
    c2.coeffs = {embed_local(AlgebraicNumber(2), w5, 8)};
    CHECK(strassmann_bound(c2) == 0);

    LocalSeries z;
    z.w = w5;
    z.precision = 8;
    z.poly_exact = true;
    z.coeffs = {local_zero(w5.ctx, 0, 8)};
    CHECK_THROWS_AS(strassmann_bound(z), AllCoefficientsIndistinguishableFromZero);
}

TEST_CASE("zeros_in_Zp") {
    auto q = QQ();
    auto w5 = places_above(q, Int(5))[0];

    // 3 - x has the single zero x = 3
    LocalSeries g;
    g.w = w5;
    g.precision = 10;
    g.poly_exact = true;
    g.coeffs = {embed_local(AlgebraicNumber(3), w5, 10), embed_local(AlgebraicNumber(-1), w5, 10)};
    auto scan = zeros_in_Zp(g, 3);
    REQUIRE(scan.kind == ZerosScan::Kind::Zeros);
    REQUIRE(scan.zeros.size() == 1);
    Int mod = pow_int(Int(5), scan.zeros[0].modexp);
    CHECK(scan.zeros[0].approx % mod == Int(3) % mod);

    // constant 2: no zeros
    LocalSeries c2;
    c2.w = w5;
    c2.precision = 10;
    c2.poly_exact = true;
    c2.coeffs = {embed_local(AlgebraicNumber(2), w5, 10)};
    CHECK(zeros_in_Zp(c2, 3).kind == ZerosScan::Kind::NoZeros);

    // g_0 of (2^n - 1, p=3): zero exactly at m = 0
    auto u = from_xi_product(q, {AlgebraicNumber(2)});
    auto w3 = places_above(q, Int(3))[0];
    auto spec = PAdicFactorSpec::make(u, w3, Rat(1));
    SkolemSystem sys(spec);
    LocalSeries g0 = sys.series(0, 14, 40);
    auto exact_zero = [&](const Int& rep) -> std::optional<bool> {
        return sys.essential_term(0, rep.get_si()).is_zero();
    };
    auto scan0 = zeros_in_Zp(g0, 4, exact_zero);
    REQUIRE(scan0.kind == ZerosScan::Kind::Zeros);
    REQUIRE(scan0.zeros.size() == 1);
    CHECK(scan0.zeros[0].approx == 0);
    CHECK(scan0.zeros[0].exact_integer);
}

TEST_CASE("aqc_certificate for |n|_2 matches the p-power pattern") {
    auto q = QQ();
    auto w2 = places_above(q, Int(2))[0];
    auto spec = PAdicFactorSpec::make(seq_n(q), w2, Rat(1));
    auto cert = aqc_certificate(spec, 6);

    CHECK(cert.L == 1);
    CHECK(cert.t == 6);
    CHECK(cert.modulus == 64);
    REQUIRE(cert.bad.size() == 1);
    CHECK(cert.bad[0] == 0);
    REQUIRE(cert.good.size() == 63);
    for (const auto& g : cert.good) {
        long j = g.cls.get_si();
        CHECK(g.exponent == Rat(val_p(Int(j), Int(2))));  // f(j) = |j|_2 = 2^{-v_2(j)}
    }
    CHECK(cert.zeros.size() == 1);
    CHECK(cert.zeros[0].approx == 0);

    auto rep = verify_certificate(cert, spec, 100);
    CHECK(rep.ok());
    CHECK(rep.samples_checked >= 63);
}

TEST_CASE("aqc_certificate for 2^n - 1 at the 3-adic place") {
    auto q = QQ();
    auto u = from_xi_product(q, {AlgebraicNumber(2)});
    auto w3 = places_above(q, Int(3))[0];
    auto spec = PAdicFactorSpec::make(u, w3, Rat(1));
    auto cert = aqc_certificate(spec, 2);

    CHECK(cert.L == 2);
    // odd classes all good with value 1 (exponent 0); even classes n = 2m good
    // for m != 0 mod 9 at this depth, with exponent 1 + v_3(m)
    for (const auto& g : cert.good) {
        long n = g.cls.get_si();
        if (n % 2 == 1) {
            CHECK(g.exponent == 0);
        } else {
            CHECK(g.exponent == Rat(lte_v3_2n_minus_1(n == 0 ? 18 : n)));
        }
    }
    // bad classes: exactly the even ones with m = 0 mod 9
    for (const auto& b : cert.bad) {
        long n = b.get_si();
        CHECK(n % 2 == 0);
        CHECK((n / 2) % 9 == 0);
    }

    auto rep = verify_certificate(cert, spec, 400);
    CHECK(rep.ok());

    // independent oracle: exact valuations by lifting the exponent
    for (long n = 1; n <= 200; ++n) {
        auto qn = spec.normalized_exponent(n);
        if (n == 0) continue;
        REQUIRE(qn.has_value());
        CHECK(*qn == Rat(lte_v3_2n_minus_1(n)));
    }
}

TEST_CASE("aqc_certificate trivial case 3^n - 1 at p = 3") {
    auto q = QQ();
    auto u = from_xi_product(q, {AlgebraicNumber(3)});
    auto w3 = places_above(q, Int(3))[0];
    auto spec = PAdicFactorSpec::make(u, w3, Rat(1));
    // essential part is the constant -1; every class is good with value 1
    auto cert = aqc_certificate(spec, 2);
    CHECK(cert.bad.empty());
    for (const auto& g : cert.good) CHECK(g.exponent == 0);
    auto rep = verify_certificate(cert, spec, 100);
    CHECK(rep.ok());
}

TEST_CASE("verify_certificate flags corrupted constants") {
    auto q = QQ();
    auto w2 = places_above(q, Int(2))[0];
    auto spec = PAdicFactorSpec::make(seq_n(q), w2, Rat(1));
    auto cert = aqc_certificate(spec, 3);
    REQUIRE(!cert.good.empty());
    cert.good[0].exponent += 1;  // corrupt
    auto rep = verify_certificate(cert, spec, 50);
    CHECK_FALSE(rep.ok());
    CHECK(rep.mismatches[0].expected_exponent == cert.good[0].exponent);
}

TEST_CASE("certificate chain: good fraction is nondecreasing (P3b)") {
    auto q = QQ();
    auto u = from_xi_product(q, {AlgebraicNumber(2)});
    auto w3 = places_above(q, Int(3))[0];
    auto spec = PAdicFactorSpec::make(u, w3, Rat(1));
    double prev = 0.0;
    for (long depth = 1; depth <= 4; ++depth) {
        auto cert = aqc_certificate(spec, depth);
        double frac = cert.good_fraction();
        CHECK(frac >= prev - 1e-12);
        prev = frac;
        // |G_k|/d_k = (p^k - zeros)/p^k in the single-zero case
        CHECK(frac >= 1.0 - 2.0 / std::pow(3.0, depth));
    }
}

TEST_CASE("P2: certified exponents grow sublinearly along the chain") {
    auto q = QQ();
    auto u = from_xi_product(q, {AlgebraicNumber(2)});
    auto w3 = places_above(q, Int(3))[0];
    auto spec = PAdicFactorSpec::make(u, w3, Rat(1));
    // log f(n) = -q(n) log p with q(n) = v_3(2^n - 1) <= 1 + log_3 n = o(n)
    for (long n = 2; n <= 2000; n *= 3) {
        auto qn = spec.normalized_exponent(n);
        REQUIRE(qn.has_value());
        CHECK(*qn <= Rat(2) + Rat(n, 8));  // crude sublinear envelope
        CHECK(mpq_class(*qn).get_d() <= 1.0 + std::log(double(n)) / std::log(3.0));
    }
}

TEST_CASE("stability precondition is enforced") {
    auto q = QQ();
    // 2^n + (-2)^n is not 2-stable at an odd place? it is v-stable at 3-adic;
    // the genuinely unstable case: essential part sections vanish
    auto u = *seq_add(geo(q, Rat(2)), geo(q, Rat(-2)));
    auto w3 = places_above(q, Int(3))[0];
    // both roots are units at 3; section 2m+1 of essential part cancels
    CHECK_THROWS_AS(PAdicFactorSpec::make(u, w3, Rat(1)), StabilityError);
}

TEST_CASE("section_assemble") {
    // two constant parts on classes mod 2 -> quasi-polynomial with d = 2
    QuasiPolynomial c1{1, {qpoly({Rat(3)})}, 0};
    QuasiPolynomial c2{1, {qpoly({Rat(5)})}, 0};
    auto glued = section_assemble({SectionPart(c1), SectionPart(c2)}, 2);
    REQUIRE(std::holds_alternative<QuasiPolynomial>(glued));
    auto qp = std::get<QuasiPolynomial>(glued);
    CHECK(qp.modulus == 2);
    CHECK(qp.eval(4) == Rat(3));
    CHECK(qp.eval(7) == Rat(5));

    // single part, L = 1: identity
    auto single = section_assemble({SectionPart(c1)}, 1);
    CHECK(std::get<QuasiPolynomial>(single).eval(9) == Rat(3));

    // |n|_2 on evens (as a certificate on m), constant 1 on odds
    auto q = QQ();
    auto w2 = places_above(q, Int(2))[0];
    auto spec = PAdicFactorSpec::make(seq_n(q), w2, Rat(1));
    auto cert = aqc_certificate(spec, 3);
    QuasiPolynomial ones{1, {qpoly({Rat(1)})}, 0};
    auto mixed = section_assemble({SectionPart(cert), SectionPart(ones)}, 2);
    REQUIRE(std::holds_alternative<AQCCertificate>(mixed));
    auto mc = std::get<AQCCertificate>(mixed);
    // lifted count: (L-1) d_i + |G_i| good classes mod L d_i
    long d = cert.modulus.get_si();
    CHECK(mc.modulus == Int(2 * d));
    CHECK(static_cast<long>(mc.good.size()) == d + static_cast<long>(cert.good.size()));
    // even classes n = 2m carry f(n) = |m|_2, exponent v_2(n) - 1
    for (const auto& g : mc.good) {
        long n = g.cls.get_si();
        if (n % 2 == 1) continue;
        CHECK(g.exponent == Rat(val_p(Int(n), Int(2)) - 1));
    }
}

TEST_CASE("quasi-polynomial gluing with genuine polynomials") {
    // f(2m) = m^2, f(2m+1) = 3m: modulus 2 parts in m
    QuasiPolynomial p0{1, {qpoly({Rat(0), Rat(0), Rat(1)})}, 0};
    QuasiPolynomial p1{1, {qpoly({Rat(0), Rat(3)})}, 0};
    auto glued = std::get<QuasiPolynomial>(section_assemble({SectionPart(p0), SectionPart(p1)}, 2));
    for (long n = 2; n < 20; ++n) {
        Rat expect = (n % 2 == 0) ? Rat(n / 2) * Rat(n / 2) : Rat(3) * Rat((n - 1) / 2);
        CHECK(glued.eval(n) == expect);
    }
}

TEST_CASE("fs counterexample generator") {
    FsCounterexample fs({Int(1), Int(7), Int(13), Int(29), Int(31)});
    CHECK(fs.eval(4) == Rat(1));   // even
    CHECK(fs.eval(1) == Rat(7));   // 1 mod 4
    CHECK(fs.eval(3) == Rat(13));  // 3 mod 8
    CHECK(fs.eval(7) == Rat(29));  // 7 mod 16
    CHECK(fs.eval(0) == Rat(1));
    CHECK(fs.eval(2) == Rat(1));
    CHECK(fs.eval(5) == Rat(7));

    CHECK_THROWS_AS(fs.eval(15 + 16), Error);  // needs s_6
    CHECK_THROWS_AS(FsCounterexample({Int(2)}), Error);
    // growth cap violation: s_3 enormous
    Int huge = pow_int(Int(2), 40);
    CHECK_THROWS_AS(FsCounterexample({Int(1), Int(3), huge}), Error);
}
