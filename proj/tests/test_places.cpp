#include <adelic/places.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace adelic;

static QPoly P(std::initializer_list<long> cs) {
    std::vector<Rat> v;
    for (long c : cs) v.push_back(Rat(c));
    return QPoly(std::move(v));
}

static FieldPtr zeta3_field() { return make_number_field(P({1, 1, 1})); }

TEST_CASE("places_above splitting data") {
    auto k = zeta3_field();

    // x^2+x+1 irreducible mod 2: inert place
    auto w2 = places_above(k, Int(2));
    REQUIRE(w2.size() == 1);
    CHECK(w2[0].e() == 1);
    CHECK(w2[0].f() == 2);
    CHECK(w2[0].delta() == 2);

    // x^2+x+1 = (x-2)(x-4) mod 7: split
    auto w7 = places_above(k, Int(7));
    REQUIRE(w7.size() == 2);
    CHECK(w7[0].delta() == 1);
    CHECK(w7[1].delta() == 1);

    // ramified at 3
    auto w3 = places_above(k, Int(3));
    REQUIRE(w3.size() == 1);
    CHECK(w3[0].e() == 2);
    CHECK(w3[0].f() == 1);

    // rationals
    auto q = rationals_field();
    auto w5 = places_above(q, Int(5));
    REQUIRE(w5.size() == 1);
    CHECK(w5[0].e() == 1);
    CHECK(w5[0].f() == 1);
    CHECK(w5[0].selector() == "5:0");

    // sum of deltas above a prime equals the degree
    CHECK(w2[0].delta() == k->degree());
    CHECK(w7[0].delta() + w7[1].delta() == k->degree());
    CHECK(w3[0].delta() == k->degree());
}

TEST_CASE("abs_value at finite places") {
    auto k = zeta3_field();
    auto w2 = places_above(k, Int(2))[0];
    auto half = AlgebraicNumber::from_rat(k, Rat(1, 2));
    auto five = AlgebraicNumber::from_rat(k, Rat(5));

    AbsValue v = abs_value(half, w2);
    CHECK_FALSE(v.arch);
    CHECK(v.p == 2);
    CHECK(v.q == Rat(-1));  // |1/2|_w = 2 = p^{-(-1)}

    CHECK(abs_value(five, w2).q == Rat(0));  // unit

    auto q = rationals_field();
    auto w3 = places_above(q, Int(3))[0];
    CHECK(abs_value(AlgebraicNumber::from_rat(q, Rat(3)), w3).q == Rat(1));  // 1/3

    CHECK_THROWS_AS(abs_value(AlgebraicNumber::from_rat(k, Rat(0)), w2), ZeroInput);

    // ramified: |zeta - 1|_w = 3^{-1/2}
    auto w3k = places_above(k, Int(3))[0];
    auto z = AlgebraicNumber::generator(k);
    CHECK(abs_value(z - AlgebraicNumber(1), w3k).q == Rat(1, 2));
}

TEST_CASE("normalization and product formula on samples") {
    auto k = zeta3_field();
    auto z = AlgebraicNumber::generator(k);
    std::vector<AlgebraicNumber> samples = {
        AlgebraicNumber(5) * z,
        z - AlgebraicNumber(1),
        AlgebraicNumber::from_rat(k, Rat(7, 12)),
        (AlgebraicNumber(2) * z + AlgebraicNumber(3)) * (z - AlgebraicNumber(7)),
    };
    std::vector<Int> primes = {Int(2), Int(3), Int(5), Int(7), Int(13)};
    for (const auto& a : samples) {
        Rat nrm = a.norm();
        for (const Int& p : primes) {
            // prod over w|p of |a|_w^{delta_w} = |Norm(a)|_p
            Rat vsum(0);
            for (const Place& w : places_above(k, p)) {
                vsum += w_valuation(a, w) * w.delta();
            }
            CHECK(vsum == Rat(val_p(nrm, p)));
        }
    }
}

TEST_CASE("abs_value multiplicativity and ultrametric") {
    auto k = zeta3_field();
    auto w = places_above(k, Int(2))[0];
    auto z = AlgebraicNumber::generator(k);
    auto a = AlgebraicNumber(3) * z + AlgebraicNumber(Rat(1, 2));
    auto b = z - AlgebraicNumber(4);
    CHECK(w_valuation(a * b, w) == w_valuation(a, w) + w_valuation(b, w));
    Rat va = w_valuation(a, w), vb = w_valuation(b, w);
    if (!(a + b).is_zero()) {
        Rat vab = w_valuation(a + b, w);
        CHECK(vab >= std::min(va, vb));
        if (va != vb) CHECK(vab == std::min(va, vb));
    }
}

TEST_CASE("embed_local") {
    auto k = zeta3_field();
    auto w7s = places_above(k, Int(7));
    auto z = AlgebraicNumber::generator(k);

    // pick the place whose local root is congruent to 2 mod 7
    int pick = -1;
    for (int i = 0; i < 2; ++i) {
        LocalElement ze = embed_local(z, w7s[i], 1);
        REQUIRE(ze.c.size() == 1);
        if (ze.c[0] == 2) pick = i;
    }
    REQUIRE(pick >= 0);

    LocalElement c2 = embed_local(AlgebraicNumber::from_rat(k, Rat(2)), w7s[pick], 3);
    REQUIRE(c2.c.size() == 1);
    CHECK(c2.c[0] % 343 == 2);

    // Hensel lift of 2 mod 49 is 30
    LocalElement ze = embed_local(z, w7s[pick], 2);
    REQUIRE(ze.c.size() == 1);
    CHECK(ze.c[0] % 49 == 30);

    // negative valuation tracked through the shift
    auto q = rationals_field();
    auto w2 = places_above(q, Int(2))[0];
    LocalElement h = embed_local(AlgebraicNumber::from_rat(q, Rat(1, 2)), w2, 5);
    CHECK(h.shift == -1);
    auto [v, exact] = h.valuation();
    CHECK(exact);
    CHECK(v == Rat(-1));

    // embedding respects arithmetic: (zeta * zeta) embeds to (embed zeta)^2
    LocalElement z2a = embed_local(z * z, w7s[pick], 4);
    LocalElement z2b = embed_local(z, w7s[pick], 4);
    CHECK(z2a.equals_at_min_precision(z2b * z2b));
}

TEST_CASE("local log and exp") {
    auto q = rationals_field();
    auto w5 = places_above(q, Int(5))[0];

    // log(1) = 0
    LocalElement one = embed_local(AlgebraicNumber(1), w5, 6);
    CHECK(local_log_exp(one, LocalAnalyticMode::Log).known_zero_at_precision());

    // exp(log(6)) = 6 to precision 4
    LocalElement six = embed_local(AlgebraicNumber(6), w5, 6);
    LocalElement l = local_log_exp(six, LocalAnalyticMode::Log);
    LocalElement back = local_log_exp(l, LocalAnalyticMode::Exp);
    LocalElement six4 = embed_local(AlgebraicNumber(6), w5, 4);
    LocalElement diff = back - six4;
    auto [dv, dexact] = diff.valuation();
    CHECK((diff.known_zero_at_precision() || dv >= 4));

    // log(2) at p=2 diverges: |2-1| = 1
    auto w2 = places_above(q, Int(2))[0];
    LocalElement two = embed_local(AlgebraicNumber(2), w2, 6);
    CHECK_THROWS_AS(local_log_exp(two, LocalAnalyticMode::Log), OutsideConvergenceDomain);
}

TEST_CASE("residue orders") {
    auto q = rationals_field();
    auto w7 = places_above(q, Int(7))[0];
    CHECK(residue_order(AlgebraicNumber(3), w7) == 6);
    CHECK(residue_order(AlgebraicNumber(2), w7) == 3);
    CHECK(residue_order(AlgebraicNumber(1), w7) == 1);

    // in the inert place of Q(zeta_3) above 2, zeta has order 3 in F_4
    auto k = zeta3_field();
    auto w2 = places_above(k, Int(2))[0];
    CHECK(residue_order(AlgebraicNumber::generator(k), w2) == 3);
}

TEST_CASE("index divisor rejection") {
    // Z[theta] for theta = sqrt(5) has index 2 in the ring of integers
    auto k = make_number_field(P({-5, 0, 1}));
    CHECK_THROWS_AS(places_above(k, Int(2)), IndexDivisor);
    // but 3 is fine
    auto w3 = places_above(k, Int(3));
    CHECK(w3.size() == 1);
    CHECK(w3[0].f() == 2);
}
