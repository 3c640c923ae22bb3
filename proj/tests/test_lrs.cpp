#include <adelic/lrs.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace adelic;

static QPoly P(std::initializer_list<long> cs) {
    std::vector<Rat> v;
    for (long c : cs) v.push_back(Rat(c));
    return QPoly(std::move(v));
}

static FieldPtr QQ() { return rationals_field(); }

static PolyExpSeq geo(const FieldPtr& f, Rat root, Rat coeff = Rat(1)) {
    return PolyExpSeq::geometric(f, AlgebraicNumber(root), AlgebraicNumber(coeff));
}

// the Example 2.4 sequence (1/2)^n + (-1/2)^n + 5^n + 2(5z)^n + 3(5z^2)^n
static std::pair<FieldPtr, PolyExpSeq> example_2_4() {
    auto k = make_number_field(P({1, 1, 1}));
    auto z = AlgebraicNumber::generator(k);
    auto five = AlgebraicNumber::from_rat(k, Rat(5));
    std::vector<SeqTerm> ts;
    auto cpoly = [&](AlgebraicNumber c) {
        APoly p;
        p.c = {c};
        return p;
    };
    ts.push_back({cpoly(AlgebraicNumber(1)), AlgebraicNumber::from_rat(k, Rat(1, 2))});
    ts.push_back({cpoly(AlgebraicNumber(1)), AlgebraicNumber::from_rat(k, Rat(-1, 2))});
    ts.push_back({cpoly(AlgebraicNumber(1)), five});
    ts.push_back({cpoly(AlgebraicNumber(2)), five * z});
    ts.push_back({cpoly(AlgebraicNumber(3)), five * z * z});
    return {k, *PolyExpSeq::make(k, ts)};
}

TEST_CASE("term evaluation") {
    auto [k, u] = example_2_4();
    CHECK(u.term(0) == AlgebraicNumber::from_rat(k, Rat(8)));   // coefficient sum 1+1+1+2+3
    CHECK(u.term(3) == AlgebraicNumber::from_rat(k, Rat(750))); // 1/8 - 1/8 + 125 + 250 + 375

    auto v = *seq_add(geo(QQ(), Rat(2)), geo(QQ(), Rat(1)));
    CHECK(v.term(5) == AlgebraicNumber(Rat(33)));
}

TEST_CASE("sequence ring operations") {
    auto q = QQ();
    auto two = geo(q, Rat(2));

    // 2^n + (-1)(2^n) = 0
    CHECK_FALSE(seq_add(two, geo(q, Rat(2), Rat(-1))).has_value());

    // (2^n + 1) + 3^n
    auto s = *seq_add(*seq_add(two, geo(q, Rat(1))), geo(q, Rat(3)));
    CHECK(s.size() == 3);

    // n 2^n + 2^n = (n+1) 2^n
    APoly id;
    id.c = {AlgebraicNumber(0), AlgebraicNumber(1)};
    auto n2n = *PolyExpSeq::make(q, {{id, AlgebraicNumber(2)}});
    auto sum = *seq_add(n2n, two);
    REQUIRE(sum.size() == 1);
    CHECK(sum.terms()[0].poly.c.size() == 2);
    CHECK(sum.terms()[0].poly.c[0] == AlgebraicNumber(1));
    CHECK(sum.terms()[0].poly.c[1] == AlgebraicNumber(1));

    // (2^n)(3^n) = 6^n
    auto prod = *seq_mul(two, geo(q, Rat(3)));
    REQUIRE(prod.size() == 1);
    CHECK(prod.terms()[0].root == AlgebraicNumber(6));

    // (2^n + (-2)^n)(2^n - (-2)^n) = 4^n - 4^n = 0
    auto a = *seq_add(two, geo(q, Rat(-2)));
    auto b = *seq_add(two, geo(q, Rat(-2), Rat(-1)));
    CHECK_FALSE(seq_mul(a, b).has_value());

    // interpolation soundness on small products
    auto c = *seq_add(two, geo(q, Rat(1)));
    auto d = *seq_add(geo(q, Rat(3)), geo(q, Rat(-1), Rat(5)));
    auto cd = *seq_mul(c, d);
    for (long n = 0; n <= 20; ++n) {
        CHECK(cd.term(n) == c.term(n) * d.term(n));
    }
}

TEST_CASE("sections") {
    auto q = QQ();
    auto u = *seq_add(geo(q, Rat(2)), geo(q, Rat(-2)));

    // a=2, b=0: 2*4^m
    auto s0 = section(u, 2, 0);
    REQUIRE(s0.has_value());
    REQUIRE(s0->size() == 1);
    CHECK(s0->terms()[0].root == AlgebraicNumber(4));
    CHECK(s0->terms()[0].poly.c[0] == AlgebraicNumber(2));

    // a=2, b=1: cancels
    CHECK_FALSE(section(u, 2, 1).has_value());

    // section consistency on a polynomial-coefficient example
    APoly id;
    id.c = {AlgebraicNumber(0), AlgebraicNumber(1)};
    auto w = *PolyExpSeq::make(q, {{id, AlgebraicNumber(3)}});
    auto w2 = *seq_add(w, geo(q, Rat(2), Rat(7)));
    for (long a = 1; a <= 4; ++a) {
        for (long b = 0; b < a; ++b) {
            auto s = section(w2, a, b);
            REQUIRE(s.has_value());
            for (long m = 0; m <= 8; ++m) {
                CHECK(s->term(m) == w2.term(a * m + b));
            }
        }
    }
}

TEST_CASE("essential parts of Example 2.4") {
    auto [k, u] = example_2_4();

    auto w2 = places_above(k, Int(2))[0];
    auto e2 = essential_part(u, w2);
    CHECK(e2.indices.size() == 2);
    CHECK(e2.max_value.q == Rat(-1));  // M = 2 = 2^{-(-1)}
    CHECK(e2.sequence.size() == 2);
    // the retained roots are +-1/2
    for (auto& t : e2.sequence.terms()) {
        CHECK(t.root.is_rational());
        CHECK(abs(t.root.as_rational()) == Rat(1, 2));
    }

    auto warch = archimedean_places(k)[0];
    auto ea = essential_part(u, warch);
    CHECK(ea.indices.size() == 3);
    CHECK(ea.max_value.real.compare(Rat(5)) == 0);

    // 2^n + 1 at the archimedean place of Q
    auto q = QQ();
    auto v = *seq_add(geo(q, Rat(2)), geo(q, Rat(1)));
    auto ev = essential_part(v, archimedean_places(q)[0]);
    CHECK(ev.sequence.size() == 1);
    CHECK(ev.sequence.terms()[0].root == AlgebraicNumber(2));
}

TEST_CASE("non-degeneracy") {
    auto q = QQ();
    CHECK(is_nondegenerate(*seq_add(geo(q, Rat(2)), geo(q, Rat(3)))));
    CHECK_FALSE(is_nondegenerate(*seq_add(geo(q, Rat(2)), geo(q, Rat(-2)))));
    auto [k, u] = example_2_4();
    CHECK_FALSE(is_nondegenerate(u));
}

TEST_CASE("v-stability of Example 2.4") {
    auto [k, u] = example_2_4();
    auto z = AlgebraicNumber::generator(k);

    auto w2 = places_above(k, Int(2))[0];
    auto v2 = is_v_stable(u, w2);
    CHECK_FALSE(v2.stable);
    CHECK(v2.L == 2);
    REQUIRE(v2.witness_class.has_value());
    CHECK(*v2.witness_class == 1);

    auto warch = archimedean_places(k)[0];
    auto va = is_v_stable(u, warch);
    CHECK(va.stable);
    CHECK(va.L == 3);
    REQUIRE(va.sections.size() == 3);
    // sections 6*125^m, (-zeta-2)*5*125^m, (zeta-1)*25*125^m
    auto check_section = [&](const PolyExpSeq& s, const AlgebraicNumber& coeff_times_5b) {
        REQUIRE(s.size() == 1);
        CHECK(s.terms()[0].root == AlgebraicNumber::from_rat(k, Rat(125)));
        CHECK(s.terms()[0].poly.c[0] == coeff_times_5b);
    };
    check_section(va.sections[0], AlgebraicNumber::from_rat(k, Rat(6)));
    check_section(va.sections[1], (-z - AlgebraicNumber(2)) * AlgebraicNumber(5));
    check_section(va.sections[2], (z - AlgebraicNumber(1)) * AlgebraicNumber(25));

    // non-degenerate sequences are v-stable everywhere (sampled places)
    auto q = QQ();
    auto nd = *seq_add(geo(q, Rat(2)), geo(q, Rat(3)));
    CHECK(is_v_stable(nd, archimedean_places(q)[0]).stable);
    CHECK(is_v_stable(nd, places_above(q, Int(2))[0]).stable);
    CHECK(is_v_stable(nd, places_above(q, Int(5))[0]).stable);
}

TEST_CASE("stability product law of Example 2.5") {
    auto q = QQ();
    auto two = geo(q, Rat(2));
    auto u = *seq_add(*seq_add(two, geo(q, Rat(-2))), geo(q, Rat(1)));  // 2^n+(-2)^n+1
    auto t = *seq_add(two, geo(q, Rat(-2), Rat(-1)));                   // 2^n-(-2)^n
    auto warch = archimedean_places(q)[0];

    auto eu = essential_part(u, warch);
    auto et = essential_part(t, warch);
    // product of essential parts cancels
    CHECK_FALSE(seq_mul(eu.sequence, et.sequence).has_value());
    // but the essential part of the product is 2^n - (-2)^n
    auto ut = seq_mul(u, t);
    REQUIRE(ut.has_value());
    auto eut = essential_part(*ut, warch);
    CHECK(eut.sequence == t);

    // for v-stable pairs the law does hold
    auto a = *seq_add(two, geo(q, Rat(1)));
    auto b = *seq_add(geo(q, Rat(3)), geo(q, Rat(1)));
    auto ea = essential_part(a, warch);
    auto eb = essential_part(b, warch);
    auto eab = essential_part(*seq_mul(a, b), warch);
    auto prod = seq_mul(ea.sequence, eb.sequence);
    REQUIRE(prod.has_value());
    CHECK(eab.sequence == *prod);
}

TEST_CASE("from_xi_product") {
    auto q = QQ();
    auto u1 = from_xi_product(q, {AlgebraicNumber(2)});
    CHECK(u1.size() == 2);
    CHECK(u1.term(3) == AlgebraicNumber(7));

    auto u2 = from_xi_product(q, {AlgebraicNumber(2), AlgebraicNumber(3)});
    CHECK(u2.size() == 4);  // 6^n - 3^n - 2^n + 1
    for (long n = 0; n <= 8; ++n) {
        Rat expected = (pow_rat(Rat(2), n) - 1) * (pow_rat(Rat(3), n) - 1);
        CHECK(u2.term(n) == AlgebraicNumber(expected));
    }

    auto u3 = from_xi_product(q, {AlgebraicNumber(2), AlgebraicNumber(-2)});
    for (long n = 0; n <= 8; ++n) {
        Rat expected = (pow_rat(Rat(2), n) - 1) * (pow_rat(Rat(-2), n) - 1);
        CHECK(u3.term(n) == AlgebraicNumber(expected));
    }

    CHECK_THROWS_AS(from_xi_product(q, {AlgebraicNumber(-1)}), RootOfUnityInput);

    // stability at assorted places
    for (Int p : {Int(2), Int(3), Int(5), Int(7)}) {
        CHECK(is_v_stable(u2, places_above(q, p)[0]).stable);
        CHECK(is_v_stable(u3, places_above(q, p)[0]).stable);
    }
    CHECK(is_v_stable(u2, archimedean_places(q)[0]).stable);
    CHECK(is_v_stable(u3, archimedean_places(q)[0]).stable);
}

TEST_CASE("stability agrees with brute force over small (a,b)") {
    auto q = QQ();
    std::vector<PolyExpSeq> seqs = {
        *seq_add(geo(q, Rat(2)), geo(q, Rat(-2))),
        *seq_add(*seq_add(geo(q, Rat(2)), geo(q, Rat(-2))), geo(q, Rat(1))),
        from_xi_product(q, {AlgebraicNumber(2), AlgebraicNumber(-2)}),
        *seq_add(geo(q, Rat(2)), geo(q, Rat(3))),
    };
    auto warch = archimedean_places(q)[0];
    for (const auto& u : seqs) {
        auto verdict = is_v_stable(u, warch);
        auto ess = essential_part(u, warch);
        bool brute_stable = true;
        long L = static_cast<long>(verdict.L);
        for (long a = 1; a <= 2 * L && brute_stable; ++a) {
            for (long b = 0; b < a && brute_stable; ++b) {
                if (!section(ess.sequence, a, b)) brute_stable = false;
            }
        }
        CHECK(verdict.stable == brute_stable);
    }
}

TEST_CASE("growth_check") {
    auto q = QQ();

    // u = 2^n - 1 at the 3-adic place, B = 1/2: no failures for n >= 1
    auto u = from_xi_product(q, {AlgebraicNumber(2)});
    auto w3 = places_above(q, Int(3))[0];
    GrowthBound b;
    b.scalar = Rat(1, 2);
    auto rep = growth_check(u, w3, b, 1, 100);
    CHECK(rep.failures.empty());

    // archimedean, product form xi = 2, B = 3/2: finitely many failures
    auto warch = archimedean_places(q)[0];
    GrowthBound b2;
    b2.scalar = Rat(3, 2);
    auto rep2 = growth_check(u, warch, b2, 0, 200);
    CHECK_FALSE(rep2.failures.empty());  // n = 0 fails (u_0 = 0), maybe n = 1
    CHECK_FALSE(rep2.failures_in_tail);
    CHECK(rep2.clear_from < 10);

    // unstable Example 2.4 at w | 2 with B = 0.9 M: all odd n fail
    auto kfieldseq = [] {
        auto k = make_number_field(QPoly({Rat(1), Rat(1), Rat(1)}));
        auto z = AlgebraicNumber::generator(k);
        auto five = AlgebraicNumber::from_rat(k, Rat(5));
        APoly one;
        one.c = {AlgebraicNumber(1)};
        APoly twoP;
        twoP.c = {AlgebraicNumber(2)};
        APoly threeP;
        threeP.c = {AlgebraicNumber(3)};
        std::vector<SeqTerm> ts = {
            {one, AlgebraicNumber::from_rat(k, Rat(1, 2))},
            {one, AlgebraicNumber::from_rat(k, Rat(-1, 2))},
            {one, five},
            {twoP, five * z},
            {threeP, five * z * z},
        };
        return std::make_pair(k, *PolyExpSeq::make(k, ts));
    }();
    auto w2 = places_above(kfieldseq.first, Int(2))[0];
    GrowthBound b3;
    b3.scalar = Rat(9, 10);
    b3.m_exponent = Rat(1);
    auto rep3 = growth_check(kfieldseq.second, w2, b3, 1, 60);
    CHECK(rep3.failures_in_tail);
    for (long n = 1; n <= 60; n += 2) {
        CHECK(std::find(rep3.failures.begin(), rep3.failures.end(), n) != rep3.failures.end());
    }

    GrowthBound bad;
    bad.scalar = Rat(3);
    CHECK_THROWS_AS(growth_check(u, w3, bad, 1, 10), BOutOfRange);
}
