#include <adelic/numfield.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace adelic;

static QPoly P(std::initializer_list<long> cs) {
    std::vector<Rat> v;
    for (long c : cs) v.push_back(Rat(c));
    return QPoly(std::move(v));
}

// K = Q(zeta_3), minimal polynomial x^2 + x + 1
static FieldPtr zeta3_field() { return make_number_field(P({1, 1, 1})); }

TEST_CASE("nf_create basics") {
    auto q = make_number_field(P({-1, 1}));  // x - 1
    CHECK(q->degree() == 1);
    CHECK(q->real_embedding_count() == 1);

    auto k = zeta3_field();
    CHECK(k->degree() == 2);
    CHECK(k->real_embedding_count() == 0);
    CHECK(k->complex_pair_count() == 1);

    // reducible input carries a witness factor
    try {
        make_number_field(P({-1, 0, 1}));
        FAIL("expected ReduciblePolynomial");
    } catch (const ReduciblePolynomial& e) {
        CHECK(e.factor.find("x") != std::string::npos);
    }

    CHECK_THROWS_AS(make_number_field(P({-1, 0, 2})), NonMonic);
}

TEST_CASE("field arithmetic in Q(zeta_3)") {
    auto k = zeta3_field();
    auto z = AlgebraicNumber::generator(k);

    // zeta * zeta = -1 - zeta
    auto z2 = z * z;
    CHECK(z2 == AlgebraicNumber(k, {Rat(-1), Rat(-1)}));
    // zeta + zeta^2 = -1
    CHECK((z + z2) == AlgebraicNumber::from_rat(k, Rat(-1)));
    // 1/2 * 2 = 1 (degree-1 arithmetic through promotion)
    CHECK((AlgebraicNumber(Rat(1, 2)) * AlgebraicNumber(2)) == AlgebraicNumber(1));
    // inverse: zeta^-1 = zeta^2
    CHECK(z.inverse() == z2);
    CHECK_THROWS_AS(AlgebraicNumber::from_rat(k, Rat(0)).inverse(), DivisionByZero);

    auto k2 = make_number_field(P({2, 0, 1}));  // x^2+2, a different field
    CHECK_THROWS_AS(z + AlgebraicNumber::generator(k2), FieldMismatch);
}

TEST_CASE("minimal polynomials and norms") {
    auto k = zeta3_field();
    auto z = AlgebraicNumber::generator(k);
    CHECK(z.min_poly() == P({1, 1, 1}));
    CHECK((AlgebraicNumber(5) * z).min_poly() == P({25, 5, 1}));
    CHECK(z.norm() == Rat(1));
    CHECK((AlgebraicNumber(5) * z).norm() == Rat(25));
    CHECK(AlgebraicNumber::from_rat(k, Rat(1, 2)).min_poly() == qpoly({Rat(-1, 2), Rat(1)}));
    CHECK(AlgebraicNumber::from_rat(k, Rat(3)).norm() == Rat(9));
}

TEST_CASE("is_root_of_unity") {
    auto k = zeta3_field();
    auto z = AlgebraicNumber::generator(k);
    auto n = is_root_of_unity(z);
    REQUIRE(n.has_value());
    CHECK(*n == 3);

    auto m1 = is_root_of_unity(AlgebraicNumber(-1));
    REQUIRE(m1.has_value());
    CHECK(*m1 == 2);

    CHECK_FALSE(is_root_of_unity(AlgebraicNumber(2)).has_value());
    CHECK_FALSE(is_root_of_unity(AlgebraicNumber(5) * z).has_value());
    CHECK_THROWS_AS(is_root_of_unity(AlgebraicNumber(0)), ZeroInput);

    // -zeta has order 6
    auto m6 = is_root_of_unity(-z);
    REQUIRE(m6.has_value());
    CHECK(*m6 == 6);
}

TEST_CASE("heights") {
    auto k = zeta3_field();
    auto z = AlgebraicNumber::generator(k);

    // h(1/2) = log 2
    Height h_half = height(AlgebraicNumber(Rat(1, 2)));
    CHECK(h_half.mantissa.compare(Rat(2)) == 0);
    CHECK(h_half.divisor == 1);

    // h(zeta_3) = 0
    CHECK(height(z).is_zero());

    // h(5 zeta_3) = log 5: minimal polynomial x^2+5x+25, measure 25, divisor 2
    Height h5z = height(AlgebraicNumber(5) * z);
    CHECK(h5z.mantissa.compare(Rat(25)) == 0);
    CHECK(h5z.divisor == 2);
    Height h5 = height(AlgebraicNumber(5));
    CHECK(h5.equals(h5z));

    // h(a^k) = k h(a)
    Height h2 = height(AlgebraicNumber(2));
    Height h8 = height(AlgebraicNumber(8));
    CHECK(h2.scaled_equals(3, h8));
    CHECK_FALSE(h2.scaled_equals(2, h8));

    // invariance under root-of-unity multiple (irrational case): h(sqrt2) = h(-sqrt2)
    auto ks = make_number_field(P({-2, 0, 1}));
    auto s = AlgebraicNumber::generator(ks);
    CHECK(height(s).equals(height(-s)));
    // h(sqrt2) = (1/2) log 2
    CHECK(height(s).mantissa.compare(Rat(2)) == 0);
    CHECK(height(s).divisor == 2);

    CHECK_THROWS_AS(height(AlgebraicNumber(0)), ZeroInput);
}

TEST_CASE("compare_abs") {
    auto k = zeta3_field();
    auto z = AlgebraicNumber::generator(k);
    auto five = AlgebraicNumber::from_rat(k, Rat(5));

    // |5 zeta| = |5 zeta^2| = |5| at the unique archimedean place
    CHECK(compare_abs(five * z, five * z * z, 0) == 0);
    CHECK(compare_abs(five * z, five, 0) == 0);
    CHECK(compare_abs(AlgebraicNumber::from_rat(k, Rat(1, 2)), five, 0) == -1);
    CHECK(compare_abs(five, AlgebraicNumber::from_rat(k, Rat(1, 2)), 0) == 1);

    // rationals: |2| = |-2|
    auto q = rationals_field();
    CHECK(compare_abs(AlgebraicNumber::from_rat(q, Rat(2)),
                      AlgebraicNumber::from_rat(q, Rat(-2)), 0) == 0);

    // real quadratic field: two real embeddings order sqrt2 against 3/2
    auto ks = make_number_field(P({-2, 0, 1}));
    auto s = AlgebraicNumber::generator(ks);
    auto three_half = AlgebraicNumber::from_rat(ks, Rat(3, 2));
    CHECK(compare_abs(s, three_half, 0) == -1);  // |-sqrt2| < 3/2
    CHECK(compare_abs(s, three_half, 1) == -1);  // |sqrt2| < 3/2
    CHECK(compare_abs(s, AlgebraicNumber::from_rat(ks, Rat(1)), 0) == 1);
}

TEST_CASE("embeddings are certified and ordered") {
    auto k = make_number_field(P({-2, 0, 0, 1}));  // x^3 - 2
    auto emb = k->embeddings(Rat(1, 1000));
    REQUIRE(emb.size() == 2);
    CHECK(emb[0].is_real);
    CHECK_FALSE(emb[1].is_real);
    // real root is 2^(1/3) ~ 1.2599
    CHECK(emb[0].real_iv.lo > Rat(5, 4));
    CHECK(emb[0].real_iv.hi < Rat(13, 10));
    // complex pair has positive imaginary part
    CHECK(emb[1].center.im > 0);
}
