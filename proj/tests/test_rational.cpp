#include "doctest.h"

#include "probrobust/errors.hpp"
#include "probrobust/rational.hpp"

#include <limits>

using probrobust::Rational;

TEST_CASE("rational normalizes sign and common factors") {
    const Rational r(6, -8);
    CHECK(r.num() == -3);
    CHECK(r.den() == 4);
    CHECK(Rational(0, -5) == Rational(0));
    CHECK(Rational(0, -5).den() == 1);
    CHECK_THROWS_AS(Rational(1, 0), probrobust::ValidationError);
}

TEST_CASE("rational arithmetic is exact") {
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 4) - Rational(3, 4) == Rational(-1, 2));
    CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
    CHECK(Rational(2, 3) / Rational(4, 9) == Rational(3, 2));
    CHECK(-Rational(5, 7) == Rational(-5, 7));
    CHECK_THROWS_AS(Rational(1) / Rational(0), probrobust::ValidationError);
}

TEST_CASE("rational ordering cross-multiplies without rounding") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(-1, 3));
    const std::int64_t big = std::numeric_limits<std::int64_t>::max();
    CHECK(Rational(big - 1, big) < Rational(1));
    CHECK(Rational(big, big - 1) > Rational(1));
}

TEST_CASE("rational overflow is reported, not wrapped") {
    const std::int64_t big = std::numeric_limits<std::int64_t>::max();
    CHECK_THROWS_AS(Rational(big) + Rational(1), probrobust::RationalOverflow);
    CHECK_THROWS_AS(Rational(1, big) * Rational(1, big - 1), probrobust::RationalOverflow);
    // Reduction happens in 128 bits before the range check.
    CHECK(Rational(big, 3) * Rational(3, big) == Rational(1));
}

TEST_CASE("rational parse accepts fractions, integers and exact decimals") {
    CHECK(Rational::parse("1/4") == Rational(1, 4));
    CHECK(Rational::parse("-3") == Rational(-3));
    CHECK(Rational::parse("0.25") == Rational(1, 4));
    CHECK(Rational::parse("0.3") == Rational(3, 10));
    CHECK(Rational::parse("2/6") == Rational(1, 3));
    CHECK(Rational::parse(".5") == Rational(1, 2));
}

TEST_CASE("rational parse rejects malformed and over-fine literals") {
    CHECK_THROWS_AS(Rational::parse(""), probrobust::ParseError);
    CHECK_THROWS_AS(Rational::parse("1/"), probrobust::ParseError);
    CHECK_THROWS_AS(Rational::parse("abc"), probrobust::ParseError);
    CHECK_THROWS_AS(Rational::parse("0.1.2"), probrobust::ParseError);
    // 1/100000 reduces to a denominator above 2^16.
    CHECK_THROWS_AS(Rational::parse("0.00001"), probrobust::ParseError);
    CHECK(Rational::parse("0.0000152587890625") == Rational(1, 65536));
}

TEST_CASE("rational to_string round trips through parse") {
    for (const Rational r : {Rational(3, 7), Rational(-5), Rational(0), Rational(1, 65536)}) {
        CHECK(Rational::parse(r.to_string()) == r);
    }
    CHECK(Rational(1, 4).to_double() == 0.25);
}
