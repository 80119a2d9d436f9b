#include <catch2/catch_amalgamated.hpp>
#include <coweq/field.hpp>

using coweq::Field;
using coweq::Scalar;

TEST_CASE("rational arithmetic is exact") {
    Field q(0);
    Scalar a = q.parse("1/3");
    Scalar b = q.parse("-2/7");
    CHECK((a + b).str() == "1/21");
    CHECK((a * b).str() == "-2/21");
    CHECK((a - a).is_zero());
    CHECK((b / b) == q.one());
    CHECK((a.inverse()).str() == "3");
    Scalar s = q.zero();
    for (int i = 0; i < 10; ++i) s += q.parse("1/10");
    CHECK(s == q.one());
}

TEST_CASE("prime field arithmetic") {
    Field f5(5);
    CHECK(f5.of(7) == f5.of(2));
    CHECK(f5.of(-1) == f5.of(4));
    CHECK((f5.of(3) * f5.of(4)) == f5.of(2));
    CHECK(f5.of(3).inverse() == f5.of(2));
    for (int r = 1; r < 5; ++r) CHECK((f5.of(r) * f5.of(r).inverse()) == f5.one());
    CHECK(f5.parse("3 mod 5") == f5.of(3));
    CHECK(f5.parse("9") == f5.of(4));
    CHECK(f5.of(2).str() == "2 mod 5");
}

TEST_CASE("field validation") {
    CHECK_THROWS_AS(Field(4), coweq::validation_error);
    CHECK_THROWS_AS(Field(1), coweq::validation_error);
    CHECK_NOTHROW(Field(2));
    CHECK_NOTHROW(Field(97));
    Field q(0), f2(2);
    CHECK_THROWS_AS(q.parse("1/0"), coweq::validation_error);
    CHECK_THROWS_AS(q.parse("junk"), coweq::validation_error);
    CHECK_THROWS_AS(f2.parse("1 mod 3"), coweq::validation_error);
    CHECK_THROWS_AS(q.of(1) + f2.of(1), coweq::validation_error);
    CHECK_THROWS_AS(q.zero().inverse(), coweq::validation_error);
}

TEST_CASE("negation and equality") {
    Field q(0), f7(7);
    CHECK(-q.of(0) == q.of(0));
    CHECK(-f7.of(0) == f7.of(0));
    CHECK(-f7.of(3) == f7.of(4));
    CHECK(q.of(2) != f7.of(2));
    CHECK(q.parse("-4/6").str() == "-2/3");
}
