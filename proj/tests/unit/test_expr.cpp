#include <doctest.h>

#include <cmath>

#include "expr.hpp"

using namespace mslab;

TEST_SUITE("expr") {
  TEST_CASE("evaluation") {
    CHECK(Expr::parse("1", 2).eval({0.3, 0.7, 0}) == 1.0);
    CHECK(Expr::parse("x1^2 + x2^2", 2).eval({1, 2, 0}) == doctest::Approx(5.0));
    CHECK(Expr::parse("-2^2", 2).eval({0, 0, 0}) == doctest::Approx(-4.0));
    CHECK(Expr::parse("2^3^2", 2).eval({0, 0, 0}) == doctest::Approx(512.0));
    CHECK(Expr::parse("10 - 4 - 3", 2).eval({0, 0, 0}) == doctest::Approx(3.0));
    CHECK(Expr::parse("max(x1, x2) / min(x1, x2)", 2).eval({2, 8, 0}) == doctest::Approx(4.0));
    CHECK(Expr::parse("dist(0, 0, 0)", 3).eval({1, 2, 2}) == doctest::Approx(3.0));
    CHECK(Expr::parse("abs(sin(x1)) + exp(0) * cos(0)", 2).eval({-1, 0, 0}) ==
          doctest::Approx(std::sin(1.0) + 1.0));
  }

  TEST_CASE("syntax errors carry the offset") {
    try {
      Expr::parse("x1 +", 2);
      FAIL("expected a syntax error");
    } catch (const ExprError& e) {
      CHECK(e.offset() == 4);
      CHECK(e.code() == ErrorCode::kParse);
    }
    CHECK_THROWS_AS(Expr::parse("x3", 2), ExprError);
    CHECK_THROWS_AS(Expr::parse("foo(1)", 2), ExprError);
    CHECK_THROWS_AS(Expr::parse("min(1)", 2), ExprError);
    CHECK_THROWS_AS(Expr::parse("(1 + 2", 2), ExprError);
    CHECK_THROWS_AS(Expr::parse("1 2", 2), ExprError);
  }

  TEST_CASE("print round trip") {
    for (const char* text : {"x1^2 + x2^2", "-x1 * (2 - x2) / 3", "2^3^2", "dist(0.5, 0.5) + max(x1, -x2)",
                             "1e-3 * exp(-x1)"}) {
      const Expr e = Expr::parse(text, 2);
      const Expr again = Expr::parse(e.print(), 2);
      CHECK(again == e);
      CHECK(again.eval({0.3, 0.4, 0}) == e.eval({0.3, 0.4, 0}));
    }
  }
}
