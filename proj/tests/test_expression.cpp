#include <cmath>

#include <gtest/gtest.h>

#include "blowup/expression.hpp"

using namespace blowup;

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2*3")(0), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2)*3")(0), 9.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0), 512.0);  // right associative
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("8/4/2")(0), 1.0);
}

TEST(Expression, VariableAndFunctions) {
  const auto e = Expression::parse("t^2/3 + exp(-1/t) - ln(t)");
  const double t = 0.4;
  EXPECT_NEAR(e(t), t * t / 3 + std::exp(-1 / t) - std::log(t), 1e-15);
  EXPECT_NEAR(Expression::parse("1/(-log(u))", "u")(0.1), 1 / std::log(10.0), 1e-15);
}

TEST(Expression, UnicodeOperators) {
  EXPECT_DOUBLE_EQ(Expression::parse("2\xC2\xB7t \xE2\x88\x92 1")(3.0), 5.0);
}

TEST(Expression, DanglingCaretReportsPosition) {
  try {
    Expression::parse("t^");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position, 2u);
    EXPECT_NE(std::string(e.what()).find("position 2"), std::string::npos);
  }
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression::parse("(t"), ParseError);
  EXPECT_THROW(Expression::parse("t t"), ParseError);
  EXPECT_THROW(Expression::parse("sin(t)"), ParseError);
  EXPECT_THROW(Expression::parse("ln t"), ParseError);
  EXPECT_THROW(Expression::parse("x", "t"), ParseError);
}
