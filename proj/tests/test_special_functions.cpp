#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "blochwalk/special_functions.hpp"
#include "oracles.hpp"

using namespace blochwalk;

TEST(Theta3, MatchesSeriesOracle) {
  for (double q : {0.0, 1e-6, 0.1, 0.5, std::exp(-0.1), std::exp(-0.02), 0.99, 0.999}) {
    const double ref = oracle::theta3(q);
    EXPECT_NEAR(theta3(q), ref, 2e-15 * ref) << "q = " << q;
  }
}

TEST(Theta3, JacobiImaginaryTransform) {
  // theta3(exp(-pi t)) = theta3(exp(-pi / t)) / sqrt(t)
  for (double t : {0.05, 0.3, 1.0, 2.7}) {
    const double lhs = theta3(std::exp(-std::numbers::pi * t));
    const double rhs = theta3(std::exp(-std::numbers::pi / t)) / std::sqrt(t);
    EXPECT_NEAR(lhs, rhs, 1e-13 * lhs) << "t = " << t;
  }
}

TEST(Theta3, RejectsOutsideUnitInterval) {
  EXPECT_THROW(theta3(1.0), std::domain_error);
  EXPECT_THROW(theta3(-0.1), std::domain_error);
  EXPECT_THROW(theta3(std::nan("")), std::domain_error);
  EXPECT_EQ(theta3(0.0), 1.0);
}

TEST(Bessel, MatchesPowerSeriesOracle) {
  for (double x : {0.0, 1e-3, 0.5, 1.0, 2.5, 5.0, 13.5, 30.0, 47.7}) {
    for (int p : {0, 1, 2, 5, 10, 20, 35, 60}) {
      const double ref = oracle::bessel_j(p, x);
      EXPECT_NEAR(bessel_j(p, x), ref, 1e-14) << "p = " << p << ", x = " << x;
    }
  }
}

TEST(Bessel, AgreesWithStandardLibrary) {
  for (double x : {0.3, 7.0, 21.0, 80.0, 300.0}) {
    const BesselRow row = bessel_row(x, 0, 120);
    for (int p = 0; p <= 120; p += 7)
      EXPECT_NEAR(row(p), std::cyl_bessel_j(static_cast<double>(p), x), 1e-12)
          << "p = " << p << ", x = " << x;
  }
}

TEST(Bessel, NegativeOrdersAndArguments) {
  for (double x : {0.7, 4.0, 11.0}) {
    for (int p = 0; p < 15; ++p) {
      const double jp = bessel_j(p, x);
      const double sign = (p % 2 == 0) ? 1.0 : -1.0;
      EXPECT_DOUBLE_EQ(bessel_j(-p, x), sign * jp);
      EXPECT_DOUBLE_EQ(bessel_j(p, -x), sign * jp);
    }
  }
}

TEST(Bessel, RowRangeAndLookup) {
  const BesselRow row = bessel_row(3.0, -4, 9);
  EXPECT_EQ(row.size(), 14u);
  EXPECT_EQ(row.p_min, -4);
  EXPECT_EQ(row.p_max, 9);
  for (int p = -4; p <= 9; ++p) EXPECT_DOUBLE_EQ(row(p), bessel_j(p, 3.0));
  EXPECT_THROW(bessel_row(3.0, 5, 4), std::invalid_argument);
}

TEST(Bessel, ZeroArgument) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  for (int p : {-3, -1, 1, 2, 40}) EXPECT_EQ(bessel_j(p, 0.0), 0.0);
}

TEST(Bessel, RejectsBadArguments) {
  EXPECT_THROW(bessel_j(0, std::nan("")), std::domain_error);
  EXPECT_THROW(bessel_j(0, std::numeric_limits<double>::infinity()), std::domain_error);
  EXPECT_THROW(bessel_j(0, 2e4), std::domain_error);
}

// Sum rules and the three-term recurrence hold for every argument.
TEST(BesselProperty, SumRulesAndRecurrence) {
  for (double x = 0.25; x < 60.0; x += 3.7) {
    const int reach = static_cast<int>(x) + 60;
    const BesselRow row = bessel_row(x, -reach, reach);
    double squares = 0.0, plain = 0.0;
    for (int p = -reach; p <= reach; ++p) {
      squares += row(p) * row(p);
      plain += row(p);
    }
    EXPECT_NEAR(squares, 1.0, 1e-13) << "x = " << x;
    EXPECT_NEAR(plain, 1.0, 1e-13) << "x = " << x;
    for (int p = -reach + 1; p < reach; ++p)
      EXPECT_NEAR(row(p - 1) + row(p + 1), 2.0 * p / x * row(p), 1e-13 * (1.0 + std::abs(p / x)))
          << "p = " << p << ", x = " << x;
  }
}
