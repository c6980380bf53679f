#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "blochwalk/walk.hpp"

using namespace blochwalk;
constexpr double pi = std::numbers::pi;

namespace {

double max_abs(const Eigen::Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); }

WalkerState wide_packet(const WalkParams& p) {
  const double r = 1 / std::sqrt(2.0);
  return gaussian_state(p, {0.05, CoinVector(r, -r), 0});
}

}  // namespace

TEST(Coins, Unitarity) {
  for (double th : {0.0, 0.3, pi / 4, 1.2, pi / 2}) {
    EXPECT_TRUE(is_unitary(coin_matrix(th)));
    EXPECT_TRUE(is_unitary(coin_su2(th)));
    EXPECT_NEAR(std::abs(coin_su2(th).determinant() - 1.0), 0.0, 1e-15);
    for (double k : {-2.0, 0.0, 0.4, 3.0}) EXPECT_TRUE(is_unitary(free_walk(k, coin_matrix(th))));
  }
  EXPECT_FALSE(is_unitary(2.0 * coin_matrix(0.3)));
}

TEST(Coins, HadamardEntries) {
  const CoinMatrix h = coin_matrix(pi / 4);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(max_abs(h - (CoinMatrix() << r, r, r, -r).finished()), 0.0, 1e-15);
}

TEST(Spectral, DeltaAndH2Definitions) {
  const CoinMatrix c = coin_matrix(0.7);
  const double k = 0.9, phi = 0.2;
  const Eigen::Matrix2cd s = Eigen::Vector2cd(std::polar(1.0, -k), std::polar(1.0, k)).asDiagonal();
  EXPECT_NEAR(max_abs(free_walk(k, c) - s * c), 0.0, 1e-15);
  const Eigen::Matrix2cd w = s * c;
  const Eigen::Matrix2cd h = h2(k, c);
  EXPECT_NEAR(max_abs(h - h.adjoint()), 0.0, 1e-15);
  EXPECT_NEAR(max_abs(h - Complex(0, 0.5) * (w - w.adjoint())), 0.0, 1e-15);
  EXPECT_NEAR(max_abs(delta_phi(k, phi, c) - (w - free_walk(k - phi, c).adjoint())), 0.0, 1e-15);
}

// exp(-i H1) reproduces W0 through an independent matrix exponential.
TEST(Spectral, H1ExponentiatesToFreeWalk) {
  for (double th : {0.2, 0.7, 1.2}) {
    const CoinMatrix c = coin_su2(th);
    for (double k = -3.0; k < 3.1; k += 0.37) {
      const Eigen::Matrix2cd h = h1(k, c);
      EXPECT_NEAR(max_abs(h - h.adjoint()), 0.0, 1e-13);
      const Eigen::Matrix2cd u = (Complex(0, -WalkParams::tau) * h).exp();
      EXPECT_NEAR(max_abs(u - free_walk(k, c)), 0.0, 1e-13) << "theta = " << th << ", k = " << k;
    }
  }
}

TEST(Spectral, H1RejectsDegenerateAndNonSpecialCoins) {
  // theta = 0: W0(k) = diag(e^{-ik}, e^{ik}) and sin(omega) = 0 at k = 0.
  EXPECT_THROW(h1(0.0, coin_su2(0.0)), DegenerateSpectrumError);
  EXPECT_THROW(h1(0.3, coin_matrix(0.3)), std::invalid_argument);  // det = -1
}

TEST(Stepping, SingleStepByHand) {
  const double th = 0.4, phi = 0.3;
  const WalkParams p(th, phi, 32);
  const auto out = step(localized_state(p, 0, CoinVector(1.0, 0.0)), p, coin_matrix(th));
  EXPECT_EQ(out.time_index(), 1);
  const Complex up = std::cos(th) * std::polar(1.0, phi);
  const Complex down = std::sin(th) * std::polar(1.0, -phi);
  EXPECT_NEAR(std::abs(out[p.index(1)][0] - up), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(out[p.index(-1)][1] - down), 0.0, 1e-16);
  EXPECT_EQ(out[p.index(1)][1], Complex(0.0));
  EXPECT_EQ(out[p.index(-1)][0], Complex(0.0));
  EXPECT_EQ(out[p.index(0)].squaredNorm(), 0.0);
}

TEST(Stepping, PeriodicWrap) {
  const WalkParams p(0.0, 0.0, 16);  // theta = 0: up moves right every step
  auto st = localized_state(p, p.max_site(), CoinVector(1.0, 0.0));
  st = step(st, p, coin_matrix(0.0));
  EXPECT_NEAR(st[p.index(p.min_site())].squaredNorm(), 1.0, 1e-15);
  EXPECT_NEAR(boundary_probability(st), 1.0, 1e-15);
}

TEST(Stepping, PositionAndMomentumAgree) {
  const WalkParams p(pi / 4, 2 * pi / 20, 160);
  const CoinMatrix c = coin_matrix(p.theta);
  WalkerState x = wide_packet(p);
  WalkerState k = to_momentum(x);
  const PositionEvolver px(p, c);
  const MomentumEvolver pk(p, c);
  EXPECT_EQ(pk.grid_shift(), 8);
  for (int j = 1; j <= 40; ++j) {
    x = px.step(x);
    k = pk.step(k);
    const auto back = to_position(k);
    ASSERT_EQ(back.time_index(), j);
    for (std::size_t i = 0; i < x.size(); ++i)
      ASSERT_NEAR(back[i].squaredNorm(), x[i].squaredNorm(), 1e-13) << "j = " << j;
  }
}

TEST(Stepping, MomentumNeedsGridField) {
  const WalkParams p(pi / 4, 0.1, 64);
  EXPECT_THROW(MomentumEvolver(p, coin_matrix(p.theta)), GridError);
  const auto x = localized_state(p, 0, CoinVector(1.0, 0.0));
  EXPECT_THROW(step_momentum(x, WalkParams(pi / 4, 2 * pi / 16, 64), coin_matrix(p.theta)),
               RepresentationError);
}

TEST(TwoStep, BranchesReconstructInitialState) {
  const WalkParams p(pi / 4, 2 * pi / 20, 100);
  const auto k0 = to_momentum(wide_packet(p));
  const auto d = initial_branches(k0, p, coin_matrix(p.theta));
  const auto r = d.reconstruct();
  for (std::size_t i = 0; i < k0.size(); ++i) EXPECT_NEAR((r[i] - k0[i]).norm(), 0.0, 1e-14);
  // A-(0) - ... : A+ - A- = W0 psi
  for (std::size_t i = 0; i < k0.size(); ++i) {
    const CoinVector w = free_walk(p.momentum(i), coin_matrix(p.theta)) * k0[i];
    EXPECT_NEAR((d.a_plus[i] - d.a_minus[i] - w).norm(), 0.0, 1e-14);
  }
}

TEST(TwoStep, IdentityHoldsAlongTrajectory) {
  const WalkParams p(0.6, 2 * pi / 30, 180);
  const CoinMatrix c = coin_matrix(p.theta);
  const MomentumEvolver ev(p, c);
  WalkerState prev = to_momentum(wide_packet(p));
  WalkerState curr = ev.step(prev);
  for (int j = 1; j < 60; ++j) {
    WalkerState next = ev.step(curr);
    EXPECT_LT(two_step_residual(prev, curr, next, p, c), 1e-12) << "j = " << j;
    prev = std::move(curr);
    curr = std::move(next);
  }
}

TEST(TwoStep, RejectsNonConsecutiveStates) {
  const WalkParams p(0.6, 2 * pi / 16, 64);
  const auto a = to_momentum(localized_state(p, 0, CoinVector(1.0, 0.0)));
  EXPECT_THROW(two_step_residual(a, a, a, p, coin_matrix(p.theta)), std::invalid_argument);
}

TEST(CtResidual, SmallForWidePacketAtWeakCoupling) {
  // Near theta = pi/2 the walker hops weakly, so two steps change little.
  const WalkParams p(1.5, 0.0, 200);
  const CoinMatrix c = coin_matrix(p.theta);
  const auto s0 = wide_packet(p);
  const auto s1 = step(s0, p, c);
  const auto s2 = step(s1, p, c);
  const auto r = ct_residual(s0, s1, s2, p);
  EXPECT_FALSE(r.field_warning);
  EXPECT_LT(r.median, 0.2);
  EXPECT_EQ(r.up.size(), s0.size());
  EXPECT_TRUE(ct_residual(s0, s1, s2, WalkParams(1.5, 0.1, 200)).field_warning);
}
