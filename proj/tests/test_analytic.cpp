#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "blochwalk/analytic.hpp"

using namespace blochwalk;
constexpr double pi = std::numbers::pi;

namespace {

const double r2 = 1 / std::sqrt(2.0);

// Tight-binding chain in a linear potential, solved by diagonalization:
//   (H psi)_n = sign * cos(theta)/(2i) (psi_{n+1} - psi_{n-1}) - phi n psi_n,
// open ends, sites -N/2 .. N/2-1.  Returns exp(-i H t) c.
Eigen::VectorXcd tight_binding(int sign, double theta, double phi, const std::vector<double>& c,
                               double t) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  const std::complex<double> hop = sign * std::cos(theta) / std::complex<double>(0, 2);
  for (int i = 0; i < n; ++i) {
    h(i, i) = -phi * (i - n / 2);
    if (i + 1 < n) {
      h(i, i + 1) = hop;
      h(i + 1, i) = std::conj(hop);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd c0(n);
  for (int i = 0; i < n; ++i) c0[i] = c[static_cast<std::size_t>(i)];
  const Eigen::VectorXcd phase =
      (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0, -t)).array().exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * c0;
}

AnalyticSolution fig6_solution(int n_sites = 480, double theta = pi / 4) {
  return build(WalkParams(theta, 2 * pi / 60, n_sites), {0.05, CoinVector(r2, -r2), 0});
}

}  // namespace

TEST(Analytic, ProjectorsAndWeights) {
  for (double th : {0.3, pi / 4, 1.1}) {
    const auto sol = build(WalkParams(th, 2 * pi / 40, 200), {0.05, CoinVector(0.6, 0.8), 0});
    const Eigen::Matrix2d c = coin_matrix(th).real();
    EXPECT_NEAR((sol.lambda_plus - 0.5 * (Eigen::Matrix2d::Identity() + c)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((sol.lambda_minus - 0.5 * (Eigen::Matrix2d::Identity() - c)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((sol.lambda_plus * sol.lambda_plus - sol.lambda_plus).norm(), 0.0, 1e-15);
    EXPECT_NEAR(sol.weight_plus() + sol.weight_minus(), 1.0, 1e-15);
    EXPECT_NEAR(sol.kappa, 0.6 * 0.6 * std::cos(th) - 0.8 * 0.8 * std::cos(th) + 2 * 0.48 * std::sin(th),
                1e-15);
  }
  EXPECT_NEAR(kappa(CoinVector(r2, -r2), pi / 4), -r2, 1e-15);
}

TEST(Analytic, InitialTimeReproducesInitialState) {
  const auto sol = fig6_solution(200);
  const auto psi = psi_approx(sol, 0);
  const auto init = gaussian_state(sol.params, sol.spec);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_NEAR((psi[i] - init[i]).norm(), 0.0, 1e-15);
}

TEST(Analytic, NormalizedAtAllTimes) {
  const auto sol = fig6_solution(300);
  for (int t = 0; t <= 60; t += 3) {
    const auto p = p_approx(sol, t);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12) << "t = " << t;
  }
}

TEST(Analytic, ProbabilityIsSquaredModulusOfBranchSum) {
  // Cross terms between the two branches vanish: <s|Lambda+ Lambda-|s> = 0.
  const auto sol = fig6_solution(300);
  for (int t : {5, 12, 33}) {
    const auto psi = psi_approx(sol, t);
    const auto p = p_approx(sol, t);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(psi[i].squaredNorm(), p[i], 1e-15);
  }
}

// Both branches solve tight-binding Bloch problems with opposite hopping sign.
TEST(Analytic, BranchesMatchTightBindingEvolution) {
  const double th = pi / 4, phi = 2 * pi / 60;
  const WalkParams params(th, phi, 160);
  const auto sol = build(params, {0.05, CoinVector(r2, -r2), 0});
  const auto c = gaussian_coefficients(params, 0.05, 0);
  for (int t : {0, 7, 15, 30, 44, 60}) {
    const auto fp = tight_binding(+1, th, phi, c, t);
    const auto fm = tight_binding(-1, th, phi, c, t);
    const auto p = p_approx(sol, t);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double ref = std::norm(fp[static_cast<Eigen::Index>(i)]) * sol.weight_plus() +
                         std::norm(fm[static_cast<Eigen::Index>(i)]) * sol.weight_minus();
      ASSERT_NEAR(p[i], ref, 1e-12) << "t = " << t << ", n = " << params.site(i);
    }
  }
}

TEST(Analytic, RevivalAfterOneBlochPeriod) {
  const auto sol = fig6_solution();
  const auto p0 = p_approx(sol, 0), p60 = p_approx(sol, 60);
  EXPECT_LT(hellinger(p60, p0), 1e-12);
  EXPECT_EQ(sol.bessel_argument(60) == 0.0 || std::abs(sol.bessel_argument(60)) < 1e-13, true);
}

TEST(Analytic, ClosedMeanAtQuarterPeriod) {
  // kappa = -1/sqrt(2), cos(pi/4) = 1/sqrt(2), sin(phi * 15) = 1.
  const auto sol = fig6_solution();
  const double expected = -0.5 * std::exp(-0.025) / (2 * pi / 60);
  EXPECT_NEAR(mean_closed(sol, 15), expected, 1e-12);
  EXPECT_NEAR(mean_closed(sol, 15), -4.656, 1e-3);
}

// The closed-form moments are the moments of p_approx; checked away from
// theta = pi/4, where cos and sin of theta differ.
TEST(Analytic, ClosedMomentsMatchApproximateDistribution) {
  for (double th : {pi / 6, pi / 4, pi / 3}) {
    const auto sol = fig6_solution(480, th);
    for (int t = 0; t <= 60; t += 5) {
      const auto p = p_approx(sol, t);
      EXPECT_NEAR(mean_position(p), mean_closed(sol, t), 1e-9) << "theta = " << th << ", t = " << t;
      EXPECT_NEAR(mean_square(p), msq_closed(sol, t), 1e-9) << "theta = " << th << ", t = " << t;
    }
  }
}

TEST(Analytic, ShiftedCenter) {
  const WalkParams params(pi / 4, 2 * pi / 60, 480);
  const auto sol = build(params, {0.05, CoinVector(r2, -r2), 17});
  for (int t : {0, 9, 21}) {
    const auto p = p_approx(sol, t);
    EXPECT_NEAR(mean_position(p), mean_closed(sol, t), 1e-9);
    EXPECT_NEAR(mean_square(p), msq_closed(sol, t), 1e-8);
  }
}

TEST(Analytic, FreeLimits) {
  const GaussianSpec spec{0.05, CoinVector(r2, -r2), 0};
  const double th = pi / 4, t = 12.0;
  const auto lim = free_limits(spec, th, t);
  EXPECT_NEAR(lim.mean, -r2 * std::exp(-0.025) * t * std::cos(th), 1e-14);
  EXPECT_NEAR(lim.msq, 5.0 + t * t * 0.5, 1e-12);
  const auto sol = build(WalkParams(th, 1e-5, 480), spec);
  EXPECT_NEAR(mean_closed(sol, t), lim.mean, 1e-6);
  EXPECT_NEAR(msq_closed(sol, t, true), lim.msq, 1e-6);
}

TEST(Analytic, BuildErrorsAndWarnings) {
  EXPECT_THROW(build(WalkParams(pi / 4, 0.0, 200), {}), std::domain_error);
  EXPECT_TRUE(fig6_solution().warnings.empty());
  const auto strong = build(WalkParams(pi / 4, 2 * pi / 10, 200), {0.3, CoinVector(1, 0), 0});
  EXPECT_EQ(strong.warnings.size(), 2u);
  EXPECT_THROW(p_approx(fig6_solution(200), -1), std::invalid_argument);
}
