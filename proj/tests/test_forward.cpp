#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpnp/errors.hpp"
#include "dpnp/forward.hpp"
#include "dpnp/rng.hpp"

using namespace dpnp;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Central finite difference of log_likelihood, the independent gradient
// oracle shared by every model check below.
Eigen::VectorXd fd_grad(const MeasurementModel& m, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (m.log_likelihood(xp, y) - m.log_likelihood(xm, y)) / (2.0 * h);
  }
  return g;
}

void check_grad(const MeasurementModel& m, const Eigen::VectorXd& x,
                const Eigen::VectorXd& y, double tol = 1e-5) {
  const Eigen::VectorXd g = m.grad_log_likelihood(x, y);
  const Eigen::VectorXd fd = fd_grad(m, x, y);
  const double scale = std::max(1.0, fd.norm());
  CHECK((g - fd).norm() <= tol * scale);
}

}  // namespace

TEST_CASE("linear model: zero-residual likelihood is the constant") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  LinearGaussianModel m(A, 1.0);
  const Eigen::VectorXd x = vec({0.7});
  CHECK(m.log_likelihood(x, m.apply(x)) ==
        doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-14));
}

TEST_CASE("linear model: correlated-noise likelihood frozen value") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 2.0, 0.0, 1.0;
  Eigen::MatrixXd S(2, 2);
  S << 0.5, 0.1, 0.1, 0.3;
  LinearGaussianModel m(A, S);
  // Frozen from an independent dense-solve evaluation.
  CHECK(m.log_likelihood(vec({0.4, -0.3}), vec({1.0, 0.2})) ==
        doctest::Approx(-2.4155349239372144).epsilon(1e-12));
  CHECK(m.normal_matrix().isApprox(
      A.transpose() * S.inverse() * A, 1e-12));
  CHECK(m.whitened_adjoint().isApprox(A.transpose() * S.inverse(), 1e-12));
}

TEST_CASE("linear model gradients match finite differences") {
  Eigen::MatrixXd A(2, 3);
  A << 1.0, -0.5, 0.2, 0.0, 1.0, 1.5;
  Eigen::MatrixXd S(2, 2);
  S << 0.4, 0.05, 0.05, 0.6;
  LinearGaussianModel m(A, S);
  Rng rng(3ULL);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = rng.normal_vector(3);
    const Eigen::VectorXd y = rng.normal_vector(2);
    check_grad(m, x, y);
  }
  // A = I, Sigma = sigma^2 I reduces to (y - x) / sigma^2.
  LinearGaussianModel iso(Eigen::MatrixXd::Identity(2, 2), 0.25);
  const Eigen::VectorXd g =
      iso.grad_log_likelihood(vec({1.0, 2.0}), vec({1.5, 1.0}));
  CHECK(g[0] == doctest::Approx(0.5 / 0.25).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(-1.0 / 0.25).epsilon(1e-14));
}

TEST_CASE("linear model: measurement noise has the declared variance") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  const double sigma2 = 0.2;
  LinearGaussianModel m(A, sigma2);
  Rng rng(11ULL);
  const Eigen::VectorXd x = vec({1.3});
  const int n = 10000;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = m.simulate_measurement(x, rng)[0] - x[0];
    sum2 += r * r;
  }
  CHECK(sum2 / n == doctest::Approx(sigma2).epsilon(0.05));
}

TEST_CASE("linear model shape and validity errors") {
  Eigen::MatrixXd A(2, 2);
  A.setIdentity();
  CHECK_THROWS_AS(LinearGaussianModel(A, -1.0), ConfigError);
  Eigen::MatrixXd bad_cov(1, 1);
  bad_cov << 1.0;
  CHECK_THROWS_AS(LinearGaussianModel(A, bad_cov), std::invalid_argument);
  LinearGaussianModel m(A, 1.0);
  CHECK_THROWS_AS(m.log_likelihood(vec({1.0}), vec({1.0, 2.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(m.apply(vec({1.0, 2.0, 3.0})), std::invalid_argument);
}

TEST_CASE("phase retrieval magnitudes match the direct DFT") {
  PhaseRetrievalModel m(vec({1.0, -1.0, 1.0, 1.0}), 0.05);
  REQUIRE(m.dim_y() == 3);  // half spectrum of d = 4
  const Eigen::VectorXd mags = m.apply(vec({0.3, -1.2, 0.5, 2.0}));
  // Frozen from an FFT of the masked signal (0.3, 1.2, 0.5, 2.0).
  CHECK(mags[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(mags[1] == doctest::Approx(0.82462112512353210).epsilon(1e-12));
  CHECK(mags[2] == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(m.log_likelihood(vec({0.3, -1.2, 0.5, 2.0}), vec({1.0, 2.0, 0.5})) ==
        doctest::Approx(-138.17837218434175).epsilon(1e-10));
}

TEST_CASE("phase retrieval: zero residual and global sign ambiguity") {
  const Eigen::VectorXd mask = make_rademacher_mask(8, 123ULL);
  PhaseRetrievalModel m(mask, 0.2);
  Rng rng(5ULL);
  const Eigen::VectorXd x = rng.normal_vector(8);
  const Eigen::VectorXd y = m.apply(x);
  CHECK(m.log_likelihood(x, y) ==
        doctest::Approx(-0.5 * m.dim_y() * (kLog2Pi + std::log(0.2)))
            .epsilon(1e-12));
  // A(-x) = A(x) exactly, hence identical likelihoods.
  CHECK((m.apply(-x) - y).norm() == 0.0);
  CHECK(m.log_likelihood(-x, y) == m.log_likelihood(x, y));
}

TEST_CASE("phase retrieval gradient matches finite differences") {
  const Eigen::VectorXd mask = make_rademacher_mask(6, 77ULL);
  PhaseRetrievalModel m(mask, 0.2);
  Rng rng(8ULL);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = rng.normal_vector(6);
    const Eigen::VectorXd y =
        m.apply(rng.normal_vector(6)) + 0.1 * rng.normal_vector(m.dim_y());
    check_grad(m, x, y);
  }
  CHECK(m.degenerate_gradient_events() == 0);
}

TEST_CASE("phase retrieval flags zero-magnitude gradient queries") {
  PhaseRetrievalModel m(vec({1.0, 1.0, 1.0, 1.0}), 0.1);
  const Eigen::VectorXd y = vec({1.0, 1.0, 1.0});
  CHECK(m.degenerate_gradient_events() == 0);
  // x = 0 zeroes every frequency; the subgradient 0 branch must fire.
  const Eigen::VectorXd g = m.grad_log_likelihood(vec({0.0, 0.0, 0.0, 0.0}), y);
  CHECK(g.norm() == 0.0);
  CHECK(m.degenerate_gradient_events() == 1);
}

TEST_CASE("rademacher mask is deterministic with +-1 entries") {
  const Eigen::VectorXd a = make_rademacher_mask(32, 9ULL);
  const Eigen::VectorXd b = make_rademacher_mask(32, 9ULL);
  CHECK((a - b).norm() == 0.0);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i]) == 1.0);
  const Eigen::VectorXd c = make_rademacher_mask(32, 10ULL);
  CHECK((a - c).norm() != 0.0);
  CHECK_THROWS_AS(make_rademacher_mask(0, 1ULL), ConfigError);
  CHECK_THROWS_AS(PhaseRetrievalModel(vec({0.5, 1.0}), 0.1), ConfigError);
}

TEST_CASE("quantized sensing likelihood and gradient") {
  QuantizedSensingModel m(2, 0.4);
  // pixel 0 gives P(+-1) = 1/2 each.
  CHECK(m.log_likelihood(vec({0.0, 0.0}), vec({1.0, -1.0})) ==
        doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-14));
  // Frozen value at x = (0.3, -0.7), y = (+1, -1).
  CHECK(m.log_likelihood(vec({0.3, -0.7}), vec({1.0, -1.0})) ==
        doctest::Approx(-0.54709515655298717056).epsilon(1e-13));
  // Stable at extreme arguments: linear tail, no overflow.
  const double big = 1e4;
  CHECK(std::isfinite(m.log_likelihood(vec({big, -big}), vec({-1.0, 1.0}))));
  CHECK(m.log_likelihood(vec({big, -big}), vec({-1.0, 1.0})) ==
        doctest::Approx(-2.0 * big / 0.4).epsilon(1e-10));
  CHECK(m.log_likelihood(vec({big, -big}), vec({1.0, -1.0})) ==
        doctest::Approx(0.0).epsilon(1e-10));

  Rng rng(21ULL);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = 2.0 * rng.normal_vector(2);
    Eigen::VectorXd y(2);
    y << (rng.bits() & 1 ? 1.0 : -1.0), (rng.bits() & 1 ? 1.0 : -1.0);
    check_grad(m, x, y);
  }
  CHECK_THROWS_AS(m.log_likelihood(vec({0.0, 0.0}), vec({1.0, 0.5})),
                  std::domain_error);
  CHECK_THROWS_AS(QuantizedSensingModel(2, 0.0), ConfigError);
}

TEST_CASE("quantized sensing simulates the logistic law") {
  QuantizedSensingModel m(1, 0.4);
  Rng rng(33ULL);
  const Eigen::VectorXd x = vec({0.3});
  const double p_plus = 1.0 / (1.0 + std::exp(-0.3 / 0.4));
  const int n = 20000;
  int plus = 0;
  for (int i = 0; i < n; ++i)
    if (m.simulate_measurement(x, rng)[0] > 0.0) ++plus;
  const double se = std::sqrt(p_plus * (1.0 - p_plus) / n);
  CHECK(std::abs(static_cast<double>(plus) / n - p_plus) <= 4.0 * se);

  // theta -> 0 limit: positive pixel quantizes to +1 almost surely.
  QuantizedSensingModel hard(1, 1e-9);
  for (int i = 0; i < 100; ++i)
    CHECK(hard.simulate_measurement(vec({0.5}), rng)[0] == 1.0);
}

TEST_CASE("downsample model block-averages with rows summing to one") {
  DownsampleModel m(6, 3, 0.1);
  CHECK(m.dim_x() == 6);
  CHECK(m.dim_y() == 2);
  CHECK(m.ratio() == 3);
  for (int j = 0; j < 2; ++j)
    CHECK(m.A().row(j).sum() == doctest::Approx(1.0).epsilon(1e-15));
  const Eigen::VectorXd y = m.apply(vec({3.0, 6.0, 0.0, 1.0, 1.0, 4.0}));
  CHECK(y[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(DownsampleModel(5, 3, 0.1), ConfigError);
  CHECK_THROWS_AS(DownsampleModel(6, 0, 0.1), ConfigError);
}

TEST_CASE("likelihoods are bounded above by the zero-residual value") {
  const Eigen::VectorXd mask = make_rademacher_mask(4, 2ULL);
  PhaseRetrievalModel pr(mask, 0.2);
  QuantizedSensingModel qs(4, 0.4);
  Rng rng(55ULL);
  const Eigen::VectorXd y_pr = pr.apply(rng.normal_vector(4));
  const double cap_pr =
      -0.5 * pr.dim_y() * (kLog2Pi + std::log(0.2));
  Eigen::VectorXd y_qs(4);
  y_qs << 1.0, -1.0, 1.0, 1.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::VectorXd x = 3.0 * rng.normal_vector(4);
    CHECK(pr.log_likelihood(x, y_pr) <= cap_pr + 1e-12);
    CHECK(qs.log_likelihood(x, y_qs) <= 0.0);
  }
}

TEST_CASE("constant likelihood model is flat") {
  ConstantLikelihoodModel m(3, -1.25);
  Rng rng(1ULL);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = rng.normal_vector(3);
    CHECK(m.log_likelihood(x, y) == -1.25);
    CHECK(m.grad_log_likelihood(x, y).norm() == 0.0);
  }
}
