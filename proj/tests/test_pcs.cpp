#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dpnp/errors.hpp"
#include "dpnp/forward.hpp"
#include "dpnp/metrics.hpp"
#include "dpnp/pcs.hpp"
#include "dpnp/rng.hpp"

using namespace dpnp;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Eigen::VectorXd vec1(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

// Returns NaN off the anchor point; drives the numerical-failure path.
class PoisonedModel final : public MeasurementModel {
 public:
  explicit PoisonedModel(Eigen::VectorXd anchor)
      : anchor_(std::move(anchor)) {}
  int dim_x() const override { return static_cast<int>(anchor_.size()); }
  int dim_y() const override { return 1; }
  Eigen::VectorXd apply(const Eigen::VectorXd&) const override {
    return Eigen::VectorXd::Zero(1);
  }
  double log_likelihood(const Eigen::VectorXd& x,
                        const Eigen::VectorXd&) const override {
    if ((x - anchor_).norm() == 0.0) return 0.0;
    return std::numeric_limits<double>::quiet_NaN();
  }
  Eigen::VectorXd grad_log_likelihood(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd&) const override {
    return Eigen::VectorXd::Zero(x.size());
  }
  Eigen::VectorXd simulate_measurement(const Eigen::VectorXd&,
                                       Rng&) const override {
    return Eigen::VectorXd::Zero(1);
  }

 private:
  Eigen::VectorXd anchor_;
};

}  // namespace

TEST_CASE("pcs_config_for realizes the damping target") {
  const double eta = 0.6;
  const PCSConfig cfg = pcs_config_for(eta, 0.7, 150);
  CHECK(cfg.N == 150);
  CHECK(std::exp(-cfg.gamma / (eta * eta)) ==
        doctest::Approx(0.7).epsilon(1e-14));
  CHECK(pcs_config_for(1.0).N == 200);
  CHECK_THROWS_AS(pcs_config_for(0.0), std::domain_error);
  CHECK_THROWS_AS(pcs_config_for(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(pcs_config_for(1.0, 0.7, -1), std::domain_error);
}

TEST_CASE("proposal density matches a direct Gaussian evaluation") {
  Eigen::MatrixXd A(1, 1);
  A << 1.5;
  LinearGaussianModel model(A, 0.4);
  const Eigen::VectorXd x = vec1(0.3), y = vec1(1.0);
  const double eta = 0.6, gamma = 0.2;
  const double r = std::exp(-gamma / (eta * eta));
  const double var = eta * eta * (1.0 - r * r);

  Rng rng(2ULL);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd z_from = rng.normal_vector(1);
    const Eigen::VectorXd z_to = rng.normal_vector(1);
    const Eigen::VectorXd mean =
        r * z_from + (1.0 - r) * x +
        eta * eta * (1.0 - r) * model.grad_log_likelihood(z_from, y);
    const double direct = -0.5 * (kLog2Pi + std::log(var)) -
                          (z_to - mean).squaredNorm() / (2.0 * var);
    CHECK(log_proposal_density(z_to, z_from, x, model, y, eta, gamma) ==
          doctest::Approx(direct).epsilon(1e-13));
  }
  CHECK_THROWS_AS(log_proposal_density(x, x, x, model, y, eta, 0.0),
                  std::domain_error);
}

TEST_CASE("fully relaxed proposal centers on x + eta^2 grad") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  LinearGaussianModel model(A, 0.5);
  const Eigen::VectorXd x = vec1(0.2), y = vec1(1.4);
  const double eta = 0.7;
  const double gamma = 1e6;  // r underflows to 0: full relaxation
  const Eigen::VectorXd mean =
      x + eta * eta * model.grad_log_likelihood(x, y);
  // Density at the mode of a N(mean, eta^2): -(1/2) log(2 pi eta^2).
  CHECK(log_proposal_density(mean, x, x, model, y, eta, gamma) ==
        doctest::Approx(-0.5 * (kLog2Pi + std::log(eta * eta)))
            .epsilon(1e-12));
}

TEST_CASE("metropolis log-ratio is the exact IEEE negation under swap") {
  Eigen::MatrixXd A(1, 1);
  A << 1.2;
  LinearGaussianModel linear(A, 0.3);
  QuantizedSensingModel quant(1, 0.4);
  const Eigen::VectorXd x = vec1(0.25);
  const double eta = 0.5, gamma = 0.1;

  Rng rng(3ULL);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd a = 2.0 * rng.normal_vector(1);
    const Eigen::VectorXd b = 2.0 * rng.normal_vector(1);
    const double fwd_l =
        log_metropolis_ratio(a, b, x, linear, vec1(0.9), eta, gamma);
    const double bwd_l =
        log_metropolis_ratio(b, a, x, linear, vec1(0.9), eta, gamma);
    CHECK(fwd_l == -bwd_l);  // bitwise, not approximate
    const double fwd_q =
        log_metropolis_ratio(a, b, x, quant, vec1(1.0), eta, gamma);
    const double bwd_q =
        log_metropolis_ratio(b, a, x, quant, vec1(1.0), eta, gamma);
    CHECK(fwd_q == -bwd_q);
  }
}

TEST_CASE("metropolis log-ratio agrees with the assembled definition") {
  Eigen::MatrixXd A(1, 1);
  A << 0.8;
  LinearGaussianModel model(A, 0.35);
  const Eigen::VectorXd x = vec1(-0.1), y = vec1(0.7);
  const double eta = 0.45, gamma = 0.12;

  Rng rng(4ULL);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd a = rng.normal_vector(1);
    const Eigen::VectorXd b = rng.normal_vector(1);
    const auto log_target = [&](const Eigen::VectorXd& z) {
      return model.log_likelihood(z, y) -
             (z - x).squaredNorm() / (2.0 * eta * eta);
    };
    const double assembled =
        log_target(b) - log_target(a) +
        log_proposal_density(a, b, x, model, y, eta, gamma) -
        log_proposal_density(b, a, x, model, y, eta, gamma);
    const double grouped = log_metropolis_ratio(a, b, x, model, y, eta,
                                                gamma);
    CHECK(grouped == doctest::Approx(assembled).epsilon(1e-9));
  }
}

TEST_CASE("constant likelihood: every proposal is accepted exactly") {
  ConstantLikelihoodModel model(1, -0.3);
  const Eigen::VectorXd x = vec1(0.8);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  PCSConfig cfg = pcs_config_for(0.6, 0.7, 10000);
  Rng rng(5ULL);
  const auto [z, diag] = pcs_mala(x, y, model, 0.6, cfg, rng);
  CHECK(diag.acceptance_rate == 1.0);
  CHECK(diag.max_abs_log_ratio <= 1e-10);
}

TEST_CASE("constant likelihood: realized chain is the exact AR(1) law") {
  // With L constant every step is accepted, so z_N is Gaussian around x
  // with variance eta^2 (1 - r^{2N}).
  ConstantLikelihoodModel model(1, 0.0);
  const double eta = 0.9;
  const Eigen::VectorXd x = vec1(0.4);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  PCSConfig cfg = pcs_config_for(eta, 0.7, 3);
  const double r = 0.7;
  const double true_var =
      eta * eta * (1.0 - std::pow(r, 2.0 * cfg.N));

  Rng rng(6ULL);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = pcs_mala(x, y, model, eta, cfg, rng).first[0];
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - x[0]) <= 4.0 * std::sqrt(true_var / n));
  CHECK(std::abs(var - true_var) <= 4.0 * true_var * std::sqrt(2.0 / n));
}

TEST_CASE("gamma = 0 freezes the chain at the anchor") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  LinearGaussianModel model(A, 0.5);
  const Eigen::VectorXd x = vec1(1.3), y = vec1(0.2);
  Rng rng(7ULL);
  const auto [z, diag] = pcs_mala(x, y, model, 0.8, PCSConfig{0.0, 500},
                                  rng);
  CHECK(z[0] == x[0]);
  CHECK(diag.acceptance_rate == 1.0);
  CHECK(diag.max_abs_log_ratio == 0.0);
}

TEST_CASE("closed-form proximal moments match the formulas") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.5, 0.0, 1.0;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2, 2);
  S(0, 0) = 0.3;
  S(1, 1) = 0.5;
  LinearGaussianModel model(A, S);
  const double eta = 0.6;
  Eigen::VectorXd x(2), y(2);
  x << 0.2, -0.4;
  y << 1.0, 0.5;

  // Independent evaluation with dense inverses.
  const Eigen::MatrixXd P = A.transpose() * S.inverse() * A +
                            Eigen::MatrixXd::Identity(2, 2) / (eta * eta);
  const Eigen::MatrixXd C = P.inverse();
  const Eigen::VectorXd m =
      C * (A.transpose() * S.inverse() * y + x / (eta * eta));

  Rng rng(8ULL);
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = pcs_linear_gaussian(x, y, model, eta, rng);
    sum += d;
    sum_sq += d * d.transpose();
  }
  const Eigen::VectorXd emp_mean = sum / n;
  const Eigen::MatrixXd emp_cov =
      sum_sq / n - emp_mean * emp_mean.transpose();
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(emp_mean[i] - m[i]) <= 4.0 * std::sqrt(C(i, i) / n));
    for (int j = 0; j < 2; ++j) {
      const double se =
          std::sqrt((C(i, i) * C(j, j) + C(i, j) * C(i, j)) / n);
      CHECK(std::abs(emp_cov(i, j) - C(i, j)) <= 4.0 * se);
    }
  }
}

TEST_CASE("d = 1 closed form is the precision-weighted average") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  const double s2 = 0.4, eta = 0.5;
  LinearGaussianModel model(A, s2);
  const Eigen::VectorXd x = vec1(0.3), y = vec1(1.2);
  const double prec = 1.0 / s2 + 1.0 / (eta * eta);
  const double m = (y[0] / s2 + x[0] / (eta * eta)) / prec;
  const double v = 1.0 / prec;

  Rng rng(9ULL);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = pcs_linear_gaussian(x, y, model, eta, rng)[0];
    sum += d;
    sum2 += d * d;
  }
  const double emp_mean = sum / n;
  const double emp_var = sum2 / n - emp_mean * emp_mean;
  CHECK(std::abs(emp_mean - m) <= 4.0 * std::sqrt(v / n));
  CHECK(std::abs(emp_var - v) <= 4.0 * v * std::sqrt(2.0 / n));
}

TEST_CASE("eta -> infinity approaches the regularized least squares mean") {
  Eigen::MatrixXd A(1, 1);
  A << 2.0;
  LinearGaussianModel model(A, 0.5);
  const Eigen::VectorXd x = vec1(3.0), y = vec1(1.0);
  Rng rng(10ULL);
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += pcs_linear_gaussian(x, y, model, 1e6, rng)[0];
  // (A' S^-1 A)^-1 A' S^-1 y = y / A = 0.5; cov -> 1/8.
  CHECK(std::abs(sum / n - 0.5) <= 4.0 * std::sqrt(0.125 / n) + 1e-6);
}

TEST_CASE("MALA agrees with the closed-form sampler in W1") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  const double s2 = 0.4, eta = 0.5;
  LinearGaussianModel model(A, s2);
  const Eigen::VectorXd x = vec1(0.3), y = vec1(1.2);
  const PCSConfig cfg = pcs_config_for(eta);

  Rng rng(11ULL);
  const int n = 10000;
  std::vector<double> mala(n), exact(n);
  double acc_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [z, diag] = pcs_mala(x, y, model, eta, cfg, rng);
    mala[static_cast<std::size_t>(i)] = z[0];
    acc_sum += diag.acceptance_rate;
    exact[static_cast<std::size_t>(i)] =
        pcs_linear_gaussian(x, y, model, eta, rng)[0];
  }
  CHECK(wasserstein1_1d(mala, exact) <= 0.02);
  // Defaults should mix, not crawl.
  CHECK(acc_sum / n > 0.5);
  CHECK(acc_sum / n <= 1.0);

  // Moments against the analytic posterior, 4 MC standard errors.
  const double prec = 1.0 / s2 + 1.0 / (eta * eta);
  const double m = (y[0] / s2 + x[0] / (eta * eta)) / prec;
  const double v = 1.0 / prec;
  double sum = 0.0, sum2 = 0.0;
  for (double z : mala) {
    sum += z;
    sum2 += z * z;
  }
  const double emp_mean = sum / n;
  const double emp_var = sum2 / n - emp_mean * emp_mean;
  CHECK(std::abs(emp_mean - m) <= 4.0 * std::sqrt(v / n));
  CHECK(std::abs(emp_var - v) <= 4.0 * v * std::sqrt(2.0 / n) + 0.01 * v);
}

TEST_CASE("non-finite likelihood raises NumericalFailure with state") {
  const Eigen::VectorXd x = vec1(0.5);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  PoisonedModel model(x);
  Rng rng(12ULL);
  // Start is exactly the anchor (finite), first proposal moves off it.
  CHECK_THROWS_AS(
      pcs_mala(x, y, model, 0.5, PCSConfig{0.2, 50}, rng),
      NumericalFailure);
  try {
    Rng rng2(12ULL);
    pcs_mala(x, y, model, 0.5, PCSConfig{0.2, 50}, rng2);
  } catch (const NumericalFailure& e) {
    CHECK(e.state().size() == 1);  // carries the offending point
  }
}

TEST_CASE("argument validation") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  LinearGaussianModel model(A, 0.5);
  Rng rng(13ULL);
  Eigen::VectorXd x2(2);
  x2 << 0.0, 0.0;
  CHECK_THROWS_AS(
      pcs_mala(x2, vec1(0.0), model, 0.5, PCSConfig{0.1, 10}, rng),
      std::invalid_argument);
  CHECK_THROWS_AS(
      pcs_mala(vec1(0.0), x2, model, 0.5, PCSConfig{0.1, 10}, rng),
      std::invalid_argument);
  CHECK_THROWS_AS(
      pcs_mala(vec1(0.0), vec1(0.0), model, 0.0, PCSConfig{0.1, 10}, rng),
      std::domain_error);
  CHECK_THROWS_AS(
      pcs_mala(vec1(0.0), vec1(0.0), model, 0.5, PCSConfig{-0.1, 10}, rng),
      std::domain_error);
  CHECK_THROWS_AS(pcs_linear_gaussian(vec1(0.0), vec1(0.0), model, 0.0, rng),
                  std::domain_error);
}
