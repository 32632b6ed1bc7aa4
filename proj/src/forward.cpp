#include "dpnp/forward.hpp"

#include <cmath>
#include <stdexcept>

#include "dpnp/errors.hpp"

namespace dpnp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kTwoPi = 6.283185307179586476925286766559;

double log_sigmoid(double z) {
  // log(1 / (1 + e^-z)) with the usual stable branch split.
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void MeasurementModel::check_x(const Eigen::VectorXd& x) const {
  if (x.size() != dim_x())
    throw std::invalid_argument("model: x dimension mismatch");
}

void MeasurementModel::check_xy(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) const {
  check_x(x);
  if (y.size() != dim_y())
    throw std::invalid_argument("model: y dimension mismatch");
}

LinearGaussianModel::LinearGaussianModel(Eigen::MatrixXd A,
                                         Eigen::MatrixXd noise_cov)
    : A_(std::move(A)), noise_cov_(std::move(noise_cov)) {
  init();
}

LinearGaussianModel::LinearGaussianModel(Eigen::MatrixXd A, double noise_var)
    : A_(std::move(A)) {
  if (!(noise_var > 0.0))
    throw ConfigError("linear model: noise variance must be > 0");
  noise_cov_ =
      noise_var * Eigen::MatrixXd::Identity(A_.rows(), A_.rows());
  init();
}

void LinearGaussianModel::init() {
  if (A_.rows() < 1 || A_.cols() < 1)
    throw ConfigError("linear model: empty operator");
  if (noise_cov_.rows() != A_.rows() || noise_cov_.cols() != A_.rows())
    throw std::invalid_argument("linear model: noise covariance shape");
  chol_.compute(noise_cov_);
  if (chol_.info() != Eigen::Success)
    throw std::runtime_error(
        "linear model: noise covariance is not positive definite");
  const Eigen::MatrixXd Si =
      chol_.solve(Eigen::MatrixXd::Identity(A_.rows(), A_.rows()));
  AtSi_ = A_.transpose() * Si;
  AtSi_A_ = AtSi_ * A_;
  double log_det = 0.0;
  const auto& L = chol_.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    log_det += 2.0 * std::log(L(i, i));
  log_norm_const_ =
      -0.5 * (static_cast<double>(A_.rows()) * kLog2Pi + log_det);
}

Eigen::VectorXd LinearGaussianModel::apply(const Eigen::VectorXd& x) const {
  check_x(x);
  return A_ * x;
}

double LinearGaussianModel::log_likelihood(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y) const {
  check_xy(x, y);
  const Eigen::VectorXd r = y - A_ * x;
  return -0.5 * r.dot(chol_.solve(r)) + log_norm_const_;
}

Eigen::VectorXd LinearGaussianModel::grad_log_likelihood(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  check_xy(x, y);
  return AtSi_ * (y - A_ * x);
}

Eigen::VectorXd LinearGaussianModel::simulate_measurement(
    const Eigen::VectorXd& x, Rng& rng) const {
  check_x(x);
  return A_ * x +
         chol_.matrixL() * rng.normal_vector(A_.rows());
}

PhaseRetrievalModel::PhaseRetrievalModel(Eigen::VectorXd mask,
                                         double noise_var)
    : mask_(std::move(mask)), noise_var_(noise_var) {
  d_ = static_cast<int>(mask_.size());
  if (d_ < 1) throw ConfigError("phase retrieval: empty mask");
  if (!(noise_var_ > 0.0))
    throw ConfigError("phase retrieval: noise variance must be > 0");
  for (Eigen::Index i = 0; i < mask_.size(); ++i) {
    if (mask_[i] != 1.0 && mask_[i] != -1.0)
      throw ConfigError("phase retrieval: mask entries must be +-1");
  }
  m_ = d_ / 2 + 1;
  cos_.resize(m_, d_);
  sin_.resize(m_, d_);
  for (int j = 0; j < m_; ++j) {
    for (int n = 0; n < d_; ++n) {
      const double ang = kTwoPi * j * n / d_;
      cos_(j, n) = std::cos(ang);
      sin_(j, n) = std::sin(ang);
    }
  }
}

void PhaseRetrievalModel::spectrum(const Eigen::VectorXd& x,
                                   Eigen::VectorXd& re,
                                   Eigen::VectorXd& im) const {
  const Eigen::VectorXd v = mask_.cwiseProduct(x);
  re = cos_ * v;
  im = -(sin_ * v);
}

Eigen::VectorXd PhaseRetrievalModel::apply(const Eigen::VectorXd& x) const {
  check_x(x);
  Eigen::VectorXd re, im;
  spectrum(x, re, im);
  return (re.array().square() + im.array().square()).sqrt();
}

double PhaseRetrievalModel::log_likelihood(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y) const {
  check_xy(x, y);
  const Eigen::VectorXd r = y - apply(x);
  return -0.5 * r.squaredNorm() / noise_var_ -
         0.5 * m_ * (kLog2Pi + std::log(noise_var_));
}

Eigen::VectorXd PhaseRetrievalModel::grad_log_likelihood(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  check_xy(x, y);
  Eigen::VectorXd re, im;
  spectrum(x, re, im);
  const Eigen::VectorXd mag =
      (re.array().square() + im.array().square()).sqrt();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(d_);
  bool degenerate = false;
  for (int j = 0; j < m_; ++j) {
    if (mag[j] == 0.0) {
      // |.| is not differentiable at 0; use subgradient 0 for this term.
      degenerate = true;
      continue;
    }
    const double scale = (y[j] - mag[j]) / (noise_var_ * mag[j]);
    grad += scale * (re[j] * cos_.row(j) - im[j] * sin_.row(j)).transpose();
  }
  if (degenerate)
    zero_magnitude_events_.fetch_add(1, std::memory_order_relaxed);
  return mask_.cwiseProduct(grad);
}

Eigen::VectorXd PhaseRetrievalModel::simulate_measurement(
    const Eigen::VectorXd& x, Rng& rng) const {
  check_x(x);
  return apply(x) + std::sqrt(noise_var_) * rng.normal_vector(m_);
}

Eigen::VectorXd make_rademacher_mask(int d, std::uint64_t seed) {
  if (d < 1) throw ConfigError("rademacher mask: d must be >= 1");
  Eigen::VectorXd mask(d);
  std::uint64_t s = seed;
  for (int i = 0; i < d; ++i)
    mask[i] = (splitmix64(s) >> 63) ? 1.0 : -1.0;
  return mask;
}

QuantizedSensingModel::QuantizedSensingModel(int d, double theta)
    : d_(d), theta_(theta) {
  if (d_ < 1) throw ConfigError("quantized sensing: d must be >= 1");
  if (!(theta_ > 0.0))
    throw ConfigError("quantized sensing: theta must be > 0");
}

Eigen::VectorXd QuantizedSensingModel::apply(const Eigen::VectorXd& x) const {
  check_x(x);
  // Deterministic part of the map; the quantiser itself is the noise law.
  return x;
}

double QuantizedSensingModel::log_likelihood(const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y) const {
  check_xy(x, y);
  double ll = 0.0;
  for (int i = 0; i < d_; ++i) {
    if (y[i] != 1.0 && y[i] != -1.0)
      throw std::domain_error("quantized sensing: y entries must be +-1");
    ll += log_sigmoid(y[i] * x[i] / theta_);
  }
  return ll;
}

Eigen::VectorXd QuantizedSensingModel::grad_log_likelihood(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  check_xy(x, y);
  Eigen::VectorXd grad(d_);
  for (int i = 0; i < d_; ++i) {
    if (y[i] != 1.0 && y[i] != -1.0)
      throw std::domain_error("quantized sensing: y entries must be +-1");
    grad[i] = (y[i] / theta_) * sigmoid(-y[i] * x[i] / theta_);
  }
  return grad;
}

Eigen::VectorXd QuantizedSensingModel::simulate_measurement(
    const Eigen::VectorXd& x, Rng& rng) const {
  check_x(x);
  Eigen::VectorXd y(d_);
  for (int i = 0; i < d_; ++i)
    y[i] = rng.uniform() < sigmoid(x[i] / theta_) ? 1.0 : -1.0;
  return y;
}

namespace {

Eigen::MatrixXd block_average_operator(int d, int ratio) {
  if (ratio < 1) throw ConfigError("downsample: ratio must be >= 1");
  if (d < 1 || d % ratio != 0)
    throw ConfigError("downsample: dimension must be a multiple of ratio");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d / ratio, d);
  for (int j = 0; j < d / ratio; ++j)
    for (int i = 0; i < ratio; ++i) A(j, j * ratio + i) = 1.0 / ratio;
  return A;
}

}  // namespace

DownsampleModel::DownsampleModel(int d, int ratio, double noise_var)
    : LinearGaussianModel(block_average_operator(d, ratio), noise_var),
      ratio_(ratio) {}

}  // namespace dpnp
