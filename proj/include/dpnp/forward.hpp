#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <atomic>
#include <cstdint>

#include "dpnp/rng.hpp"

namespace dpnp {

// Measurement model y ~ p(. | x).  Implementations are immutable after
// construction and safe to share across threads.
class MeasurementModel {
 public:
  virtual ~MeasurementModel() = default;

  virtual int dim_x() const = 0;
  virtual int dim_y() const = 0;

  // Deterministic part of the measurement map.
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& x) const = 0;

  // log p(y | x), including normalising constants.
  virtual double log_likelihood(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) const = 0;

  // Gradient of log_likelihood in x.
  virtual Eigen::VectorXd grad_log_likelihood(const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& y)
      const = 0;

  // Draw y from the model's noise law given ground truth x.
  virtual Eigen::VectorXd simulate_measurement(const Eigen::VectorXd& x,
                                               Rng& rng) const = 0;

 protected:
  void check_x(const Eigen::VectorXd& x) const;
  void check_xy(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
};

// y = A x + xi, xi ~ N(0, Sigma).
class LinearGaussianModel : public MeasurementModel {
 public:
  LinearGaussianModel(Eigen::MatrixXd A, Eigen::MatrixXd noise_cov);
  // Isotropic noise convenience.
  LinearGaussianModel(Eigen::MatrixXd A, double noise_var);

  int dim_x() const override { return static_cast<int>(A_.cols()); }
  int dim_y() const override { return static_cast<int>(A_.rows()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
  double log_likelihood(const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y) const override;
  Eigen::VectorXd grad_log_likelihood(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) const override;
  Eigen::VectorXd simulate_measurement(const Eigen::VectorXd& x,
                                       Rng& rng) const override;

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& noise_cov() const { return noise_cov_; }
  // A^T Sigma^-1 A and A^T Sigma^-1, cached for posterior algebra.
  const Eigen::MatrixXd& normal_matrix() const { return AtSi_A_; }
  const Eigen::MatrixXd& whitened_adjoint() const { return AtSi_; }

 private:
  void init();

  Eigen::MatrixXd A_;
  Eigen::MatrixXd noise_cov_;
  Eigen::LLT<Eigen::MatrixXd> chol_;  // of noise_cov
  Eigen::MatrixXd AtSi_;              // A^T Sigma^-1
  Eigen::MatrixXd AtSi_A_;
  double log_norm_const_ = 0.0;
};

// y = |F (mask .* x)| + xi on the real-signal half spectrum,
// xi ~ N(0, noise_var I).  F is the unitary-free plain DFT, evaluated
// directly (d is small here).
class PhaseRetrievalModel : public MeasurementModel {
 public:
  PhaseRetrievalModel(Eigen::VectorXd mask, double noise_var);

  int dim_x() const override { return d_; }
  int dim_y() const override { return m_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
  double log_likelihood(const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y) const override;
  Eigen::VectorXd grad_log_likelihood(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) const override;
  Eigen::VectorXd simulate_measurement(const Eigen::VectorXd& x,
                                       Rng& rng) const override;

  const Eigen::VectorXd& mask() const { return mask_; }
  double noise_var() const { return noise_var_; }
  // Number of gradient queries that hit a zero magnitude (subgradient 0 was
  // used for those frequencies).
  std::uint64_t degenerate_gradient_events() const {
    return zero_magnitude_events_.load(std::memory_order_relaxed);
  }

 private:
  void spectrum(const Eigen::VectorXd& x, Eigen::VectorXd& re,
                Eigen::VectorXd& im) const;

  Eigen::VectorXd mask_;
  double noise_var_;
  int d_;
  int m_;
  Eigen::MatrixXd cos_;  // m x d
  Eigen::MatrixXd sin_;  // m x d
  mutable std::atomic<std::uint64_t> zero_magnitude_events_{0};
};

// Rademacher +-1 mask drawn from `seed`.
Eigen::VectorXd make_rademacher_mask(int d, std::uint64_t seed);

// One-bit dithered quantisation: y_i in {-1, +1} with
// P(y_i = +1 | x) = sigmoid(x_i / theta).
class QuantizedSensingModel : public MeasurementModel {
 public:
  QuantizedSensingModel(int d, double theta);

  int dim_x() const override { return d_; }
  int dim_y() const override { return d_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
  double log_likelihood(const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y) const override;
  Eigen::VectorXd grad_log_likelihood(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) const override;
  Eigen::VectorXd simulate_measurement(const Eigen::VectorXd& x,
                                       Rng& rng) const override;

  double theta() const { return theta_; }

 private:
  int d_;
  double theta_;
};

// Block averaging y_j = mean(x over block j) + noise; a LinearGaussianModel
// whose rows each sum to 1.
class DownsampleModel : public LinearGaussianModel {
 public:
  DownsampleModel(int d, int ratio, double noise_var);

  int ratio() const { return ratio_; }

 private:
  int ratio_;
};

// log p(y | x) == `value` everywhere; gradient is identically zero.  The
// measurement is ignored.  Useful wherever a flat likelihood is needed.
class ConstantLikelihoodModel : public MeasurementModel {
 public:
  explicit ConstantLikelihoodModel(int d, double value = 0.0)
      : d_(d), value_(value) {}

  int dim_x() const override { return d_; }
  int dim_y() const override { return 1; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override {
    check_x(x);
    return Eigen::VectorXd::Zero(1);
  }
  double log_likelihood(const Eigen::VectorXd& x,
                        const Eigen::VectorXd&) const override {
    check_x(x);
    return value_;
  }
  Eigen::VectorXd grad_log_likelihood(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd&) const override {
    check_x(x);
    return Eigen::VectorXd::Zero(d_);
  }
  Eigen::VectorXd simulate_measurement(const Eigen::VectorXd& x,
                                       Rng&) const override {
    check_x(x);
    return Eigen::VectorXd::Zero(1);
  }

 private:
  int d_;
  double value_;
};

}  // namespace dpnp
