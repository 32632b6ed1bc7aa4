#include "dpnp/pcs.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpnp/errors.hpp"

namespace dpnp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_args(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                const MeasurementModel& model, double eta, double gamma) {
  if (x.size() != model.dim_x())
    throw std::invalid_argument("pcs: x dimension mismatch");
  if (y.size() != model.dim_y())
    throw std::invalid_argument("pcs: y dimension mismatch");
  if (!(eta > 0.0)) throw std::domain_error("pcs: eta must be > 0");
  if (gamma < 0.0) throw std::domain_error("pcs: gamma must be >= 0");
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd proposal_mean(const Eigen::VectorXd& z,
                              const Eigen::VectorXd& grad,
                              const Eigen::VectorXd& x, double eta,
                              double r) {
  return r * z + (1.0 - r) * x + eta * eta * (1.0 - r) * grad;
}

}  // namespace

PCSConfig pcs_config_for(double eta, double r_target, int N) {
  if (!(eta > 0.0)) throw std::domain_error("pcs: eta must be > 0");
  if (!(r_target > 0.0 && r_target < 1.0))
    throw std::domain_error("pcs: damping target must lie in (0, 1)");
  if (N < 0) throw std::domain_error("pcs: N must be >= 0");
  return PCSConfig{eta * eta * std::log(1.0 / r_target), N};
}

double log_proposal_density(const Eigen::VectorXd& z_to,
                            const Eigen::VectorXd& z_from,
                            const Eigen::VectorXd& x,
                            const MeasurementModel& model,
                            const Eigen::VectorXd& y, double eta,
                            double gamma) {
  check_args(x, y, model, eta, gamma);
  if (z_to.size() != x.size() || z_from.size() != x.size())
    throw std::invalid_argument("pcs: state dimension mismatch");
  const double r = std::exp(-gamma / (eta * eta));
  const double var = eta * eta * (1.0 - r * r);
  if (!(var > 0.0))
    throw std::domain_error(
        "pcs: degenerate proposal (gamma = 0 gives zero variance)");
  const Eigen::VectorXd mean =
      proposal_mean(z_from, model.grad_log_likelihood(z_from, y), x, eta, r);
  const double d = static_cast<double>(x.size());
  return -0.5 * d * (kLog2Pi + std::log(var)) -
         (z_to - mean).squaredNorm() / (2.0 * var);
}

double log_metropolis_ratio(const Eigen::VectorXd& z_from,
                            const Eigen::VectorXd& z_to,
                            const Eigen::VectorXd& x,
                            const MeasurementModel& model,
                            const Eigen::VectorXd& y, double eta,
                            double gamma) {
  check_args(x, y, model, eta, gamma);
  const double r = std::exp(-gamma / (eta * eta));
  const double var = eta * eta * (1.0 - r * r);
  if (!(var > 0.0)) return 0.0;  // proposal is the identity; q == 1

  const double ll_from = model.log_likelihood(z_from, y);
  const double ll_to = model.log_likelihood(z_to, y);
  const Eigen::VectorXd grad_from = model.grad_log_likelihood(z_from, y);
  const Eigen::VectorXd grad_to = model.grad_log_likelihood(z_to, y);

  const double prox_from = (z_from - x).squaredNorm();
  const double prox_to = (z_to - x).squaredNorm();
  const double fwd_exp =
      (z_to - proposal_mean(z_from, grad_from, x, eta, r)).squaredNorm();
  const double bwd_exp =
      (z_from - proposal_mean(z_to, grad_to, x, eta, r)).squaredNorm();

  // Normalising constants of Q cancel exactly; each bracket below flips sign
  // under (from <-> to), so the reverse ratio is the exact negation.
  return (ll_to - ll_from) + (prox_from - prox_to) / (2.0 * eta * eta) +
         (fwd_exp - bwd_exp) / (2.0 * var);
}

std::pair<Eigen::VectorXd, PCSDiagnostics> pcs_mala(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y,
    const MeasurementModel& model, double eta, const PCSConfig& cfg,
    Rng& rng) {
  check_args(x, y, model, eta, cfg.gamma);
  if (cfg.N < 0) throw std::domain_error("pcs: N must be >= 0");

  const double r = std::exp(-cfg.gamma / (eta * eta));
  const double var = eta * eta * (1.0 - r * r);
  const double step_std = std::sqrt(var);
  const bool frozen = !(var > 0.0);  // gamma == 0: proposal is the identity

  Eigen::VectorXd z = x;
  double ll = model.log_likelihood(z, y);
  Eigen::VectorXd grad = model.grad_log_likelihood(z, y);
  double prox = 0.0;  // ||z - x||^2, zero at the start
  if (!std::isfinite(ll) || !grad.allFinite())
    throw NumericalFailure("pcs: non-finite log-likelihood at start",
                           to_std(z));

  PCSDiagnostics diag;
  long accepted = 0;
  for (int n = 0; n < cfg.N; ++n) {
    // One uniform per iteration regardless of branch keeps the stream layout
    // fixed.
    if (frozen) {
      rng.normal_vector(x.size());
      rng.uniform();
      ++accepted;
      continue;
    }
    const Eigen::VectorXd mean = proposal_mean(z, grad, x, eta, r);
    const Eigen::VectorXd zp = mean + step_std * rng.normal_vector(x.size());

    const double ll_p = model.log_likelihood(zp, y);
    const Eigen::VectorXd grad_p = model.grad_log_likelihood(zp, y);
    if (!std::isfinite(ll_p) || !grad_p.allFinite())
      throw NumericalFailure("pcs: non-finite log-likelihood at proposal",
                             to_std(zp));
    const double prox_p = (zp - x).squaredNorm();
    const double fwd_exp = (zp - mean).squaredNorm();
    const double bwd_exp =
        (z - proposal_mean(zp, grad_p, x, eta, r)).squaredNorm();
    const double log_q = (ll_p - ll) +
                         (prox - prox_p) / (2.0 * eta * eta) +
                         (fwd_exp - bwd_exp) / (2.0 * var);
    diag.max_abs_log_ratio =
        std::max(diag.max_abs_log_ratio, std::abs(log_q));

    if (std::log(rng.uniform()) < log_q) {
      z = zp;
      ll = ll_p;
      grad = grad_p;
      prox = prox_p;
      ++accepted;
    }
  }

  diag.acceptance_rate =
      cfg.N == 0 ? 1.0 : static_cast<double>(accepted) / cfg.N;
  diag.final_log_target = ll - prox / (2.0 * eta * eta);
  return {std::move(z), diag};
}

LinearProximalSampler::LinearProximalSampler(const LinearGaussianModel& model,
                                             const Eigen::VectorXd& y,
                                             double eta) {
  if (!(eta > 0.0)) throw std::domain_error("pcs: eta must be > 0");
  if (y.size() != model.dim_y())
    throw std::invalid_argument("pcs: y dimension mismatch");
  d_ = model.dim_x();
  inv_eta2_ = 1.0 / (eta * eta);
  const Eigen::MatrixXd precision =
      model.normal_matrix() +
      inv_eta2_ * Eigen::MatrixXd::Identity(d_, d_);
  precision_llt_.compute(precision);
  if (precision_llt_.info() != Eigen::Success)
    throw std::runtime_error("pcs: proximal precision not positive definite");
  data_term_ = model.whitened_adjoint() * y;
}

Eigen::VectorXd LinearProximalSampler::draw(const Eigen::VectorXd& x,
                                            Rng& rng) const {
  if (x.size() != d_)
    throw std::invalid_argument("pcs: x dimension mismatch");
  const Eigen::VectorXd mean =
      precision_llt_.solve(data_term_ + inv_eta2_ * x);
  // With precision P = L L^T, the draw mean + L^-T w has covariance P^-1.
  const Eigen::VectorXd w = rng.normal_vector(d_);
  return mean + precision_llt_.matrixU().solve(w);
}

Eigen::VectorXd pcs_linear_gaussian(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y,
                                    const LinearGaussianModel& model,
                                    double eta, Rng& rng) {
  return LinearProximalSampler(model, y, eta).draw(x, rng);
}

}  // namespace dpnp
