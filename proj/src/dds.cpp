#include "dpnp/dds.hpp"

#include <cmath>
#include <stdexcept>

#include "dpnp/errors.hpp"

namespace dpnp {

namespace {
constexpr double kHalfPi = 1.5707963267948966192313216916398;
}

int truncation_index(const DiffusionSchedule& s, double eta) {
  if (!(eta > 0.0)) throw std::domain_error("dds: eta must be > 0");
  const double threshold = 1.0 / (eta * eta + 1.0);
  int tp = 0;
  for (int t = 1; t <= s.T(); ++t) {
    if (s.bar_alpha(t) > threshold) tp = t;
  }
  return tp;
}

HeatFlowSchedule make_heat_flow_schedule(const DiffusionSchedule& s,
                                         double eta) {
  HeatFlowSchedule h;
  h.T_prime = truncation_index(s, eta);
  h.taus.resize(static_cast<std::size_t>(h.T_prime) + 1);
  for (int t = 0; t <= h.T_prime; ++t)
    h.taus[static_cast<std::size_t>(t)] = 1.0 / s.bar_alpha(t) - 1.0;
  return h;
}

OUDenoiseSchedule make_ou_denoise_schedule(const DiffusionSchedule& s,
                                           double eta) {
  OUDenoiseSchedule o;
  o.T_prime = truncation_index(s, eta);
  o.bar_us.resize(static_cast<std::size_t>(o.T_prime) + 1);
  const double e2 = eta * eta;
  for (int t = 0; t <= o.T_prime; ++t) {
    const double ab = s.bar_alpha(t);
    o.bar_us[static_cast<std::size_t>(t)] =
        ((e2 + 1.0) * ab - 1.0) / (e2 + ab - 1.0);
  }
  return o;
}

double h_fn(double eta, double u) {
  if (!(eta > 0.0)) throw std::domain_error("dds: eta must be > 0");
  if (!(u > 0.0 && u <= 1.0))
    throw std::domain_error("dds: h_fn argument must lie in (0, 1]");
  if (u == 1.0) return -kHalfPi;
  return -std::atan(eta / std::sqrt(1.0 / u - 1.0));
}

double tilde_tau(double tau, double eta) {
  if (!(eta > 0.0)) throw std::domain_error("dds: eta must be > 0");
  if (tau < 0.0) throw std::domain_error("dds: tau must be >= 0");
  const double e2 = eta * eta;
  const double g = std::expm1(2.0 * tau);  // e^{2 tau} - 1
  return 0.5 * std::log1p(e2 * g / (e2 + g));
}

DdsSampler::DdsSampler(const DiffusionSchedule& s, double eta,
                       DdsVariant variant)
    : variant_(variant), eta_(eta) {
  T_prime_ = truncation_index(s, eta);
  if (T_prime_ == 0)
    throw InsufficientScheduleError(
        "dds: schedule has no step above the noise level; refine the "
        "schedule or lower eta");
  const std::size_t n = static_cast<std::size_t>(T_prime_) + 1;
  sqrt_bar_alpha_.resize(n);
  for (int t = 0; t <= T_prime_; ++t)
    sqrt_bar_alpha_[static_cast<std::size_t>(t)] =
        std::sqrt(s.bar_alpha(t));

  if (variant_ == DdsVariant::kDdpm) {
    const HeatFlowSchedule hf = make_heat_flow_schedule(s, eta);
    drift_coeff_.resize(n, 0.0);
    noise_std_.resize(n, 0.0);
    for (int t = 1; t <= T_prime_; ++t) {
      const double tau_t = hf.taus[static_cast<std::size_t>(t)];
      const double tau_p = hf.taus[static_cast<std::size_t>(t - 1)];
      drift_coeff_[static_cast<std::size_t>(t)] =
          2.0 * (std::sqrt(tau_t) - std::sqrt(tau_p));
      noise_std_[static_cast<std::size_t>(t)] = std::sqrt(tau_t - tau_p);
    }
  } else {
    const OUDenoiseSchedule ou = make_ou_denoise_schedule(s, eta);
    const double e2m1 = eta * eta - 1.0;
    ratio_.resize(n, 0.0);
    eps_coeff_.resize(n, 0.0);
    eval_coeff_.resize(n, 0.0);
    for (int t = 1; t <= T_prime_; ++t) {
      const double u_t = ou.bar_us[static_cast<std::size_t>(t)];
      const double u_p = ou.bar_us[static_cast<std::size_t>(t - 1)];
      const double c_t = e2m1 * u_t + 1.0;
      const double c_p = e2m1 * u_p + 1.0;
      ratio_[static_cast<std::size_t>(t)] = std::sqrt(c_p) / std::sqrt(c_t);
      eps_coeff_[static_cast<std::size_t>(t)] =
          std::sqrt(c_p) * (h_fn(eta, u_p) - h_fn(eta, u_t));
      eval_coeff_[static_cast<std::size_t>(t)] =
          eta * eta *
          std::sqrt(u_t * s.bar_alpha(t)) / c_t;
    }
  }
}

Eigen::VectorXd DdsSampler::run_ddpm(const Eigen::VectorXd& x_noisy,
                                     const ScoreOracle& oracle,
                                     Rng& rng) const {
  Eigen::VectorXd x = x_noisy;
  for (int t = T_prime_; t >= 1; --t) {
    const std::size_t i = static_cast<std::size_t>(t);
    const Eigen::VectorXd eps =
        oracle.noise_discrete(t, sqrt_bar_alpha_[i] * x);
    x -= drift_coeff_[i] * eps;
    x += noise_std_[i] * rng.normal_vector(x.size());
  }
  return x;
}

Eigen::VectorXd DdsSampler::run_ddim(const Eigen::VectorXd& x_noisy,
                                     const ScoreOracle& oracle,
                                     Eigen::VectorXd z) const {
  for (int t = T_prime_; t >= 1; --t) {
    const std::size_t i = static_cast<std::size_t>(t);
    const Eigen::VectorXd point =
        sqrt_bar_alpha_[i] * x_noisy + eval_coeff_[i] * z;
    const Eigen::VectorXd eps = oracle.noise_discrete(t, point);
    z = ratio_[i] * z + eps_coeff_[i] * eps;
  }
  return x_noisy + z;
}

Eigen::VectorXd DdsSampler::sample(const Eigen::VectorXd& x_noisy,
                                   const ScoreOracle& oracle,
                                   Rng& rng) const {
  if (x_noisy.size() != oracle.dim())
    throw std::invalid_argument("dds: x_noisy dimension mismatch");
  if (variant_ == DdsVariant::kDdpm) return run_ddpm(x_noisy, oracle, rng);
  return run_ddim(x_noisy, oracle, rng.normal_vector(x_noisy.size()));
}

Eigen::VectorXd DdsSampler::sample_with_latent(
    const Eigen::VectorXd& x_noisy, const ScoreOracle& oracle,
    const Eigen::VectorXd& z_init) const {
  if (variant_ != DdsVariant::kDdim)
    throw std::invalid_argument(
        "dds: injected latents only apply to the DDIM variant");
  if (x_noisy.size() != oracle.dim() || z_init.size() != x_noisy.size())
    throw std::invalid_argument("dds: dimension mismatch");
  return run_ddim(x_noisy, oracle, z_init);
}

Eigen::VectorXd dds_ddpm(const Eigen::VectorXd& x_noisy,
                         const ScoreOracle& oracle,
                         const DiffusionSchedule& s, double eta, Rng& rng) {
  return DdsSampler(s, eta, DdsVariant::kDdpm).sample(x_noisy, oracle, rng);
}

Eigen::VectorXd dds_ddim(const Eigen::VectorXd& x_noisy,
                         const ScoreOracle& oracle,
                         const DiffusionSchedule& s, double eta, Rng& rng) {
  return DdsSampler(s, eta, DdsVariant::kDdim).sample(x_noisy, oracle, rng);
}

}  // namespace dpnp
