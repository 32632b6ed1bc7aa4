#pragma once

#include <Eigen/Core>
#include <vector>

#include "dpnp/prior.hpp"
#include "dpnp/rng.hpp"
#include "dpnp/schedule.hpp"

namespace dpnp {

// Largest t with bar_alpha_t > 1 / (eta^2 + 1); the denoiser integrates the
// reverse dynamics from that step down to 0.  Always >= 0 since
// bar_alpha_0 = 1.
int truncation_index(const DiffusionSchedule& s, double eta);

// Heat-flow clock tau_t = 1 / bar_alpha_t - 1 for t = 0..T'.
struct HeatFlowSchedule {
  int T_prime = 0;
  std::vector<double> taus;
};
HeatFlowSchedule make_heat_flow_schedule(const DiffusionSchedule& s,
                                         double eta);

// OU probability-flow clock bar_u_t = ((eta^2+1) bar_alpha_t - 1) /
// (eta^2 + bar_alpha_t - 1) for t = 0..T'; bar_u_0 = 1.
struct OUDenoiseSchedule {
  int T_prime = 0;
  std::vector<double> bar_us;
};
OUDenoiseSchedule make_ou_denoise_schedule(const DiffusionSchedule& s,
                                           double eta);

// h(eta, u) = -arctan(eta / sqrt(1/u - 1)) on (0, 1], with the u = 1 limit
// -pi/2.
double h_fn(double eta, double u);

// Effective noise level after partial denoising:
// tilde_tau(tau, eta) = 0.5 log(eta^2 (e^{2 tau} - 1) / (eta^2 + e^{2 tau}
// - 1) + 1).
double tilde_tau(double tau, double eta);

enum class DdsVariant { kDdpm, kDdim };

// Denoising diffusion sampler for the posterior of x given
// x + eta * eps = x_noisy.  Per-step coefficients are precomputed at
// construction, so one instance can serve many draws.
class DdsSampler {
 public:
  DdsSampler(const DiffusionSchedule& s, double eta, DdsVariant variant);

  int truncation() const { return T_prime_; }
  DdsVariant variant() const { return variant_; }

  Eigen::VectorXd sample(const Eigen::VectorXd& x_noisy,
                         const ScoreOracle& oracle, Rng& rng) const;

  // DDIM with the terminal latent injected instead of drawn; the whole
  // trajectory is then deterministic.
  Eigen::VectorXd sample_with_latent(const Eigen::VectorXd& x_noisy,
                                     const ScoreOracle& oracle,
                                     const Eigen::VectorXd& z_init) const;

 private:
  Eigen::VectorXd run_ddpm(const Eigen::VectorXd& x_noisy,
                           const ScoreOracle& oracle, Rng& rng) const;
  Eigen::VectorXd run_ddim(const Eigen::VectorXd& x_noisy,
                           const ScoreOracle& oracle,
                           Eigen::VectorXd z) const;

  DdsVariant variant_;
  double eta_;
  int T_prime_ = 0;
  std::vector<double> sqrt_bar_alpha_;  // t = 0..T'
  // DDPM coefficients, indexed by t = 1..T'.
  std::vector<double> drift_coeff_;  // 2 (sqrt tau_t - sqrt tau_{t-1})
  std::vector<double> noise_std_;    // sqrt(tau_t - tau_{t-1})
  // DDIM coefficients, indexed by t = 1..T'.
  std::vector<double> ratio_;       // sqrt(c_{t-1}) / sqrt(c_t)
  std::vector<double> eps_coeff_;   // sqrt(c_{t-1}) (h_{t-1} - h_t)
  std::vector<double> eval_coeff_;  // eta^2 sqrt(bar_u_t bar_alpha_t) / c_t
};

// One posterior draw via the stochastic (heat flow) discretisation.
Eigen::VectorXd dds_ddpm(const Eigen::VectorXd& x_noisy,
                         const ScoreOracle& oracle,
                         const DiffusionSchedule& s, double eta, Rng& rng);

// One posterior draw via the probability-flow discretisation; the only
// randomness is the terminal latent.
Eigen::VectorXd dds_ddim(const Eigen::VectorXd& x_noisy,
                         const ScoreOracle& oracle,
                         const DiffusionSchedule& s, double eta, Rng& rng);

}  // namespace dpnp
