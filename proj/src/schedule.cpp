#include "dpnp/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "dpnp/errors.hpp"

namespace dpnp {

DiffusionSchedule::DiffusionSchedule(std::vector<double> betas)
    : betas_(std::move(betas)) {
  if (betas_.empty()) throw ConfigError("schedule: needs at least one step");
  for (double b : betas_) {
    if (!(b > 0.0 && b < 1.0))
      throw ConfigError("schedule: betas must lie in (0, 1)");
  }
  bar_alphas_.resize(betas_.size() + 1);
  bar_alphas_[0] = 1.0;
  for (std::size_t t = 0; t < betas_.size(); ++t)
    bar_alphas_[t + 1] = bar_alphas_[t] * (1.0 - betas_[t]);
}

double DiffusionSchedule::beta(int t) const {
  if (t < 1 || t > T()) throw std::out_of_range("schedule: beta index");
  return betas_[static_cast<std::size_t>(t - 1)];
}

double DiffusionSchedule::alpha(int t) const { return 1.0 - beta(t); }

double DiffusionSchedule::bar_alpha(int t) const {
  if (t < 0 || t > T()) throw std::out_of_range("schedule: bar_alpha index");
  return bar_alphas_[static_cast<std::size_t>(t)];
}

DiffusionSchedule make_linear_beta_schedule(int T, double beta1,
                                            double betaT) {
  if (T < 1) throw ConfigError("schedule: T must be >= 1");
  if (!(beta1 > 0.0) || !(betaT < 1.0) || beta1 > betaT)
    throw ConfigError("schedule: need 0 < beta1 <= betaT < 1");
  std::vector<double> betas(static_cast<std::size_t>(T));
  if (T == 1) {
    betas[0] = beta1;
  } else {
    for (int t = 1; t <= T; ++t)
      betas[static_cast<std::size_t>(t - 1)] =
          beta1 + (betaT - beta1) * (t - 1) / (T - 1);
  }
  return DiffusionSchedule(std::move(betas));
}

double continuous_time_of_step(const DiffusionSchedule& s, int t) {
  return 0.5 * std::log(1.0 / s.bar_alpha(t));
}

Eigen::VectorXd exp_integrator_step(const LinearSdeSpec& spec,
                                    const Eigen::VectorXd& state,
                                    double tau_from, double tau_to,
                                    const Eigen::VectorXd* noise) {
  if (tau_to < tau_from)
    throw std::invalid_argument("exp_integrator_step: tau_to < tau_from");
  if (spec.diffusion_coeff < 0.0)
    throw std::invalid_argument("exp_integrator_step: beta < 0");
  const bool stochastic = spec.diffusion_coeff > 0.0;
  if (stochastic && noise == nullptr)
    throw std::domain_error("exp_integrator_step: beta > 0 requires noise");
  if (!stochastic && noise != nullptr)
    throw std::domain_error("exp_integrator_step: beta == 0 forbids noise");
  if (spec.drift_frozen.size() != state.size())
    throw std::invalid_argument("exp_integrator_step: drift size mismatch");
  if (noise && noise->size() != state.size())
    throw std::invalid_argument("exp_integrator_step: noise size mismatch");

  const double dt = tau_to - tau_from;
  const double v = spec.drift_linear;
  const double growth = std::exp(v * dt);
  // expm1 keeps the v -> 0 limits accurate for tiny v * dt.
  const double drift_int = (v == 0.0) ? dt : std::expm1(v * dt) / v;
  Eigen::VectorXd out = growth * state + drift_int * spec.drift_frozen;
  if (stochastic) {
    const double var = (v == 0.0)
                           ? spec.diffusion_coeff * dt
                           : spec.diffusion_coeff * std::expm1(2.0 * v * dt) /
                                 (2.0 * v);
    out += std::sqrt(var) * (*noise);
  }
  return out;
}

}  // namespace dpnp
