#pragma once

#include <Eigen/Core>
#include <vector>

namespace dpnp {

// Variance schedule of the discrete forward diffusion
//   x_t = sqrt(alpha_bar_t) x_0 + sqrt(1 - alpha_bar_t) eps.
// bar_alpha(0) == 1 by convention and bar_alpha is strictly decreasing.
class DiffusionSchedule {
 public:
  DiffusionSchedule(std::vector<double> betas);

  int T() const { return static_cast<int>(betas_.size()); }
  // t in [1, T]
  double beta(int t) const;
  double alpha(int t) const;
  // t in [0, T]
  double bar_alpha(int t) const;

  const std::vector<double>& bar_alphas() const { return bar_alphas_; }

 private:
  std::vector<double> betas_;
  std::vector<double> bar_alphas_;  // size T+1, index by t
};

// Linear interpolation of beta from beta1 at t=1 to betaT at t=T.
DiffusionSchedule make_linear_beta_schedule(int T, double beta1, double betaT);

// Time change onto the OU process: tau_t = 0.5 * log(1 / bar_alpha_t).
double continuous_time_of_step(const DiffusionSchedule& s, int t);

// One-step linear SDE  dX = (v X + f) dtau + sqrt(beta) dW  with frozen
// coefficients on the step interval.
struct LinearSdeSpec {
  double drift_linear = 0.0;       // v
  Eigen::VectorXd drift_frozen;    // f
  double diffusion_coeff = 0.0;    // beta >= 0
};

// Exact transition of the linear SDE from tau_from to tau_to:
//   mean  = e^{v dt} x + f (e^{v dt} - 1) / v
//   cov   = beta (e^{2 v dt} - 1) / (2 v) * I
// with the v -> 0 limits (f dt and beta dt).  `noise` supplies the standard
// normal vector and must be present exactly when beta > 0.
Eigen::VectorXd exp_integrator_step(const LinearSdeSpec& spec,
                                    const Eigen::VectorXd& state,
                                    double tau_from, double tau_to,
                                    const Eigen::VectorXd* noise = nullptr);

}  // namespace dpnp
