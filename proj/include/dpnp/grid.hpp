#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dpnp/forward.hpp"
#include "dpnp/prior.hpp"

namespace dpnp {

// Equidistant 1-d grid with trapezoidal quadrature weights (spacing per
// interior point, half of it at the two ends).
struct Grid {
  std::vector<double> points;
  std::vector<double> quad_weights;
  double spacing = 0.0;

  int size() const { return static_cast<int>(points.size()); }
};

Grid make_grid(double lo, double hi, int n);

// Default verification grid: spans the prior means +/- 8 max-sigma, widened
// by 4*eta on each side.  n is raised beyond the request when needed so that
// spacing <= eta/4, keeping the convolution oracles admissible.
Grid make_benchmark_grid(const GaussianMixturePrior& prior, double eta,
                         int n = 401);

// A probability distribution carried on a grid.  `weights` are per-point
// probability masses (they sum to 1), `values` the matching normalized
// density.  `raw_values` keeps the unnormalized integrand for oracles whose
// absolute scale matters (grid_q_eta stores q_eta itself there).
struct GridDensity {
  std::vector<double> points;
  std::vector<double> weights;
  double spacing = 0.0;
  std::vector<double> values;
  std::vector<double> raw_values;

  int size() const { return static_cast<int>(points.size()); }
};

// p*(x) * exp(L(x; y)), quadrature-normalized.  d = 1 only.
GridDensity grid_posterior(const GaussianMixturePrior& prior,
                           const MeasurementModel& model,
                           const Eigen::VectorXd& y, const Grid& grid);

// q_eta(x) = (exp(L(.; y)) convolved with N(0, eta^2))(x) by trapezoidal
// quadrature on the same grid; q_0 is exp(L(x; y)) exactly.  The
// unnormalized q_eta values are kept in raw_values.
GridDensity grid_q_eta(const MeasurementModel& model, const Eigen::VectorXd& y,
                       double eta, const Grid& grid);

// pi_eta ~ p*(x) q_eta(x), the stationary law of the DPnP chain at fixed eta.
GridDensity grid_pi_eta(const GaussianMixturePrior& prior,
                        const MeasurementModel& model, const Eigen::VectorXd& y,
                        double eta, const Grid& grid);

// mu_eta ~ p_eta(x) exp(L(x; y)) with p_eta the eta-smoothed prior: the
// stationary law of the auxiliary (DDS-then-PCS) chain.
GridDensity grid_mu_eta(const GaussianMixturePrior& prior,
                        const MeasurementModel& model, const Eigen::VectorXd& y,
                        double eta, const Grid& grid);

// Conjugate posterior of a Gaussian-mixture prior under a linear Gaussian
// model: again a Gaussian mixture, with evidence-reweighted components.
// Requires A' Sigma^-1 A to be diagonal (always true at d = 1), since the
// mixture components carry diagonal covariances.
GaussianMixturePrior analytic_gm_linear_posterior(
    const GaussianMixturePrior& prior, const LinearGaussianModel& model,
    const Eigen::VectorXd& y);

}  // namespace dpnp
