#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <utility>

#include "dpnp/forward.hpp"
#include "dpnp/rng.hpp"

namespace dpnp {

// Proximal consistency step: sample from
//   p(z) propto exp( L(z; y) - ||z - x||^2 / (2 eta^2) ).
struct PCSConfig {
  double gamma = 0.0;  // Langevin step size, > 0; 0 degenerates to no move
  int N = 200;         // MALA iterations, >= 0
};

// gamma such that the OU damping r = e^{-gamma / eta^2} equals r_target.
PCSConfig pcs_config_for(double eta, double r_target = 0.7, int N = 200);

struct PCSDiagnostics {
  double acceptance_rate = 1.0;
  double final_log_target = 0.0;
  double max_abs_log_ratio = 0.0;  // of the Metropolis log-ratios seen
};

// Log density of the MALA proposal z_to given z_from: Gaussian with mean
//   r z_from + (1-r) x + eta^2 (1-r) grad L(z_from; y)
// and covariance eta^2 (1 - r^2) I, where r = e^{-gamma / eta^2}.
double log_proposal_density(const Eigen::VectorXd& z_to,
                            const Eigen::VectorXd& z_from,
                            const Eigen::VectorXd& x,
                            const MeasurementModel& model,
                            const Eigen::VectorXd& y, double eta,
                            double gamma);

// log of the Metropolis ratio q for the move z_from -> z_to.  Grouped so
// that the reverse move evaluates to the exact IEEE negation.
double log_metropolis_ratio(const Eigen::VectorXd& z_from,
                            const Eigen::VectorXd& z_to,
                            const Eigen::VectorXd& x,
                            const MeasurementModel& model,
                            const Eigen::VectorXd& y, double eta,
                            double gamma);

// Metropolis-adjusted Langevin chain started at x; returns the final state.
std::pair<Eigen::VectorXd, PCSDiagnostics> pcs_mala(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y,
    const MeasurementModel& model, double eta, const PCSConfig& cfg,
    Rng& rng);

// Exact proximal draw for a linear Gaussian model:
//   N( (A^T S^-1 A + eta^-2 I)^-1 (A^T S^-1 y + eta^-2 x),
//      (A^T S^-1 A + eta^-2 I)^-1 ).
Eigen::VectorXd pcs_linear_gaussian(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y,
                                    const LinearGaussianModel& model,
                                    double eta, Rng& rng);

// Factorisation cache for repeated exact proximal draws at a fixed eta.
class LinearProximalSampler {
 public:
  LinearProximalSampler(const LinearGaussianModel& model,
                        const Eigen::VectorXd& y, double eta);

  Eigen::VectorXd draw(const Eigen::VectorXd& x, Rng& rng) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> precision_llt_;
  Eigen::VectorXd data_term_;  // A^T Sigma^-1 y
  double inv_eta2_;
  int d_;
};

}  // namespace dpnp
