#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dpnp/grid.hpp"

namespace dpnp {

enum class KernelLabel { kPcs, kDds, kDpnp, kAux };

// Row-stochastic grid discretization of a DPnP transition kernel, together
// with the probability masses of its matching stationary law (pi_eta for
// PCS/DDS/DPnP, mu_eta for AUX -- each factor kernel is itself reversible
// for its own product measure, stored here).
struct KernelMatrix {
  Eigen::MatrixXd P;
  KernelLabel label = KernelLabel::kDpnp;
  double eta = 0.0;
  std::vector<double> points;
  double spacing = 0.0;
  std::vector<double> stationary;  // masses, sum 1

  int size() const { return static_cast<int>(points.size()); }
};

// Discretize K_PCS / K_DDS / their compositions on the grid by trapezoidal
// quadrature; rows are normalized by their own quadrature sums, which makes
// the stored stationary masses satisfy detailed balance to round-off.
KernelMatrix build_kernel(const GaussianMixturePrior& prior,
                          const MeasurementModel& model,
                          const Eigen::VectorXd& y, double eta,
                          const Grid& grid, KernelLabel which);

// max_ij |pi_i K_ij - pi_j K_ji| / max_ij (pi_i K_ij).
double detailed_balance_residual(const KernelMatrix& K,
                                 const std::vector<double>& stationary_mass);

struct SpectralReport {
  double lambda2 = 0.0;            // second-largest eigenvalue modulus
  std::vector<double> chi2_decay;  // chi^2(p K^n || pi) for n = 0..n_steps
  Eigen::VectorXd eigenvalues;     // full spectrum, descending
};

// Symmetrize by diag(sqrt(pi)) conjugation, solve the symmetric eigenproblem,
// and follow the chi^2 divergence of a tilted start density for n_steps
// kernel applications.
SpectralReport spectral_analysis(const KernelMatrix& K, int n_steps = 10);

}  // namespace dpnp
