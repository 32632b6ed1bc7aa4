#include "dpnp/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpnp/errors.hpp"

namespace dpnp {

namespace {

struct Factors {
  Eigen::MatrixXd pcs;           // row-stochastic K_PCS
  Eigen::MatrixXd dds;           // row-stochastic K_DDS
  Eigen::VectorXd exp_ll;        // exp(L_i - max L)
  Eigen::VectorXd prior_vals;    // exp(log p*_i - max)
  Eigen::VectorXd q_rowsum;      // discrete q_eta (floating row sums), scaled
  Eigen::VectorXd p_eta_rowsum;  // discrete p_eta, scaled
  Eigen::VectorXd quadw;
};

// Both factor kernels share the Gaussian mass G_ik = exp(-(x_i-x_k)^2/2eta^2)
// and are normalized by their own trapezoidal row sums; the exact row sums
// are what makes the stored stationary vectors balance to round-off.
Factors build_factors(const GaussianMixturePrior& prior,
                      const MeasurementModel& model, const Eigen::VectorXd& y,
                      double eta, const Grid& grid) {
  if (!(eta > 0.0)) throw ConfigError("build_kernel: eta must be > 0");
  if (grid.spacing > eta / 4.0)
    throw ResolutionError("build_kernel: spacing > eta/4, refine the grid");
  const int n = grid.size();

  Factors f;
  f.quadw.resize(n);
  Eigen::VectorXd ll(n), lp(n);
  Eigen::VectorXd x(1);
  for (int i = 0; i < n; ++i) {
    x[0] = grid.points[static_cast<std::size_t>(i)];
    ll[i] = model.log_likelihood(x, y);
    lp[i] = log_marginal(prior, 0.0, x);
    f.quadw[i] = grid.quad_weights[static_cast<std::size_t>(i)];
  }
  f.exp_ll = (ll.array() - ll.maxCoeff()).exp();
  f.prior_vals = (lp.array() - lp.maxCoeff()).exp();

  Eigen::MatrixXd G(n, n);
  const double inv2 = 1.0 / (2.0 * eta * eta);
  for (int i = 0; i < n; ++i) {
    G(i, i) = 1.0;
    for (int k = i + 1; k < n; ++k) {
      const double dx = grid.points[static_cast<std::size_t>(i)] -
                        grid.points[static_cast<std::size_t>(k)];
      G(i, k) = G(k, i) = std::exp(-dx * dx * inv2);
    }
  }

  f.pcs.resize(n, n);
  f.dds.resize(n, n);
  f.q_rowsum.resize(n);
  f.p_eta_rowsum.resize(n);
  for (int i = 0; i < n; ++i) {
    double qs = 0.0, ps = 0.0;
    for (int k = 0; k < n; ++k) {
      const double g = G(i, k) * f.quadw[k];
      f.pcs(i, k) = f.exp_ll[k] * g;
      f.dds(i, k) = f.prior_vals[k] * g;
      qs += f.pcs(i, k);
      ps += f.dds(i, k);
    }
    if (!(qs > 0.0) || !(ps > 0.0))
      throw DomainCoverageError("build_kernel: a kernel row vanished");
    f.pcs.row(i) /= qs;
    f.dds.row(i) /= ps;
    f.q_rowsum[i] = qs;
    f.p_eta_rowsum[i] = ps;
  }
  return f;
}

std::vector<double> normalized_masses(const Eigen::VectorXd& raw) {
  const double z = raw.sum();
  std::vector<double> out(static_cast<std::size_t>(raw.size()));
  for (int i = 0; i < raw.size(); ++i)
    out[static_cast<std::size_t>(i)] = raw[i] / z;
  return out;
}

}  // namespace

KernelMatrix build_kernel(const GaussianMixturePrior& prior,
                          const MeasurementModel& model,
                          const Eigen::VectorXd& y, double eta,
                          const Grid& grid, KernelLabel which) {
  Factors f = build_factors(prior, model, y, eta, grid);

  KernelMatrix K;
  K.label = which;
  K.eta = eta;
  K.points = grid.points;
  K.spacing = grid.spacing;
  switch (which) {
    case KernelLabel::kPcs:
      // Reversible for q_eta(x) e^{L(x)} dx.
      K.P = std::move(f.pcs);
      K.stationary = normalized_masses(
          (f.q_rowsum.array() * f.exp_ll.array() * f.quadw.array()).matrix());
      break;
    case KernelLabel::kDds:
      // Reversible for p_eta(x) p*(x) dx.
      K.P = std::move(f.dds);
      K.stationary = normalized_masses(
          (f.p_eta_rowsum.array() * f.prior_vals.array() * f.quadw.array())
              .matrix());
      break;
    case KernelLabel::kDpnp:
      // PCS then DDS; stationary pi_eta ~ p*(x) q_eta(x).
      K.P = f.pcs * f.dds;
      K.stationary = normalized_masses(
          (f.prior_vals.array() * f.q_rowsum.array() * f.quadw.array())
              .matrix());
      break;
    case KernelLabel::kAux:
      // DDS then PCS; stationary mu_eta ~ p_eta(x) e^{L(x)}.
      K.P = f.dds * f.pcs;
      K.stationary = normalized_masses(
          (f.p_eta_rowsum.array() * f.exp_ll.array() * f.quadw.array())
              .matrix());
      break;
  }
  return K;
}

double detailed_balance_residual(const KernelMatrix& K,
                                 const std::vector<double>& stationary_mass) {
  const int n = K.size();
  if (static_cast<int>(stationary_mass.size()) != n)
    throw std::invalid_argument("detailed_balance_residual: size mismatch");
  double worst = 0.0;
  double top = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pi_i = stationary_mass[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double flow = pi_i * K.P(i, j);
      top = std::max(top, flow);
      const double back = stationary_mass[static_cast<std::size_t>(j)] *
                          K.P(j, i);
      worst = std::max(worst, std::abs(flow - back));
    }
  }
  if (!(top > 0.0)) return 0.0;
  return worst / top;
}

SpectralReport spectral_analysis(const KernelMatrix& K, int n_steps) {
  const int n = K.size();
  if (n_steps < 0)
    throw std::invalid_argument("spectral_analysis: n_steps must be >= 0");
  Eigen::VectorXd pi(n);
  for (int i = 0; i < n; ++i)
    pi[i] = K.stationary[static_cast<std::size_t>(i)];
  if ((pi.array() <= 0.0).any())
    throw NumericalFailure("spectral_analysis: stationary mass vanished", {});

  const Eigen::VectorXd sq = pi.array().sqrt().matrix();
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = sq[i] * K.P(i, j) / sq[j];
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  if (eig.info() != Eigen::Success)
    throw NumericalFailure("spectral_analysis: eigensolver failed", {});

  SpectralReport rep;
  rep.eigenvalues = eig.eigenvalues().reverse();
  double lambda2 = 0.0;
  for (int i = 1; i < n; ++i)
    lambda2 = std::max(lambda2, std::abs(rep.eigenvalues[i]));
  rep.lambda2 = lambda2;

  // Tilted start density p = pi (1 + 0.9 tanh((x - median)/scale)): bounded
  // density ratio keeps chi^2 finite on the whole grid.
  const double mid = K.points[static_cast<std::size_t>(n / 2)];
  const double scale =
      0.25 * (K.points.back() - K.points.front()) + 1e-300;
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) {
    const double t =
        std::tanh((K.points[static_cast<std::size_t>(i)] - mid) / scale);
    p[i] = pi[i] * (1.0 + 0.9 * t);
  }
  p /= p.sum();

  rep.chi2_decay.reserve(static_cast<std::size_t>(n_steps) + 1);
  Eigen::RowVectorXd row = p.transpose();
  for (int step = 0; step <= n_steps; ++step) {
    double chi2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = row[i] - pi[i];
      chi2 += diff * diff / pi[i];
    }
    rep.chi2_decay.push_back(chi2);
    if (step < n_steps) row = row * K.P;
  }
  return rep;
}

}  // namespace dpnp
