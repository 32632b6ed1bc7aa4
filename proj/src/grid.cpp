#include "dpnp/grid.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpnp/errors.hpp"

namespace dpnp {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void check_1d(const MeasurementModel& model) {
  if (model.dim_x() != 1)
    throw ConfigError("grid: oracles are 1-d, model has dim_x != 1");
}

void check_1d(const GaussianMixturePrior& prior) {
  if (prior.dim() != 1)
    throw ConfigError("grid: oracles are 1-d, prior has dim != 1");
}

// Normalize an integrand given in log space into a GridDensity.
GridDensity finalize(const Grid& grid, const std::vector<double>& log_vals,
                     const char* what) {
  const int n = grid.size();
  double top = -std::numeric_limits<double>::infinity();
  for (double lv : log_vals) top = std::max(top, lv);
  if (!std::isfinite(top))
    throw DomainCoverageError(std::string(what) +
                              ": density vanishes on the whole grid");
  GridDensity out;
  out.points = grid.points;
  out.spacing = grid.spacing;
  out.weights.resize(n);
  out.values.resize(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = std::exp(log_vals[static_cast<std::size_t>(i)] - top);
    out.values[static_cast<std::size_t>(i)] = v;
    const double w = v * grid.quad_weights[static_cast<std::size_t>(i)];
    out.weights[static_cast<std::size_t>(i)] = w;
    z += w;
  }
  if (!(z > 0.0))
    throw DomainCoverageError(std::string(what) +
                              ": density vanishes on the whole grid");
  for (int i = 0; i < n; ++i) {
    out.weights[static_cast<std::size_t>(i)] /= z;
    out.values[static_cast<std::size_t>(i)] /= z;
  }
  return out;
}

std::vector<double> log_likelihood_on_grid(const MeasurementModel& model,
                                           const Eigen::VectorXd& y,
                                           const Grid& grid) {
  std::vector<double> ll(static_cast<std::size_t>(grid.size()));
  Eigen::VectorXd x(1);
  for (int i = 0; i < grid.size(); ++i) {
    x[0] = grid.points[static_cast<std::size_t>(i)];
    ll[static_cast<std::size_t>(i)] = model.log_likelihood(x, y);
  }
  return ll;
}

std::vector<double> log_prior_on_grid(const GaussianMixturePrior& prior,
                                      const Grid& grid) {
  std::vector<double> lp(static_cast<std::size_t>(grid.size()));
  Eigen::VectorXd x(1);
  for (int i = 0; i < grid.size(); ++i) {
    x[0] = grid.points[static_cast<std::size_t>(i)];
    lp[static_cast<std::size_t>(i)] = log_marginal(prior, 0.0, x);
  }
  return lp;
}

// Discrete Gaussian convolution of exp(log_f) with N(0, eta^2): returns the
// log of  sum_k exp(log_f_k) G(x_i - x_k) quadw_k.  The same trapezoidal sum
// is reused by the kernel discretization, which keeps the stationarity
// checks exact.
std::vector<double> log_convolve(const std::vector<double>& log_f,
                                 const Grid& grid, double eta) {
  const int n = grid.size();
  double top = -std::numeric_limits<double>::infinity();
  for (double lv : log_f) top = std::max(top, lv);
  const double inv2 = 1.0 / (2.0 * eta * eta);
  const double lognorm = -std::log(eta) - kLogSqrt2Pi;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const double xi = grid.points[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k) {
      const double dx = xi - grid.points[static_cast<std::size_t>(k)];
      acc += std::exp(log_f[static_cast<std::size_t>(k)] - top -
                      dx * dx * inv2) *
             grid.quad_weights[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(i)] =
        (acc > 0.0) ? top + lognorm + std::log(acc)
                    : -std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace

Grid make_grid(double lo, double hi, int n) {
  if (!(lo < hi)) throw ConfigError("grid: need lo < hi");
  if (n < 2) throw ConfigError("grid: need at least two points");
  Grid g;
  g.points.resize(static_cast<std::size_t>(n));
  g.spacing = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i)
    g.points[static_cast<std::size_t>(i)] = lo + g.spacing * i;
  g.points.back() = hi;
  g.quad_weights.assign(static_cast<std::size_t>(n), g.spacing);
  g.quad_weights.front() = 0.5 * g.spacing;
  g.quad_weights.back() = 0.5 * g.spacing;
  return g;
}

Grid make_benchmark_grid(const GaussianMixturePrior& prior, double eta,
                         int n) {
  check_1d(prior);
  if (eta < 0.0) throw ConfigError("grid: eta must be >= 0");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sigma_max = 0.0;
  for (const auto& c : prior.components()) {
    lo = std::min(lo, c.mean[0]);
    hi = std::max(hi, c.mean[0]);
    sigma_max = std::max(sigma_max, std::sqrt(c.var[0]));
  }
  lo -= 8.0 * sigma_max + 4.0 * eta;
  hi += 8.0 * sigma_max + 4.0 * eta;
  if (eta > 0.0) {
    const int needed =
        static_cast<int>(std::ceil((hi - lo) / (eta / 4.0))) + 1;
    n = std::max(n, needed);
  }
  return make_grid(lo, hi, n);
}

GridDensity grid_posterior(const GaussianMixturePrior& prior,
                           const MeasurementModel& model,
                           const Eigen::VectorXd& y, const Grid& grid) {
  check_1d(prior);
  check_1d(model);
  const auto lp = log_prior_on_grid(prior, grid);
  const auto ll = log_likelihood_on_grid(model, y, grid);
  std::vector<double> lv(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) lv[i] = lp[i] + ll[i];
  return finalize(grid, lv, "grid_posterior");
}

GridDensity grid_q_eta(const MeasurementModel& model, const Eigen::VectorXd& y,
                       double eta, const Grid& grid) {
  check_1d(model);
  if (eta < 0.0) throw ConfigError("grid_q_eta: eta must be >= 0");
  if (eta > 0.0 && grid.spacing > eta / 4.0)
    throw ResolutionError("grid_q_eta: spacing > eta/4, refine the grid");
  const auto ll = log_likelihood_on_grid(model, y, grid);
  const auto logq = (eta == 0.0) ? ll : log_convolve(ll, grid, eta);
  GridDensity out = finalize(grid, logq, "grid_q_eta");
  out.raw_values.resize(logq.size());
  for (std::size_t i = 0; i < logq.size(); ++i)
    out.raw_values[i] = std::exp(logq[i]);
  return out;
}

GridDensity grid_pi_eta(const GaussianMixturePrior& prior,
                        const MeasurementModel& model, const Eigen::VectorXd& y,
                        double eta, const Grid& grid) {
  check_1d(prior);
  check_1d(model);
  if (eta < 0.0) throw ConfigError("grid_pi_eta: eta must be >= 0");
  if (eta > 0.0 && grid.spacing > eta / 4.0)
    throw ResolutionError("grid_pi_eta: spacing > eta/4, refine the grid");
  const auto lp = log_prior_on_grid(prior, grid);
  const auto ll = log_likelihood_on_grid(model, y, grid);
  const auto logq = (eta == 0.0) ? ll : log_convolve(ll, grid, eta);
  std::vector<double> lv(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) lv[i] = lp[i] + logq[i];
  return finalize(grid, lv, "grid_pi_eta");
}

GridDensity grid_mu_eta(const GaussianMixturePrior& prior,
                        const MeasurementModel& model, const Eigen::VectorXd& y,
                        double eta, const Grid& grid) {
  check_1d(prior);
  check_1d(model);
  if (eta < 0.0) throw ConfigError("grid_mu_eta: eta must be >= 0");
  if (eta > 0.0 && grid.spacing > eta / 4.0)
    throw ResolutionError("grid_mu_eta: spacing > eta/4, refine the grid");
  const auto lp = log_prior_on_grid(prior, grid);
  const auto ll = log_likelihood_on_grid(model, y, grid);
  const auto logp_eta = (eta == 0.0) ? lp : log_convolve(lp, grid, eta);
  std::vector<double> lv(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) lv[i] = logp_eta[i] + ll[i];
  return finalize(grid, lv, "grid_mu_eta");
}

GaussianMixturePrior analytic_gm_linear_posterior(
    const GaussianMixturePrior& prior, const LinearGaussianModel& model,
    const Eigen::VectorXd& y) {
  if (model.dim_x() != prior.dim())
    throw ConfigError("analytic posterior: prior/model dimension mismatch");
  const Eigen::MatrixXd& nm = model.normal_matrix();  // A' Sigma^-1 A
  const int d = prior.dim();
  const double scale = std::max(1.0, nm.diagonal().cwiseAbs().maxCoeff());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && std::abs(nm(i, j)) > 1e-12 * scale)
        throw ConfigError(
            "analytic posterior: A' Sigma^-1 A must be diagonal to stay in "
            "the diagonal-covariance mixture family");
  const Eigen::VectorXd aty = model.whitened_adjoint() * y;  // A' Sigma^-1 y

  std::vector<GmComponent> post;
  post.reserve(prior.components().size());
  std::vector<double> log_ev;
  log_ev.reserve(prior.components().size());
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : prior.components()) {
    // Evidence: y | component ~ N(A mu, Sigma + A diag(var) A').
    Eigen::MatrixXd cov =
        model.noise_cov() +
        model.A() * c.var.asDiagonal() * model.A().transpose();
    Eigen::LLT<Eigen::MatrixXd> chol(cov);
    if (chol.info() != Eigen::Success)
      throw NumericalFailure("analytic posterior: evidence covariance not SPD",
                             {});
    const Eigen::VectorXd r = y - model.A() * c.mean;
    const Eigen::VectorXd w = chol.matrixL().solve(r);
    double logdet = 0.0;
    for (int i = 0; i < cov.rows(); ++i)
      logdet += std::log(chol.matrixL()(i, i));
    const double le = std::log(c.weight) - 0.5 * w.squaredNorm() - logdet -
                      cov.rows() * kLogSqrt2Pi;
    log_ev.push_back(le);
    top = std::max(top, le);

    GmComponent pc;
    pc.mean.resize(d);
    pc.var.resize(d);
    for (int i = 0; i < d; ++i) {
      if (c.var[i] == 0.0) {  // point mass stays a point mass
        pc.var[i] = 0.0;
        pc.mean[i] = c.mean[i];
        continue;
      }
      const double prec = 1.0 / c.var[i] + nm(i, i);
      pc.var[i] = 1.0 / prec;
      pc.mean[i] = pc.var[i] * (c.mean[i] / c.var[i] + aty[i]);
    }
    post.push_back(std::move(pc));
  }
  for (std::size_t k = 0; k < post.size(); ++k)
    post[k].weight = std::exp(log_ev[k] - top);
  return GaussianMixturePrior(std::move(post));
}

}  // namespace dpnp
