#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "dpnp/schedule.hpp"

namespace dpnp {

// Mixture component with diagonal covariance.  Zero variances are allowed
// (point mass); they only become a problem when a density or score is
// requested at tau = 0.
struct GmComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
};

class GaussianMixturePrior {
 public:
  explicit GaussianMixturePrior(std::vector<GmComponent> components);

  int dim() const { return dim_; }
  const std::vector<GmComponent>& components() const { return components_; }

  // Draw x ~ prior (used for synthetic ground truth).
  Eigen::VectorXd sample(class Rng& rng) const;

 private:
  std::vector<GmComponent> components_;  // weights normalised to sum 1
  int dim_ = 0;
};

// Log density of the OU marginal at time tau >= 0:
// component k becomes N(e^-tau mu_k, e^-2tau sigma_k^2 + 1 - e^-2tau).
double log_marginal(const GaussianMixturePrior& prior, double tau,
                    const Eigen::VectorXd& x);

// Gradient of log_marginal in x (closed form, responsibility weighted).
Eigen::VectorXd score_continuous(const GaussianMixturePrior& prior, double tau,
                                 const Eigen::VectorXd& x);

// Score of the discrete forward marginal, via the time change
// tau_t = 0.5 log(1 / bar_alpha_t); t in [1, T].
Eigen::VectorXd score_discrete(const GaussianMixturePrior& prior,
                               const DiffusionSchedule& s, int t,
                               const Eigen::VectorXd& x);

// Noise predictor eps_t(x) = -sqrt(1 - bar_alpha_t) * score_t(x); t >= 1.
Eigen::VectorXd noise_discrete(const GaussianMixturePrior& prior,
                               const DiffusionSchedule& s, int t,
                               const Eigen::VectorXd& x);

// Score model interface consumed by the samplers.
class ScoreOracle {
 public:
  virtual ~ScoreOracle() = default;
  virtual int dim() const = 0;
  virtual double log_marginal(double tau, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd score_continuous(double tau,
                                           const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd score_discrete(int t,
                                         const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd noise_discrete(int t,
                                         const Eigen::VectorXd& x) const = 0;
};

// Exact oracle for a Gaussian mixture prior under a given schedule.
class GaussianMixtureOracle final : public ScoreOracle {
 public:
  GaussianMixtureOracle(GaussianMixturePrior prior, DiffusionSchedule s);

  int dim() const override { return prior_.dim(); }
  double log_marginal(double tau, const Eigen::VectorXd& x) const override;
  Eigen::VectorXd score_continuous(double tau,
                                   const Eigen::VectorXd& x) const override;
  Eigen::VectorXd score_discrete(int t,
                                 const Eigen::VectorXd& x) const override;
  Eigen::VectorXd noise_discrete(int t,
                                 const Eigen::VectorXd& x) const override;

  const GaussianMixturePrior& prior() const { return prior_; }
  const DiffusionSchedule& schedule() const { return schedule_; }

 private:
  GaussianMixturePrior prior_;
  DiffusionSchedule schedule_;
};

// Deterministic perturbation of a score oracle, for robustness studies.
// Every score query s(x) is replaced by
//   s(x) + bias + relative_noise_scale * ||s(x)|| * u(query)
// where u is a standard normal vector that is a pure hash of
// (seed, query time, x).  noise_discrete stays Tweedie-consistent with the
// corrupted score; log_marginal passes through.
struct ScoreCorruption {
  Eigen::VectorXd additive_bias;      // empty means zero
  double relative_noise_scale = 0.0;  // >= 0
  std::uint64_t seed = 0;
};

class CorruptedScoreOracle final : public ScoreOracle {
 public:
  CorruptedScoreOracle(std::shared_ptr<const ScoreOracle> inner,
                       ScoreCorruption corruption,
                       const DiffusionSchedule& schedule);

  int dim() const override { return inner_->dim(); }
  double log_marginal(double tau, const Eigen::VectorXd& x) const override {
    return inner_->log_marginal(tau, x);
  }
  Eigen::VectorXd score_continuous(double tau,
                                   const Eigen::VectorXd& x) const override;
  Eigen::VectorXd score_discrete(int t,
                                 const Eigen::VectorXd& x) const override;
  Eigen::VectorXd noise_discrete(int t,
                                 const Eigen::VectorXd& x) const override;

 private:
  Eigen::VectorXd perturb(double tau_key, const Eigen::VectorXd& x,
                          Eigen::VectorXd s) const;

  std::shared_ptr<const ScoreOracle> inner_;
  ScoreCorruption corruption_;
  DiffusionSchedule schedule_;
  bool identity_ = false;
};

CorruptedScoreOracle corrupt(std::shared_ptr<const ScoreOracle> oracle,
                             ScoreCorruption corruption,
                             const DiffusionSchedule& schedule);

}  // namespace dpnp
