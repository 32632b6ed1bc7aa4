#include "dpnp/prior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpnp/errors.hpp"
#include "dpnp/rng.hpp"

namespace dpnp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct MarginalComponent {
  double log_weight;
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
};

// Component k of the OU marginal at time tau.
std::vector<MarginalComponent> marginal_components(
    const GaussianMixturePrior& prior, double tau) {
  if (tau < 0.0) throw std::domain_error("prior: tau must be >= 0");
  const double decay = std::exp(-tau);
  const double decay2 = decay * decay;
  const double injected = 1.0 - decay2;
  std::vector<MarginalComponent> out;
  out.reserve(prior.components().size());
  for (const auto& c : prior.components()) {
    MarginalComponent m;
    m.log_weight = std::log(c.weight);
    m.mean = decay * c.mean;
    m.var = (decay2 * c.var.array() + injected).matrix();
    if ((m.var.array() <= 0.0).any())
      throw std::domain_error(
          "prior: singular component variance; score undefined at tau = 0 "
          "for point-mass components");
    out.push_back(std::move(m));
  }
  return out;
}

double log_gaussian_diag(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& var) {
  const auto diff = (x - mean).array();
  return -0.5 * (var.array().log() + kLog2Pi + diff.square() / var.array())
              .sum();
}

}  // namespace

GaussianMixturePrior::GaussianMixturePrior(std::vector<GmComponent> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw ConfigError("prior: needs at least one component");
  dim_ = static_cast<int>(components_.front().mean.size());
  if (dim_ < 1) throw ConfigError("prior: dimension must be >= 1");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim_ || c.var.size() != dim_)
      throw std::invalid_argument("prior: component shape mismatch");
    if (!(c.weight > 0.0))
      throw ConfigError("prior: component weights must be positive");
    if ((c.var.array() < 0.0).any())
      throw ConfigError("prior: variances must be >= 0");
    total += c.weight;
  }
  for (auto& c : components_) c.weight /= total;
}

Eigen::VectorXd GaussianMixturePrior::sample(Rng& rng) const {
  double u = rng.uniform();
  std::size_t pick = components_.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    acc += components_[k].weight;
    if (u <= acc) {
      pick = k;
      break;
    }
  }
  const auto& c = components_[pick];
  return c.mean + (c.var.array().sqrt() * rng.normal_vector(dim_).array())
                      .matrix();
}

double log_marginal(const GaussianMixturePrior& prior, double tau,
                    const Eigen::VectorXd& x) {
  if (x.size() != prior.dim())
    throw std::invalid_argument("prior: x dimension mismatch");
  const auto comps = marginal_components(prior, tau);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> lg(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    lg[k] = comps[k].log_weight +
            log_gaussian_diag(x, comps[k].mean, comps[k].var);
    best = std::max(best, lg[k]);
  }
  double acc = 0.0;
  for (double v : lg) acc += std::exp(v - best);
  return best + std::log(acc);
}

Eigen::VectorXd score_continuous(const GaussianMixturePrior& prior, double tau,
                                 const Eigen::VectorXd& x) {
  if (x.size() != prior.dim())
    throw std::invalid_argument("prior: x dimension mismatch");
  const auto comps = marginal_components(prior, tau);
  std::vector<double> lg(comps.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    lg[k] = comps[k].log_weight +
            log_gaussian_diag(x, comps[k].mean, comps[k].var);
    best = std::max(best, lg[k]);
  }
  double norm = 0.0;
  for (double v : lg) norm += std::exp(v - best);
  Eigen::VectorXd score = Eigen::VectorXd::Zero(x.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const double resp = std::exp(lg[k] - best) / norm;
    score -= resp *
             ((x - comps[k].mean).array() / comps[k].var.array()).matrix();
  }
  return score;
}

Eigen::VectorXd score_discrete(const GaussianMixturePrior& prior,
                               const DiffusionSchedule& s, int t,
                               const Eigen::VectorXd& x) {
  if (t < 1 || t > s.T())
    throw std::out_of_range("prior: score_discrete step index");
  return score_continuous(prior, continuous_time_of_step(s, t), x);
}

Eigen::VectorXd noise_discrete(const GaussianMixturePrior& prior,
                               const DiffusionSchedule& s, int t,
                               const Eigen::VectorXd& x) {
  if (t == 0)
    throw std::domain_error("prior: noise predictor undefined at t = 0");
  if (t < 1 || t > s.T())
    throw std::out_of_range("prior: noise_discrete step index");
  return -std::sqrt(1.0 - s.bar_alpha(t)) * score_discrete(prior, s, t, x);
}

GaussianMixtureOracle::GaussianMixtureOracle(GaussianMixturePrior prior,
                                             DiffusionSchedule s)
    : prior_(std::move(prior)), schedule_(std::move(s)) {}

double GaussianMixtureOracle::log_marginal(double tau,
                                           const Eigen::VectorXd& x) const {
  return dpnp::log_marginal(prior_, tau, x);
}

Eigen::VectorXd GaussianMixtureOracle::score_continuous(
    double tau, const Eigen::VectorXd& x) const {
  return dpnp::score_continuous(prior_, tau, x);
}

Eigen::VectorXd GaussianMixtureOracle::score_discrete(
    int t, const Eigen::VectorXd& x) const {
  return dpnp::score_discrete(prior_, schedule_, t, x);
}

Eigen::VectorXd GaussianMixtureOracle::noise_discrete(
    int t, const Eigen::VectorXd& x) const {
  return dpnp::noise_discrete(prior_, schedule_, t, x);
}

CorruptedScoreOracle::CorruptedScoreOracle(
    std::shared_ptr<const ScoreOracle> inner, ScoreCorruption corruption,
    const DiffusionSchedule& schedule)
    : inner_(std::move(inner)),
      corruption_(std::move(corruption)),
      schedule_(schedule) {
  if (!inner_) throw std::invalid_argument("corrupt: null oracle");
  if (corruption_.additive_bias.size() == 0)
    corruption_.additive_bias = Eigen::VectorXd::Zero(inner_->dim());
  if (corruption_.additive_bias.size() != inner_->dim())
    throw std::invalid_argument("corrupt: bias dimension mismatch");
  if (corruption_.relative_noise_scale < 0.0)
    throw std::invalid_argument("corrupt: noise scale must be >= 0");
  identity_ = corruption_.relative_noise_scale == 0.0 &&
              corruption_.additive_bias.isZero(0.0);
}

Eigen::VectorXd CorruptedScoreOracle::perturb(double tau_key,
                                              const Eigen::VectorXd& x,
                                              Eigen::VectorXd s) const {
  s += corruption_.additive_bias;
  if (corruption_.relative_noise_scale > 0.0) {
    std::uint64_t h = fnv1a64_append(0xcbf29ce484222325ULL, corruption_.seed);
    h = fnv1a64_append(h, tau_key);
    h = fnv1a64(x.data(), sizeof(double) * static_cast<std::size_t>(x.size()),
                h);
    s += corruption_.relative_noise_scale * s.norm() *
         gaussian_from_key(h, s.size());
  }
  return s;
}

Eigen::VectorXd CorruptedScoreOracle::score_continuous(
    double tau, const Eigen::VectorXd& x) const {
  if (identity_) return inner_->score_continuous(tau, x);
  return perturb(tau, x, inner_->score_continuous(tau, x));
}

Eigen::VectorXd CorruptedScoreOracle::score_discrete(
    int t, const Eigen::VectorXd& x) const {
  if (identity_) return inner_->score_discrete(t, x);
  // Keyed by tau_t so discrete and continuous queries at matching times see
  // the same perturbation.
  return perturb(continuous_time_of_step(schedule_, t), x,
                 inner_->score_discrete(t, x));
}

Eigen::VectorXd CorruptedScoreOracle::noise_discrete(
    int t, const Eigen::VectorXd& x) const {
  if (identity_) return inner_->noise_discrete(t, x);
  return -std::sqrt(1.0 - schedule_.bar_alpha(t)) * score_discrete(t, x);
}

CorruptedScoreOracle corrupt(std::shared_ptr<const ScoreOracle> oracle,
                             ScoreCorruption corruption,
                             const DiffusionSchedule& schedule) {
  return CorruptedScoreOracle(std::move(oracle), std::move(corruption),
                              schedule);
}

}  // namespace dpnp
