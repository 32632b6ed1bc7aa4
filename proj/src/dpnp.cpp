#include "dpnp/dpnp.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dpnp/errors.hpp"

namespace dpnp {

double AnnealingPlan::eta(int k) const {
  if (k < 0 || k > K) throw std::out_of_range("plan: eta index");
  return etas[static_cast<std::size_t>(k)];
}

AnnealingPlan make_geometric_plan(double eta_0, double eta_K, int K_0,
                                  int K) {
  if (!(eta_K > 0.0) || eta_K > eta_0)
    throw ConfigError("plan: need 0 < eta_K <= eta_0");
  if (K_0 < 0 || K_0 >= K)
    throw ConfigError("plan: need 0 <= K_0 < K");
  AnnealingPlan plan;
  plan.K = K;
  plan.K_0 = K_0;
  plan.etas.resize(static_cast<std::size_t>(K) + 1);
  const double log_ratio = std::log(eta_K / eta_0);
  for (int k = 0; k <= K; ++k) {
    if (k <= K_0) {
      plan.etas[static_cast<std::size_t>(k)] = eta_0;
    } else if (k == K) {
      plan.etas[static_cast<std::size_t>(k)] = eta_K;  // land exactly
    } else {
      const double frac =
          static_cast<double>(k - K_0) / static_cast<double>(K - K_0);
      plan.etas[static_cast<std::size_t>(k)] =
          eta_0 * std::exp(frac * log_ratio);
    }
  }
  return plan;
}

namespace {

struct StageKit {
  std::shared_ptr<const DdsSampler> dds;
  std::shared_ptr<const LinearProximalSampler> prox;  // null -> use MALA
  PCSConfig mala_cfg;
};

// Everything precomputable per iteration of a plan, shareable across chains.
struct PlanKit {
  std::vector<StageKit> stages;  // size K
};

PlanKit build_plan_kit(const MeasurementModel& model,
                       const DiffusionSchedule& s, const AnnealingPlan& plan,
                       const DpnpParams& params, const Eigen::VectorXd& y) {
  if (plan.etas.size() != static_cast<std::size_t>(plan.K) + 1)
    throw ConfigError("plan: eta sequence must have K + 1 entries");
  for (double e : plan.etas)
    if (!(e > 0.0)) throw ConfigError("plan: eta values must be > 0");
  if (!(params.pcs_r_target > 0.0 && params.pcs_r_target < 1.0))
    throw ConfigError("dpnp: pcs damping target must lie in (0, 1)");
  if (params.pcs_iters < 0)
    throw ConfigError("dpnp: pcs iteration count must be >= 0");

  // Validate the whole plan up front: every eta must leave the schedule at
  // least one usable step.
  for (int k = 0; k < plan.K; ++k) {
    if (truncation_index(s, plan.eta(k)) < 1)
      throw ConfigError(
          "dpnp: schedule cannot resolve eta at iteration " +
          std::to_string(k) + "; refine the schedule or raise eta");
  }

  const auto* linear = dynamic_cast<const LinearGaussianModel*>(&model);
  const bool closed_form = linear != nullptr && !params.force_mala;

  PlanKit kit;
  kit.stages.resize(static_cast<std::size_t>(plan.K));
  std::map<double, std::shared_ptr<const DdsSampler>> dds_cache;
  std::map<double, std::shared_ptr<const LinearProximalSampler>> prox_cache;
  for (int k = 0; k < plan.K; ++k) {
    const double eta = plan.eta(k);
    auto& stage = kit.stages[static_cast<std::size_t>(k)];
    auto it = dds_cache.find(eta);
    if (it == dds_cache.end()) {
      it = dds_cache
               .emplace(eta, std::make_shared<const DdsSampler>(
                                 s, eta, params.dds_variant))
               .first;
    }
    stage.dds = it->second;
    if (closed_form) {
      auto pit = prox_cache.find(eta);
      if (pit == prox_cache.end()) {
        pit = prox_cache
                  .emplace(eta, std::make_shared<const LinearProximalSampler>(
                                    *linear, y, eta))
                  .first;
      }
      stage.prox = pit->second;
    } else {
      stage.mala_cfg = pcs_config_for(eta, params.pcs_r_target,
                                      params.pcs_iters);
    }
  }
  return kit;
}

std::pair<Eigen::VectorXd, DpnpTrace> run_chain(
    const Eigen::VectorXd& y, const MeasurementModel& model,
    const ScoreOracle& oracle, const AnnealingPlan& plan,
    const DpnpParams& params, const PlanKit& kit,
    const std::optional<Eigen::VectorXd>& init, Rng& rng,
    std::uint64_t seed_for_trace) {
  const int d = oracle.dim();
  DpnpTrace trace;
  trace.seed = seed_for_trace;

  Eigen::VectorXd x;
  if (init.has_value()) {
    if (init->size() != d)
      throw std::invalid_argument("dpnp: init dimension mismatch");
    x = *init;
  } else {
    x = std::sqrt(plan.eta(0) / 4.0) * rng.normal_vector(d);
  }

  trace.pcs_acceptance.reserve(static_cast<std::size_t>(plan.K));
  for (int k = 0; k < plan.K; ++k) {
    const auto& stage = kit.stages[static_cast<std::size_t>(k)];
    const double eta = plan.eta(k);

    Eigen::VectorXd x_half;
    double acceptance = 1.0;
    if (stage.prox) {
      x_half = stage.prox->draw(x, rng);
    } else {
      auto [z, diag] = pcs_mala(x, y, model, eta, stage.mala_cfg, rng);
      x_half = std::move(z);
      acceptance = diag.acceptance_rate;
    }
    Eigen::VectorXd x_next = stage.dds->sample(x_half, oracle, rng);

    trace.pcs_acceptance.push_back(acceptance);
    if (params.retention == TraceRetention::kFull)
      trace.iterates.push_back({k, eta, x_half, x_next});
    x = std::move(x_next);
  }
  return {std::move(x), std::move(trace)};
}

}  // namespace

std::pair<Eigen::VectorXd, DpnpTrace> run_dpnp(
    const Eigen::VectorXd& y, const MeasurementModel& model,
    const ScoreOracle& oracle, const DiffusionSchedule& s,
    const AnnealingPlan& plan, const DpnpParams& params,
    const std::optional<Eigen::VectorXd>& init, Rng& rng) {
  if (y.size() != model.dim_y())
    throw std::invalid_argument("dpnp: y dimension mismatch");
  if (model.dim_x() != oracle.dim())
    throw std::invalid_argument("dpnp: model/prior dimension mismatch");
  const PlanKit kit = build_plan_kit(model, s, plan, params, y);
  return run_chain(y, model, oracle, plan, params, kit, init, rng, 0);
}

void parallel_for_index(int n, int n_workers,
                        const std::function<void(int)>& fn) {
  if (n <= 0) return;
  n_workers = std::max(1, std::min(n_workers, n));
  if (n_workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

RunManyResult run_many(const Eigen::VectorXd& y,
                       const MeasurementModel& model,
                       const ScoreOracle& oracle, const DiffusionSchedule& s,
                       const AnnealingPlan& plan, const DpnpParams& params,
                       int n_chains, std::uint64_t master_seed,
                       int n_workers) {
  if (n_chains < 1) throw ConfigError("dpnp: n_chains must be >= 1");
  if (y.size() != model.dim_y())
    throw std::invalid_argument("dpnp: y dimension mismatch");
  if (model.dim_x() != oracle.dim())
    throw std::invalid_argument("dpnp: model/prior dimension mismatch");

  const PlanKit kit = build_plan_kit(model, s, plan, params, y);
  DpnpParams chain_params = params;
  chain_params.retention = TraceRetention::kFinalOnly;

  RunManyResult result;
  result.master_seed = master_seed;
  result.samples.resize(n_chains, oracle.dim());
  result.chain_mean_acceptance.resize(static_cast<std::size_t>(n_chains),
                                      1.0);

  parallel_for_index(n_chains, n_workers, [&](int i) {
    const std::uint64_t seed =
        derive_seed(master_seed, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    auto [xk, trace] = run_chain(y, model, oracle, plan, chain_params,
                                 kit, std::nullopt, rng, seed);
    result.samples.row(i) = xk.transpose();
    double mean_acc = 1.0;
    if (!trace.pcs_acceptance.empty()) {
      mean_acc = 0.0;
      for (double a : trace.pcs_acceptance) mean_acc += a;
      mean_acc /= static_cast<double>(trace.pcs_acceptance.size());
    }
    result.chain_mean_acceptance[static_cast<std::size_t>(i)] = mean_acc;
  });
  return result;
}

}  // namespace dpnp
