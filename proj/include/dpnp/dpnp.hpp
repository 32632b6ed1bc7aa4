#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dpnp/dds.hpp"
#include "dpnp/forward.hpp"
#include "dpnp/pcs.hpp"
#include "dpnp/prior.hpp"
#include "dpnp/rng.hpp"
#include "dpnp/schedule.hpp"

namespace dpnp {

// Noise levels eta_k, k = 0..K inclusive; iteration k of the driver uses
// eta_k for k < K, and eta_K records the level the plan lands on.
struct AnnealingPlan {
  std::vector<double> etas;  // size K + 1
  int K = 0;
  int K_0 = 0;

  double eta(int k) const;
};

// Constant at eta_0 through k = K_0, then geometric decay reaching eta_K
// exactly at k = K.
AnnealingPlan make_geometric_plan(double eta_0, double eta_K, int K_0, int K);

enum class TraceRetention { kFinalOnly, kFull };

struct DpnpTrace {
  struct Step {
    int k = 0;
    double eta = 0.0;
    Eigen::VectorXd x_half;
    Eigen::VectorXd x_next;
  };
  std::vector<Step> iterates;          // empty under kFinalOnly
  std::vector<double> pcs_acceptance;  // one entry per iteration
  std::uint64_t seed = 0;
};

struct DpnpParams {
  DdsVariant dds_variant = DdsVariant::kDdpm;
  double pcs_r_target = 0.7;  // damping of the Langevin proposal
  int pcs_iters = 200;
  bool force_mala = false;  // use MALA even for linear Gaussian models
  TraceRetention retention = TraceRetention::kFinalOnly;
};

// Alternating proximal-consistency / denoising driver.  `init` absent means
// x_0 ~ N(0, (eta_0 / 4) I).  The whole plan is validated against the
// schedule before any sampling happens.
std::pair<Eigen::VectorXd, DpnpTrace> run_dpnp(
    const Eigen::VectorXd& y, const MeasurementModel& model,
    const ScoreOracle& oracle, const DiffusionSchedule& s,
    const AnnealingPlan& plan, const DpnpParams& params,
    const std::optional<Eigen::VectorXd>& init, Rng& rng);

struct RunManyResult {
  Eigen::MatrixXd samples;  // n_chains x d, row i from chain i
  std::vector<double> chain_mean_acceptance;
  std::uint64_t master_seed = 0;
};

// Independent chains; chain i uses the stream derive_seed(master_seed, i).
// Output depends only on (inputs, master_seed), not on n_workers.
RunManyResult run_many(const Eigen::VectorXd& y, const MeasurementModel& model,
                       const ScoreOracle& oracle, const DiffusionSchedule& s,
                       const AnnealingPlan& plan, const DpnpParams& params,
                       int n_chains, std::uint64_t master_seed,
                       int n_workers = 1);

// Shared worker-pool helper: runs fn(i) for i = 0..n-1 on up to n_workers
// threads.  fn must write only to per-index slots.  Exceptions are captured
// and the first one is rethrown on the caller thread.
void parallel_for_index(int n, int n_workers,
                        const std::function<void(int)>& fn);

}  // namespace dpnp
