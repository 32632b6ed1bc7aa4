#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "dpnp/dpnp.hpp"
#include "dpnp/forward.hpp"
#include "dpnp/prior.hpp"
#include "dpnp/schedule.hpp"
#include "json.hpp"

namespace dpnp::cli {

// A run configuration file, parsed and fingerprinted.  All lookups throw
// ConfigError with the JSON field path on missing or ill-typed data; every
// optional field has a recorded default.
struct LoadedConfig {
  nlohmann::json root;
  std::string hash;  // "fnv1a64:<16 hex digits>" over the raw file bytes
  std::string path;
};

LoadedConfig load_config_file(const std::string& path);

// --- typed field access (path is the dotted location for error messages) ---
double get_number(const nlohmann::json& node, const std::string& path);
double get_number_or(const nlohmann::json& parent, const std::string& key,
                     const std::string& path, double fallback);
std::int64_t get_int_or(const nlohmann::json& parent, const std::string& key,
                        const std::string& path, std::int64_t fallback);
bool get_bool_or(const nlohmann::json& parent, const std::string& key,
                 const std::string& path, bool fallback);
std::string get_string_or(const nlohmann::json& parent, const std::string& key,
                          const std::string& path,
                          const std::string& fallback);
Eigen::VectorXd get_vector(const nlohmann::json& node,
                           const std::string& path);
Eigen::MatrixXd get_matrix(const nlohmann::json& node,
                           const std::string& path);

// --- section parsers ---
GaussianMixturePrior parse_prior(const nlohmann::json& root);
DiffusionSchedule parse_schedule(const nlohmann::json& root);
std::unique_ptr<MeasurementModel> parse_model(const nlohmann::json& root);
DpnpParams parse_sampler(const nlohmann::json& root);
AnnealingPlan parse_plan(const nlohmann::json& root);

struct ChainSpec {
  int n = 1;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = one per hardware thread
};
ChainSpec parse_chains(const nlohmann::json& root);

struct OutputSpec {
  std::string samples = "samples.csv";
  std::string metrics = "metrics.json";
};
OutputSpec parse_output(const nlohmann::json& root);

struct VerifySpec {
  double eta = 0.3;
  int grid_n = 401;
  int bins = 40;
  std::string reference = "pi_eta";  // or "posterior"
};
VerifySpec parse_verify(const nlohmann::json& root);

// Worker resolution: DPNP_WORKERS overrides the config; 0 means auto.
int resolve_workers(int configured);

}  // namespace dpnp::cli
