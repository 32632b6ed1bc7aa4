// Command line front end: denoise / dpnp / verify / kernel, all driven by a
// single JSON config.  Outputs are a CSV and a JSON report per run; both are
// byte-identical across reruns with the same config bytes and seed,
// independent of the worker count.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "dpnp/dds.hpp"
#include "dpnp/dpnp.hpp"
#include "dpnp/errors.hpp"
#include "dpnp/grid.hpp"
#include "dpnp/kernel.hpp"
#include "dpnp/metrics.hpp"
#include "dpnp/rng.hpp"

namespace {

using dpnp::ConfigError;
using nlohmann::json;

constexpr const char* kVersion = "1.0.0";
constexpr int kSchemaVersion = 1;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string samples_csv(const Eigen::MatrixXd& samples) {
  std::string text = "chain";
  for (int j = 0; j < samples.cols(); ++j)
    text += ",dim" + std::to_string(j);
  text += "\n";
  for (int i = 0; i < samples.rows(); ++i) {
    text += std::to_string(i);
    for (int j = 0; j < samples.cols(); ++j) text += "," + fmt17(samples(i, j));
    text += "\n";
  }
  return text;
}

double mass_mean(const dpnp::GridDensity& g) {
  double m = 0.0;
  for (int i = 0; i < g.size(); ++i)
    m += g.weights[static_cast<std::size_t>(i)] *
         g.points[static_cast<std::size_t>(i)];
  return m;
}

double mass_var(const dpnp::GridDensity& g) {
  const double m = mass_mean(g);
  double v = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double d = g.points[static_cast<std::size_t>(i)] - m;
    v += g.weights[static_cast<std::size_t>(i)] * d * d;
  }
  return v;
}

double tv_masses(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

json moments_json(const Eigen::MatrixXd& samples) {
  json out;
  const int d = static_cast<int>(samples.cols());
  const double n = static_cast<double>(samples.rows());
  std::vector<double> mean(static_cast<std::size_t>(d));
  std::vector<double> var(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const double m = samples.col(j).mean();
    mean[static_cast<std::size_t>(j)] = m;
    var[static_cast<std::size_t>(j)] =
        (samples.col(j).array() - m).square().sum() / std::max(1.0, n - 1.0);
  }
  out["sample_mean"] = mean;
  out["sample_var"] = var;
  return out;
}

// Resolve y (or simulate it) for commands that need a measurement.
Eigen::VectorXd resolve_y(const json& root,
                          const dpnp::GaussianMixturePrior& prior,
                          const dpnp::MeasurementModel& model,
                          json& parameters) {
  if (const auto it = root.find("y"); it != root.end()) {
    Eigen::VectorXd y = dpnp::cli::get_vector(*it, "y");
    if (y.size() != model.dim_y())
      throw ConfigError("y: expected length " +
                        std::to_string(model.dim_y()));
    parameters["y"] = to_std(y);
    return y;
  }
  if (const auto it = root.find("simulate"); it != root.end()) {
    if (!it->is_object()) throw ConfigError("simulate: expected an object");
    const auto seed = static_cast<std::uint64_t>(
        dpnp::cli::get_int_or(*it, "seed", "simulate.seed", 0));
    dpnp::Rng rng(seed);
    const Eigen::VectorXd truth = prior.sample(rng);
    const Eigen::VectorXd y = model.simulate_measurement(truth, rng);
    parameters["truth"] = to_std(truth);
    parameters["simulate_seed"] = seed;
    parameters["y"] = to_std(y);
    return y;
  }
  throw ConfigError("y: required (or give a 'simulate' section)");
}

// Evaluate configured thresholds against flat numeric metrics, assemble the
// report, write it, and return the process exit code.
int finish_run(const std::string& command, const dpnp::cli::LoadedConfig& cfg,
               std::uint64_t seed, const json& parameters, const json& metrics,
               const dpnp::cli::OutputSpec& out, const std::string& csv_text) {
  json doc;
  doc["command"] = command;
  doc["config_hash"] = cfg.hash;
  doc["seed"] = seed;
  doc["versions"] = {{"dpnp", kVersion}, {"schema", kSchemaVersion}};
  doc["parameters"] = parameters;
  doc["metrics"] = metrics;

  json thresholds = json::object();
  json failures = json::array();
  if (const auto it = cfg.root.find("thresholds"); it != cfg.root.end()) {
    if (!it->is_object())
      throw ConfigError("thresholds: expected an object of numeric bounds");
    for (const auto& [name, bound_node] : it->items()) {
      const double bound =
          dpnp::cli::get_number(bound_node, "thresholds." + name);
      const auto mit = metrics.find(name);
      if (mit == metrics.end() || !mit->is_number())
        throw ConfigError("thresholds." + name +
                          ": no such metric in this run");
      const double value = mit->get<double>();
      thresholds[name] = bound;
      if (!(value <= bound)) {
        failures.push_back(
            {{"metric", name}, {"value", value}, {"bound", bound}});
      }
    }
  }
  doc["thresholds"] = thresholds;
  doc["failures"] = failures;
  doc["passed"] = failures.empty();

  write_text(out.samples, csv_text);
  write_text(out.metrics, doc.dump(2) + "\n");

  if (!failures.empty()) {
    std::cerr << command << ": " << failures.size()
              << " threshold(s) breached; see " << out.metrics << "\n";
    return 1;
  }
  std::cout << command << ": wrote " << out.samples << " and " << out.metrics
            << "\n";
  return 0;
}

dpnp::cli::OutputSpec resolve_output(const json& root,
                                     const CommonArgs& args) {
  dpnp::cli::OutputSpec out = dpnp::cli::parse_output(root);
  if (args.out) {
    out.samples = *args.out + ".csv";
    out.metrics = *args.out + ".json";
  }
  return out;
}

int cmd_denoise(const CommonArgs& args) {
  const auto cfg = dpnp::cli::load_config_file(args.config_path);
  const auto& root = cfg.root;
  const dpnp::GaussianMixturePrior prior = dpnp::cli::parse_prior(root);
  const dpnp::DiffusionSchedule s = dpnp::cli::parse_schedule(root);
  const dpnp::DpnpParams sampler = dpnp::cli::parse_sampler(root);
  const dpnp::cli::ChainSpec chains = dpnp::cli::parse_chains(root);
  const dpnp::cli::VerifySpec verify = dpnp::cli::parse_verify(root);
  const dpnp::cli::OutputSpec out = resolve_output(root, args);
  const std::uint64_t seed = args.seed.value_or(chains.seed);
  const int d = prior.dim();

  const auto it = root.find("denoise");
  if (it == root.end() || !it->is_object())
    throw ConfigError("denoise: required object section");
  const double eta = dpnp::cli::get_number_or(*it, "eta", "denoise.eta", -1.0);
  if (eta <= 0.0) throw ConfigError("denoise.eta: required and must be > 0");

  json parameters;
  Eigen::VectorXd x_noisy;
  if (const auto xn = it->find("x_noisy"); xn != it->end()) {
    x_noisy = dpnp::cli::get_vector(*xn, "denoise.x_noisy");
    if (x_noisy.size() != d)
      throw ConfigError("denoise.x_noisy: expected length " +
                        std::to_string(d));
  } else if (const auto sim = it->find("simulate"); sim != it->end()) {
    if (!sim->is_object())
      throw ConfigError("denoise.simulate: expected an object");
    const auto sim_seed = static_cast<std::uint64_t>(
        dpnp::cli::get_int_or(*sim, "seed", "denoise.simulate.seed", 0));
    dpnp::Rng rng(sim_seed);
    const Eigen::VectorXd truth = prior.sample(rng);
    x_noisy = truth + eta * rng.normal_vector(d);
    parameters["truth"] = to_std(truth);
    parameters["simulate_seed"] = sim_seed;
  } else {
    throw ConfigError("denoise.x_noisy: required (or give denoise.simulate)");
  }

  const dpnp::GaussianMixtureOracle oracle(prior, s);
  const dpnp::DdsSampler dds(s, eta, sampler.dds_variant);

  Eigen::MatrixXd samples(chains.n, d);
  const int workers = dpnp::cli::resolve_workers(chains.workers);
  dpnp::parallel_for_index(chains.n, workers, [&](int i) {
    dpnp::Rng rng(dpnp::derive_seed(seed, static_cast<std::uint64_t>(i)));
    samples.row(i) = dds.sample(x_noisy, oracle, rng).transpose();
  });

  parameters["eta"] = eta;
  parameters["x_noisy"] = to_std(x_noisy);
  parameters["variant"] =
      sampler.dds_variant == dpnp::DdsVariant::kDdpm ? "ddpm" : "ddim";
  parameters["T"] = s.T();
  parameters["T_prime"] = dds.truncation();
  parameters["n_chains"] = chains.n;

  json metrics = moments_json(samples);
  if (d == 1) {
    const dpnp::Grid grid = dpnp::make_benchmark_grid(prior, eta,
                                                      verify.grid_n);
    Eigen::MatrixXd A(1, 1);
    A << 1.0;
    const dpnp::LinearGaussianModel noise_model(A, eta * eta);
    const dpnp::GridDensity ref =
        dpnp::grid_posterior(prior, noise_model, x_noisy, grid);
    const std::vector<double> flat = to_std(samples.col(0));
    metrics["w1"] = dpnp::wasserstein1_1d(flat, ref);
    metrics["tv_binned"] = dpnp::binned_tv(flat, ref, verify.bins);
    metrics["ks"] = dpnp::ks_statistic(flat, ref);
    metrics["posterior_mean"] = mass_mean(ref);
    metrics["posterior_var"] = mass_var(ref);
  }
  return finish_run("denoise", cfg, seed, parameters, metrics, out,
                    samples_csv(samples));
}

int cmd_dpnp(const CommonArgs& args) {
  const auto cfg = dpnp::cli::load_config_file(args.config_path);
  const auto& root = cfg.root;
  const dpnp::GaussianMixturePrior prior = dpnp::cli::parse_prior(root);
  const dpnp::DiffusionSchedule s = dpnp::cli::parse_schedule(root);
  const auto model = dpnp::cli::parse_model(root);
  const dpnp::DpnpParams params = dpnp::cli::parse_sampler(root);
  const dpnp::AnnealingPlan plan = dpnp::cli::parse_plan(root);
  const dpnp::cli::ChainSpec chains = dpnp::cli::parse_chains(root);
  const dpnp::cli::VerifySpec verify = dpnp::cli::parse_verify(root);
  const dpnp::cli::OutputSpec out = resolve_output(root, args);
  const std::uint64_t seed = args.seed.value_or(chains.seed);
  const int d = prior.dim();
  if (model->dim_x() != d)
    throw ConfigError("model: dim_x " + std::to_string(model->dim_x()) +
                      " does not match prior dim " + std::to_string(d));

  json parameters;
  const Eigen::VectorXd y = resolve_y(root, prior, *model, parameters);

  // Optional robustness sweep over score corruptions; bias 0 = exact oracle.
  std::vector<double> biases{0.0};
  double relative_noise = 0.0;
  std::uint64_t noise_seed = 0;
  bool sweep = false;
  if (const auto rob = root.find("robustness"); rob != root.end()) {
    if (!rob->is_object())
      throw ConfigError("robustness: expected an object");
    sweep = true;
    const auto biases_it = rob->find("biases");
    if (biases_it == rob->end())
      throw ConfigError("robustness.biases: required");
    biases = to_std(dpnp::cli::get_vector(*biases_it, "robustness.biases"));
    relative_noise = dpnp::cli::get_number_or(
        *rob, "relative_noise", "robustness.relative_noise", 0.0);
    if (relative_noise < 0.0)
      throw ConfigError("robustness.relative_noise: must be >= 0");
    noise_seed = static_cast<std::uint64_t>(dpnp::cli::get_int_or(
        *rob, "noise_seed", "robustness.noise_seed", 0));
  }

  const auto base = std::make_shared<const dpnp::GaussianMixtureOracle>(
      prior, s);
  const int workers = dpnp::cli::resolve_workers(chains.workers);
  const double eta_ref = plan.eta(plan.K);

  std::optional<dpnp::GridDensity> ref;
  if (d == 1) {
    const dpnp::Grid grid = dpnp::make_benchmark_grid(prior, eta_ref,
                                                      verify.grid_n);
    ref = verify.reference == "posterior"
              ? dpnp::grid_posterior(prior, *model, y, grid)
              : dpnp::grid_pi_eta(prior, *model, y, eta_ref, grid);
  }

  json metrics;
  Eigen::MatrixXd first_samples;
  std::vector<double> sweep_tv;
  for (std::size_t bi = 0; bi < biases.size(); ++bi) {
    dpnp::RunManyResult result;
    if (!sweep && biases[bi] == 0.0 && relative_noise == 0.0) {
      result = dpnp::run_many(y, *model, *base, s, plan, params, chains.n,
                              seed, workers);
    } else {
      dpnp::ScoreCorruption corruption;
      corruption.additive_bias =
          Eigen::VectorXd::Constant(d, biases[bi]);
      corruption.relative_noise_scale = relative_noise;
      corruption.seed = noise_seed;
      const dpnp::CorruptedScoreOracle oracle =
          dpnp::corrupt(base, corruption, s);
      result = dpnp::run_many(y, *model, oracle, s, plan, params, chains.n,
                              seed, workers);
    }
    if (bi == 0) {
      first_samples = result.samples;
      metrics = moments_json(result.samples);
      double acc = 0.0;
      for (const double a : result.chain_mean_acceptance) acc += a;
      metrics["acceptance_mean"] =
          acc / static_cast<double>(result.chain_mean_acceptance.size());
      if (ref) {
        const std::vector<double> flat = to_std(result.samples.col(0));
        metrics["w1"] = dpnp::wasserstein1_1d(flat, *ref);
        metrics["tv_binned"] = dpnp::binned_tv(flat, *ref, verify.bins);
        metrics["ks"] = dpnp::ks_statistic(flat, *ref);
      }
    }
    if (sweep && ref) {
      sweep_tv.push_back(dpnp::binned_tv(to_std(result.samples.col(0)), *ref,
                                         verify.bins));
    }
  }
  if (sweep && ref) {
    metrics["sweep_tv"] = sweep_tv;
    double violation = 0.0;
    for (std::size_t i = 0; i + 1 < sweep_tv.size(); ++i)
      violation = std::max(violation, sweep_tv[i] - sweep_tv[i + 1]);
    metrics["sweep_monotonicity_violation"] = violation;
    parameters["sweep_biases"] = biases;
    parameters["relative_noise"] = relative_noise;
  }

  parameters["T"] = s.T();
  parameters["variant"] =
      params.dds_variant == dpnp::DdsVariant::kDdpm ? "ddpm" : "ddim";
  parameters["K"] = plan.K;
  parameters["K_0"] = plan.K_0;
  parameters["eta_0"] = plan.eta(0);
  parameters["eta_K"] = eta_ref;
  parameters["pcs_iters"] = params.pcs_iters;
  parameters["pcs_r_target"] = params.pcs_r_target;
  parameters["force_mala"] = params.force_mala;
  parameters["n_chains"] = chains.n;
  parameters["reference"] = verify.reference;

  return finish_run("dpnp", cfg, seed, parameters, metrics, out,
                    samples_csv(first_samples));
}

int cmd_verify(const CommonArgs& args) {
  const auto cfg = dpnp::cli::load_config_file(args.config_path);
  const auto& root = cfg.root;
  const dpnp::GaussianMixturePrior prior = dpnp::cli::parse_prior(root);
  const auto model = dpnp::cli::parse_model(root);
  const dpnp::cli::VerifySpec spec = dpnp::cli::parse_verify(root);
  const dpnp::cli::OutputSpec out = resolve_output(root, args);
  const std::uint64_t seed =
      args.seed.value_or(dpnp::cli::parse_chains(root).seed);

  json parameters;
  const Eigen::VectorXd y = resolve_y(root, prior, *model, parameters);
  if (prior.dim() != 1 || model->dim_x() != 1)
    throw ConfigError("verify: grid oracles require a 1-d prior and model");

  const dpnp::Grid grid =
      dpnp::make_benchmark_grid(prior, spec.eta, spec.grid_n);
  const dpnp::GridDensity post = dpnp::grid_posterior(prior, *model, y, grid);
  const dpnp::GridDensity pi =
      dpnp::grid_pi_eta(prior, *model, y, spec.eta, grid);
  const dpnp::GridDensity mu =
      dpnp::grid_mu_eta(prior, *model, y, spec.eta, grid);
  const dpnp::GridDensity q = dpnp::grid_q_eta(*model, y, spec.eta, grid);

  std::string csv = "x,posterior,pi_eta,mu_eta,q_eta\n";
  for (int i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    csv += fmt17(grid.points[k]) + "," + fmt17(post.values[k]) + "," +
           fmt17(pi.values[k]) + "," + fmt17(mu.values[k]) + "," +
           fmt17(q.values[k]) + "\n";
  }

  json metrics;
  metrics["tv_pi_vs_posterior"] = dpnp::tv_grid(pi, post);
  metrics["tv_mu_vs_pi"] = dpnp::tv_grid(mu, pi);
  metrics["tv_mu_vs_posterior"] = dpnp::tv_grid(mu, post);
  metrics["posterior_mean"] = mass_mean(post);
  metrics["posterior_var"] = mass_var(post);
  metrics["pi_eta_mean"] = mass_mean(pi);
  metrics["pi_eta_var"] = mass_var(pi);
  metrics["mu_eta_mean"] = mass_mean(mu);
  metrics["mu_eta_var"] = mass_var(mu);

  parameters["eta"] = spec.eta;
  parameters["grid_n"] = grid.size();
  parameters["grid_lo"] = grid.points.front();
  parameters["grid_hi"] = grid.points.back();
  parameters["spacing"] = grid.spacing;

  return finish_run("verify", cfg, seed, parameters, metrics, out, csv);
}

int cmd_kernel(const CommonArgs& args) {
  const auto cfg = dpnp::cli::load_config_file(args.config_path);
  const auto& root = cfg.root;
  const dpnp::GaussianMixturePrior prior = dpnp::cli::parse_prior(root);
  const auto model = dpnp::cli::parse_model(root);
  const dpnp::cli::OutputSpec out = resolve_output(root, args);
  const std::uint64_t seed =
      args.seed.value_or(dpnp::cli::parse_chains(root).seed);

  double eta = 0.3;
  int grid_n = 401;
  int steps = 10;
  if (const auto k = root.find("kernel"); k != root.end()) {
    if (!k->is_object()) throw ConfigError("kernel: expected an object");
    eta = dpnp::cli::get_number_or(*k, "eta", "kernel.eta", eta);
    grid_n = static_cast<int>(
        dpnp::cli::get_int_or(*k, "grid_n", "kernel.grid_n", grid_n));
    steps = static_cast<int>(
        dpnp::cli::get_int_or(*k, "steps", "kernel.steps", steps));
  }
  if (eta <= 0.0) throw ConfigError("kernel.eta: must be > 0");
  if (grid_n < 2) throw ConfigError("kernel.grid_n: must be >= 2");
  if (steps < 1) throw ConfigError("kernel.steps: must be >= 1");

  json parameters;
  const Eigen::VectorXd y = resolve_y(root, prior, *model, parameters);
  if (prior.dim() != 1 || model->dim_x() != 1)
    throw ConfigError("kernel: grid kernels require a 1-d prior and model");

  const dpnp::Grid grid = dpnp::make_benchmark_grid(prior, eta, grid_n);
  const auto pcs = dpnp::build_kernel(prior, *model, y, eta, grid,
                                      dpnp::KernelLabel::kPcs);
  const auto dds = dpnp::build_kernel(prior, *model, y, eta, grid,
                                      dpnp::KernelLabel::kDds);
  const auto dpnp_k = dpnp::build_kernel(prior, *model, y, eta, grid,
                                         dpnp::KernelLabel::kDpnp);
  const auto aux = dpnp::build_kernel(prior, *model, y, eta, grid,
                                      dpnp::KernelLabel::kAux);

  const dpnp::SpectralReport spec_dpnp = dpnp::spectral_analysis(dpnp_k,
                                                                 steps);
  const dpnp::SpectralReport spec_aux = dpnp::spectral_analysis(aux, steps);

  json metrics;
  metrics["db_pcs"] = dpnp::detailed_balance_residual(pcs, pcs.stationary);
  metrics["db_dds"] = dpnp::detailed_balance_residual(dds, dds.stationary);
  metrics["db_dpnp"] =
      dpnp::detailed_balance_residual(dpnp_k, dpnp_k.stationary);
  metrics["db_aux"] = dpnp::detailed_balance_residual(aux, aux.stationary);
  metrics["lambda2_dpnp"] = spec_dpnp.lambda2;
  metrics["lambda2_aux"] = spec_aux.lambda2;
  metrics["lambda2_agreement"] =
      std::abs(spec_dpnp.lambda2 - spec_aux.lambda2);
  metrics["spectral_gap"] = 1.0 - spec_dpnp.lambda2;
  metrics["eig_agreement"] =
      (spec_dpnp.eigenvalues - spec_aux.eigenvalues).cwiseAbs().maxCoeff();

  const dpnp::GridDensity pi =
      dpnp::grid_pi_eta(prior, *model, y, eta, grid);
  const dpnp::GridDensity mu =
      dpnp::grid_mu_eta(prior, *model, y, eta, grid);
  metrics["tv_stationary_dpnp_vs_pi"] =
      tv_masses(dpnp_k.stationary, pi.weights);
  metrics["tv_stationary_aux_vs_mu"] = tv_masses(aux.stationary, mu.weights);

  // Worst ratio of observed chi^2 decay to the lambda2^(2n) spectral bound.
  double bound_factor = 0.0;
  const double chi0 = spec_dpnp.chi2_decay[0];
  for (int n = 1; n <= steps; ++n) {
    const double denom = std::pow(spec_dpnp.lambda2, 2 * n) * chi0;
    if (denom > 0.0)
      bound_factor = std::max(
          bound_factor,
          spec_dpnp.chi2_decay[static_cast<std::size_t>(n)] / denom);
  }
  metrics["chi2_bound_factor"] = bound_factor;

  std::string csv = "step,lambda2,chi2_dpnp,chi2_bound,chi2_aux\n";
  for (int n = 0; n <= steps; ++n) {
    const auto k = static_cast<std::size_t>(n);
    const double bound = std::pow(spec_dpnp.lambda2, 2 * n) * chi0;
    csv += std::to_string(n) + "," + fmt17(spec_dpnp.lambda2) + "," +
           fmt17(spec_dpnp.chi2_decay[k]) + "," + fmt17(bound) + "," +
           fmt17(spec_aux.chi2_decay[k]) + "\n";
  }

  parameters["eta"] = eta;
  parameters["grid_n"] = grid.size();
  parameters["spacing"] = grid.spacing;
  parameters["steps"] = steps;

  return finish_run("kernel", cfg, seed, parameters, metrics, out, csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion plug-and-play posterior sampling"};
  app.require_subcommand(1);

  CommonArgs args;
  std::uint64_t seed_opt = 0;
  std::string out_opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", args.config_path, "JSON run configuration")
        ->required();
    sub->add_option("--seed", seed_opt, "override the master seed");
    sub->add_option("--out", out_opt,
                    "output path prefix (writes <out>.csv and <out>.json)");
  };
  CLI::App* denoise =
      app.add_subcommand("denoise", "posterior draws for x + eta*eps = y");
  CLI::App* dpnp_cmd =
      app.add_subcommand("dpnp", "annealed plug-and-play posterior sampling");
  CLI::App* verify =
      app.add_subcommand("verify", "grid density oracles and their distances");
  CLI::App* kernel =
      app.add_subcommand("kernel", "discretized kernel spectra and balance");
  for (CLI::App* sub : {denoise, dpnp_cmd, verify, kernel}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : {denoise, dpnp_cmd, verify, kernel}) {
    if (sub->parsed()) {
      if (sub->count("--seed") > 0) args.seed = seed_opt;
      if (sub->count("--out") > 0) args.out = out_opt;
    }
  }

  try {
    if (denoise->parsed()) return cmd_denoise(args);
    if (dpnp_cmd->parsed()) return cmd_dpnp(args);
    if (verify->parsed()) return cmd_verify(args);
    if (kernel->parsed()) return cmd_kernel(args);
  } catch (const dpnp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dpnp::InsufficientScheduleError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
