#include "config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "dpnp/errors.hpp"
#include "dpnp/rng.hpp"

namespace dpnp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json* find(const json& parent, const std::string& key) {
  if (!parent.is_object()) return nullptr;
  auto it = parent.find(key);
  return it == parent.end() ? nullptr : &*it;
}

std::int64_t as_int(const json& node, const std::string& path) {
  if (!node.is_number_integer() && !node.is_number_unsigned())
    fail(path, "expected an integer");
  return node.get<std::int64_t>();
}

}  // namespace

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();

  LoadedConfig cfg;
  cfg.path = path;
  char hex[32];
  std::snprintf(hex, sizeof hex, "fnv1a64:%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(bytes.data(), bytes.size())));
  cfg.hash = hex;
  try {
    cfg.root = json::parse(bytes);
  } catch (const json::parse_error& e) {
    fail("config", std::string("invalid JSON (") + e.what() + ")");
  }
  if (!cfg.root.is_object()) fail("config", "top level must be an object");
  return cfg;
}

double get_number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

double get_number_or(const json& parent, const std::string& key,
                     const std::string& path, double fallback) {
  const json* node = find(parent, key);
  return node == nullptr ? fallback : get_number(*node, path);
}

std::int64_t get_int_or(const json& parent, const std::string& key,
                        const std::string& path, std::int64_t fallback) {
  const json* node = find(parent, key);
  return node == nullptr ? fallback : as_int(*node, path);
}

bool get_bool_or(const json& parent, const std::string& key,
                 const std::string& path, bool fallback) {
  const json* node = find(parent, key);
  if (node == nullptr) return fallback;
  if (!node->is_boolean()) fail(path, "expected true or false");
  return node->get<bool>();
}

std::string get_string_or(const json& parent, const std::string& key,
                          const std::string& path,
                          const std::string& fallback) {
  const json* node = find(parent, key);
  if (node == nullptr) return fallback;
  if (!node->is_string()) fail(path, "expected a string");
  return node->get<std::string>();
}

Eigen::VectorXd get_vector(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty())
    fail(path, "expected a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<int>(node.size()));
  for (int i = 0; i < v.size(); ++i) {
    const json& e = node[static_cast<std::size_t>(i)];
    if (!e.is_number())
      fail(path + "[" + std::to_string(i) + "]", "expected a number");
    v[i] = e.get<double>();
  }
  return v;
}

Eigen::MatrixXd get_matrix(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty())
    fail(path, "expected a non-empty array of rows");
  const int rows = static_cast<int>(node.size());
  int cols = -1;
  Eigen::MatrixXd m;
  for (int i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const Eigen::VectorXd row =
        get_vector(node[static_cast<std::size_t>(i)], row_path);
    if (cols < 0) {
      cols = static_cast<int>(row.size());
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(row_path, "rows must have equal length");
    }
    m.row(i) = row.transpose();
  }
  return m;
}

GaussianMixturePrior parse_prior(const json& root) {
  const json* prior = find(root, "prior");
  if (prior == nullptr) fail("prior", "required");
  const json* comps = find(*prior, "components");
  if (comps == nullptr || !comps->is_array() || comps->empty())
    fail("prior.components", "expected a non-empty array");

  std::vector<GmComponent> out;
  for (std::size_t i = 0; i < comps->size(); ++i) {
    const std::string base = "prior.components[" + std::to_string(i) + "]";
    const json& c = (*comps)[i];
    if (!c.is_object()) fail(base, "expected an object");
    GmComponent g;
    const json* w = find(c, "weight");
    g.weight = w == nullptr ? 1.0 : get_number(*w, base + ".weight");
    const json* mean = find(c, "mean");
    if (mean == nullptr) fail(base + ".mean", "required");
    g.mean = get_vector(*mean, base + ".mean");
    const json* var = find(c, "var");
    if (var == nullptr) fail(base + ".var", "required");
    g.var = get_vector(*var, base + ".var");
    if (g.var.size() != g.mean.size())
      fail(base + ".var", "length must match mean");
    out.push_back(std::move(g));
  }
  return GaussianMixturePrior(std::move(out));
}

DiffusionSchedule parse_schedule(const json& root) {
  const json* s = find(root, "schedule");
  const json empty = json::object();
  const json& node = s == nullptr ? empty : *s;
  if (!node.is_object()) fail("schedule", "expected an object");
  const std::int64_t T = get_int_or(node, "T", "schedule.T", 1000);
  const double b1 = get_number_or(node, "beta_1", "schedule.beta_1", 1e-4);
  const double bT = get_number_or(node, "beta_T", "schedule.beta_T", 0.02);
  if (T < 1) fail("schedule.T", "must be >= 1");
  return make_linear_beta_schedule(static_cast<int>(T), b1, bT);
}

std::unique_ptr<MeasurementModel> parse_model(const json& root) {
  const json* m = find(root, "model");
  if (m == nullptr) fail("model", "required");
  if (!m->is_object()) fail("model", "expected an object");
  const std::string kind = get_string_or(*m, "kind", "model.kind", "");
  if (kind.empty()) fail("model.kind", "required");

  if (kind == "linear") {
    const json* a = find(*m, "A");
    if (a == nullptr) fail("model.A", "required");
    Eigen::MatrixXd A = get_matrix(*a, "model.A");
    if (const json* cov = find(*m, "noise_cov"))
      return std::make_unique<LinearGaussianModel>(
          std::move(A), get_matrix(*cov, "model.noise_cov"));
    const double nv = get_number_or(*m, "noise_var", "model.noise_var", -1.0);
    if (nv <= 0.0) fail("model.noise_var", "required and must be > 0");
    return std::make_unique<LinearGaussianModel>(std::move(A), nv);
  }
  if (kind == "phase_retrieval") {
    const double nv = get_number_or(*m, "noise_var", "model.noise_var", -1.0);
    if (nv <= 0.0) fail("model.noise_var", "required and must be > 0");
    if (const json* mask = find(*m, "mask"))
      return std::make_unique<PhaseRetrievalModel>(
          get_vector(*mask, "model.mask"), nv);
    const std::int64_t d = get_int_or(*m, "d", "model.d", 0);
    if (d < 1) fail("model.d", "required (or give model.mask)");
    const std::int64_t seed = get_int_or(*m, "mask_seed", "model.mask_seed", 0);
    return std::make_unique<PhaseRetrievalModel>(
        make_rademacher_mask(static_cast<int>(d),
                             static_cast<std::uint64_t>(seed)),
        nv);
  }
  if (kind == "quantized") {
    const std::int64_t d = get_int_or(*m, "d", "model.d", 0);
    if (d < 1) fail("model.d", "required and must be >= 1");
    const double theta = get_number_or(*m, "theta", "model.theta", 0.0);
    if (theta <= 0.0) fail("model.theta", "required and must be > 0");
    return std::make_unique<QuantizedSensingModel>(static_cast<int>(d), theta);
  }
  if (kind == "downsample") {
    const std::int64_t d = get_int_or(*m, "d", "model.d", 0);
    const std::int64_t ratio = get_int_or(*m, "ratio", "model.ratio", 0);
    const double nv = get_number_or(*m, "noise_var", "model.noise_var", -1.0);
    if (d < 1) fail("model.d", "required and must be >= 1");
    if (ratio < 1) fail("model.ratio", "required and must be >= 1");
    if (nv <= 0.0) fail("model.noise_var", "required and must be > 0");
    return std::make_unique<DownsampleModel>(static_cast<int>(d),
                                             static_cast<int>(ratio), nv);
  }
  if (kind == "constant") {
    const std::int64_t d = get_int_or(*m, "d", "model.d", 0);
    if (d < 1) fail("model.d", "required and must be >= 1");
    return std::make_unique<ConstantLikelihoodModel>(
        static_cast<int>(d), get_number_or(*m, "value", "model.value", 0.0));
  }
  fail("model.kind", "unknown kind '" + kind + "'");
}

DpnpParams parse_sampler(const json& root) {
  DpnpParams p;
  const json* s = find(root, "sampler");
  if (s == nullptr) return p;
  if (!s->is_object()) fail("sampler", "expected an object");
  const std::string variant =
      get_string_or(*s, "variant", "sampler.variant", "ddpm");
  if (variant == "ddpm") {
    p.dds_variant = DdsVariant::kDdpm;
  } else if (variant == "ddim") {
    p.dds_variant = DdsVariant::kDdim;
  } else {
    fail("sampler.variant", "must be 'ddpm' or 'ddim'");
  }
  p.pcs_r_target =
      get_number_or(*s, "pcs_r_target", "sampler.pcs_r_target", 0.7);
  p.pcs_iters = static_cast<int>(
      get_int_or(*s, "pcs_iters", "sampler.pcs_iters", 200));
  p.force_mala = get_bool_or(*s, "force_mala", "sampler.force_mala", false);
  return p;
}

AnnealingPlan parse_plan(const json& root) {
  const json* p = find(root, "plan");
  if (p == nullptr) fail("plan", "required");
  if (!p->is_object()) fail("plan", "expected an object");

  if (const json* etas = find(*p, "etas")) {
    AnnealingPlan plan;
    const Eigen::VectorXd v = get_vector(*etas, "plan.etas");
    plan.etas.assign(v.data(), v.data() + v.size());
    plan.K = static_cast<int>(plan.etas.size()) - 1;
    plan.K_0 = static_cast<int>(get_int_or(*p, "K_0", "plan.K_0", 0));
    return plan;
  }
  const double eta_0 = get_number_or(*p, "eta_0", "plan.eta_0", -1.0);
  const double eta_K = get_number_or(*p, "eta_K", "plan.eta_K", -1.0);
  const std::int64_t K_0 = get_int_or(*p, "K_0", "plan.K_0", 0);
  const std::int64_t K = get_int_or(*p, "K", "plan.K", -1);
  if (eta_0 <= 0.0) fail("plan.eta_0", "required and must be > 0");
  if (eta_K <= 0.0) fail("plan.eta_K", "required and must be > 0");
  if (K < 0) fail("plan.K", "required and must be >= 0");
  try {
    return make_geometric_plan(eta_0, eta_K, static_cast<int>(K_0),
                               static_cast<int>(K));
  } catch (const ConfigError& e) {
    fail("plan", e.what());
  }
}

ChainSpec parse_chains(const json& root) {
  ChainSpec spec;
  const json* c = find(root, "chains");
  if (c == nullptr) return spec;
  if (!c->is_object()) fail("chains", "expected an object");
  spec.n = static_cast<int>(get_int_or(*c, "n", "chains.n", 1));
  if (spec.n < 1) fail("chains.n", "must be >= 1");
  const std::int64_t seed = get_int_or(*c, "seed", "chains.seed", 0);
  spec.seed = static_cast<std::uint64_t>(seed);
  spec.workers = static_cast<int>(get_int_or(*c, "workers", "chains.workers",
                                             0));
  if (spec.workers < 0) fail("chains.workers", "must be >= 0");
  return spec;
}

OutputSpec parse_output(const json& root) {
  OutputSpec spec;
  const json* o = find(root, "output");
  if (o == nullptr) return spec;
  if (!o->is_object()) fail("output", "expected an object");
  spec.samples = get_string_or(*o, "samples", "output.samples", spec.samples);
  spec.metrics = get_string_or(*o, "metrics", "output.metrics", spec.metrics);
  return spec;
}

VerifySpec parse_verify(const json& root) {
  VerifySpec spec;
  const json* v = find(root, "verify");
  if (v == nullptr) return spec;
  if (!v->is_object()) fail("verify", "expected an object");
  spec.eta = get_number_or(*v, "eta", "verify.eta", spec.eta);
  if (spec.eta < 0.0) fail("verify.eta", "must be >= 0");
  spec.grid_n =
      static_cast<int>(get_int_or(*v, "grid_n", "verify.grid_n", spec.grid_n));
  if (spec.grid_n < 2) fail("verify.grid_n", "must be >= 2");
  spec.bins = static_cast<int>(get_int_or(*v, "bins", "verify.bins",
                                          spec.bins));
  if (spec.bins < 1) fail("verify.bins", "must be >= 1");
  spec.reference =
      get_string_or(*v, "reference", "verify.reference", spec.reference);
  if (spec.reference != "pi_eta" && spec.reference != "posterior")
    fail("verify.reference", "must be 'pi_eta' or 'posterior'");
  return spec;
}

int resolve_workers(int configured) {
  if (const char* env = std::getenv("DPNP_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      fail("DPNP_WORKERS", "must be a nonnegative integer");
    configured = static_cast<int>(v);
  }
  if (configured == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    configured = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return configured;
}

}  // namespace dpnp::cli
