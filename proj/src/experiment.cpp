#include "dukf/experiment.hpp"

#include <cmath>
#include <set>

#include "dukf/csv.hpp"
#include "dukf/errors.hpp"
#include "dukf/random.hpp"

namespace dukf {

ExperimentConfig::ExperimentConfig() {
  filter.initial.mean = Eigen::Vector2d(0.1, 0.1);
  filter.initial.cov = Eigen::Vector2d(0.1, 0.1).asDiagonal();
}

PolynomialSdeModel ExperimentConfig::sde_model() const {
  return van_der_pol(model.epsilon, model.q11, model.q22);
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigurationError("invalid config: " + what);
  };
  require(std::isfinite(model.epsilon), "model.epsilon must be finite");
  require(model.q11 >= 0.0 && model.q22 >= 0.0, "model diffusion entries must be >= 0");
  measurement.validate();
  require(measurement.h.size() == 2, "measurement.h must have two entries");
  require(truth.x0.size() == 2, "truth.x0 must have two entries");
  require(truth.dt > 0.0, "truth.dt must be > 0");
  require(truth.t_end >= 0.0, "truth.t_end must be >= 0");
  require(dual.tau_tilde > 0.0, "dual.tau_tilde must be > 0");
  require(dual.n_paths >= 1, "dual.n_paths must be >= 1");
  require(dual.caps.max_population >= 1, "dual.max_population must be >= 1");
  require(dual.caps.max_events >= 1, "dual.max_events must be >= 1");
  require(dual.workers >= 1, "dual.workers must be >= 1");
  require(dual.chunk_size >= 1, "dual.chunk_size must be >= 1");
  require(filter.ensemble_size >= 2, "filter.ensemble_size must be >= 2");
  require(filter.integrator_dt > 0.0, "filter.integrator_dt must be > 0");
  require(filter.initial.cov.isApprox(filter.initial.cov.transpose()), "filter.init_cov must be symmetric");
  require(filter.dukf.cov_floor >= 0.0, "filter.cov_floor must be >= 0");
}

std::uint64_t stream_seed(const ExperimentConfig& config, SeedStream stream, std::uint64_t offset) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(stream) + offset);
}

namespace {

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigurationError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigurationError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& into) {
  if (obj.contains(key)) into = obj.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig c;
  try {
    reject_unknown(doc, {"$schema", "model", "measurement", "truth", "dual", "filter", "seed", "output_dir"}, "");
    if (doc.contains("model")) {
      const auto& m = doc.at("model");
      reject_unknown(m, {"epsilon", "q11", "q22"}, "model.");
      read(m, "epsilon", c.model.epsilon);
      read(m, "q11", c.model.q11);
      read(m, "q22", c.model.q22);
    }
    if (doc.contains("measurement")) {
      const auto& m = doc.at("measurement");
      reject_unknown(m, {"h", "r", "interval"}, "measurement.");
      read(m, "h", c.measurement.h);
      read(m, "r", c.measurement.r);
      read(m, "interval", c.measurement.interval);
    }
    if (doc.contains("truth")) {
      const auto& t = doc.at("truth");
      reject_unknown(t, {"x0", "dt", "t_end"}, "truth.");
      read(t, "x0", c.truth.x0);
      read(t, "dt", c.truth.dt);
      read(t, "t_end", c.truth.t_end);
    }
    if (doc.contains("dual")) {
      const auto& d = doc.at("dual");
      reject_unknown(d, {"tau_tilde", "n_paths", "max_population", "max_events", "workers", "chunk_size",
                         "max_truncated_fraction"},
                     "dual.");
      read(d, "tau_tilde", c.dual.tau_tilde);
      read(d, "n_paths", c.dual.n_paths);
      read(d, "max_population", c.dual.caps.max_population);
      read(d, "max_events", c.dual.caps.max_events);
      read(d, "workers", c.dual.workers);
      read(d, "chunk_size", c.dual.chunk_size);
      read(d, "max_truncated_fraction", c.dual.max_truncated_fraction);
    }
    if (doc.contains("filter")) {
      const auto& f = doc.at("filter");
      reject_unknown(f, {"init_mean", "init_cov", "ensemble_size", "integrator_dt", "cov_floor", "clamp_warning",
                         "max_std_error", "order_cap"},
                     "filter.");
      if (f.contains("init_mean")) {
        auto mean = f.at("init_mean").get<std::vector<double>>();
        if (mean.size() != 2) throw ConfigurationError("filter.init_mean must have two entries");
        c.filter.initial.mean = Eigen::Vector2d(mean[0], mean[1]);
      }
      if (f.contains("init_cov")) {
        auto cov = f.at("init_cov").get<std::vector<std::vector<double>>>();
        if (cov.size() != 2 || cov[0].size() != 2 || cov[1].size() != 2) {
          throw ConfigurationError("filter.init_cov must be 2x2");
        }
        c.filter.initial.cov << cov[0][0], cov[0][1], cov[1][0], cov[1][1];
      }
      read(f, "ensemble_size", c.filter.ensemble_size);
      read(f, "integrator_dt", c.filter.integrator_dt);
      read(f, "cov_floor", c.filter.dukf.cov_floor);
      read(f, "clamp_warning", c.filter.dukf.clamp_warning);
      if (f.contains("max_std_error") && !f.at("max_std_error").is_null()) {
        c.filter.dukf.max_std_error = f.at("max_std_error").get<double>();
      }
      read(f, "order_cap", c.filter.dukf.order_cap);
    }
    read(doc, "seed", c.seed);
    read(doc, "output_dir", c.output_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  const auto& b = c.filter.initial;
  nlohmann::json max_se = std::isfinite(c.filter.dukf.max_std_error) ? nlohmann::json(c.filter.dukf.max_std_error)
                                                                      : nlohmann::json(nullptr);
  return {
      {"model", {{"epsilon", c.model.epsilon}, {"q11", c.model.q11}, {"q22", c.model.q22}}},
      {"measurement", {{"h", c.measurement.h}, {"r", c.measurement.r}, {"interval", c.measurement.interval}}},
      {"truth", {{"x0", c.truth.x0}, {"dt", c.truth.dt}, {"t_end", c.truth.t_end}}},
      {"dual",
       {{"tau_tilde", c.dual.tau_tilde},
        {"n_paths", c.dual.n_paths},
        {"max_population", c.dual.caps.max_population},
        {"max_events", c.dual.caps.max_events},
        {"workers", c.dual.workers},
        {"chunk_size", c.dual.chunk_size},
        {"max_truncated_fraction", c.dual.max_truncated_fraction}}},
      {"filter",
       {{"init_mean", {b.mean(0), b.mean(1)}},
        {"init_cov", {{b.cov(0, 0), b.cov(0, 1)}, {b.cov(1, 0), b.cov(1, 1)}}},
        {"ensemble_size", c.filter.ensemble_size},
        {"integrator_dt", c.filter.integrator_dt},
        {"cov_floor", c.filter.dukf.cov_floor},
        {"clamp_warning", c.filter.dukf.clamp_warning},
        {"max_std_error", max_se},
        {"order_cap", c.filter.dukf.order_cap}}},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const auto text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json config_schema() {
  const nlohmann::json number = {{"type", "number"}};
  const nlohmann::json nonneg = {{"type", "number"}, {"minimum", 0}};
  const nlohmann::json positive = {{"type", "number"}, {"exclusiveMinimum", 0}};
  const nlohmann::json pos_int = {{"type", "integer"}, {"minimum", 1}};
  const nlohmann::json vec2 = {{"type", "array"}, {"items", number}, {"minItems", 2}, {"maxItems", 2}};
  auto section = [](nlohmann::json props) {
    return nlohmann::json{{"type", "object"}, {"additionalProperties", false}, {"properties", std::move(props)}};
  };
  ExperimentConfig defaults;
  return {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "dukf experiment configuration"},
      {"type", "object"},
      {"additionalProperties", false},
      {"default", to_json(defaults)},
      {"properties",
       {{"$schema", {{"type", "string"}}},
        {"model", section({{"epsilon", number}, {"q11", nonneg}, {"q22", nonneg}})},
        {"measurement", section({{"h", vec2}, {"r", nonneg}, {"interval", positive}})},
        {"truth", section({{"x0", vec2}, {"dt", positive}, {"t_end", nonneg}})},
        {"dual", section({{"tau_tilde", positive},
                          {"n_paths", pos_int},
                          {"max_population", pos_int},
                          {"max_events", pos_int},
                          {"workers", pos_int},
                          {"chunk_size", pos_int},
                          {"max_truncated_fraction", nonneg}})},
        {"filter", section({{"init_mean", vec2},
                            {"init_cov", {{"type", "array"}, {"items", vec2}, {"minItems", 2}, {"maxItems", 2}}},
                            {"ensemble_size", {{"type", "integer"}, {"minimum", 2}}},
                            {"integrator_dt", positive},
                            {"cov_floor", nonneg},
                            {"clamp_warning", nonneg},
                            {"max_std_error", {{"type", {"number", "null"}}}},
                            {"order_cap", pos_int}})},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"output_dir", {{"type", "string"}}}}},
  };
}

}  // namespace dukf
