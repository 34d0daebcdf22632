#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dukf/dukf_filter.hpp"
#include "dukf/gillespie.hpp"
#include "dukf/measurement.hpp"
#include "dukf/sde_model.hpp"

namespace dukf {

/// Every default reproduces the Van der Pol demonstration scenario.
struct ExperimentConfig {
  struct Model {
    double epsilon = 1.0;
    double q11 = 0.0262;
    double q22 = 0.008;
  };
  struct Truth {
    std::vector<double> x0{0.2, 0.1};
    double dt = 1e-4;
    double t_end = 10.0;
  };
  struct Dual {
    double tau_tilde = 0.2;
    std::uint64_t n_paths = 10'000'000;
    SimulationCaps caps;
    unsigned workers = 1;
    std::uint64_t chunk_size = 1u << 16;
    double max_truncated_fraction = 1e-3;
  };
  struct Filter {
    GaussianBelief initial;
    std::size_t ensemble_size = 10;
    double integrator_dt = 1e-4;
    DukfOptions dukf;
  };

  Model model;
  MeasurementModel measurement{{0.0, 1.0}, 0.04, 0.2};
  Truth truth;
  Dual dual;
  Filter filter;
  std::uint64_t seed = 20151;
  std::string output_dir = "out";

  ExperimentConfig();

  PolynomialSdeModel sde_model() const;
  void validate() const;
};

/// Sub-stream indices derived from the master seed.
enum class SeedStream : std::uint64_t {
  Truth = 1,
  Measurement = 2,
  Enkf = 3,
  DualTableBase = 100,
};

std::uint64_t stream_seed(const ExperimentConfig& config, SeedStream stream, std::uint64_t offset = 0);

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// JSON Schema (draft 2020-12) describing the config document.
nlohmann::json config_schema();

}  // namespace dukf
