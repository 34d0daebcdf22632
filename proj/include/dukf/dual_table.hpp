#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dukf/gaussian_moments.hpp"
#include "dukf/gillespie.hpp"
#include "dukf/reaction_network.hpp"

namespace dukf {

struct TableKey {
  std::vector<int> n;
  int sign = +1;

  auto operator<=>(const TableKey&) const = default;
  bool operator==(const TableKey&) const = default;
};

struct TableEntry {
  double weight_sum = 0.0;     ///< sum of exp(fk_integral)
  double weight_sq_sum = 0.0;  ///< sum of exp(2 fk_integral)
  std::uint64_t count = 0;

  bool operator==(const TableEntry&) const = default;
};

/**
 * @brief Aggregated, Feynman-Kac weighted terminal distribution of dual paths.
 *
 * Built once for a horizon tau_tilde and an initial population, then reused
 * for any initial state of the original SDE and any time tau = r_ts * tau_tilde.
 * Truncated paths are counted but never enter `entries`.
 */
struct DualTable {
  std::string model_hash;
  double tau_tilde = 0.0;
  std::vector<int> initial_n;
  std::uint64_t n_paths = 0;
  std::uint64_t truncated_paths = 0;
  double truncated_weight_sum = 0.0;
  SimulationCaps caps;
  std::uint64_t seed = 0;
  std::map<TableKey, TableEntry> entries;
  nlohmann::json network;  ///< derived network, recorded for provenance (may be null)

  std::uint64_t usable_paths() const { return n_paths - truncated_paths; }
  /// Share of the total path weight lost to truncation.
  double truncated_weight_fraction() const;
  /// (sum w)^2 / sum w^2 over the usable paths.
  double effective_sample_size() const;

  bool operator==(const DualTable&) const = default;
};

struct TableBuildOptions {
  std::uint64_t n_paths = 10'000'000;
  SimulationCaps caps;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Paths per RNG sub-stream. Chunk c always uses stream first_chunk + c, so
  /// the result does not depend on the number of workers.
  std::uint64_t chunk_size = 1u << 16;
  std::uint64_t first_chunk = 0;
  double max_truncated_fraction = 1e-3;
  bool strict = false;
};

DualTable empty_table(const DualSystem& system, std::span<const int> initial_n, double tau_tilde,
                      const SimulationCaps& caps, std::uint64_t seed);

/**
 * Runs `options.n_paths` Gillespie paths and aggregates them. A truncated-path
 * fraction above `max_truncated_fraction` throws TruncationError in strict mode
 * and otherwise appends a message to `warnings`.
 */
DualTable build_dual_table(const DualSystem& system, std::span<const int> initial_n,
                           double tau_tilde, const TableBuildOptions& options,
                           std::vector<std::string>* warnings = nullptr);

/// Entry-wise sum. Throws IncompatibleTableError on metadata mismatch.
DualTable merge_tables(const DualTable& a, const DualTable& b);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  /// (sum w)^2 / sum w^2 over usable paths.
  double effective_sample_size = 0.0;
};

/// Signed, weighted estimate of E[x1(tau)^{m1} x2(tau)^{m2}] from a delta initial state x0,
/// where (m1, m2) are the table's initial populations and tau = r_ts * tau_tilde.
MomentEstimate delta_moment(const DualTable& table, std::span<const double> x0, double r_ts);

/// Same estimate for a Gaussian initial distribution, using raw Gaussian moments.
MomentEstimate gaussian_moment(const DualTable& table, MomentContext& moments, double r_ts);
MomentEstimate gaussian_moment(const DualTable& table, const GaussianBelief& belief, double r_ts);

/// JSON text with 17-significant-digit floats and entries in key order.
std::string serialize_table(const DualTable& table);
DualTable parse_table(const std::string& text);

void save_table(const DualTable& table, const std::filesystem::path& path);
/// Throws TableLoadError on unreadable/corrupt files or when the stored hash
/// differs from `expected_model_hash` (if given) or from the embedded network.
DualTable load_table(const std::filesystem::path& path,
                     const std::optional<std::string>& expected_model_hash = std::nullopt);

}  // namespace dukf
