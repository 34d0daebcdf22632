#include "dukf/dual_table.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dukf/csv.hpp"
#include "dukf/errors.hpp"

namespace dukf {

double DualTable::truncated_weight_fraction() const {
  double kept = 0.0;
  for (const auto& [key, entry] : entries) kept += entry.weight_sum;
  const double total = kept + truncated_weight_sum;
  return total > 0.0 ? truncated_weight_sum / total : 0.0;
}

DualTable empty_table(const DualSystem& system, std::span<const int> initial_n, double tau_tilde,
                      const SimulationCaps& caps, std::uint64_t seed) {
  if (initial_n.size() != system.network.species_count) {
    throw ContractViolation("initial population length does not match species count");
  }
  if (!(tau_tilde >= 0.0) || !std::isfinite(tau_tilde)) throw ContractViolation("dual horizon must be >= 0");
  DualTable table;
  table.model_hash = model_hash(system);
  table.tau_tilde = tau_tilde;
  table.initial_n.assign(initial_n.begin(), initial_n.end());
  table.caps = caps;
  table.seed = seed;
  table.network = to_json(system);
  return table;
}

double DualTable::effective_sample_size() const {
  double w1 = 0.0;
  double w2 = 0.0;
  for (const auto& [key, entry] : entries) {
    w1 += entry.weight_sum;
    w2 += entry.weight_sq_sum;
  }
  return w2 > 0.0 ? w1 * w1 / w2 : 0.0;
}

namespace {

void accumulate_chunk(const DualSystem& system, std::span<const int> initial_n, double tau_tilde,
                      const SimulationCaps& caps, std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t paths, DualTable& partial) {
  RandomStream rng(seed, stream);
  for (std::uint64_t p = 0; p < paths; ++p) {
    auto outcome = gillespie_path(system.network, system.feynman_kac, initial_n, tau_tilde, caps, rng);
    const double w = std::exp(outcome.fk_integral);
    ++partial.n_paths;
    if (outcome.truncated) {
      ++partial.truncated_paths;
      partial.truncated_weight_sum += w;
      continue;
    }
    auto& entry = partial.entries[TableKey{std::move(outcome.final_n), outcome.final_sign}];
    entry.weight_sum += w;
    entry.weight_sq_sum += w * w;
    ++entry.count;
  }
}

void add_into(DualTable& into, const DualTable& from) {
  into.n_paths += from.n_paths;
  into.truncated_paths += from.truncated_paths;
  into.truncated_weight_sum += from.truncated_weight_sum;
  for (const auto& [key, entry] : from.entries) {
    auto& target = into.entries[key];
    target.weight_sum += entry.weight_sum;
    target.weight_sq_sum += entry.weight_sq_sum;
    target.count += entry.count;
  }
}

}  // namespace

DualTable build_dual_table(const DualSystem& system, std::span<const int> initial_n,
                           double tau_tilde, const TableBuildOptions& options,
                           std::vector<std::string>* warnings) {
  if (options.n_paths < 1) throw ContractViolation("n_paths must be >= 1");
  if (options.chunk_size < 1) throw ContractViolation("chunk_size must be >= 1");
  DualTable table = empty_table(system, initial_n, tau_tilde, options.caps, options.seed);

  const std::uint64_t chunks = (options.n_paths + options.chunk_size - 1) / options.chunk_size;
  std::vector<DualTable> partials(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        const std::uint64_t begin = c * options.chunk_size;
        const std::uint64_t paths = std::min(options.chunk_size, options.n_paths - begin);
        accumulate_chunk(system, initial_n, tau_tilde, options.caps, options.seed,
                         options.first_chunk + c, paths, partials[c]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  // Fixed merge order keeps the floating-point sums independent of scheduling.
  for (const auto& partial : partials) add_into(table, partial);

  const double fraction = static_cast<double>(table.truncated_paths) / static_cast<double>(table.n_paths);
  if (fraction > options.max_truncated_fraction) {
    std::string msg = "dual table truncated " + std::to_string(table.truncated_paths) + " of " +
                      std::to_string(table.n_paths) + " paths (fraction " + format_real(fraction) +
                      ", weight fraction " + format_real(table.truncated_weight_fraction()) + ")";
    if (options.strict) throw TruncationError(msg);
    if (warnings) warnings->push_back(std::move(msg));
  }
  return table;
}

DualTable merge_tables(const DualTable& a, const DualTable& b) {
  if (a.model_hash != b.model_hash) throw IncompatibleTableError("model hash mismatch");
  if (a.initial_n != b.initial_n) throw IncompatibleTableError("initial population mismatch");
  if (a.tau_tilde != b.tau_tilde) throw IncompatibleTableError("dual horizon mismatch");
  if (!(a.caps == b.caps)) throw IncompatibleTableError("simulation caps mismatch");
  DualTable out = a;
  if (a.n_paths == 0) {
    out.seed = b.seed;
  } else if (b.n_paths != 0) {
    out.seed = std::min(a.seed, b.seed);
  }
  if (out.network.is_null()) out.network = b.network;
  add_into(out, b);
  return out;
}

namespace {

template <typename Value>
MomentEstimate estimate(const DualTable& table, double r_ts, Value&& value_at) {
  if (!(r_ts > 0.0) || r_ts > 1.0 + 1e-12) {
    throw ContractViolation("time-scaling factor must lie in (0, 1], got " + format_real(r_ts));
  }
  if (table.usable_paths() == 0) throw UnusableEstimateError("dual table has no usable paths");

  double s1 = 0.0;
  double s2 = 0.0;
  for (const auto& [key, entry] : table.entries) {
    const double f = std::pow(r_ts, key.n[0]) * value_at(key.n);
    s1 += key.sign * f * entry.weight_sum;
    s2 += f * f * entry.weight_sq_sum;
  }
  const double n = static_cast<double>(table.n_paths);
  MomentEstimate est;
  est.value = s1 / n;
  if (table.n_paths > 1) {
    const double var = (s2 / n - est.value * est.value) * n / (n - 1.0);
    est.std_error = std::sqrt(std::max(var, 0.0) / n);
  }
  est.effective_sample_size = table.effective_sample_size();
  return est;
}

double ipow(double base, int exponent) {
  double result = 1.0;
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

}  // namespace

MomentEstimate delta_moment(const DualTable& table, std::span<const double> x0, double r_ts) {
  if (x0.size() + 1 != table.initial_n.size()) {
    throw ContractViolation("initial state length does not match table species count");
  }
  return estimate(table, r_ts, [&](const std::vector<int>& n) {
    double v = 1.0;
    for (std::size_t i = 0; i < x0.size(); ++i) v *= ipow(x0[i], n[i + 1]);
    return v;
  });
}

MomentEstimate gaussian_moment(const DualTable& table, MomentContext& moments, double r_ts) {
  if (table.initial_n.size() != 3) {
    throw ContractViolation("Gaussian moments are defined for two-state models only");
  }
  return estimate(table, r_ts, [&](const std::vector<int>& n) { return moments.raw_moment(n[1], n[2]); });
}

MomentEstimate gaussian_moment(const DualTable& table, const GaussianBelief& belief, double r_ts) {
  MomentContext ctx(belief);
  return gaussian_moment(table, ctx, r_ts);
}

namespace {

std::string int_list(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s + "]";
}

constexpr int kFormatVersion = 1;

}  // namespace

std::string serialize_table(const DualTable& table) {
  std::string s = "{\n";
  s += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  s += "  \"model_hash\": " + nlohmann::json(table.model_hash).dump() + ",\n";
  s += "  \"tau_tilde\": " + format_real(table.tau_tilde) + ",\n";
  s += "  \"initial_n\": " + int_list(table.initial_n) + ",\n";
  s += "  \"n_paths\": " + std::to_string(table.n_paths) + ",\n";
  s += "  \"truncated_paths\": " + std::to_string(table.truncated_paths) + ",\n";
  s += "  \"truncated_weight_sum\": " + format_real(table.truncated_weight_sum) + ",\n";
  s += "  \"caps\": {\"max_population\": " + std::to_string(table.caps.max_population) +
       ", \"max_events\": " + std::to_string(table.caps.max_events) + "},\n";
  s += "  \"seed\": " + std::to_string(table.seed) + ",\n";
  s += "  \"network\": " + table.network.dump() + ",\n";
  s += "  \"entries\": [";
  bool first = true;
  for (const auto& [key, entry] : table.entries) {
    s += first ? "\n" : ",\n";
    first = false;
    s += "    {\"n\": " + int_list(key.n) + ", \"sign\": " + std::to_string(key.sign) +
         ", \"weight_sum\": " + format_real(entry.weight_sum) +
         ", \"weight_sq_sum\": " + format_real(entry.weight_sq_sum) +
         ", \"count\": " + std::to_string(entry.count) + "}";
  }
  s += first ? "]\n}\n" : "\n  ]\n}\n";
  return s;
}

DualTable parse_table(const std::string& text) {
  DualTable table;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw TableLoadError("unsupported table format_version");
    }
    table.model_hash = doc.at("model_hash").get<std::string>();
    table.tau_tilde = doc.at("tau_tilde").get<double>();
    table.initial_n = doc.at("initial_n").get<std::vector<int>>();
    table.n_paths = doc.at("n_paths").get<std::uint64_t>();
    table.truncated_paths = doc.at("truncated_paths").get<std::uint64_t>();
    table.truncated_weight_sum = doc.value("truncated_weight_sum", 0.0);
    table.caps.max_population = doc.at("caps").at("max_population").get<int>();
    table.caps.max_events = doc.at("caps").at("max_events").get<std::uint64_t>();
    table.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("network")) table.network = doc.at("network");
    for (const auto& e : doc.at("entries")) {
      TableKey key{e.at("n").get<std::vector<int>>(), e.at("sign").get<int>()};
      TableEntry entry{e.at("weight_sum").get<double>(), e.at("weight_sq_sum").get<double>(),
                       e.at("count").get<std::uint64_t>()};
      if (!table.entries.emplace(std::move(key), entry).second) {
        throw TableLoadError("duplicate table entry");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw TableLoadError(std::string("corrupt dual table: ") + e.what());
  }

  std::uint64_t counted = table.truncated_paths;
  for (const auto& [key, entry] : table.entries) {
    if (key.n.size() != table.initial_n.size() || (key.sign != 1 && key.sign != -1)) {
      throw TableLoadError("dual table entry has a malformed key");
    }
    if (std::any_of(key.n.begin(), key.n.end(), [](int v) { return v < 0; })) {
      throw TableLoadError("dual table entry has a negative population");
    }
    counted += entry.count;
  }
  if (counted != table.n_paths) throw TableLoadError("dual table path counts do not add up");
  if (!table.network.is_null()) {
    std::string embedded;
    try {
      embedded = model_hash(dual_system_from_json(table.network));
    } catch (const ValidationError& e) {
      throw TableLoadError(e.what());
    }
    if (embedded != table.model_hash) throw TableLoadError("embedded network does not match model hash");
  }
  return table;
}

void save_table(const DualTable& table, const std::filesystem::path& path) {
  write_file(path, serialize_table(table));
}

DualTable load_table(const std::filesystem::path& path, const std::optional<std::string>& expected_model_hash) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ValidationError& e) {
    throw TableLoadError(e.what());
  }
  auto table = parse_table(text);
  if (expected_model_hash && table.model_hash != *expected_model_hash) {
    throw TableLoadError("dual table '" + path.string() + "' was built for model " + table.model_hash +
                         ", expected " + *expected_model_hash);
  }
  return table;
}

}  // namespace dukf
