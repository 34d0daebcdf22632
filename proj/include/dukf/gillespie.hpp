#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dukf/random.hpp"
#include "dukf/reaction_network.hpp"

namespace dukf {

/// Per-path limits. The population cap applies to the sum over the state
/// species (index >= 1); the bookkeeping species 0 is bounded by max_events.
struct SimulationCaps {
  int max_population = 60;
  std::uint64_t max_events = 1'000'000;

  friend bool operator==(const SimulationCaps&, const SimulationCaps&) = default;
};

struct DualPathOutcome {
  std::vector<int> final_n;
  int final_sign = +1;
  double fk_integral = 0.0;
  bool truncated = false;
  std::uint64_t events = 0;
  std::uint64_t toggles = 0;
};

/**
 * @brief One exact SSA path of the dual process on [0, tau_tilde], starting in sign +.
 *
 * The Feynman-Kac integral is accumulated piecewise over the constant-population
 * holding intervals, including the final partial interval. A state with zero
 * total propensity is absorbing. Hitting a cap stops the path and marks it
 * truncated. When `event_log` is given, the index of every fired reaction is
 * appended to it.
 */
DualPathOutcome gillespie_path(const ReactionNetwork& network, const FeynmanKacPolynomial& weight,
                               std::span<const int> initial_n, double tau_tilde,
                               const SimulationCaps& caps, RandomStream& rng,
                               std::vector<std::size_t>* event_log = nullptr);

}  // namespace dukf
