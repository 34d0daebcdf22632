#include "dukf/gillespie.hpp"

#include <numeric>

#include "dukf/errors.hpp"

namespace dukf {

DualPathOutcome gillespie_path(const ReactionNetwork& network, const FeynmanKacPolynomial& weight,
                               std::span<const int> initial_n, double tau_tilde,
                               const SimulationCaps& caps, RandomStream& rng,
                               std::vector<std::size_t>* event_log) {
  if (initial_n.size() != network.species_count) {
    throw ContractViolation("initial population length does not match species count");
  }
  if (!(tau_tilde >= 0.0)) throw ContractViolation("dual horizon must be >= 0");

  DualPathOutcome out;
  out.final_n.assign(initial_n.begin(), initial_n.end());
  for (int v : out.final_n) {
    if (v < 0) throw ContractViolation("initial population must be non-negative");
  }
  auto& n = out.final_n;

  const std::size_t m = network.reactions.size();
  std::vector<double> propensity(m);
  double t = 0.0;

  while (true) {
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      propensity[j] = network.reactions[j].propensity(n);
      total += propensity[j];
    }
    const double v = weight.evaluate(n);
    if (total <= 0.0) {
      out.fk_integral += v * (tau_tilde - t);
      break;
    }
    const double wait = rng.exponential(total);
    if (t + wait >= tau_tilde) {
      out.fk_integral += v * (tau_tilde - t);
      break;
    }
    out.fk_integral += v * wait;
    t += wait;

    double target = rng.uniform() * total;
    std::size_t chosen = m - 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (propensity[j] <= 0.0) continue;
      chosen = j;
      if (target < propensity[j]) break;
      target -= propensity[j];
    }
    const auto& reaction = network.reactions[chosen];
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += reaction.delta[i];
    if (reaction.sign_toggle) {
      out.final_sign = -out.final_sign;
      ++out.toggles;
    }
    ++out.events;
    if (event_log) event_log->push_back(chosen);

    const int population = std::accumulate(n.begin() + 1, n.end(), 0);
    if (population > caps.max_population || out.events > caps.max_events) {
      out.truncated = true;
      break;
    }
  }
  return out;
}

}  // namespace dukf
