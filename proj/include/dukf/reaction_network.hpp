#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dukf/operator_terms.hpp"

namespace dukf {

/// n (n-1) ... (n-q+1); zero when n < q.
double falling_factorial(int n, int q);

/// Mass-action style jump: propensity rate_coefficient * prod_i ff(n_i, ff_orders[i]).
struct Reaction {
  double rate_coefficient = 0.0;
  std::vector<int> ff_orders;
  std::vector<int> delta;
  bool sign_toggle = false;

  double propensity(std::span<const int> n) const;

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

struct ReactionNetwork {
  std::size_t species_count = 0;
  std::vector<Reaction> reactions;

  friend bool operator==(const ReactionNetwork&, const ReactionNetwork&) = default;
};

struct FeynmanKacTerm {
  double coefficient = 0.0;
  std::vector<int> ff_orders;

  friend bool operator==(const FeynmanKacTerm&, const FeynmanKacTerm&) = default;
};

/// Path-weight rate V(n) = sum_k c_k prod_i ff(n_i, q_ki); depends only on number operators.
struct FeynmanKacPolynomial {
  std::vector<FeynmanKacTerm> terms;

  double evaluate(std::span<const int> n) const;

  friend bool operator==(const FeynmanKacPolynomial&, const FeynmanKacPolynomial&) = default;
};

/// The dual birth-death process together with its Feynman-Kac weight.
struct DualSystem {
  ReactionNetwork network;
  FeynmanKacPolynomial feynman_kac;

  friend bool operator==(const DualSystem&, const DualSystem&) = default;
};

/**
 * @brief Turns normal-ordered operator terms into a sign-tracking reaction network.
 *
 * For each term: a negative coefficient becomes a positive rate on a reaction
 * that flips the sign state; the propensity is |c| times falling factorials of
 * the annihilation powers; the diagonal term that restores probability
 * conservation is subtracted and the same amount is added back as a
 * Feynman-Kac contribution. Output is sorted (delta, then ff_orders) and
 * Feynman-Kac terms with identical orders are merged.
 *
 * Throws MalformedOperatorError for annihilation on species 0 or ragged vectors.
 */
DualSystem derive_reactions(std::span<const OperatorTerm> terms);

/// Convenience: build_adjoint_operator followed by derive_reactions.
DualSystem derive_dual(const PolynomialSdeModel& model);

double total_propensity(const ReactionNetwork& network, std::span<const int> n);

nlohmann::json to_json(const DualSystem& system);
DualSystem dual_system_from_json(const nlohmann::json& doc);

/// Stable identifier of a dual system: FNV-1a of its canonical JSON text.
std::string model_hash(const DualSystem& system);

}  // namespace dukf
