#pragma once

#include <vector>

#include "dukf/sde_model.hpp"

namespace dukf {

/**
 * @brief One normal-ordered monomial of the creation/annihilation algebra.
 *
 * Represents coefficient * prod_i (a_i^dagger)^{creation[i]} * prod_i a_i^{annihilation[i]}.
 * Index 0 is the bookkeeping species that stands in for the time-scaling
 * constant; it is only ever created, never annihilated.
 */
struct OperatorTerm {
  double coefficient = 0.0;
  std::vector<int> creation;
  std::vector<int> annihilation;

  friend bool operator==(const OperatorTerm&, const OperatorTerm&) = default;
};

/**
 * @brief Backward (adjoint Fokker-Planck) generator of `model`, multiplied by a_0^dagger.
 *
 * Under x_i <-> a_i^dagger and d/dx_i <-> a_i, a drift monomial c x^e in
 * equation i becomes c a_0^dagger (a^dagger)^e a_i, and a diffusion entry
 * Q_ii becomes (Q_ii / 2) a_0^dagger a_i a_i. Terms with identical operator
 * content are merged and zero coefficients are dropped.
 */
std::vector<OperatorTerm> build_adjoint_operator(const PolynomialSdeModel& model);

}  // namespace dukf
