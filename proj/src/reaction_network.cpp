#include "dukf/reaction_network.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "dukf/errors.hpp"
#include "dukf/random.hpp"

namespace dukf {

double falling_factorial(int n, int q) {
  if (n < q) return 0.0;
  double value = 1.0;
  for (int k = 0; k < q; ++k) value *= static_cast<double>(n - k);
  return value;
}

double Reaction::propensity(std::span<const int> n) const {
  double a = rate_coefficient;
  for (std::size_t i = 0; i < ff_orders.size(); ++i) {
    if (ff_orders[i] == 0) continue;
    a *= falling_factorial(n[i], ff_orders[i]);
    if (a == 0.0) return 0.0;
  }
  return a;
}

double FeynmanKacPolynomial::evaluate(std::span<const int> n) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double term = t.coefficient;
    for (std::size_t i = 0; i < t.ff_orders.size() && term != 0.0; ++i) {
      if (t.ff_orders[i] != 0) term *= falling_factorial(n[i], t.ff_orders[i]);
    }
    v += term;
  }
  return v;
}

DualSystem derive_reactions(std::span<const OperatorTerm> terms) {
  DualSystem out;
  std::size_t species = 0;
  for (const auto& t : terms) {
    if (t.coefficient == 0.0) continue;
    if (species == 0) species = t.creation.size();
    if (t.creation.size() != species || t.annihilation.size() != species || species < 2) {
      throw MalformedOperatorError("operator terms have inconsistent species counts");
    }
    if (t.annihilation[0] != 0) {
      throw MalformedOperatorError("annihilation of the time-scaling species is not allowed");
    }
    if (!std::isfinite(t.coefficient)) throw MalformedOperatorError("non-finite operator coefficient");

    Reaction r;
    r.rate_coefficient = std::abs(t.coefficient);
    r.sign_toggle = t.coefficient < 0.0;
    r.ff_orders = t.annihilation;
    r.delta.resize(species);
    for (std::size_t i = 0; i < species; ++i) {
      if (t.creation[i] < 0 || t.annihilation[i] < 0) {
        throw MalformedOperatorError("negative operator power");
      }
      r.delta[i] = t.creation[i] - t.annihilation[i];
    }
    out.network.reactions.push_back(r);
  }
  out.network.species_count = species;

  std::sort(out.network.reactions.begin(), out.network.reactions.end(),
            [](const Reaction& a, const Reaction& b) {
              return std::tie(a.delta, a.ff_orders, a.sign_toggle, a.rate_coefficient) <
                     std::tie(b.delta, b.ff_orders, b.sign_toggle, b.rate_coefficient);
            });
  // Accumulate after sorting so the floating-point sums do not depend on input order.
  for (const auto& r : out.network.reactions) {
    auto same_orders = [&](const FeynmanKacTerm& fk) { return fk.ff_orders == r.ff_orders; };
    auto it = std::find_if(out.feynman_kac.terms.begin(), out.feynman_kac.terms.end(), same_orders);
    if (it == out.feynman_kac.terms.end()) {
      out.feynman_kac.terms.push_back({r.rate_coefficient, r.ff_orders});
    } else {
      it->coefficient += r.rate_coefficient;
    }
  }
  std::sort(out.feynman_kac.terms.begin(), out.feynman_kac.terms.end(),
            [](const FeynmanKacTerm& a, const FeynmanKacTerm& b) { return a.ff_orders < b.ff_orders; });
  return out;
}

DualSystem derive_dual(const PolynomialSdeModel& model) {
  auto terms = build_adjoint_operator(model);
  auto system = derive_reactions(terms);
  if (system.network.species_count == 0) system.network.species_count = model.dim() + 1;
  return system;
}

double total_propensity(const ReactionNetwork& network, std::span<const int> n) {
  double total = 0.0;
  for (const auto& r : network.reactions) total += r.propensity(n);
  return total;
}

nlohmann::json to_json(const DualSystem& system) {
  nlohmann::json reactions = nlohmann::json::array();
  for (const auto& r : system.network.reactions) {
    reactions.push_back({{"rate_coefficient", r.rate_coefficient},
                         {"ff_orders", r.ff_orders},
                         {"delta", r.delta},
                         {"sign_toggle", r.sign_toggle}});
  }
  nlohmann::json fk = nlohmann::json::array();
  for (const auto& t : system.feynman_kac.terms) {
    fk.push_back({{"coefficient", t.coefficient}, {"ff_orders", t.ff_orders}});
  }
  return {{"species_count", system.network.species_count},
          {"reactions", std::move(reactions)},
          {"feynman_kac", std::move(fk)}};
}

DualSystem dual_system_from_json(const nlohmann::json& doc) {
  try {
    DualSystem s;
    s.network.species_count = doc.at("species_count").get<std::size_t>();
    for (const auto& r : doc.at("reactions")) {
      Reaction reaction{r.at("rate_coefficient").get<double>(), r.at("ff_orders").get<std::vector<int>>(),
                        r.at("delta").get<std::vector<int>>(), r.at("sign_toggle").get<bool>()};
      if (reaction.ff_orders.size() != s.network.species_count ||
          reaction.delta.size() != s.network.species_count || !(reaction.rate_coefficient > 0.0)) {
        throw ValidationError("malformed reaction in network document");
      }
      s.network.reactions.push_back(std::move(reaction));
    }
    for (const auto& t : doc.at("feynman_kac")) {
      s.feynman_kac.terms.push_back({t.at("coefficient").get<double>(), t.at("ff_orders").get<std::vector<int>>()});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed network document: ") + e.what());
  }
}

std::string model_hash(const DualSystem& system) { return fnv1a_hex(to_json(system).dump()); }

}  // namespace dukf
