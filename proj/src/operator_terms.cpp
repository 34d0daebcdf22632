#include "dukf/operator_terms.hpp"

namespace dukf {

std::vector<OperatorTerm> build_adjoint_operator(const PolynomialSdeModel& model) {
  const std::size_t species = model.dim() + 1;
  std::vector<OperatorTerm> terms;

  auto add = [&terms](OperatorTerm term) {
    for (auto& existing : terms) {
      if (existing.creation == term.creation && existing.annihilation == term.annihilation) {
        existing.coefficient += term.coefficient;
        return;
      }
    }
    terms.push_back(std::move(term));
  };

  for (std::size_t i = 0; i < model.dim(); ++i) {
    for (const auto& m : model.drift(i)) {
      OperatorTerm t{m.coefficient, std::vector<int>(species, 0), std::vector<int>(species, 0)};
      t.creation[0] = 1;
      for (std::size_t j = 0; j < model.dim(); ++j) t.creation[j + 1] = m.exponents[j];
      t.annihilation[i + 1] = 1;
      add(std::move(t));
    }
  }
  for (std::size_t i = 0; i < model.dim(); ++i) {
    OperatorTerm t{0.5 * model.diffusion_diag()[i], std::vector<int>(species, 0),
                   std::vector<int>(species, 0)};
    t.creation[0] = 1;
    t.annihilation[i + 1] = 2;
    add(std::move(t));
  }

  std::erase_if(terms, [](const OperatorTerm& t) { return t.coefficient == 0.0; });
  return terms;
}

}  // namespace dukf
