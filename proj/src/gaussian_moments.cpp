#include "dukf/gaussian_moments.hpp"

#include <string>

#include "dukf/errors.hpp"

namespace dukf {

MomentContext::MomentContext(const GaussianBelief& belief, int order_cap, Reduction reduction)
    : belief_(belief), order_cap_(order_cap), reduction_(reduction),
      stride_(static_cast<std::size_t>(order_cap) + 1),
      memo_(stride_ * stride_, 0.0), known_(stride_ * stride_, 0) {
  if (order_cap < 0) throw ContractViolation("order cap must be >= 0");
}

double MomentContext::raw_moment(int n1, int n2) {
  if (n1 < 0 || n2 < 0) throw ContractViolation("moment orders must be non-negative");
  if (n1 + n2 > order_cap_) {
    throw OrderOverflowError("Gaussian moment order " + std::to_string(n1 + n2) +
                             " exceeds the cap " + std::to_string(order_cap_));
  }
  return compute(n1, n2);
}

double MomentContext::compute(int n1, int n2) {
  if (n1 < 0 || n2 < 0) return 0.0;
  if (n1 == 0 && n2 == 0) return 1.0;
  const std::size_t idx = static_cast<std::size_t>(n1) * stride_ + n2;
  if (known_[idx]) return memo_[idx];

  bool lower_first = false;
  switch (reduction_) {
    case Reduction::LargerIndexFirst: lower_first = n1 >= n2; break;
    case Reduction::FirstIndex: lower_first = n1 >= 1; break;
    case Reduction::SecondIndex: lower_first = n2 == 0; break;
  }

  const auto& mu = belief_.mean;
  const auto& v = belief_.cov;
  double value = 0.0;
  if (lower_first) {
    value = mu(0) * compute(n1 - 1, n2);
    if (n1 >= 2) value += v(0, 0) * (n1 - 1) * compute(n1 - 2, n2);
    if (n2 >= 1) value += v(0, 1) * n2 * compute(n1 - 1, n2 - 1);
  } else {
    value = mu(1) * compute(n1, n2 - 1);
    if (n1 >= 1) value += v(1, 0) * n1 * compute(n1 - 1, n2 - 1);
    if (n2 >= 2) value += v(1, 1) * (n2 - 1) * compute(n1, n2 - 2);
  }
  memo_[idx] = value;
  known_[idx] = 1;
  return value;
}

double raw_moment(const GaussianBelief& belief, int n1, int n2, Reduction reduction) {
  MomentContext ctx(belief, MomentContext::kDefaultOrderCap, reduction);
  return ctx.raw_moment(n1, n2);
}

}  // namespace dukf
