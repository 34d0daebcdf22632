#pragma once

#include <vector>

#include <Eigen/Core>

namespace dukf {

/// Mean and covariance of a bivariate Gaussian state estimate.
struct GaussianBelief {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

/// Which index the recursion lowers at each step.
enum class Reduction {
  LargerIndexFirst,  ///< default; ties lower index 1
  FirstIndex,        ///< always lower n1 while n1 >= 1
  SecondIndex,       ///< always lower n2 while n2 >= 1
};

/**
 * @brief Memoized raw moments <x1^n1 x2^n2> of one Gaussian belief.
 *
 * Lowering n1:
 *   M(n1,n2) = mu1 M(n1-1,n2) + V11 (n1-1) M(n1-2,n2) + V12 n2 M(n1-1,n2-1)
 * Lowering n2:
 *   M(n1,n2) = mu2 M(n1,n2-1) + V21 n1 M(n1-1,n2-1) + V22 (n2-1) M(n1,n2-2)
 * with M(0,0) = 1 and terms with a negative index dropped.
 *
 * A context belongs to one belief and one thread; build a new one whenever
 * the belief changes.
 */
class MomentContext {
 public:
  static constexpr int kDefaultOrderCap = 64;

  explicit MomentContext(const GaussianBelief& belief, int order_cap = kDefaultOrderCap,
                         Reduction reduction = Reduction::LargerIndexFirst);

  /// Throws OrderOverflowError when n1 + n2 exceeds the order cap.
  double raw_moment(int n1, int n2);

  const GaussianBelief& belief() const { return belief_; }
  int order_cap() const { return order_cap_; }

 private:
  double compute(int n1, int n2);

  GaussianBelief belief_;
  int order_cap_;
  Reduction reduction_;
  std::size_t stride_;
  std::vector<double> memo_;
  std::vector<char> known_;
};

/// One-shot evaluation with a throwaway context.
double raw_moment(const GaussianBelief& belief, int n1, int n2,
                  Reduction reduction = Reduction::LargerIndexFirst);

}  // namespace dukf
