#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace oracle {

std::vector<std::array<double, 2>> vdp_ensemble(const VdpParams& p, std::array<double, 2> mean,
                                                std::array<double, 3> cov, double dt, double horizon,
                                                std::size_t n_paths, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto steps = static_cast<long>(std::llround(horizon / dt));
  const double s1 = std::sqrt(p.q11 * dt);
  const double s2 = std::sqrt(p.q22 * dt);

  // Cholesky of the 2x2 start covariance (semi-definite allowed).
  const double l11 = std::sqrt(std::max(cov[0], 0.0));
  const double l21 = l11 > 0.0 ? cov[1] / l11 : 0.0;
  const double l22 = std::sqrt(std::max(cov[2] - l21 * l21, 0.0));

  std::vector<std::array<double, 2>> out(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    const double z1 = normal(gen);
    const double z2 = normal(gen);
    double x1 = mean[0] + l11 * z1;
    double x2 = mean[1] + l21 * z1 + l22 * z2;
    for (long s = 0; s < steps; ++s) {
      const double f1 = x2;
      const double f2 = p.epsilon * (1.0 - x1 * x1) * x2 - x1;
      x1 += f1 * dt + s1 * normal(gen);
      x2 += f2 * dt + s2 * normal(gen);
    }
    out[i] = {x1, x2};
  }
  return out;
}

SampleMoment sample_moment(const std::vector<std::array<double, 2>>& xs, int a, int b) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& x : xs) {
    const double v = std::pow(x[0], a) * std::pow(x[1], b);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(xs.size());
  SampleMoment m;
  m.mean = sum / n;
  const double var = (sum_sq / n - m.mean * m.mean) * n / (n - 1.0);
  m.std_error = std::sqrt(std::max(var, 0.0) / n);
  return m;
}

SampleCov sample_covariance(const std::vector<std::array<double, 2>>& xs) {
  double m1 = 0.0, m2 = 0.0;
  for (const auto& x : xs) {
    m1 += x[0];
    m2 += x[1];
  }
  const double n = static_cast<double>(xs.size());
  m1 /= n;
  m2 /= n;
  SampleCov c{0.0, 0.0, 0.0};
  for (const auto& x : xs) {
    c.c11 += (x[0] - m1) * (x[0] - m1);
    c.c12 += (x[0] - m1) * (x[1] - m2);
    c.c22 += (x[1] - m2) * (x[1] - m2);
  }
  c.c11 /= n - 1.0;
  c.c12 /= n - 1.0;
  c.c22 /= n - 1.0;
  return c;
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  const double pim4 = std::pow(M_PI, -0.25);
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * nodes[1];
    } else {
      z = 2.0 * z - nodes[i - 2];
    }
    double pp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) throw std::runtime_error("Gauss-Hermite Newton iteration did not converge");
    nodes[i] = z;
    nodes[n - 1 - i] = -z;
    weights[i] = 2.0 / (pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

QuadratureMoment gaussian_moment_quadrature(std::array<double, 2> mean, std::array<double, 3> cov, int n1,
                                            int n2, int nodes_per_axis) {
  std::vector<double> t, w;
  gauss_hermite(nodes_per_axis, t, w);
  const double l11 = std::sqrt(std::max(cov[0], 0.0));
  const double l21 = l11 > 0.0 ? cov[1] / l11 : 0.0;
  const double l22 = std::sqrt(std::max(cov[2] - l21 * l21, 0.0));
  QuadratureMoment q;
  for (int i = 0; i < nodes_per_axis; ++i) {
    for (int j = 0; j < nodes_per_axis; ++j) {
      const double z1 = std::sqrt(2.0) * t[i];
      const double z2 = std::sqrt(2.0) * t[j];
      const double x1 = mean[0] + l11 * z1;
      const double x2 = mean[1] + l21 * z1 + l22 * z2;
      const double weight = w[i] * w[j] / M_PI;
      const double v = std::pow(x1, n1) * std::pow(x2, n2);
      q.value += weight * v;
      q.absolute += weight * std::abs(v);
    }
  }
  return q;
}

}  // namespace oracle
