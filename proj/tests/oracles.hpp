// Test-only oracles: finite differences, brute-force enumerations, dense
// eigendecomposition. These deliberately avoid the library's own numeric
// paths wherever the quantity can be computed another way.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <vector>

#include "gpnet/matrix.hpp"

namespace oracles {

// Central finite difference of a scalar function wrt every entry of `value`.
inline gpnet::Matrix finite_difference_gradient(
    const std::function<double(const gpnet::Matrix&)>& f, gpnet::Matrix value,
    double step = 1e-6) {
  gpnet::Matrix grad(value.rows(), value.cols());
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double orig = value.data()[i];
    value.data()[i] = orig + step;
    const double up = f(value);
    value.data()[i] = orig - step;
    const double down = f(value);
    value.data()[i] = orig;
    grad.data()[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

// Symmetric relative error, floored to keep near-zero pairs from exploding.
inline double max_rel_err(const gpnet::Matrix& a, const gpnet::Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    const double rel = std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), 1e-3});
    worst = std::max(worst, rel);
  }
  return worst;
}

// Dominant eigenvector of a general real matrix via Eigen's dense solver.
// Returns a unit vector with non-negative orientation (largest-|entry| made
// positive) so callers can compare directions.
inline gpnet::Matrix dominant_eigenvector(const gpnet::Matrix& m) {
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd em(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      em(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(em);
  Eigen::Index best = 0;
  double best_mod = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mod = std::abs(solver.eigenvalues()(i));
    if (mod > best_mod) {
      best_mod = mod;
      best = i;
    }
  }
  Eigen::VectorXcd vec = solver.eigenvectors().col(best);
  gpnet::Matrix out(m.rows(), 1);
  for (Eigen::Index i = 0; i < n; ++i) out(static_cast<std::size_t>(i), 0) = vec(i).real();
  double norm = gpnet::frobenius_norm(out);
  out *= 1.0 / norm;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < out.rows(); ++i)
    if (std::fabs(out(i, 0)) > std::fabs(out(arg, 0))) arg = i;
  if (out(arg, 0) < 0.0) out *= -1.0;
  return out;
}

inline double cosine(const gpnet::Matrix& a, const gpnet::Matrix& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a.data()[i] * b.data()[i];
  return dot / (gpnet::frobenius_norm(a) * gpnet::frobenius_norm(b));
}

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace oracles
