#include "gpnet/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "gpnet/error.hpp"

namespace gpnet {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch: " + a.shape_str() + " vs " +
                     b.shape_str());
  }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw ShapeError("from_rows: ragged row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  const double* o = other.data();
  double* d = data();
  for (std::size_t i = 0; i < size(); ++i) d[i] += o[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  const double* o = other.data();
  double* d = data();
  for (std::size_t i = 0; i < size(); ++i) d[i] -= o[i];
  return *this;
}

Matrix& Matrix::operator*=(double scalar) {
  double* d = data();
  for (std::size_t i = 0; i < size(); ++i) d[i] *= scalar;
  return *this;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  out += b;
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  out -= b;
  return out;
}

Matrix operator*(const Matrix& a, double s) {
  Matrix out = a;
  out *= s;
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ: " + a.shape_str() + " vs " +
                     b.shape_str());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Matrix out(m, n);
  const double* A = a.data();
  const double* B = b.data();
  double* C = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = C + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;  // propagation matrices are mostly zero
      const double* brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: inner dimensions differ: " + a.shape_str() + " vs " +
                     b.shape_str());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Matrix out(m, n);
  const double* A = a.data();
  const double* B = b.data();
  double* C = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = B + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      C[i * n + j] = acc;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: inner dimensions differ: " + a.shape_str() + " vs " +
                     b.shape_str());
  }
  const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
  Matrix out(m, n);
  const double* A = a.data();
  const double* B = b.data();
  double* C = out.data();
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = A + p * m;
    const double* brow = B + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = arow[i];
      if (api == 0.0) continue;
      double* crow = C + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a;
  double* d = out.data();
  const double* o = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) d[i] *= o[i];
  return out;
}

double sum(const Matrix& a) {
  double acc = 0.0;
  const double* d = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += d[i];
  return acc;
}

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  const double* d = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += d[i] * d[i];
  return std::sqrt(acc);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  const double* d = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(d[i]));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  const double* x = a.data();
  const double* y = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(x[i] - y[i]));
  return m;
}

Matrix random_uniform(std::size_t rows, std::size_t cols, double lo, double hi,
                      std::mt19937_64& rng) {
  Matrix m(rows, cols);
  std::uniform_real_distribution<double> dist(lo, hi);
  double* d = m.data();
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = dist(rng);
  return m;
}

Matrix random_normal(std::size_t rows, std::size_t cols, double mean, double stddev,
                     std::mt19937_64& rng) {
  Matrix m(rows, cols);
  std::normal_distribution<double> dist(mean, stddev);
  double* d = m.data();
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = dist(rng);
  return m;
}

}  // namespace gpnet
