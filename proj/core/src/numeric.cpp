#include "hrsn/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hrsn/rng.hpp"

namespace hrsn {

void Vector::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    std::ostringstream msg;
    msg << "matrix data length " << data_.size() << " does not match shape "
        << rows_ << "x" << cols_;
    throw ShapeError(msg.str());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string shape_string(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + " x " + std::to_string(m.cols()) + "]";
}

std::string shape_string(const Vector& v) {
  return "[" + std::to_string(v.dim()) + "]";
}

Vector matvec(const Matrix& w, const Vector& x) {
  if (w.cols() != x.dim()) {
    throw ShapeError("matvec: matrix " + shape_string(w) +
                     " incompatible with vector " + shape_string(x));
  }
  Vector out(w.rows());
  matvec_add(w, x.values(), out.values());
  return out;
}

void matvec_add(const Matrix& w, std::span<const double> x, std::span<double> out) {
  if (w.cols() != x.size() || w.rows() != out.size()) {
    throw ShapeError("matvec_add: matrix " + shape_string(w) + " with input [" +
                     std::to_string(x.size()) + "] and output [" +
                     std::to_string(out.size()) + "]");
  }
  const double* p = w.values().data();
  for (std::size_t r = 0; r < w.rows(); ++r, p += w.cols()) {
    double acc = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) acc += p[c] * x[c];
    out[r] += acc;
  }
}

void matvec_transposed_add(const Matrix& w, std::span<const double> y,
                           std::span<double> out) {
  if (w.rows() != y.size() || w.cols() != out.size()) {
    throw ShapeError("matvec_transposed_add: matrix " + shape_string(w) +
                     " with input [" + std::to_string(y.size()) +
                     "] and output [" + std::to_string(out.size()) + "]");
  }
  const double* p = w.values().data();
  for (std::size_t r = 0; r < w.rows(); ++r, p += w.cols()) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t c = 0; c < w.cols(); ++c) out[c] += p[c] * yr;
  }
}

void outer_add(std::span<const double> a, std::span<const double> b, Matrix& w) {
  if (w.rows() != a.size() || w.cols() != b.size()) {
    throw ShapeError("outer_add: matrix " + shape_string(w) + " with [" +
                     std::to_string(a.size()) + "] x [" +
                     std::to_string(b.size()) + "]");
  }
  double* p = w.values().data();
  for (std::size_t r = 0; r < w.rows(); ++r, p += w.cols()) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < w.cols(); ++c) p[c] += ar * b[c];
  }
}

Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi,
                    Rng& rng) {
  if (!(lo < hi)) throw Error("uniform_init: requires lo < hi");
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

Vector uniform_init(std::size_t dim, double lo, double hi, Rng& rng) {
  if (!(lo < hi)) throw Error("uniform_init: requires lo < hi");
  Vector v(dim);
  for (double& x : v.values()) x = rng.uniform(lo, hi);
  return v;
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

double clip_by_global_norm(std::span<const std::span<double>> grads,
                           double threshold) {
  if (!(threshold > 0.0)) throw Error("clip_by_global_norm: threshold must be > 0");
  double sq = 0.0;
  for (const auto& g : grads) {
    if (!all_finite(g)) throw NumericError("clip_by_global_norm: non-finite gradient");
    sq += squared_norm(g);
  }
  const double norm = std::sqrt(sq);
  // The slack keeps a second clip from rescaling by rounding error, so the
  // operation is idempotent.
  if (norm > threshold * (1.0 + 1e-12)) {
    const double scale = threshold / norm;
    for (const auto& g : grads) {
      for (double& v : g) v *= scale;
    }
  }
  return norm;
}

}  // namespace hrsn
