#pragma once

// Dense vectors and matrices in 64-bit floating point.
//
// Shapes must match exactly; there is no broadcasting and no aliasing view
// type in the public surface. Raw spans are exposed only so that callers can
// hand contiguous storage to the kernels below.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hrsn/error.hpp"

namespace hrsn {

class Rng;

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}
  explicit Vector(std::span<const double> values)
      : data_(values.begin(), values.end()) {}

  std::size_t dim() const { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double v);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

// Row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  void fill(double v);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::string shape_string(const Matrix& m);
std::string shape_string(const Vector& v);

// result_i = sum_j w_ij x_j
Vector matvec(const Matrix& w, const Vector& x);

// Kernels on raw storage. `out` is accumulated into, not overwritten.
void matvec_add(const Matrix& w, std::span<const double> x, std::span<double> out);
void matvec_transposed_add(const Matrix& w, std::span<const double> y,
                           std::span<double> out);
// w += a * b^T
void outer_add(std::span<const double> a, std::span<const double> b, Matrix& w);

// Entries drawn i.i.d. from U[lo, hi).
Matrix uniform_init(std::size_t rows, std::size_t cols, double lo, double hi,
                    Rng& rng);
Vector uniform_init(std::size_t dim, double lo, double hi, Rng& rng);

// Numerically stable logistic function.
double sigmoid(double z);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

bool all_finite(std::span<const double> a);

// Rescales every tensor in place by threshold/g when the global L2 norm g of
// all entries exceeds `threshold` (by more than a relative 1e-12). Returns g
// (before scaling). Throws NumericError on non-finite entries.
double clip_by_global_norm(std::span<const std::span<double>> grads,
                           double threshold);

}  // namespace hrsn
