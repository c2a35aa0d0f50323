#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace ccast {

using Vec = std::vector<double>;

// Dense row-major matrix. The network and feature code only need a handful of
// operations, so this stays deliberately small instead of pulling in a full
// linear algebra dependency.
class Mat {
 public:
  Mat() = default;
  Mat(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(size_t r, size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(size_t r, size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double* row_ptr(size_t r) { return data_.data() + r * cols_; }
  const double* row_ptr(size_t r) const { return data_.data() + r * cols_; }

  Vec& raw() { return data_; }
  const Vec& raw() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool operator==(const Mat& other) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  Vec data_;
};

// y = A x
inline void matvec_into(const Mat& a, const Vec& x, Vec& y) {
  assert(x.size() == a.cols());
  y.assign(a.rows(), 0.0);
  for (size_t r = 0; r < a.rows(); ++r) {
    const double* row = a.row_ptr(r);
    double acc = 0.0;
    for (size_t c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

inline Vec matvec(const Mat& a, const Vec& x) {
  Vec y;
  matvec_into(a, x, y);
  return y;
}

// y += A x
inline void add_matvec(const Mat& a, const Vec& x, Vec& y) {
  assert(x.size() == a.cols() && y.size() == a.rows());
  for (size_t r = 0; r < a.rows(); ++r) {
    const double* row = a.row_ptr(r);
    double acc = 0.0;
    for (size_t c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// y += A^T x
inline void add_matvec_t(const Mat& a, const Vec& x, Vec& y) {
  assert(x.size() == a.rows() && y.size() == a.cols());
  for (size_t r = 0; r < a.rows(); ++r) {
    const double* row = a.row_ptr(r);
    const double xr = x[r];
    for (size_t c = 0; c < a.cols(); ++c) y[c] += row[c] * xr;
  }
}

// A += u v^T
inline void add_outer(Mat& a, const Vec& u, const Vec& v) {
  assert(u.size() == a.rows() && v.size() == a.cols());
  for (size_t r = 0; r < a.rows(); ++r) {
    double* row = a.row_ptr(r);
    const double ur = u[r];
    for (size_t c = 0; c < a.cols(); ++c) row[c] += ur * v[c];
  }
}

// y += s x
inline void add_scaled(Vec& y, const Vec& x, double s) {
  assert(y.size() == x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

}  // namespace ccast
