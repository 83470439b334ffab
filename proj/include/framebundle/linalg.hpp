// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small dense matrices over double or Jet. Geometry code is written once over
// the scalar type; at order 0 a Jet collapses to its value.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "framebundle/jet.hpp"

namespace fb {

template <class T>
using Vec = std::vector<T>;

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows) * cols, T(0.0)) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  int rows() const noexcept { return r_; }
  int cols() const noexcept { return c_; }
  T& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * c_ + j]; }
  const T& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * c_ + j]; }

  Vec<T> col(int j) const {
    Vec<T> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_col(int j, const Vec<T>& v) {
    for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
  }

  Mat transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat& operator+=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < d_.size(); ++k) d_[k] += o.d_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < d_.size(); ++k) d_[k] -= o.d_[k];
    return *this;
  }
  Mat& operator*=(double s) {
    for (auto& x : d_) x *= s;
    return *this;
  }
  template <class U>
  Mat& scale(const U& s) {
    for (auto& x : d_) x = x * s;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator-(Mat a) { return a *= -1.0; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.c_ != b.r_) throw std::invalid_argument("matrix product shape mismatch");
    Mat r(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const T& aik = a(i, k);
        for (int j = 0; j < b.c_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  friend Vec<T> operator*(const Mat& a, const Vec<T>& v) {
    if (a.c_ != static_cast<int>(v.size())) throw std::invalid_argument("matrix-vector shape mismatch");
    Vec<T> r(a.r_, T(0.0));
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) r[i] += a(i, k) * v[k];
    return r;
  }

 private:
  void check_same(const Mat& o) const {
    if (o.r_ != r_ || o.c_ != c_) throw std::invalid_argument("matrix shape mismatch");
  }
  int r_ = 0, c_ = 0;
  std::vector<T> d_;
};

using MatD = Mat<double>;
using MatJ = Mat<Jet>;
using VecD = Vec<double>;
using VecJ = Vec<Jet>;

template <class T>
Mat<T> commutator(const Mat<T>& a, const Mat<T>& b) {
  return a * b - b * a;
}

template <class T>
T trace(const Mat<T>& a) {
  T s(0.0);
  for (int i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  T s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
Vec<T> operator+(Vec<T> a, const Vec<T>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}
template <class T>
Vec<T> operator-(Vec<T> a, const Vec<T>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}
template <class T>
Vec<T> operator-(Vec<T> a) {
  for (auto& x : a) x *= -1.0;
  return a;
}
template <class T>
Vec<T> operator*(double s, Vec<T> a) {
  for (auto& x : a) x *= s;
  return a;
}
template <class T>
Vec<T> scaled(Vec<T> a, const T& s) {
  for (auto& x : a) x = x * s;
  return a;
}

/// Bilinear form vᵀ G w.
template <class T>
T inner(const Mat<T>& G, const Vec<T>& v, const Vec<T>& w) {
  return dot(v, G * w);
}

/// Inverse by Gaussian elimination with partial pivoting on the values.
template <class T>
Mat<T> inverse(const Mat<T>& a, const char* what = "matrix") {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("inverse of a non-square matrix");
  Mat<T> m = a;
  Mat<T> inv = Mat<T>::identity(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(value_of(a(i, j))));
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(value_of(m(i, k))) > std::abs(value_of(m(piv, k)))) piv = i;
    if (std::abs(value_of(m(piv, k))) <= 1e-14 * std::max(scale, 1e-300)) {
      throw std::domain_error(std::string("singular ") + what);
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) {
        std::swap(m(k, j), m(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    }
    const T rinv = T(1.0) / m(k, k);
    for (int j = 0; j < n; ++j) {
      m(k, j) = m(k, j) * rinv;
      inv(k, j) = inv(k, j) * rinv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const T f = m(i, k);
      if constexpr (std::is_same_v<T, Jet>) {
        if (f.is_constant() && f.value() == 0.0) continue;
      } else {
        if (f == 0.0) continue;
      }
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

inline Eigen::MatrixXd to_eigen(const MatD& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline MatD values(const MatJ& m) {
  MatD r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).value();
  return r;
}
inline MatD values(const MatD& m) { return m; }

inline VecD values(const VecJ& v) {
  VecD r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].value();
  return r;
}
inline VecD values(const VecD& v) { return v; }

template <class T>
double frobenius(const Mat<T>& m) {
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) s += value_of(m(i, j)) * value_of(m(i, j));
  return std::sqrt(s);
}

template <class T>
double norm2(const Vec<T>& v) {
  double s = 0.0;
  for (const auto& x : v) s += value_of(x) * value_of(x);
  return std::sqrt(s);
}

/// Elementwise map over a jet matrix (derivative, truncation, ...).
template <class F>
MatJ map(const MatJ& m, F&& f) {
  MatJ r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = f(m(i, j));
  return r;
}
template <class F>
VecJ map(const VecJ& v, F&& f) {
  VecJ r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = f(v[i]);
  return r;
}

inline MatJ lift(const MatD& m) {
  MatJ r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = Jet(m(i, j));
  return r;
}
inline VecJ lift(const VecD& v) {
  VecJ r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = Jet(v[i]);
  return r;
}

}  // namespace fb
