// SPDX-License-Identifier: Apache-2.0
#pragma once

// The ambient manifold N as a single chart with metric entries given by
// expressions in x1..xN.
//
// Curvature convention: R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z, stored as
// R^i_jkl with R(∂k,∂l)∂j = R^i_jkl ∂i.

#include <Eigen/Cholesky>
#include <string>
#include <vector>

#include "framebundle/expr.hpp"
#include "framebundle/linalg.hpp"

namespace fb {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AmbientKind { Euclidean, SphereChart, Custom };

/// Jets of the metric and its curvature at one chart point, in the chart
/// variables. g has the requested order k, Γ order k−1, R order k−2.
struct AmbientJets {
  int dim = 0;
  MatJ g, ginv;
  std::vector<MatJ> gamma;  // gamma[i](j,k) = Γ^i_jk
  std::vector<Jet> riem;    // riem[((i*N+j)*N+k)*N+l] = R^i_jkl

  const Jet& R(int i, int j, int k, int l) const { return riem[((i * dim + j) * dim + k) * dim + l]; }
};

struct CurvatureAtPoint {
  int dim = 0;
  std::vector<double> riem;  // R^i_jkl, same layout as AmbientJets::riem
  MatD g;

  double R(int i, int j, int k, int l) const { return riem[((i * dim + j) * dim + k) * dim + l]; }

  /// R(X,Y)Z in chart components.
  VecD apply(const VecD& X, const VecD& Y, const VecD& Z) const {
    VecD out(dim, 0.0);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l) out[i] += R(i, j, k, l) * Z[j] * X[k] * Y[l];
    return out;
  }

  /// Sectional curvature of span{X,Y}.
  double sectional(const VecD& X, const VecD& Y) const {
    const double num = inner(g, apply(X, Y, Y), X);
    const double den = inner(g, X, X) * inner(g, Y, Y) - inner(g, X, Y) * inner(g, X, Y);
    if (den <= 0.0) throw GeometryError("degenerate plane");
    return num / den;
  }
};

class AmbientSpace {
 public:
  static AmbientSpace euclidean(int dim) {
    check_dim(dim);
    std::vector<std::vector<std::string>> grid(dim, std::vector<std::string>(dim, "0"));
    for (int i = 0; i < dim; ++i) grid[i][i] = "1";
    AmbientSpace a = custom(grid);
    a.kind_ = AmbientKind::Euclidean;
    a.name_ = "euclidean";
    return a;
  }

  /// Stereographic chart of the round sphere of radius R: g = λ²δ with
  /// λ = 2R²/(R²+|x|²).
  static AmbientSpace sphere_chart(int dim, double radius) {
    check_dim(dim);
    if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
    const std::string r2 = detail::format_number(radius * radius);
    std::string sum = r2;
    for (int i = 1; i <= dim; ++i) sum += "+x" + std::to_string(i) + "^2";
    const std::string lambda2 = "(2*" + r2 + "/(" + sum + "))^2";
    std::vector<std::vector<std::string>> grid(dim, std::vector<std::string>(dim, "0"));
    for (int i = 0; i < dim; ++i) grid[i][i] = lambda2;
    AmbientSpace a = custom(grid);
    a.kind_ = AmbientKind::SphereChart;
    a.radius_ = radius;
    a.name_ = "sphere(" + detail::format_number(radius) + ")";
    return a;
  }

  static AmbientSpace custom(const std::vector<std::vector<std::string>>& grid) {
    const int dim = static_cast<int>(grid.size());
    check_dim(dim);
    AmbientSpace a;
    a.dim_ = dim;
    a.metric_.resize(dim * dim);
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(grid[i].size()) != dim) throw std::invalid_argument("metric grid must be square");
      for (int j = 0; j < dim; ++j) a.metric_[i * dim + j] = Expression::parse(grid[i][j], dim, "x");
    }
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        if (!a.metric_[i * dim + j].same_structure(a.metric_[j * dim + i]))
          throw std::invalid_argument("metric grid is not symmetric at (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ")");
    a.kind_ = AmbientKind::Custom;
    a.name_ = "custom";
    return a;
  }

  int dim() const noexcept { return dim_; }
  AmbientKind kind() const noexcept { return kind_; }
  double radius() const noexcept { return radius_; }
  const std::string& name() const noexcept { return name_; }
  const Expression& metric_entry(int i, int j) const { return metric_[i * dim_ + j]; }

  MatD metric_at(std::span<const double> x) const {
    check_point(x);
    MatD g(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j) g(i, j) = g(j, i) = metric_entry(i, j)(x);
    check_spd(g, x);
    return g;
  }

  /// Metric, Christoffel symbols and curvature as jets of order `order`
  /// (metric), `order`−1 (Γ) and `order`−2 (R) at x.
  AmbientJets jets(std::span<const double> x, int order) const {
    check_point(x);
    if (order < 0) throw std::invalid_argument("negative jet order");
    const int N = dim_;
    AmbientJets J;
    J.dim = N;
    auto vars = coordinate_jets(x, order);
    J.g = MatJ(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        const auto& e = metric_entry(i, j);
        J.g(i, j) = J.g(j, i) = e.is_constant_zero() ? Jet(0.0) : e(std::span<const Jet>(vars));
      }
    check_spd(values(J.g), x);
    J.ginv = inverse(J.g, "metric");
    if (order < 1) return J;

    // dg[k](i,j) = ∂k g_ij
    std::vector<MatJ> dg(N);
    for (int k = 0; k < N; ++k) dg[k] = map(J.g, [k](const Jet& v) { return v.derivative(k); });
    MatJ ginv1 = map(J.ginv, [&](const Jet& v) { return v.truncated(order - 1); });
    J.gamma.assign(N, MatJ(N, N));
    for (int j = 0; j < N; ++j)
      for (int k = j; k < N; ++k) {
        // Γ_ljk (first kind), then raise.
        VecJ low(N);
        for (int l = 0; l < N; ++l) low[l] = 0.5 * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
        for (int i = 0; i < N; ++i) {
          Jet s(0.0);
          for (int l = 0; l < N; ++l) s += ginv1(i, l) * low[l];
          J.gamma[i](j, k) = s;
          J.gamma[i](k, j) = s;
        }
      }
    if (order < 2) return J;

    J.riem.assign(static_cast<std::size_t>(N) * N * N * N, Jet(0.0));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = k + 1; l < N; ++l) {
            Jet s = J.gamma[i](l, j).derivative(k) - J.gamma[i](k, j).derivative(l);
            for (int m = 0; m < N; ++m) s += J.gamma[i](k, m) * J.gamma[m](l, j) - J.gamma[i](l, m) * J.gamma[m](k, j);
            s = s.truncated(order - 2);
            J.riem[((i * N + j) * N + k) * N + l] = s;
            J.riem[((i * N + j) * N + l) * N + k] = -s;
          }
    return J;
  }

  /// Γ^i_jk at x; result[i](j,k).
  std::vector<MatD> christoffel_at(std::span<const double> x) const {
    auto J = jets(x, 1);
    std::vector<MatD> out;
    for (const auto& m : J.gamma) out.push_back(values(m));
    return out;
  }

  CurvatureAtPoint curvature_at(std::span<const double> x) const {
    auto J = jets(x, 2);
    CurvatureAtPoint c;
    c.dim = dim_;
    c.g = values(J.g);
    c.riem.resize(J.riem.size());
    for (std::size_t q = 0; q < J.riem.size(); ++q) c.riem[q] = J.riem[q].value();
    return c;
  }

  VecD curvature_apply(std::span<const double> x, const VecD& X, const VecD& Y, const VecD& Z) const {
    return curvature_at(x).apply(X, Y, Z);
  }

  /// ∇_X V at x for a vector field V whose chart components are jets in the
  /// chart variables expanded at x (order ≥ 1).
  VecD cov_deriv(std::span<const double> x, const VecJ& V, const VecD& X) const {
    auto J = jets(x, 1);
    VecD out(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      for (int k = 0; k < dim_; ++k) out[i] += X[k] * V[i].partial1(k);
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) out[i] += J.gamma[i](j, k).value() * X[j] * V[k].value();
    }
    return out;
  }

 private:
  static void check_dim(int dim) {
    if (dim < 2 || dim > 9) throw std::invalid_argument("ambient dimension must be in 2..9");
  }
  void check_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("ambient point has " + std::to_string(x.size()) + " coordinates, expected " +
                                  std::to_string(dim_));
  }
  static void check_spd(const MatD& g, std::span<const double> x) {
    Eigen::MatrixXd e = to_eigen(g);
    Eigen::LLT<Eigen::MatrixXd> llt(e);
    if (llt.info() != Eigen::Success) {
      std::string at;
      for (double v : x) at += (at.empty() ? "" : ", ") + detail::format_number(v);
      throw GeometryError("metric is not positive definite at (" + at + ")");
    }
  }

  int dim_ = 0;
  AmbientKind kind_ = AmbientKind::Custom;
  double radius_ = 0.0;
  std::string name_;
  std::vector<Expression> metric_;
};

}  // namespace fb
