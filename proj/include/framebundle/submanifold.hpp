// SPDX-License-Identifier: Apache-2.0
#pragma once

// Immersed submanifold M^p ⊂ N^{p+n} and its local geometry at a parameter
// point: adapted frame, connection matrices, Π, Weingarten, S, ∇ and ∇′.
//
// Vectors and endomorphisms are carried as components in the adapted frame
// (e_1..e_p tangent, e_{p+1}..e_{p+n} normal), with jet entries in the chart
// variables u so derivatives along M come for free.
//
// Connection matrices: Ω_A(a,b) = g(e_a, ∇_{∂_A} e_b). For a tangent vector X
// the matrix Ω(X) splits into its block-diagonal part (the connection ∇′)
// and its off-diagonal part, which is exactly S_X.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "framebundle/ambient.hpp"

namespace fb {

struct ChartBox {
  std::vector<std::pair<double, double>> bounds;

  int dim() const { return static_cast<int>(bounds.size()); }
  VecD center() const {
    VecD c;
    for (auto [lo, hi] : bounds) c.push_back(0.5 * (lo + hi));
    return c;
  }
  bool contains(std::span<const double> u) const {
    if (static_cast<int>(u.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i)
      if (u[i] < bounds[i].first || u[i] > bounds[i].second) return false;
    return true;
  }
  ChartBox shrunk(double margin) const {
    ChartBox b = *this;
    for (auto& [lo, hi] : b.bounds) {
      const double w = hi - lo;
      lo += margin * w;
      hi -= margin * w;
    }
    return b;
  }
};

/// Orthonormal frame adapted to M at φ(u); columns of `vectors` are the
/// ambient chart components of e_1..e_{p+n}.
struct AdaptedFrame {
  VecD u, x;
  MatD vectors;
  std::vector<int> pivots;  // ambient axes that completed the normal block
  int p = 0;
};

namespace detail {

inline double relative_floor() { return 1e-12; }

/// Modified Gram–Schmidt in the metric G. The first `p` inputs must stay
/// independent (rank check), the rest are completions (pivot check).
template <class T>
Mat<T> gram_schmidt(const Mat<T>& G, const std::vector<Vec<T>>& in, int p) {
  const int N = G.rows();
  Mat<T> E(N, static_cast<int>(in.size()));
  std::vector<Vec<T>> done;
  for (std::size_t k = 0; k < in.size(); ++k) {
    Vec<T> v = in[k];
    const double n0 = std::sqrt(std::max(0.0, value_of(inner(G, v, v))));
    for (const auto& e : done) {
      const T c = inner(G, v, e);
      for (int i = 0; i < N; ++i) v[i] -= c * e[i];
    }
    const T nrm2 = inner(G, v, v);
    const double n1 = std::sqrt(std::max(0.0, value_of(nrm2)));
    if (!(n1 > relative_floor() * std::max(n0, 1e-300))) {
      if (static_cast<int>(k) < p) throw GeometryError("rank-deficient Jacobian");
      throw GeometryError("pivot failure while completing the normal frame");
    }
    T inv;
    if constexpr (std::is_same_v<T, double>) {
      inv = 1.0 / std::sqrt(nrm2);
    } else {
      inv = T(1.0) / fb::sqrt(nrm2);
    }
    for (int i = 0; i < N; ++i) v[i] = v[i] * inv;
    E.set_col(static_cast<int>(k), v);
    done.push_back(std::move(v));
  }
  return E;
}

}  // namespace detail

class ImmersedSubmanifold {
 public:
  ImmersedSubmanifold(AmbientSpace ambient, const std::vector<std::string>& map, ChartBox domain,
                      std::string name = "custom")
      : ambient_(std::make_shared<const AmbientSpace>(std::move(ambient))),
        domain_(std::move(domain)),
        name_(std::move(name)) {
    p_ = domain_.dim();
    const int N = ambient_->dim();
    if (p_ < 1 || p_ >= N) throw std::invalid_argument("submanifold dimension must be in 1..dim(N)-1");
    if (static_cast<int>(map.size()) != N)
      throw std::invalid_argument("immersion has " + std::to_string(map.size()) + " components, ambient dimension is " +
                                  std::to_string(N));
    for (auto [lo, hi] : domain_.bounds)
      if (!(lo < hi)) throw std::invalid_argument("empty chart domain interval");
    for (const auto& s : map) map_.push_back(Expression::parse(s, p_, "u"));
    choose_pivots();
  }

  int p() const noexcept { return p_; }
  int n() const noexcept { return ambient_->dim() - p_; }
  int dim() const noexcept { return ambient_->dim(); }
  const AmbientSpace& ambient() const noexcept { return *ambient_; }
  const ChartBox& domain() const noexcept { return domain_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<int>& pivots() const noexcept { return pivots_; }
  const Expression& map_component(int i) const { return map_[i]; }

  VecD point(std::span<const double> u) const {
    VecD x;
    for (const auto& e : map_) x.push_back(e(u));
    return x;
  }

  AdaptedFrame adapted_frame_at(std::span<const double> u) const {
    check_param(u);
    const int N = dim();
    auto uj = coordinate_jets(u, 1);
    VecD x(N);
    MatD J(N, p_);
    for (int i = 0; i < N; ++i) {
      Jet c = map_[i](std::span<const Jet>(uj));
      x[i] = c.value();
      for (int A = 0; A < p_; ++A) J(i, A) = c.partial1(A);
    }
    const MatD G = ambient_->metric_at(x);
    AdaptedFrame f;
    f.u.assign(u.begin(), u.end());
    f.x = x;
    f.vectors = detail::gram_schmidt(G, initial_vectors(J), p_);
    f.pivots = pivots_;
    f.p = p_;
    return f;
  }

  template <class T>
  std::vector<Vec<T>> initial_vectors(const Mat<T>& J) const {
    std::vector<Vec<T>> in;
    for (int A = 0; A < p_; ++A) in.push_back(J.col(A));
    for (int ax : pivots_) {
      Vec<T> v(dim(), T(0.0));
      v[ax] = T(1.0);
      in.push_back(v);
    }
    return in;
  }

  void check_param(std::span<const double> u) const {
    if (static_cast<int>(u.size()) != p_)
      throw std::invalid_argument("parameter point has " + std::to_string(u.size()) + " coordinates, expected " +
                                  std::to_string(p_));
  }

 private:
  // Largest-residual pivoting at the domain center; frozen afterwards.
  void choose_pivots() {
    const VecD c = domain_.center();
    auto uj = coordinate_jets(c, 1);
    const int N = dim();
    VecD x(N);
    MatD J(N, p_);
    for (int i = 0; i < N; ++i) {
      Jet v = map_[i](std::span<const Jet>(uj));
      x[i] = v.value();
      for (int A = 0; A < p_; ++A) J(i, A) = v.partial1(A);
    }
    const MatD G = ambient_->metric_at(x);
    std::vector<VecD> basis;
    {
      std::vector<VecD> in;
      for (int A = 0; A < p_; ++A) in.push_back(J.col(A));
      MatD E = detail::gram_schmidt(G, in, p_);
      for (int A = 0; A < p_; ++A) basis.push_back(E.col(A));
    }
    std::vector<bool> used(N, false);
    for (int k = 0; k < N - p_; ++k) {
      int best = -1;
      double best_res = -1.0;
      VecD best_v;
      for (int ax = 0; ax < N; ++ax) {
        if (used[ax]) continue;
        VecD v(N, 0.0);
        v[ax] = 1.0;
        const double n0 = std::sqrt(inner(G, v, v));
        for (const auto& e : basis) {
          const double cc = inner(G, v, e);
          for (int i = 0; i < N; ++i) v[i] -= cc * e[i];
        }
        const double res = std::sqrt(std::max(0.0, inner(G, v, v))) / n0;
        if (res > best_res) {
          best_res = res;
          best = ax;
          best_v = v;
        }
      }
      if (best < 0 || best_res <= detail::relative_floor())
        throw GeometryError("pivot failure while completing the normal frame");
      used[best] = true;
      pivots_.push_back(best);
      const double nn = std::sqrt(inner(G, best_v, best_v));
      for (auto& val : best_v) val /= nn;
      basis.push_back(best_v);
    }
  }

  std::shared_ptr<const AmbientSpace> ambient_;
  int p_ = 0;
  std::vector<Expression> map_;
  ChartBox domain_;
  std::vector<int> pivots_;
  std::string name_;
};

/// Jets of every first- and second-order quantity of M ⊂ N at one parameter
/// point. `order` is the jet order of the adapted frame; connection matrices
/// carry order−1, ambient curvature order−2.
class LocalGeometry {
 public:
  LocalGeometry(const ImmersedSubmanifold& M, std::span<const double> u, int order = 3)
      : M_(&M), order_(order), p_(M.p()), N_(M.dim()) {
    M.check_param(u);
    if (order < 2) throw std::invalid_argument("local geometry needs jet order >= 2");
    u0_.assign(u.begin(), u.end());
    const int N = N_;
    auto uj = coordinate_jets(u, order + 1);
    VecJ phi(N);
    for (int i = 0; i < N; ++i) {
      phi[i] = M.map_component(i)(std::span<const Jet>(uj));
      if (phi[i].is_constant()) phi[i] = Jet(uj[0].layout(), phi[i].value());
    }
    x0_ = values(phi);
    J_ = MatJ(N, p_);
    for (int i = 0; i < N; ++i)
      for (int A = 0; A < p_; ++A) J_(i, A) = phi[i].derivative(A);

    const AmbientJets amb = M.ambient().jets(x0_, order);
    VecJ h(N);
    for (int i = 0; i < N; ++i) h[i] = phi[i] - x0_[i];
    JetSubstitution sub(h, order);
    G_ = map(amb.g, [&](const Jet& f) { return sub.apply(f); });
    gamma_.assign(N, MatJ(N, N));
    for (int i = 0; i < N; ++i) gamma_[i] = map(amb.gamma[i], [&](const Jet& f) { return sub.apply(f); });
    riem_.resize(amb.riem.size());
    for (std::size_t q = 0; q < amb.riem.size(); ++q) riem_[q] = sub.apply(amb.riem[q]);

    E_ = detail::gram_schmidt(G_, M.initial_vectors(J_), p_);

    // F(c,A) = g(e_c, ∂_A φ): frame components of the coordinate fields.
    MatJ EtG = E_.transpose() * G_;
    MatJ EtGJ = EtG * J_;
    F_ = MatJ(p_, p_);
    for (int c = 0; c < p_; ++c)
      for (int A = 0; A < p_; ++A) F_(c, A) = EtGJ(c, A);
    Finv_ = inverse(F_, "Jacobian");

    omega_.resize(p_);
    for (int A = 0; A < p_; ++A) {
      MatJ dE = map(E_, [A](const Jet& f) { return f.derivative(A); });
      // Γ(∂_A φ, e_b)
      MatJ GE(N, N);
      for (int i = 0; i < N; ++i)
        for (int b = 0; b < N; ++b) {
          Jet s(0.0);
          for (int j = 0; j < N; ++j) {
            Jet gj(0.0);
            for (int k = 0; k < N; ++k) gj += gamma_[i](j, k) * E_(k, b);
            s += J_(j, A) * gj;
          }
          GE(i, b) = s;
        }
      omega_[A] = EtG * (dE + GE);
    }

    build_frame_curvature();
  }

  const ImmersedSubmanifold& submanifold() const { return *M_; }
  int order() const noexcept { return order_; }
  int p() const noexcept { return p_; }
  int n() const noexcept { return N_ - p_; }
  int dim() const noexcept { return N_; }
  const VecD& u() const noexcept { return u0_; }
  const VecD& x() const noexcept { return x0_; }
  const MatJ& frame() const noexcept { return E_; }
  const MatJ& metric() const noexcept { return G_; }
  const MatJ& jacobian() const noexcept { return J_; }
  const MatJ& F() const noexcept { return F_; }
  const MatJ& Finv() const noexcept { return Finv_; }
  const MatJ& omega_chart(int A) const { return omega_[A]; }
  const std::vector<MatJ>& christoffel() const noexcept { return gamma_; }
  const Jet& riemann(int i, int j, int k, int l) const { return riem_[((i * N_ + j) * N_ + k) * N_ + l]; }

  bool is_tangent_index(int a) const { return a < p_; }

  AdaptedFrame adapted_frame() const {
    AdaptedFrame f;
    f.u = u0_;
    f.x = x0_;
    f.vectors = values(E_);
    f.pivots = M_->pivots();
    f.p = p_;
    return f;
  }

  // ---- conversions -------------------------------------------------------

  VecJ basis(int a) const {
    VecJ v(N_, Jet(0.0));
    v[a] = Jet(1.0);
    return v;
  }
  VecJ zero() const { return VecJ(N_, Jet(0.0)); }
  MatJ zero_endo() const { return MatJ(N_, N_); }

  /// Frame components of the tangent vector with chart components c.
  VecJ chart_to_frame(const VecJ& c) const {
    VecJ v(N_, Jet(0.0));
    for (int a = 0; a < p_; ++a)
      for (int A = 0; A < p_; ++A) v[a] += F_(a, A) * c[A];
    return v;
  }
  /// Chart components of the tangent part of a frame vector.
  VecJ frame_to_chart(const VecJ& v) const {
    VecJ c(p_, Jet(0.0));
    for (int A = 0; A < p_; ++A)
      for (int a = 0; a < p_; ++a) c[A] += Finv_(A, a) * v[a];
    return c;
  }
  VecJ frame_to_ambient(const VecJ& v) const { return E_ * v; }
  VecJ ambient_to_frame(const VecJ& a) const { return E_.transpose() * (G_ * a); }

  VecJ tangent_part(VecJ v) const {
    for (int a = p_; a < N_; ++a) v[a] = Jet(0.0);
    return v;
  }
  VecJ normal_part(VecJ v) const {
    for (int a = 0; a < p_; ++a) v[a] = Jet(0.0);
    return v;
  }

  // ---- derivatives along M ----------------------------------------------

  /// X(f) for a tangent vector (field) X given in frame components.
  Jet along(const VecJ& X, const Jet& f) const {
    VecJ c = frame_to_chart(X);
    Jet s(0.0);
    for (int A = 0; A < p_; ++A) s += c[A] * f.derivative(A);
    return s;
  }
  VecJ along(const VecJ& X, const VecJ& v) const {
    VecJ c = frame_to_chart(X);
    VecJ r(v.size(), Jet(0.0));
    for (std::size_t i = 0; i < v.size(); ++i)
      for (int A = 0; A < p_; ++A) r[i] += c[A] * v[i].derivative(A);
    return r;
  }
  MatJ along(const VecJ& X, const MatJ& m) const {
    VecJ c = frame_to_chart(X);
    MatJ r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        for (int A = 0; A < p_; ++A) r(i, j) += c[A] * m(i, j).derivative(A);
    return r;
  }

  /// Ω(X) = Σ_A X^A Ω_A for tangent X.
  MatJ omega(const VecJ& X) const {
    VecJ c = frame_to_chart(X);
    MatJ r(N_, N_);
    for (int A = 0; A < p_; ++A) {
      MatJ t = omega_[A];
      t.scale(c[A]);
      r += t;
    }
    return r;
  }

  MatJ h_part(const MatJ& T) const {
    MatJ r = T;
    for (int a = 0; a < N_; ++a)
      for (int b = 0; b < N_; ++b)
        if (is_tangent_index(a) != is_tangent_index(b)) r(a, b) = Jet(0.0);
    return r;
  }
  MatJ m_part(const MatJ& T) const {
    MatJ r = T;
    for (int a = 0; a < N_; ++a)
      for (int b = 0; b < N_; ++b)
        if (is_tangent_index(a) == is_tangent_index(b)) r(a, b) = Jet(0.0);
    return r;
  }

  /// S_X as an endomorphism of T_xN (pure 𝔪).
  MatJ S(const VecJ& X) const { return m_part(omega(X)); }
  /// Connection matrix of ∇′ along X (pure 𝔥).
  MatJ connection_prime(const VecJ& X) const { return h_part(omega(X)); }

  /// Π(X,Y) = (∇_X Ŷ)^⊥, Ŷ with constant frame coefficients; normal block of Ω.
  VecJ second_fundamental_form(const VecJ& X, const VecJ& Y) const {
    MatJ W = omega(X);
    VecJ r(N_, Jet(0.0));
    for (int al = p_; al < N_; ++al)
      for (int B = 0; B < p_; ++B) r[al] += W(al, B) * Y[B];
    return r;
  }
  /// A_V X = −(∇_X V̂)^⊤, V̂ with constant frame coefficients; tangent-normal block of Ω.
  VecJ weingarten(const VecJ& V, const VecJ& X) const {
    MatJ W = omega(X);
    VecJ r(N_, Jet(0.0));
    for (int A = 0; A < p_; ++A)
      for (int be = p_; be < N_; ++be) r[A] -= W(A, be) * V[be];
    return r;
  }
  /// S_X Y = Π(X, Y^⊤) − A_{Y^⊥} X.
  VecJ tensor_S(const VecJ& X, const VecJ& Y) const {
    return second_fundamental_form(X, tangent_part(Y)) - weingarten(normal_part(Y), X);
  }

  /// ∇_X V for a section V of TN|M (frame components).
  VecJ nabla(const VecJ& X, const VecJ& V) const { return along(X, V) + omega(X) * V; }
  /// ∇′_X V = (∇_X V^⊤)^⊤ + (∇_X V^⊥)^⊥.
  VecJ nabla_prime(const VecJ& X, const VecJ& V) const { return along(X, V) + connection_prime(X) * V; }
  /// (∇_X T)Z = ∇_X(TZ) − T∇_X Z for an endomorphism field T.
  MatJ nabla_endo(const VecJ& X, const MatJ& T) const { return along(X, T) + commutator(omega(X), T); }
  MatJ nabla_prime_endo(const VecJ& X, const MatJ& T) const {
    return along(X, T) + commutator(connection_prime(X), T);
  }

  /// [X,Y] for tangent fields, through chart components.
  VecJ bracket(const VecJ& X, const VecJ& Y) const {
    VecJ xc = frame_to_chart(X), yc = frame_to_chart(Y);
    VecJ r(p_, Jet(0.0));
    for (int B = 0; B < p_; ++B)
      for (int A = 0; A < p_; ++A) r[B] += xc[A] * yc[B].derivative(A) - yc[A] * xc[B].derivative(A);
    return chart_to_frame(r);
  }

  // ---- ambient-component route (projector from the Jacobian) -----------

  /// ∇_X V evaluated through ambient components and Christoffel symbols.
  VecJ nabla_ambient_route(const VecJ& X, const VecJ& V) const {
    return ambient_to_frame(ambient_nabla(X, frame_to_ambient(V)));
  }
  /// ∇′_X V with tangent/normal projections built from the Jacobian.
  VecJ nabla_prime_ambient_route(const VecJ& X, const VecJ& V) const {
    VecJ a = frame_to_ambient(V);
    MatJ Pt = tangent_projector();
    VecJ at = Pt * a;
    VecJ an = a - at;
    MatJ Pt1 = map(Pt, [this](const Jet& f) { return f.truncated(order_ - 1); });
    VecJ dt = ambient_nabla(X, at), dn = ambient_nabla(X, an);
    VecJ dt_t = Pt1 * dt;
    VecJ dn_n = dn - Pt1 * dn;
    return ambient_to_frame(dt_t + dn_n);
  }

  /// Ambient components of ∇_X a for a field a along M in ambient components.
  VecJ ambient_nabla(const VecJ& X, const VecJ& a) const {
    VecJ xc = frame_to_chart(X);
    VecJ Xa = J_ * xc;
    VecJ r(N_, Jet(0.0));
    for (int i = 0; i < N_; ++i) {
      for (int A = 0; A < p_; ++A) r[i] += xc[A] * a[i].derivative(A);
      for (int j = 0; j < N_; ++j)
        for (int k = 0; k < N_; ++k) r[i] += gamma_[i](j, k) * Xa[j] * a[k];
    }
    return r;
  }

  /// g-orthogonal projector onto the image of the Jacobian, J (JᵀGJ)⁻¹ JᵀG.
  MatJ tangent_projector() const {
    MatJ JtG = J_.transpose() * G_;
    MatJ gram = JtG * J_;
    return J_ * (inverse(gram, "induced metric") * JtG);
  }

  // ---- ambient curvature in the frame ------------------------------------

  /// Matrix of R(e_c, e_d) in the frame: (a,b) entry g(e_a, R(e_c,e_d) e_b).
  const MatJ& curvature_frame(int c, int d) const { return rf_[c * N_ + d]; }
  /// R(X,Y) as a frame endomorphism for arbitrary frame vectors X, Y.
  MatJ curvature(const VecJ& X, const VecJ& Y) const {
    MatJ r(N_, N_);
    for (int c = 0; c < N_; ++c)
      for (int d = c + 1; d < N_; ++d) {
        const Jet w = X[c] * Y[d] - X[d] * Y[c];
        if (w.is_constant() && w.value() == 0.0) continue;
        MatJ t = rf_[c * N_ + d];
        t.scale(w);
        r += t;
      }
    return r;
  }

 private:
  void build_frame_curvature() {
    const int N = N_;
    auto idx = [N](int i, int j, int k, int l) { return ((i * N + j) * N + k) * N + l; };
    // lower the first index, then contract each slot with the frame
    std::vector<Jet> t(riem_.size(), Jet(0.0));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) {
            Jet s(0.0);
            for (int m = 0; m < N; ++m) s += G_(i, m) * riem_[idx(m, j, k, l)];
            t[idx(i, j, k, l)] = s;
          }
    for (int slot = 0; slot < 4; ++slot) {
      std::vector<Jet> nt(t.size(), Jet(0.0));
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k)
            for (int l = 0; l < N; ++l) {
              int q[4] = {i, j, k, l};
              Jet s(0.0);
              for (int m = 0; m < N; ++m) {
                int r[4] = {i, j, k, l};
                r[slot] = m;
                s += E_(m, q[slot]) * t[idx(r[0], r[1], r[2], r[3])];
              }
              nt[idx(i, j, k, l)] = s;
            }
      t = std::move(nt);
    }
    rf_.assign(static_cast<std::size_t>(N) * N, MatJ(N, N));
    for (int c = 0; c < N; ++c)
      for (int d = 0; d < N; ++d)
        for (int a = 0; a < N; ++a)
          for (int b = 0; b < N; ++b) rf_[c * N + d](a, b) = t[idx(a, b, c, d)];
  }

  const ImmersedSubmanifold* M_;
  int order_, p_, N_;
  VecD u0_, x0_;
  MatJ J_, G_, E_, F_, Finv_;
  std::vector<MatJ> gamma_;
  std::vector<Jet> riem_;
  std::vector<MatJ> omega_;
  std::vector<MatJ> rf_;
};

}  // namespace fb
