// SPDX-License-Identifier: Apache-2.0
#pragma once

// Tangent vectors of O(N) at adapted frames u ∈ O(M,N). A vector is stored as
// (h, v): h the horizontal part in frame components, v the vertical part as
// the skew matrix u⁻¹Tu. Fields along O(M,N) carry jet entries.
//
// The normal space of O(M,N) is spanned by Z^h (Z ⊥ M) and T̃ = T̄ + (S_T)^h
// (T ∈ 𝔪); the tangent space by X^{h′} = X^h + S̄_X and T̄ (T ∈ 𝔥).

#include <Eigen/QR>

#include "framebundle/operators.hpp"

namespace fb {

struct Lifted {
  VecJ h;
  MatJ v;

  static Lifted zero(int N) { return {VecJ(N, Jet(0.0)), MatJ(N, N)}; }

  Lifted& operator+=(const Lifted& o) {
    h = h + o.h;
    v += o.v;
    return *this;
  }
  Lifted& operator-=(const Lifted& o) {
    h = h - o.h;
    v -= o.v;
    return *this;
  }
  friend Lifted operator+(Lifted a, const Lifted& b) { return a += b; }
  friend Lifted operator-(Lifted a, const Lifted& b) { return a -= b; }
  friend Lifted operator*(double s, Lifted a) {
    a.h = s * a.h;
    a.v *= s;
    return a;
  }
  Lifted scaled(const Jet& s) const {
    Lifted r{fb::scaled(h, s), v};
    r.v.scale(s);
    return r;
  }
};

/// g_SM(a,b) = g(h,h′) + ⟨v,v′⟩.
inline Jet sasaki_mok(const Lifted& a, const Lifted& b) { return dot(a.h, b.h) + skew_inner(a.v, b.v); }

inline double max_abs(const Lifted& a) {
  double m = 0.0;
  for (const auto& x : a.h) m = std::max(m, std::abs(x.value()));
  for (int i = 0; i < a.v.rows(); ++i)
    for (int j = 0; j < a.v.cols(); ++j) m = std::max(m, std::abs(a.v(i, j).value()));
  return m;
}

/// Components u⁻¹Tu of T̄ at the frame u with columns `frame` (ambient chart
/// components), for an endomorphism T given in chart components.
inline MatD vertical_components(const MatD& frame, const MatD& metric, const MatD& T) {
  return frame.transpose() * (metric * (T * frame));
}

class FrameBundle {
 public:
  explicit FrameBundle(const Operators& ops) : ops_(ops), L_(ops.geometry()), N_(L_.dim()), p_(L_.p()) {}

  const Operators& operators() const noexcept { return ops_; }
  const LocalGeometry& geometry() const noexcept { return L_; }
  int dim() const noexcept { return N_; }

  Lifted horizontal_lift(const VecJ& X) const { return {X, MatJ(N_, N_)}; }
  Lifted horizontal_lift_prime(const VecJ& X) const { return {X, L_.S(X)}; }
  Lifted vertical(const MatJ& T) const { return {VecJ(N_, Jet(0.0)), T}; }

  // ---- Levi-Civita connection of (O(N), g_SM) ---------------------------

  /// ∇_{X^h} Y^h = (∇_X Y)^h − ½ R̄(X,Y).
  Lifted nabla_hh(const VecJ& X, const VecJ& Y) const { return nabla(horizontal_lift(X), horizontal_lift(Y)); }
  /// ∇_{T̄} X^h = ½ R_T(X)^h.
  Lifted nabla_vh(const MatJ& T, const VecJ& X) const { return {0.5 * ops_.R_T(T, X), MatJ(N_, N_)}; }
  /// ∇_{X^h} T̄ = ½ R_T(X)^h + \overline{∇_X T}.
  Lifted nabla_hv(const VecJ& X, const MatJ& T) const { return nabla(horizontal_lift(X), vertical(T)); }
  /// ∇_{T̄} T̄′ = ½ \overline{[T′,T]}.
  Lifted nabla_vv(const MatJ& T, const MatJ& Tp) const { return {VecJ(N_, Jet(0.0)), 0.5 * commutator(Tp, T)}; }

  /// ∇_d F for a direction d = x^h + ā with x tangent to M, and a field
  /// F = Y^h + T̄ along O(M,N) (Y a section of TN|M, T an endomorphism field).
  Lifted nabla(const Lifted& d, const Lifted& F) const {
    const VecJ& x = d.h;
    for (int al = p_; al < N_; ++al)
      if (x[al].value() != 0.0) throw std::invalid_argument("direction must be horizontal-tangent to M");
    Lifted r;
    r.h = L_.nabla(x, F.h) + 0.5 * ops_.R_T(F.v, x) + 0.5 * ops_.R_T(d.v, F.h);
    r.v = -0.5 * L_.curvature(x, F.h) + L_.nabla_endo(x, F.v) + 0.5 * commutator(F.v, d.v);
    return r;
  }

  // ---- tangent / normal decomposition along O(M,N) -----------------------

  struct Split {
    Lifted tangent, normal;
  };

  /// Splits v using the closed-form tangent parts of X^h and T̄.
  Split decompose(const Lifted& w) const {
    VecJ Ht = L_.tangent_part(w.h);
    auto [Vh, Vm] = ops_.hm_decompose(w.v);
    VecJ Y = ops_.P_inverse(Ht - ops_.S_Tm(Vm));
    Lifted t = horizontal_lift_prime(Y);
    t.v += Vh;
    return {t, w - t};
  }

  /// Tangent part of X^h alone: (P⁻¹X)^{h′}; normal part −S̄_{P⁻¹X} − 2Σ_A(S²_{e_A}P⁻¹X)^h.
  Split decompose_horizontal(const VecJ& X) const {
    VecJ Y = ops_.P_inverse(L_.tangent_part(X));
    Lifted n = normal_tilde(-1.0 * L_.S(Y));
    n.h = n.h + L_.normal_part(X);
    return {horizontal_lift_prime(Y), n};
  }

  /// T̃ = T̄ + (S_T)^h for T ∈ 𝔪.
  Lifted normal_tilde(const MatJ& Tm) const { return {ops_.S_Tm(Tm), L_.m_part(Tm)}; }

  std::vector<Lifted> tangent_generators() const {
    std::vector<Lifted> g;
    for (int A = 0; A < p_; ++A) g.push_back(horizontal_lift_prime(L_.basis(A)));
    for (int i = 0; i < N_; ++i)
      for (int j = i + 1; j < N_; ++j)
        if (L_.is_tangent_index(i) == L_.is_tangent_index(j)) g.push_back(vertical(skew_basis(N_, i, j)));
    return g;
  }
  std::vector<Lifted> normal_generators() const {
    std::vector<Lifted> g;
    for (int al = p_; al < N_; ++al) g.push_back(horizontal_lift(L_.basis(al)));
    for (int A = 0; A < p_; ++A)
      for (int al = p_; al < N_; ++al) g.push_back(normal_tilde(skew_basis(N_, A, al)));
    return g;
  }

  /// Coordinates of a normal vector n = Z^h + T̃: (Z, T).
  std::pair<VecJ, MatJ> normal_coordinates(const Lifted& n) const { return {L_.normal_part(n.h), L_.m_part(n.v)}; }

  /// h ⊕ √2·upper(v): Euclidean dot product equals g_SM.
  Eigen::VectorXd vectorize(const Lifted& a) const {
    Eigen::VectorXd r(N_ + N_ * (N_ - 1) / 2);
    int k = 0;
    for (int i = 0; i < N_; ++i) r(k++) = a.h[i].value();
    for (int i = 0; i < N_; ++i)
      for (int j = i + 1; j < N_; ++j) r(k++) = std::sqrt(2.0) * a.v(i, j).value();
    return r;
  }
  Lifted unvectorize(const Eigen::VectorXd& r) const {
    Lifted a = Lifted::zero(N_);
    int k = 0;
    for (int i = 0; i < N_; ++i) a.h[i] = Jet(r(k++));
    for (int i = 0; i < N_; ++i)
      for (int j = i + 1; j < N_; ++j) {
        const double x = r(k++) / std::sqrt(2.0);
        a.v(i, j) = Jet(x);
        a.v(j, i) = Jet(-x);
      }
    return a;
  }

  /// Orthogonal projection onto the span of the tangent generators by least
  /// squares; values only.
  Split decompose_least_squares(const Lifted& w) const {
    auto gens = tangent_generators();
    Eigen::MatrixXd A(N_ + N_ * (N_ - 1) / 2, static_cast<int>(gens.size()));
    for (std::size_t k = 0; k < gens.size(); ++k) A.col(static_cast<int>(k)) = vectorize(gens[k]);
    const Eigen::VectorXd b = vectorize(w);
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd t = A * c;
    return {unvectorize(t), unvectorize(b - t)};
  }

 private:
  const Operators& ops_;
  const LocalGeometry& L_;
  int N_, p_;
};

}  // namespace fb
