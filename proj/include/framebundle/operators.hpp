// SPDX-License-Identifier: Apache-2.0
#pragma once

// Operator algebra on skew endomorphisms along M: the 𝔥/𝔪 split, R_T,
// S_{T_𝔪}, P and the deformed metric g̃(X,Y) = g(X, P Y), its Levi-Civita
// connection ∇̃, the difference tensor L, the operators Q_T and the curvature
// R′ of ∇′.

#include <Eigen/SVD>
#include <cmath>

#include "framebundle/submanifold.hpp"

namespace fb {

/// ⟨T,T′⟩ = −tr(T T′).
template <class T>
T skew_inner(const Mat<T>& a, const Mat<T>& b) {
  T s(0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) s -= a(i, k) * b(k, i);
  return s;
}

/// T_ij = (E^i_j − E^j_i)/√2 (zero-based indices).
inline MatJ skew_basis(int N, int i, int j) {
  MatJ t(N, N);
  t(i, j) = Jet(1.0 / std::sqrt(2.0));
  t(j, i) = Jet(-1.0 / std::sqrt(2.0));
  return t;
}

class Operators {
 public:
  explicit Operators(const LocalGeometry& L) : L_(L), p_(L.p()), N_(L.dim()) {
    for (int A = 0; A < p_; ++A) Se_.push_back(L.S(L.basis(A)));
    P_ = MatJ::identity(N_);
    for (int a = p_; a < N_; ++a) P_(a, a) = Jet(0.0);
    for (int A = 0; A < p_; ++A) {
      MatJ sq = Se_[A] * Se_[A];
      for (int a = 0; a < p_; ++a)
        for (int b = 0; b < p_; ++b) P_(a, b) -= 2.0 * sq(a, b);
    }
    MatJ Pt(p_, p_);
    MatD Pv(p_, p_);
    for (int a = 0; a < p_; ++a)
      for (int b = 0; b < p_; ++b) {
        Pt(a, b) = P_(a, b);
        Pv(a, b) = P_(a, b).value();
      }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(Pv));
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e12) throw GeometryError("singular P");
    MatJ Pti = inverse(Pt, "P");
    Pinv_ = MatJ(N_, N_);
    for (int a = 0; a < p_; ++a)
      for (int b = 0; b < p_; ++b) Pinv_(a, b) = Pti(a, b);

    // g̃ in chart coordinates and its Christoffel symbols (Koszul formula).
    gt_ = L.F().transpose() * (Pt * L.F());
    gti_ = inverse(gt_, "deformed metric");
    std::vector<MatJ> dgt(p_);
    for (int k = 0; k < p_; ++k) dgt[k] = map(gt_, [k](const Jet& f) { return f.derivative(k); });
    gamma_t_.assign(p_, MatJ(p_, p_));
    for (int A = 0; A < p_; ++A)
      for (int B = A; B < p_; ++B)
        for (int C = 0; C < p_; ++C) {
          Jet s(0.0);
          for (int D = 0; D < p_; ++D) s += gti_(C, D) * (dgt[A](D, B) + dgt[B](D, A) - dgt[D](A, B));
          gamma_t_[C](A, B) = gamma_t_[C](B, A) = 0.5 * s;
        }
  }

  const LocalGeometry& geometry() const noexcept { return L_; }
  int p() const noexcept { return p_; }
  int dim() const noexcept { return N_; }

  // ---- skew endomorphisms ------------------------------------------------

  std::pair<MatJ, MatJ> hm_decompose(const MatJ& T) const { return {L_.h_part(T), L_.m_part(T)}; }

  /// Matrix of R_T = Σ_i R(e_i, T e_i) in the frame.
  MatJ R_T(const MatJ& T) const {
    MatJ r(N_, N_);
    for (int i = 0; i < N_; ++i)
      for (int j = 0; j < N_; ++j) {
        // T e_i = Σ_j T(j,i) e_j
        const Jet& w = T(j, i);
        if (w.is_constant() && w.value() == 0.0) continue;
        MatJ t = L_.curvature_frame(i, j);
        t.scale(w);
        r += t;
      }
    return r;
  }
  VecJ R_T(const MatJ& T, const VecJ& X) const { return R_T(T) * X; }

  /// S_{T_𝔪} = 2 Σ_A S_{e_A}(T_𝔪 e_A).
  VecJ S_Tm(const MatJ& T) const {
    MatJ Tm = L_.m_part(T);
    VecJ r(N_, Jet(0.0));
    for (int A = 0; A < p_; ++A) r = r + 2.0 * (Se_[A] * Tm.col(A));
    return r;
  }
  /// Σ_A S_{e_A}(T_𝔪 e_A) − Σ_α S_{T_𝔪 e_α}(e_α), before using the symmetry of Π.
  VecJ S_Tm_unsymmetrized(const MatJ& T) const {
    MatJ Tm = L_.m_part(T);
    VecJ r(N_, Jet(0.0));
    for (int A = 0; A < p_; ++A) r = r + Se_[A] * Tm.col(A);
    for (int al = p_; al < N_; ++al) r = r - L_.S(Tm.col(al)) * L_.basis(al);
    return r;
  }

  const MatJ& S_e(int A) const { return Se_[A]; }

  // ---- P and g̃ -----------------------------------------------------------

  /// P as an N×N frame matrix acting on the tangent block (zero on normals).
  const MatJ& P() const noexcept { return P_; }
  const MatJ& P_inverse() const noexcept { return Pinv_; }
  VecJ P(const VecJ& X) const { return P_ * X; }
  VecJ P_inverse(const VecJ& X) const { return Pinv_ * X; }
  /// X − S_{S_X}, the second form of P.
  VecJ P_via_S(const VecJ& X) const { return L_.tangent_part(X) - S_Tm(L_.S(X)); }

  Jet modified_metric(const VecJ& X, const VecJ& Y) const { return dot(X, P(Y)); }
  const MatJ& gtilde_chart() const noexcept { return gt_; }
  const MatJ& gtilde_chart_inverse() const noexcept { return gti_; }
  const std::vector<MatJ>& gtilde_christoffel() const noexcept { return gamma_t_; }

  /// g̃-orthonormal frame fields ẽ_A: Gram–Schmidt of the coordinate fields ∂_A.
  std::vector<VecJ> tilde_orthonormal_frame() const {
    std::vector<VecJ> out;
    for (int A = 0; A < p_; ++A) {
      VecJ c(p_, Jet(0.0));
      c[A] = Jet(1.0);
      VecJ v = L_.chart_to_frame(c);
      for (const auto& e : out) {
        const Jet k = modified_metric(v, e);
        v = v - scaled(e, k);
      }
      const Jet inv = Jet(1.0) / fb::sqrt(modified_metric(v, v));
      out.push_back(scaled(v, inv));
    }
    return out;
  }

  /// (∇′_X P) as a frame matrix.
  MatJ nabla_prime_P(const VecJ& X) const { return L_.nabla_prime_endo(X, P_); }

  // ---- ∇̃ and curvature of g̃ -------------------------------------------

  /// ∇̃_X Y for tangent fields in frame components (Koszul route).
  VecJ tilde_nabla(const VecJ& X, const VecJ& Y) const {
    VecJ xc = L_.frame_to_chart(X), yc = L_.frame_to_chart(Y);
    VecJ r(p_, Jet(0.0));
    for (int C = 0; C < p_; ++C) {
      for (int A = 0; A < p_; ++A) r[C] += xc[A] * yc[C].derivative(A);
      for (int A = 0; A < p_; ++A)
        for (int B = 0; B < p_; ++B) r[C] += gamma_t_[C](A, B) * xc[A] * yc[B];
    }
    return L_.chart_to_frame(r);
  }

  /// R̃(X,Y)Z in frame components (needs jet order ≥ 3 at construction).
  VecJ tilde_curvature(const VecJ& X, const VecJ& Y, const VecJ& Z) const {
    ensure_tilde_riemann();
    VecJ xc = L_.frame_to_chart(X), yc = L_.frame_to_chart(Y), zc = L_.frame_to_chart(Z);
    VecJ r(p_, Jet(0.0));
    for (int i = 0; i < p_; ++i)
      for (int j = 0; j < p_; ++j)
        for (int k = 0; k < p_; ++k)
          for (int l = 0; l < p_; ++l) r[i] += rt_[((i * p_ + j) * p_ + k) * p_ + l] * zc[j] * xc[k] * yc[l];
    return L_.chart_to_frame(r);
  }
  /// Sectional curvature of (M, g̃) on span{X,Y}.
  double tilde_sectional(const VecJ& X, const VecJ& Y) const {
    const double num = modified_metric(tilde_curvature(X, Y, Y), X).value();
    const double gxx = modified_metric(X, X).value(), gyy = modified_metric(Y, Y).value(),
                 gxy = modified_metric(X, Y).value();
    return num / (gxx * gyy - gxy * gxy);
  }

  // ---- L, Q_T, R′ -----------------------------------------------------------

  /// Q_T(X) = P⁻¹((R_T X)^⊤ − S_{(∇_X T)_𝔪}) for an endomorphism field T.
  VecJ Q(const MatJ& T, const VecJ& X) const {
    VecJ rt = L_.tangent_part(R_T(T, X));
    VecJ s = S_Tm(L_.m_part(L_.nabla_endo(X, T)));
    return P_inverse(rt - s);
  }

  /// L_X Y = ½(Q_{S_X}(Y) + Q_{S_Y}(X) + P⁻¹(S_{S_{∇′_X Y + ∇′_Y X}})).
  VecJ L_op(const VecJ& X, const VecJ& Y) const {
    VecJ sym = L_.nabla_prime(X, Y) + L_.nabla_prime(Y, X);
    VecJ r = Q(L_.S(X), Y) + Q(L_.S(Y), X) + P_inverse(S_Tm(L_.S(sym)));
    return 0.5 * r;
  }

  /// R′(X,Y) = R(X,Y)_𝔥 − [S_X, S_Y].
  MatJ curvature_prime(const VecJ& X, const VecJ& Y) const {
    return L_.h_part(L_.curvature(X, Y)) - commutator(L_.S(X), L_.S(Y));
  }

  /// R′ from the connection matrices of ∇′ directly:
  /// R′(∂_A,∂_B) = ∂_Aω′_B − ∂_Bω′_A + [ω′_A, ω′_B].
  MatJ curvature_prime_direct(const VecJ& X, const VecJ& Y) const {
    VecJ xc = L_.frame_to_chart(X), yc = L_.frame_to_chart(Y);
    MatJ r(N_, N_);
    for (int A = 0; A < p_; ++A)
      for (int B = 0; B < p_; ++B) {
        const Jet w = xc[A] * yc[B];
        MatJ wa = L_.h_part(L_.omega_chart(A)), wb = L_.h_part(L_.omega_chart(B));
        MatJ c = map(wb, [A](const Jet& f) { return f.derivative(A); }) -
                 map(wa, [B](const Jet& f) { return f.derivative(B); }) + commutator(wa, wb);
        c.scale(w);
        r += c;
      }
    return r;
  }

 private:
  void ensure_tilde_riemann() const {
    if (!rt_.empty()) return;
    if (L_.order() < 3) throw std::logic_error("curvature of the deformed metric needs jet order >= 3");
    const int p = p_;
    rt_.assign(static_cast<std::size_t>(p) * p * p * p, Jet(0.0));
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k)
          for (int l = 0; l < p; ++l) {
            Jet s = gamma_t_[i](l, j).derivative(k) - gamma_t_[i](k, j).derivative(l);
            for (int m = 0; m < p; ++m) s += gamma_t_[i](k, m) * gamma_t_[m](l, j) - gamma_t_[i](l, m) * gamma_t_[m](k, j);
            rt_[((i * p + j) * p + k) * p + l] = s;
          }
  }

  const LocalGeometry& L_;
  int p_, N_;
  std::vector<MatJ> Se_;
  MatJ P_, Pinv_;
  MatJ gt_, gti_;
  std::vector<MatJ> gamma_t_;
  mutable std::vector<Jet> rt_;
};

}  // namespace fb
