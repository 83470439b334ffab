// SPDX-License-Identifier: Apache-2.0
#pragma once

// Intrinsic and extrinsic geometry of O(M,N) ⊂ O(N). Tangent fields of
// O(M,N) are written X^{h′} + T̄ with X tangent to M and T ∈ 𝔥.

#include <cstdint>

#include "framebundle/frame_bundle.hpp"
#include "framebundle/sampling.hpp"

namespace fb {

struct OmnField {
  VecJ X;
  MatJ T;

  OmnField& operator+=(const OmnField& o) {
    X = X + o.X;
    T += o.T;
    return *this;
  }
  OmnField& operator-=(const OmnField& o) {
    X = X - o.X;
    T -= o.T;
    return *this;
  }
  friend OmnField operator+(OmnField a, const OmnField& b) { return a += b; }
  friend OmnField operator-(OmnField a, const OmnField& b) { return a -= b; }
  friend OmnField operator*(double s, OmnField a) {
    a.X = s * a.X;
    a.T *= s;
    return a;
  }
};

struct MeanCurvature {
  Lifted H;
  VecD Z;  // normal horizontal coordinates
  MatD T;  // 𝔪 coordinates against T̃ = T̄ + (S_T)^h
  double norm = 0.0;
};

class OmnGeometry {
 public:
  explicit OmnGeometry(const FrameBundle& B) : B_(B), ops_(B.operators()), L_(B.geometry()), N_(L_.dim()) {}

  const FrameBundle& bundle() const noexcept { return B_; }
  const Operators& operators() const noexcept { return ops_; }
  const LocalGeometry& geometry() const noexcept { return L_; }

  OmnField horizontal(const VecJ& X) const { return {X, MatJ(N_, N_)}; }
  OmnField vertical(const MatJ& T) const { return {VecJ(N_, Jet(0.0)), T}; }
  Lifted lift(const OmnField& F) const { return {F.X, L_.S(F.X) + F.T}; }
  /// Inverse of `lift` on vectors tangent to O(M,N).
  OmnField unlift(const Lifted& w) const {
    VecJ X = L_.tangent_part(w.h);
    return {X, w.v - L_.S(X)};
  }

  // ---- Levi-Civita connection --------------------------------------------

  /// ∇_d F for d = x^{h′} + ā, F = Y^{h′} + T̄.
  OmnField nabla(const OmnField& d, const OmnField& F) const {
    const VecJ& x = d.X;
    const MatJ& a = d.T;
    OmnField r;
    r.X = ops_.tilde_nabla(x, F.X) + 0.5 * ops_.Q(F.T, x) + 0.5 * ops_.Q(a, F.X);
    r.T = -0.5 * ops_.curvature_prime(x, F.X) + L_.nabla_prime_endo(x, F.T) + 0.5 * commutator(F.T, a);
    return r;
  }
  Lifted nabla_hh(const VecJ& X, const VecJ& Y) const { return lift(nabla(horizontal(X), horizontal(Y))); }
  Lifted nabla_hv(const VecJ& X, const MatJ& T) const { return lift(nabla(horizontal(X), vertical(T))); }
  Lifted nabla_vh(const MatJ& T, const VecJ& Y) const { return lift(nabla(vertical(T), horizontal(Y))); }
  Lifted nabla_vv(const MatJ& T, const MatJ& Tp) const { return lift(nabla(vertical(T), vertical(Tp))); }

  /// ∇^{O(N)} on X^{h′}, Y^{h′} in closed form:
  /// (∇_X Y)^h + ½(R_{S_X}Y + R_{S_Y}X)^h − ½R̄′(X,Y) + ½\overline{∇′_X S_Y + ∇′_Y S_X} + ½\overline{S_{[X,Y]}}.
  Lifted nabla_ON_hprime(const VecJ& X, const VecJ& Y) const {
    Lifted r;
    r.h = L_.nabla(X, Y) + 0.5 * (ops_.R_T(L_.S(X), Y) + ops_.R_T(L_.S(Y), X));
    r.v = -0.5 * ops_.curvature_prime(X, Y) +
          0.5 * (L_.nabla_prime_endo(X, L_.S(Y)) + L_.nabla_prime_endo(Y, L_.S(X)) + L_.S(L_.bracket(X, Y)));
    return r;
  }

  // ---- curvature ------------------------------------------------------------

  /// (D_X R′)(Y,Z) = ∇′_X R′(Y,Z) − R′(∇̃_X Y, Z) − R′(Y, ∇̃_X Z).
  MatJ D_Rprime(const VecJ& X, const VecJ& Y, const VecJ& Z) const {
    return L_.nabla_prime_endo(X, ops_.curvature_prime(Y, Z)) - ops_.curvature_prime(ops_.tilde_nabla(X, Y), Z) -
           ops_.curvature_prime(Y, ops_.tilde_nabla(X, Z));
  }
  /// (D_X Q_T)(Y) = ∇̃_X Q_T(Y) − Q_{∇′_X T}(Y) − Q_T(∇̃_X Y).
  VecJ D_Q(const VecJ& X, const MatJ& T, const VecJ& Y) const {
    return ops_.tilde_nabla(X, ops_.Q(T, Y)) - ops_.Q(L_.nabla_prime_endo(X, T), Y) -
           ops_.Q(T, ops_.tilde_nabla(X, Y));
  }

  OmnField curvature_hhh(const VecJ& X, const VecJ& Y, const VecJ& Z) const {
    const auto Rp = [&](const VecJ& a, const VecJ& b) { return ops_.curvature_prime(a, b); };
    OmnField r;
    r.X = ops_.tilde_curvature(X, Y, Z) -
          0.25 * (ops_.Q(Rp(Y, Z), X) - ops_.Q(Rp(X, Z), Y) - 2.0 * ops_.Q(Rp(X, Y), Z));
    r.T = -0.5 * (D_Rprime(X, Y, Z) - D_Rprime(Y, X, Z));
    return r;
  }
  OmnField curvature_hhv(const VecJ& X, const VecJ& Y, const MatJ& T) const {
    OmnField r;
    r.X = 0.5 * (D_Q(X, T, Y) - D_Q(Y, T, X));
    r.T = 0.5 * commutator(ops_.curvature_prime(X, Y), T) -
          0.25 * (ops_.curvature_prime(X, ops_.Q(T, Y)) - ops_.curvature_prime(Y, ops_.Q(T, X)));
    return r;
  }
  OmnField curvature_hvh(const VecJ& X, const MatJ& T, const VecJ& Z) const {
    OmnField r;
    r.X = 0.5 * D_Q(X, T, Z);
    r.T = -0.25 * (ops_.curvature_prime(X, ops_.Q(T, Z)) - commutator(ops_.curvature_prime(X, Z), T));
    return r;
  }
  OmnField curvature_hvv(const VecJ& X, const MatJ& T, const MatJ& Tp) const {
    return {-0.25 * (ops_.Q(commutator(T, Tp), X) + ops_.Q(T, ops_.Q(Tp, X))), MatJ(N_, N_)};
  }
  OmnField curvature_vvh(const MatJ& T, const MatJ& Tp, const VecJ& Z) const {
    VecJ r = 0.25 * (ops_.Q(T, ops_.Q(Tp, Z)) - ops_.Q(Tp, ops_.Q(T, Z))) + 0.5 * ops_.Q(commutator(T, Tp), Z);
    return {r, MatJ(N_, N_)};
  }
  OmnField curvature_vvv(const MatJ& T, const MatJ& Tp, const MatJ& Tpp) const {
    return {VecJ(N_, Jet(0.0)), -0.25 * commutator(commutator(T, Tp), Tpp)};
  }

  /// R(U,V)W from the six closed forms, extended by multilinearity.
  OmnField curvature(const OmnField& U, const OmnField& V, const OmnField& W) const {
    OmnField r = curvature_hhh(U.X, V.X, W.X);
    r += curvature_hhv(U.X, V.X, W.T);
    r += curvature_hvh(U.X, V.T, W.X);
    r += curvature_hvv(U.X, V.T, W.T);
    r -= curvature_hvh(V.X, U.T, W.X);
    r -= curvature_hvv(V.X, U.T, W.T);
    r += curvature_vvh(U.T, V.T, W.X);
    r += curvature_vvv(U.T, V.T, W.T);
    return r;
  }

  /// R(U,V)W = ∇_U∇_V W − ∇_V∇_U W − ∇_{[U,V]}W with [U,V] = ∇_U V − ∇_V U.
  /// Needs jet order ≥ 4.
  OmnField curvature_direct(const OmnField& U, const OmnField& V, const OmnField& W) const {
    const OmnField br = nabla(U, V) - nabla(V, U);
    return nabla(U, nabla(V, W)) - nabla(V, nabla(U, W)) - nabla(br, W);
  }

  // ---- sectional curvature ---------------------------------------------------

  /// κ̃(X,Y) − ¾‖R′(X,Y)‖² on a g̃-orthonormalized pair.
  double sectional_horizontal(const VecJ& X, const VecJ& Y) const {
    auto [a, b] = tilde_orthonormal_pair(X, Y);
    const MatJ Rp = ops_.curvature_prime(a, b);
    return ops_.tilde_sectional(a, b) - 0.75 * skew_inner(Rp, Rp).value();
  }
  /// ¼ g̃(Q_T X, Q_T X) for unit X (g̃) and unit T.
  double sectional_mixed(const VecJ& X, const MatJ& T) const {
    auto [x, t] = unit_pair(X, T);
    const VecJ q = ops_.Q(t, x);
    return 0.25 * ops_.modified_metric(q, q).value();
  }
  /// |Q_T²(X)|²_g̃, the form in which the mixed case is stated.
  double sectional_mixed_as_stated(const VecJ& X, const MatJ& T) const {
    auto [x, t] = unit_pair(X, T);
    const VecJ q = ops_.Q(t, ops_.Q(t, x));
    return ops_.modified_metric(q, q).value();
  }
  /// ⅛‖[T,T′]‖² on an orthonormalized pair.
  double sectional_vertical(const MatJ& T, const MatJ& Tp) const {
    auto [a, b] = skew_orthonormal_pair(T, Tp);
    const MatJ c = commutator(a, b);
    return 0.125 * skew_inner(c, c).value();
  }
  /// g_SM(R(U,V)V, U) / (|U|²|V|² − g_SM(U,V)²) from the curvature tensor.
  double sectional_tensor(const OmnField& U, const OmnField& V) const {
    const Lifted u = lift(U), v = lift(V);
    const double num = sasaki_mok(lift(curvature(U, V, V)), u).value();
    const double uu = sasaki_mok(u, u).value(), vv = sasaki_mok(v, v).value(), uv = sasaki_mok(u, v).value();
    return num / (uu * vv - uv * uv);
  }

  // ---- second fundamental form --------------------------------------------

  Lifted second_fundamental_hh(const VecJ& X, const VecJ& Y) const {
    const VecJ U = ops_.R_T(L_.S(X), Y) + ops_.R_T(L_.S(Y), X);
    const VecJ V = L_.nabla_prime(X, Y) + L_.nabla_prime(Y, X) + L_.tangent_part(U);
    const MatJ K = L_.nabla_prime_endo(X, L_.S(Y)) + L_.nabla_prime_endo(Y, L_.S(X));
    const VecJ W = ops_.P_inverse(V);
    const VecJ SK = ops_.S_Tm(K);
    const VecJ WK = ops_.P_inverse(SK);
    Lifted r;
    r.h = L_.second_fundamental_form(X, Y) + 0.5 * L_.normal_part(U) - sum_S2(W) + 0.5 * SK + sum_S2(WK);
    r.v = -0.5 * L_.S(W) + 0.5 * K + 0.5 * L_.S(WK);
    return r;
  }

  /// Π(X^{h′}, T̄) for T ∈ 𝔥, with K = (∇_X T)_𝔪:
  /// ½((R_T X)^⊥)^h − ½S̄_{P⁻¹(R_T X)^⊤} − (ΣS²P⁻¹(R_T X)^⊤)^h + ½K̄ + ½(S_K)^h + ½S̄_{P⁻¹S_K} + (ΣS²P⁻¹S_K)^h.
  Lifted second_fundamental_hv(const VecJ& X, const MatJ& T) const {
    const VecJ U = ops_.R_T(T, X);
    const MatJ K = L_.m_part(L_.nabla_endo(X, T));
    const VecJ W = ops_.P_inverse(L_.tangent_part(U));
    const VecJ SK = ops_.S_Tm(K);
    const VecJ WK = ops_.P_inverse(SK);
    Lifted r;
    r.h = 0.5 * L_.normal_part(U) - sum_S2(W) + 0.5 * SK + sum_S2(WK);
    r.v = -0.5 * L_.S(W) + 0.5 * K + 0.5 * L_.S(WK);
    return r;
  }
  /// The same term by term as printed: weight 1 on ((R_T X)^⊥)^h and no (S_K)^h term.
  Lifted second_fundamental_hv_as_printed(const VecJ& X, const MatJ& T) const {
    Lifted r = second_fundamental_hv(X, T);
    const VecJ U = ops_.R_T(T, X);
    const MatJ K = L_.m_part(L_.nabla_endo(X, T));
    r.h = r.h + 0.5 * L_.normal_part(U) - 0.5 * ops_.S_Tm(K);
    return r;
  }

  Lifted second_fundamental(const OmnField& U, const OmnField& V) const {
    return second_fundamental_hh(U.X, V.X) + second_fundamental_hv(U.X, V.T) + second_fundamental_hv(V.X, U.T);
  }

  /// g_SM(Π(X^{h′},Y^{h′}), Z^h) = g(Π(X,Y) + ½(R_{S_X}Y + R_{S_Y}X)^⊥, Z).
  Jet pairing_normal(const VecJ& X, const VecJ& Y, const VecJ& Z) const {
    const VecJ U = ops_.R_T(L_.S(X), Y) + ops_.R_T(L_.S(Y), X);
    return dot(L_.second_fundamental_form(X, Y) + 0.5 * L_.normal_part(U), Z);
  }
  /// g_SM(Π(X^{h′},Y^{h′}), T̃) = ½⟨K − S_V, T⟩ for T ∈ 𝔪.
  Jet pairing_tilde(const VecJ& X, const VecJ& Y, const MatJ& T) const {
    const VecJ U = ops_.R_T(L_.S(X), Y) + ops_.R_T(L_.S(Y), X);
    const VecJ V = L_.nabla_prime(X, Y) + L_.nabla_prime(Y, X) + L_.tangent_part(U);
    const MatJ K = L_.nabla_prime_endo(X, L_.S(Y)) + L_.nabla_prime_endo(Y, L_.S(X));
    return 0.5 * skew_inner(K - L_.S(V), T);
  }

  MeanCurvature mean_curvature() const {
    MeanCurvature m;
    m.H = Lifted::zero(N_);
    for (const auto& e : ops_.tilde_orthonormal_frame()) m.H += second_fundamental_hh(e, e);
    auto [Z, T] = B_.normal_coordinates(m.H);
    m.Z = values(Z);
    m.T = values(T);
    m.norm = std::sqrt(std::max(0.0, sasaki_mok(m.H, m.H).value()));
    return m;
  }

  /// Constant-coefficient tangent generators e_A^{h′}, T̄_{ij} (T_{ij} ∈ 𝔥).
  std::vector<OmnField> tangent_basis() const {
    std::vector<OmnField> g;
    for (int A = 0; A < L_.p(); ++A) g.push_back(horizontal(L_.basis(A)));
    for (int i = 0; i < N_; ++i)
      for (int j = i + 1; j < N_; ++j)
        if (L_.is_tangent_index(i) == L_.is_tangent_index(j)) g.push_back(vertical(skew_basis(N_, i, j)));
    return g;
  }

 private:
  VecJ sum_S2(const VecJ& W) const {
    VecJ r(N_, Jet(0.0));
    for (int A = 0; A < L_.p(); ++A) r = r + ops_.S_e(A) * (ops_.S_e(A) * W);
    return r;
  }

  std::pair<VecJ, VecJ> tilde_orthonormal_pair(const VecJ& X, const VecJ& Y) const {
    VecJ a = fb::lift(values(X)), b = fb::lift(values(Y));
    const double na = std::sqrt(ops_.modified_metric(a, a).value());
    a = (1.0 / na) * a;
    b = b - scaled(a, Jet(ops_.modified_metric(a, b).value()));
    const double nb = std::sqrt(ops_.modified_metric(b, b).value());
    if (!(nb > 1e-12 * na)) throw GeometryError("degenerate plane");
    return {a, (1.0 / nb) * b};
  }
  std::pair<VecJ, MatJ> unit_pair(const VecJ& X, const MatJ& T) const {
    VecJ x = fb::lift(values(X));
    MatJ t = fb::lift(values(T));
    x = (1.0 / std::sqrt(ops_.modified_metric(x, x).value())) * x;
    t *= 1.0 / std::sqrt(skew_inner(t, t).value());
    return {x, t};
  }
  std::pair<MatJ, MatJ> skew_orthonormal_pair(const MatJ& T, const MatJ& Tp) const {
    MatJ a = fb::lift(values(T)), b = fb::lift(values(Tp));
    a *= 1.0 / std::sqrt(skew_inner(a, a).value());
    b -= skew_inner(a, b).value() * a;
    const double nb = std::sqrt(skew_inner(b, b).value());
    if (!(nb > 1e-12)) throw GeometryError("degenerate plane");
    b *= 1.0 / nb;
    return {a, b};
  }

  const FrameBundle& B_;
  const Operators& ops_;
  const LocalGeometry& L_;
  int N_;
};

// ---- sampled verdicts ---------------------------------------------------------

struct MinimalityVerdict {
  bool minimal = false;
  double max_residual = 0.0;
  std::vector<double> residuals;
};

inline MinimalityVerdict is_minimal(const ImmersedSubmanifold& M, int samples, double tol, std::uint64_t seed = 1,
                                    int order = 3) {
  MinimalityVerdict v;
  for (const auto& u : sample_points(M.domain(), samples, seed, "minimality")) {
    LocalGeometry L(M, u, order);
    Operators ops(L);
    FrameBundle B(ops);
    OmnGeometry G(B);
    const double r = G.mean_curvature().norm;
    v.residuals.push_back(r);
    v.max_residual = std::max(v.max_residual, r);
  }
  v.minimal = v.max_residual < tol;
  return v;
}

struct TotallyGeodesicVerdict {
  bool totally_geodesic = false;     // Π^{O(M,N)} = 0 at every sample
  bool m_totally_geodesic = false;   // Π = 0 at every sample
  bool curvature_condition = false;  // (R(U,V)W)^⊤ = 0 for normal U,V,W
  double max_pi_omn = 0.0, max_pi = 0.0, max_condition = 0.0;
};

inline TotallyGeodesicVerdict is_totally_geodesic(const ImmersedSubmanifold& M, int samples, double tol,
                                                  std::uint64_t seed = 1, int order = 3) {
  TotallyGeodesicVerdict v;
  for (const auto& u : sample_points(M.domain(), samples, seed, "totally-geodesic")) {
    LocalGeometry L(M, u, order);
    Operators ops(L);
    FrameBundle B(ops);
    OmnGeometry G(B);
    const auto gens = G.tangent_basis();
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i; j < gens.size(); ++j)
        v.max_pi_omn = std::max(v.max_pi_omn, max_abs(G.second_fundamental(gens[i], gens[j])));
    for (int A = 0; A < L.p(); ++A)
      for (int Bi = 0; Bi < L.p(); ++Bi)
        v.max_pi = std::max(v.max_pi, norm2(L.second_fundamental_form(L.basis(A), L.basis(Bi))));
    for (int a = L.p(); a < L.dim(); ++a)
      for (int b = L.p(); b < L.dim(); ++b)
        for (int c = L.p(); c < L.dim(); ++c)
          v.max_condition =
              std::max(v.max_condition, norm2(L.tangent_part(L.curvature(L.basis(a), L.basis(b)) * L.basis(c))));
  }
  v.totally_geodesic = v.max_pi_omn < tol;
  v.m_totally_geodesic = v.max_pi < tol;
  v.curvature_condition = v.max_condition < tol;
  return v;
}

}  // namespace fb
