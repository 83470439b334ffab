// SPDX-License-Identifier: Apache-2.0
#pragma once

// The Gauss map γ : (M, g̃) → Gr_p(N). Tangent vectors of the Grassmann bundle
// at γ(x) are written in an adapted frame as X^{h,Gr} + T̂ with T̂ ∈ 𝔪.

#include <cstdint>

#include "framebundle/omn_geometry.hpp"

namespace fb {

struct GrassmannVector {
  VecJ h;
  MatJ v;
  GrassmannVector& operator+=(const GrassmannVector& o) {
    h = h + o.h;
    v += o.v;
    return *this;
  }
  GrassmannVector& operator-=(const GrassmannVector& o) {
    h = h - o.h;
    v -= o.v;
    return *this;
  }
  friend GrassmannVector operator+(GrassmannVector a, const GrassmannVector& b) { return a += b; }
  friend GrassmannVector operator-(GrassmannVector a, const GrassmannVector& b) { return a -= b; }
  friend GrassmannVector operator*(double s, GrassmannVector a) {
    a.h = s * a.h;
    a.v *= s;
    return a;
  }
};

inline Jet grassmann_metric(const GrassmannVector& a, const GrassmannVector& b) {
  return dot(a.h, b.h) + skew_inner(a.v, b.v);
}

inline double max_abs(const GrassmannVector& g) {
  double m = 0.0;
  for (const auto& x : g.h) m = std::max(m, std::abs(x.value()));
  for (int i = 0; i < g.v.rows(); ++i)
    for (int j = 0; j < g.v.cols(); ++j) m = std::max(m, std::abs(g.v(i, j).value()));
  return m;
}

struct HarmonicityResiduals {
  VecD H1, H2;  // normal and tangent vectors
  MatD H3, M2;  // 𝔪-valued
  double r_H1 = 0, r_H2 = 0, r_H3 = 0, r_M2 = 0;
  double r_M1() const { return r_H1; }
  double max_H() const { return std::max({r_H1, r_H2, r_H3}); }
  double max_M() const { return std::max(r_M1(), r_M2); }
};

class GaussMap {
 public:
  explicit GaussMap(const Operators& ops) : ops_(ops), L_(ops.geometry()), N_(L_.dim()) {}

  const Operators& operators() const noexcept { return ops_; }

  GrassmannVector horizontal(const VecJ& X) const { return {X, MatJ(N_, N_)}; }
  GrassmannVector hat(const MatJ& T) const { return {L_.zero(), L_.m_part(T)}; }

  /// γ_*X = X^{h,Gr} + Ŝ_X.
  GrassmannVector pushforward(const VecJ& X) const { return {X, L_.S(X)}; }

  // ---- Levi-Civita connection of Gr_p(N) along γ ------------------------------

  GrassmannVector nabla_hh(const VecJ& X, const VecJ& Y) const {
    return {L_.nabla(X, Y), -0.5 * L_.m_part(L_.curvature(X, Y))};
  }
  GrassmannVector nabla_hv(const VecJ& X, const MatJ& T) const {
    const MatJ Tm = L_.m_part(T);
    return {0.5 * ops_.R_T(Tm, X), L_.m_part(L_.nabla_prime_endo(X, Tm))};
  }
  GrassmannVector nabla_vh(const MatJ& T, const VecJ& Y) const {
    return {0.5 * ops_.R_T(L_.m_part(T), Y), MatJ(N_, N_)};
  }
  GrassmannVector nabla_vv(const MatJ&, const MatJ&) const { return {L_.zero(), MatJ(N_, N_)}; }

  /// ∇^{Gr}_d F for a direction d = x^{h,Gr} + â (x tangent to M) and a field
  /// F = Y^{h,Gr} + T̂ along M.
  GrassmannVector nabla(const GrassmannVector& d, const GrassmannVector& F) const {
    if (norm2(L_.normal_part(d.h)) > 1e-12) throw std::invalid_argument("direction must be tangent to M");
    return nabla_hh(d.h, F.h) + nabla_hv(d.h, F.v) + nabla_vh(d.v, F.h) + nabla_vv(d.v, F.v);
  }

  // ---- tension field -------------------------------------------------------------

  GrassmannVector tension_field() const { return tension_field(ops_.tilde_orthonormal_frame()); }

  /// Closed form over a given g̃-orthonormal frame field.
  GrassmannVector tension_field(const std::vector<VecJ>& frame) const {
    GrassmannVector t{L_.zero(), MatJ(N_, N_)};
    for (const auto& e : frame) {
      const VecJ te = ops_.tilde_nabla(e, e);
      const MatJ Se = L_.S(e);
      t.h = t.h + L_.nabla(e, e) - te + ops_.R_T(Se, e);
      t.v += L_.nabla_prime_endo(e, Se) - L_.S(te);
    }
    return t;
  }

  /// Σ_A ∇^γ_{ẽ_A} γ_*ẽ_A − γ_*(∇̃_{ẽ_A} ẽ_A) through the connection.
  GrassmannVector tension_field_via_connection(const std::vector<VecJ>& frame) const {
    GrassmannVector t{L_.zero(), MatJ(N_, N_)};
    for (const auto& e : frame) t += nabla(pushforward(e), pushforward(e)) - pushforward(ops_.tilde_nabla(e, e));
    return t;
  }
  GrassmannVector tension_field_via_connection() const {
    return tension_field_via_connection(ops_.tilde_orthonormal_frame());
  }

  // ---- (H1)–(H3), (M1)–(M2) ------------------------------------------------------

  HarmonicityResiduals residuals() const {
    HarmonicityResiduals r;
    VecJ h1 = L_.zero(), h2 = L_.zero(), rt = L_.zero();
    MatJ h3(N_, N_), nps(N_, N_);
    for (const auto& e : ops_.tilde_orthonormal_frame()) {
      const VecJ Re = ops_.R_T(L_.S(e), e);
      const VecJ np = L_.nabla_prime(e, e);
      const VecJ te = ops_.tilde_nabla(e, e);
      const MatJ dS = L_.nabla_prime_endo(e, L_.S(e));
      h1 = h1 + L_.second_fundamental_form(e, e) + L_.normal_part(Re);
      h2 = h2 + np - te + L_.tangent_part(Re);
      rt = rt + L_.tangent_part(Re);
      h3 += dS - L_.S(te);
      nps += dS - L_.S(np);
    }
    const MatJ m2 = nps - L_.S(rt);
    r.H1 = values(h1);
    r.H2 = values(h2);
    r.H3 = values(h3);
    r.M2 = values(m2);
    r.r_H1 = norm2(r.H1);
    r.r_H2 = norm2(r.H2);
    r.r_H3 = std::sqrt(std::max(0.0, skew_inner(r.H3, r.H3)));
    r.r_M2 = std::sqrt(std::max(0.0, skew_inner(r.M2, r.M2)));
    return r;
  }

  /// ‖M2 − (H3 − S_{H2})‖: (H2) ∧ (H3) ⇒ (M2).
  double split_identity_residual(const HarmonicityResiduals& r) const {
    const MatD d = r.M2 - (r.H3 - values(L_.S(lift(r.H2))));
    return std::sqrt(std::max(0.0, skew_inner(d, d)));
  }

  /// max_A |g(H2, P e_A) + ⟨M2, S_{e_A}⟩|: (M1) ∧ (M2) ⇒ (H2) since P > 0.
  double pairing_identity_residual(const HarmonicityResiduals& r) const {
    double m = 0.0;
    const VecJ h2 = lift(r.H2);
    for (int A = 0; A < L_.p(); ++A) {
      const VecJ e = L_.basis(A);
      const double v = dot(h2, ops_.P(e)).value() + skew_inner(r.M2, values(L_.S(e)));
      m = std::max(m, std::abs(v));
    }
    return m;
  }

 private:
  const Operators& ops_;
  const LocalGeometry& L_;
  int N_;
};

// ---- sampled verdicts ---------------------------------------------------------

struct HarmonicityVerdict {
  bool harmonic = false;
  double max_residual = 0.0;
  double max_r_H1 = 0, max_r_H2 = 0, max_r_H3 = 0;
};

inline HarmonicityVerdict is_harmonic(const ImmersedSubmanifold& M, int samples, double tol, std::uint64_t seed = 1,
                                      int order = 3) {
  HarmonicityVerdict v;
  for (const auto& u : sample_points(M.domain(), samples, seed, "harmonicity")) {
    LocalGeometry L(M, u, order);
    Operators ops(L);
    auto r = GaussMap(ops).residuals();
    v.max_r_H1 = std::max(v.max_r_H1, r.r_H1);
    v.max_r_H2 = std::max(v.max_r_H2, r.r_H2);
    v.max_r_H3 = std::max(v.max_r_H3, r.r_H3);
  }
  v.max_residual = std::max({v.max_r_H1, v.max_r_H2, v.max_r_H3});
  v.harmonic = v.max_residual < tol;
  return v;
}

struct TheoremReport {
  bool minimal = false, harmonic = false;
  bool agree = false;      // verdicts coincide
  bool separated = false;  // each branch below tol, or both at least 10³·tol
  bool m1_is_h1 = true;    // r_M1 and r_H1 are the same number at every sample
  double max_mean_curvature = 0.0;
  double max_r_H1 = 0, max_r_H2 = 0, max_r_H3 = 0, max_r_M2 = 0;
  double max_split_identity = 0, max_pairing_identity = 0;
  double max_ratio_H_over_harmonic = 0, max_ratio_harmonic_over_H = 0;
  double max_harmonic() const { return std::max({max_r_H1, max_r_H2, max_r_H3}); }
};

inline constexpr double kSeparationFactor = 1e3;

inline TheoremReport theorem_check(const ImmersedSubmanifold& M, int samples, double tol, std::uint64_t seed = 1,
                                   int order = 3) {
  TheoremReport t;
  for (const auto& u : sample_points(M.domain(), samples, seed, "theorem")) {
    LocalGeometry L(M, u, order);
    Operators ops(L);
    FrameBundle B(ops);
    const double h = OmnGeometry(B).mean_curvature().norm;
    GaussMap g(ops);
    const auto r = g.residuals();
    t.m1_is_h1 = t.m1_is_h1 && r.r_M1() == r.r_H1;
    t.max_mean_curvature = std::max(t.max_mean_curvature, h);
    t.max_r_H1 = std::max(t.max_r_H1, r.r_H1);
    t.max_r_H2 = std::max(t.max_r_H2, r.r_H2);
    t.max_r_H3 = std::max(t.max_r_H3, r.r_H3);
    t.max_r_M2 = std::max(t.max_r_M2, r.r_M2);
    t.max_split_identity = std::max(t.max_split_identity, g.split_identity_residual(r));
    t.max_pairing_identity = std::max(t.max_pairing_identity, g.pairing_identity_residual(r));
    const double rh = r.max_H();
    if (rh > 1e-12) t.max_ratio_H_over_harmonic = std::max(t.max_ratio_H_over_harmonic, h / rh);
    if (h > 1e-12) t.max_ratio_harmonic_over_H = std::max(t.max_ratio_harmonic_over_H, rh / h);
  }
  const double a = t.max_mean_curvature, b = t.max_harmonic();
  t.minimal = a < tol;
  t.harmonic = b < tol;
  t.agree = t.minimal == t.harmonic;
  t.separated = (a < tol && b < tol) || (a >= kSeparationFactor * tol && b >= kSeparationFactor * tol);
  return t;
}

}  // namespace fb
