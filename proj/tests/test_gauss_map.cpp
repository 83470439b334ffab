#include <gtest/gtest.h>

#include <cmath>

#include "framebundle/gauss_map.hpp"
#include "test_support.hpp"

using namespace fb;
using namespace fbt;

namespace {

struct Geo {
  ImmersedSubmanifold M;
  LocalGeometry L;
  Operators ops;
  FrameBundle B;
  GaussMap g;
  Geo(const ImmersedSubmanifold& m, const VecD& u, int order = 3) : M(m), L(M, u, order), ops(L), B(ops), g(ops) {}
};

// γ = μ ∘ σ with σ the adapted section and μ : O(N) → Gr a Riemannian submersion
// whose horizontal space contains every X^{h′}; so τ(γ) = μ_* τ(σ), and μ_* keeps
// the horizontal part and the 𝔪-part of the vertical one.
GrassmannVector tension_through_frame_bundle(const Geo& s, const std::vector<VecJ>& frame) {
  Lifted t = Lifted::zero(s.L.dim());
  for (const auto& e : frame) {
    const Lifted le = s.B.horizontal_lift_prime(e);
    t += s.B.nabla(le, le) - s.B.horizontal_lift_prime(s.ops.tilde_nabla(e, e));
  }
  return {t.h, s.L.m_part(t.v)};
}

std::vector<VecJ> rotated(const std::vector<VecJ>& f, const Eigen::MatrixXd& R) {
  std::vector<VecJ> out;
  for (int a = 0; a < R.rows(); ++a) {
    VecJ v(f[0].size(), Jet(0.0));
    for (int b = 0; b < R.cols(); ++b) v = v + R(a, b) * f[b];
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(GrassmannConnection, Examples) {
  std::mt19937_64 rng(1);
  {
    Geo s(builtin_submanifold("plane"), {0.1, 0.2});
    VecJ X = random_vec(rng, 3, 0, 2), Y = random_vec(rng, 3, 0, 3);
    auto r = s.g.nabla_hh(X, Y);
    EXPECT_LT(fbt::max_abs(r.h), 1e-15);
    EXPECT_LT(fbt::max_abs(r.v), 1e-15);
  }
  {
    Geo s(builtin_submanifold("great3"), {0.1, -0.2, 0.3});
    auto r = s.g.nabla_vv(skew_basis(4, 0, 3), skew_basis(4, 1, 3));
    EXPECT_EQ(max_abs(r), 0.0);
  }
  for (double kappa : {0.5, 2.0 / 3.0}) {
    auto M = builtin_submanifold("great2", kappa);
    for (int k = 0; k < 5; ++k) {
      Geo s(M, random_point(M, rng));
      VecJ X = random_vec(rng, 3, 0, 2);
      MatJ T = s.L.m_part(random_skew(rng, 3));
      auto r = s.g.nabla_vh(T, X);
      EXPECT_LT(fbt::max_abs(r.h - (-kappa) * (T * X)), 1e-7);
      EXPECT_LT(fbt::max_abs(s.g.nabla_hv(X, T).h - r.h), 1e-15);
    }
  }
}

TEST(GrassmannConnection, GenericMatchesFrameBundleProjection) {
  std::mt19937_64 rng(2);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 4; ++k) {
      Geo s(M, random_point(M, rng));
      VecJ X = random_vec(rng, s.L.dim(), 0, s.L.p());
      VecJ Y = tangent_field(s.L, random_seed(rng, 3));
      MatJ T = s.L.m_part(endo_field(s.L, random_seed(rng, 6)));
      // fields X^{h′} + T̄ upstairs project to X^{h,Gr} + T̂
      GrassmannVector d = s.g.pushforward(X), F{Y, T};
      Lifted up = s.B.nabla(s.B.horizontal_lift_prime(X), Lifted{Y, T});
      GrassmannVector a = s.g.nabla(d, F);
      EXPECT_LT(fbt::max_abs(a.h - up.h), 1e-9) << name;
      EXPECT_LT(fbt::max_abs(a.v - s.L.m_part(up.v)), 1e-9) << name;
    }
  }
}

TEST(Pushforward, ExamplesAndNorm) {
  {
    Geo s(builtin_submanifold("plane"), {0.1, 0.2});
    auto r = s.g.pushforward(s.L.basis(1));
    EXPECT_EQ(fbt::max_abs(r.v), 0.0);
  }
  {
    Geo s(builtin_submanifold("circle"), {0.7});
    auto r = s.g.pushforward(s.L.basis(0));
    EXPECT_LT(fbt::max_abs(r.v - s.L.S(s.L.basis(0))), 1e-15);
    EXPECT_EQ(fbt::max_abs(s.L.h_part(r.v)), 0.0);
    EXPECT_GT(fbt::max_abs(r.v), 0.5);
  }
  std::mt19937_64 rng(3);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      Geo s(M, random_point(M, rng), 2);
      VecJ X = random_vec(rng, s.L.dim(), 0, s.L.p());
      auto v = s.g.pushforward(X);
      EXPECT_NEAR(grassmann_metric(v, v).value(), s.ops.modified_metric(X, X).value(), 1e-9) << name;
    }
  }
}

TEST(TensionField, ThreeRoutesAgree) {
  std::mt19937_64 rng(4);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      Geo s(M, random_point(M, rng));
      auto frame = s.ops.tilde_orthonormal_frame();
      auto a = s.g.tension_field(frame);
      auto b = s.g.tension_field_via_connection(frame);
      auto c = tension_through_frame_bundle(s, frame);
      EXPECT_LT(max_abs(a - b), 1e-6) << name;
      EXPECT_LT(max_abs(a - c), 1e-6) << name;
    }
  }
}

TEST(TensionField, FrameRotationInvariance) {
  std::mt19937_64 rng(5);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    Geo s(M, random_point(M, rng));
    const int p = s.L.p();
    auto frame = s.ops.tilde_orthonormal_frame();
    for (int k = 0; k < 3; ++k) {
      Eigen::MatrixXd A(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) A(i, j) = std::uniform_real_distribution<double>(-1, 1)(rng);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
      Eigen::MatrixXd R = qr.householderQ();
      EXPECT_LT(max_abs(s.g.tension_field(rotated(frame, R)) - s.g.tension_field(frame)), 1e-8) << name;
    }
  }
}

TEST(TensionField, ExamplesAndOrthogonalSplit) {
  {
    Geo s(builtin_submanifold("plane"), {0.3, -0.2});
    EXPECT_LT(max_abs(s.g.tension_field()), 1e-14);
    auto r = s.g.residuals();
    EXPECT_LT(r.max_H(), 1e-14);
    EXPECT_LT(r.r_M2, 1e-14);
  }
  {
    Geo s(builtin_submanifold("sphere2"), {0.9, 1.1});
    auto r = s.g.residuals();
    EXPECT_NEAR(r.r_H1, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.H1[2], -2.0 / 3.0, 1e-9);
    EXPECT_NEAR(norm2(s.L.tangent_part(fb::lift(values(s.g.tension_field().h)))), r.r_H2, 1e-9);
  }
  std::mt19937_64 rng(6);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 4; ++k) {
      Geo s(M, random_point(M, rng));
      auto r = s.g.residuals();
      auto t = s.g.tension_field();
      const double n2 = grassmann_metric(t, t).value();
      EXPECT_NEAR(r.r_H1 * r.r_H1 + r.r_H2 * r.r_H2 + r.r_H3 * r.r_H3, n2, 1e-8) << name;
    }
  }
}

TEST(Conditions, MinimalityPairingsAndAlgebra) {
  std::mt19937_64 rng(7);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 4; ++k) {
      Geo s(M, random_point(M, rng));
      auto r = s.g.residuals();
      EXPECT_EQ(r.r_M1(), r.r_H1);
      OmnGeometry G(s.B);
      auto H = G.mean_curvature();
      // Z-coordinates of H^{O(M,N)} are the (M1) vector, T̃-pairings give (M2)
      EXPECT_LT(norm2(H.Z - r.H1), 1e-8) << name;
      for (int A = 0; A < s.L.p(); ++A)
        for (int al = s.L.p(); al < s.L.dim(); ++al) {
          MatJ T = skew_basis(s.L.dim(), A, al);
          EXPECT_NEAR(sasaki_mok(H.H, s.B.normal_tilde(T)).value(), skew_inner(r.M2, values(T)), 1e-8) << name;
        }
      EXPECT_LT(s.g.split_identity_residual(r), 1e-8) << name;
      EXPECT_LT(s.g.pairing_identity_residual(r), 1e-8) << name;
    }
  }
}

TEST(Theorem, VerdictsAgreeOnBuiltins) {
  const double tol = 1e-6;
  auto pl = theorem_check(builtin_submanifold("plane"), 10, tol);
  EXPECT_TRUE(pl.minimal && pl.harmonic && pl.agree && pl.separated);
  auto sp = theorem_check(builtin_submanifold("sphere2"), 10, tol);
  EXPECT_FALSE(sp.minimal);
  EXPECT_FALSE(sp.harmonic);
  EXPECT_NEAR(sp.max_r_H1, 2.0 / 3.0, 1e-6);
  EXPECT_GT(sp.max_mean_curvature, 0.5);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    auto t = theorem_check(M, 10, tol);
    EXPECT_TRUE(t.agree) << name;
    EXPECT_TRUE(t.separated) << name << " H=" << t.max_mean_curvature << " harmonic=" << t.max_harmonic();
    EXPECT_TRUE(t.m1_is_h1) << name;
    EXPECT_LT(t.max_split_identity, 1e-8) << name;
    EXPECT_LT(t.max_pairing_identity, 1e-8) << name;
    EXPECT_EQ(is_minimal(M, 10, tol).minimal, is_harmonic(M, 10, tol).harmonic) << name;
  }
}
