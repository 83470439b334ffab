#include <gtest/gtest.h>

#include "framebundle/omn_geometry.hpp"
#include "test_support.hpp"

using namespace fb;
using namespace fbt;

namespace {

struct Geo {
  ImmersedSubmanifold M;
  LocalGeometry L;
  Operators ops;
  FrameBundle B;
  OmnGeometry G;
  Geo(const ImmersedSubmanifold& m, const VecD& u, int order = 3) : M(m), L(M, u, order), ops(L), B(ops), G(B) {}
};

OmnField random_field(const Geo& g, std::mt19937_64& rng) {
  return {tangent_field(g.L, random_seed(rng, 3)), g.L.h_part(endo_field(g.L, random_seed(rng, 6)))};
}

double max_abs(const OmnField& f) { return std::max(fbt::max_abs(f.X), fbt::max_abs(f.T)); }

}  // namespace

TEST(NablaOMN, TangentPartOfAmbientConnection) {
  std::mt19937_64 rng(1);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 6; ++k) {
      Geo g(M, random_point(M, rng));
      OmnField d = random_field(g, rng), F = random_field(g, rng);
      Lifted full = g.B.nabla(g.G.lift(d), g.G.lift(F));
      auto split = g.B.decompose(full);
      EXPECT_LT(fb::max_abs(g.G.lift(g.G.nabla(d, F)) - split.tangent), 1e-6) << name;
      EXPECT_LT(fb::max_abs(g.G.second_fundamental(d, F) - split.normal), 1e-6) << name;
    }
  }
}

TEST(NablaOMN, ClosedFormOnHorizontalPrimeLifts) {
  std::mt19937_64 rng(2);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    Geo g(M, random_point(M, rng));
    VecJ X = tangent_field(g.L, random_seed(rng, 3)), Y = tangent_field(g.L, random_seed(rng, 3));
    Lifted direct = g.B.nabla(g.B.horizontal_lift_prime(X), g.B.horizontal_lift_prime(Y));
    EXPECT_LT(fb::max_abs(g.G.nabla_ON_hprime(X, Y) - direct), 1e-8) << name;
  }
}

TEST(NablaOMN, Examples) {
  std::mt19937_64 rng(3);
  {
    Geo g(builtin_submanifold("plane"), {0.2, -0.1});
    VecJ X = tangent_field(g.L, random_seed(rng, 3)), Y = tangent_field(g.L, random_seed(rng, 3));
    EXPECT_LT(fb::max_abs(g.G.nabla_hh(X, Y) - g.B.horizontal_lift_prime(g.L.nabla(X, Y))), 1e-14);
  }
  {
    Geo g(builtin_submanifold("great3"), {0.1, 0.3, -0.2});
    MatJ T = skew_basis(4, 0, 1), Tp = skew_basis(4, 0, 2);
    Lifted r = g.G.nabla_vv(T, Tp);
    EXPECT_LT(fbt::max_abs(r.v - 0.5 * commutator(Tp, T)), 1e-15);
    EXPECT_EQ(fbt::max_abs(r.h), 0.0);
  }
}

TEST(SecondFundamentalOMN, PropertiesAndAsPrintedDifference) {
  std::mt19937_64 rng(4);
  double printed_gap = 0.0;
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 4; ++k) {
      Geo g(M, random_point(M, rng));
      OmnField U = random_field(g, rng), V = random_field(g, rng);
      Lifted p = g.G.second_fundamental(U, V);
      EXPECT_LT(fb::max_abs(p - g.G.second_fundamental(V, U)), 1e-8) << name;
      for (const auto& t : g.B.tangent_generators()) EXPECT_NEAR(sasaki_mok(p, t).value(), 0.0, 1e-8) << name;
      EXPECT_EQ(fb::max_abs(g.G.second_fundamental(g.G.vertical(U.T), g.G.vertical(V.T))), 0.0);
      printed_gap = std::max(printed_gap, fb::max_abs(g.G.second_fundamental_hv_as_printed(U.X, V.T) -
                                                       g.G.second_fundamental_hv(U.X, V.T)));
      // pairings with the normal generators
      for (int al = g.L.p(); al < g.L.dim(); ++al) {
        VecJ Z = g.L.basis(al);
        EXPECT_NEAR(sasaki_mok(g.G.second_fundamental_hh(U.X, V.X), g.B.horizontal_lift(Z)).value(),
                    g.G.pairing_normal(U.X, V.X, Z).value(), 1e-8)
            << name;
        for (int A = 0; A < g.L.p(); ++A) {
          MatJ T = skew_basis(g.L.dim(), A, al);
          EXPECT_NEAR(sasaki_mok(g.G.second_fundamental_hh(U.X, V.X), g.B.normal_tilde(T)).value(),
                      g.G.pairing_tilde(U.X, V.X, T).value(), 1e-8)
              << name;
        }
      }
    }
  }
  EXPECT_GT(printed_gap, 1e-3);
}

TEST(SecondFundamentalOMN, Sphere2MeanCurvature) {
  Geo g(builtin_submanifold("sphere2"), {1.3, 0.4});
  auto H = g.G.mean_curvature();
  EXPECT_NEAR(H.Z[2], -2.0 / 3.0, 1e-9);
  EXPECT_NEAR(sasaki_mok(H.H, g.B.horizontal_lift(g.L.basis(2))).value(), -2.0 / 3.0, 1e-9);
  EXPECT_GT(H.norm, 0.5);
  Geo pl(builtin_submanifold("plane"), {0.3, 0.3});
  EXPECT_LT(pl.G.mean_curvature().norm, 1e-14);
}

TEST(CurvatureOMN, ClosedFormMatchesIteratedConnection) {
  std::mt19937_64 rng(5);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 3; ++k) {
      Geo g(M, random_point(M, rng), 4);
      OmnField U = random_field(g, rng), V = random_field(g, rng), W = random_field(g, rng);
      OmnField a = g.G.curvature(U, V, W), b = g.G.curvature_direct(U, V, W);
      EXPECT_LT(max_abs(a - b), 1e-6) << name;
      EXPECT_LT(max_abs(a + g.G.curvature(V, U, W)), 1e-6) << name;
    }
  }
}

TEST(CurvatureOMN, PureVerticalAndPlane) {
  Geo g(builtin_submanifold("great3"), {0.2, 0.1, 0.0});
  MatJ T = skew_basis(4, 0, 1), Tp = skew_basis(4, 0, 2), Tpp = skew_basis(4, 1, 2);
  OmnField r = g.G.curvature_vvv(T, Tp, Tpp);
  EXPECT_EQ(fbt::max_abs(r.T + 0.25 * commutator(commutator(T, Tp), Tpp)), 0.0);
  std::mt19937_64 rng(6);
  Geo pl(builtin_submanifold("plane"), {0.3, -0.4}, 4);
  OmnField X = pl.G.horizontal(tangent_field(pl.L, random_seed(rng, 3)));
  OmnField Y = pl.G.horizontal(tangent_field(pl.L, random_seed(rng, 3)));
  OmnField V = pl.G.vertical(skew_basis(3, 0, 1));
  EXPECT_LT(max_abs(pl.G.curvature(X, Y, X)), 1e-14);
  EXPECT_LT(max_abs(pl.G.curvature(X, V, Y)), 1e-14);
  EXPECT_LT(max_abs(pl.G.curvature(X, Y, V)), 1e-14);
}

TEST(SectionalOMN, FormulasAgainstCurvatureTensor) {
  std::mt19937_64 rng(7);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 3; ++k) {
      Geo g(M, random_point(M, rng));
      const int N = g.L.dim(), p = g.L.p();
      VecJ X = random_vec(rng, N, 0, p), Y = random_vec(rng, N, 0, p);
      MatJ T = g.L.h_part(random_skew(rng, N));
      if (p >= 2) {
        EXPECT_NEAR(g.G.sectional_horizontal(X, Y), g.G.sectional_tensor(g.G.horizontal(X), g.G.horizontal(Y)), 1e-6)
            << name;
      }
      if (skew_inner(T, T).value() > 1e-6) {
        const double m = g.G.sectional_mixed(X, T);
        EXPECT_NEAR(m, g.G.sectional_tensor(g.G.horizontal(X), g.G.vertical(T)), 1e-6) << name;
        EXPECT_GE(m, 0.0);
      }
    }
  }
}

TEST(SectionalOMN, VerticalValueAndTensorRoute) {
  Geo g(builtin_submanifold("great3"), {0.0, 0.1, 0.2});
  MatJ T = skew_basis(4, 0, 1), Tp = skew_basis(4, 0, 2);
  EXPECT_NEAR(g.G.sectional_vertical(T, Tp), 1.0 / 16.0, 1e-10);
  // the curvature tensor gives twice the stated vertical value
  EXPECT_NEAR(g.G.sectional_tensor(g.G.vertical(T), g.G.vertical(Tp)), 1.0 / 8.0, 1e-12);
}

TEST(SectionalOMN, GreatSphereValues) {
  for (double kappa : {0.1, 0.5, 2.0 / 3.0}) {
    auto M = builtin_submanifold("great2", kappa);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 10; ++k) {
      Geo g(M, random_point(M, rng));
      VecJ X = random_vec(rng, 3, 0, 2), Y = random_vec(rng, 3, 0, 2);
      const double h = g.G.sectional_horizontal(X, Y);
      EXPECT_NEAR(h, kappa - 1.5 * kappa * kappa, 1e-7);
      EXPECT_GE(h, -1e-9);
      EXPECT_GE(g.G.sectional_mixed(X, skew_basis(3, 0, 1)), -1e-12);
    }
  }
  auto M = builtin_submanifold("great2", 0.5);
  Geo g(M, {0.2, -0.3});
  EXPECT_NEAR(g.G.sectional_horizontal(g.L.basis(0), g.L.basis(1)), 0.125, 1e-6);
}

TEST(Verdicts, MinimalityAndTotallyGeodesic) {
  EXPECT_TRUE(is_minimal(builtin_submanifold("plane"), 10, 1e-6).minimal);
  auto s = is_minimal(builtin_submanifold("sphere2"), 10, 1e-6);
  EXPECT_FALSE(s.minimal);
  EXPECT_GT(s.max_residual, 2.0 / 3.0 - 1e-6);
  EXPECT_TRUE(is_totally_geodesic(builtin_submanifold("plane"), 5, 1e-8).totally_geodesic);
  auto gr = is_totally_geodesic(builtin_submanifold("great2"), 5, 1e-8);
  EXPECT_TRUE(gr.totally_geodesic);
  EXPECT_TRUE(gr.m_totally_geodesic);
  EXPECT_TRUE(gr.curvature_condition);
  auto sp = is_totally_geodesic(builtin_submanifold("sphere2"), 5, 1e-8);
  EXPECT_FALSE(sp.totally_geodesic);
  EXPECT_FALSE(sp.m_totally_geodesic);
}
