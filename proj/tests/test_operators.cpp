#include <gtest/gtest.h>

#include <numbers>

#include "framebundle/operators.hpp"
#include "test_support.hpp"

using namespace fb;
using namespace fbt;

namespace {

Jet g_of(const VecJ& a, const VecJ& b) { return dot(a, b); }

}  // namespace

TEST(SkewInner, BasicValues) {
  MatJ t12 = skew_basis(3, 0, 1);
  EXPECT_NEAR(skew_inner(t12, t12).value(), 1.0, 1e-15);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    MatJ a = random_skew(rng, 4), b = random_skew(rng, 4), c = random_skew(rng, 4);
    EXPECT_NEAR(skew_inner(commutator(a, b), c).value(), skew_inner(a, commutator(b, c)).value(), 1e-12);
  }
}

TEST(HmDecompose, SplitsBlocks) {
  auto M = builtin_submanifold("sphere2");
  LocalGeometry L(M, std::vector<double>{1.3, 0.2}, 2);
  Operators ops(L);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    MatJ t = random_skew(rng, 3);
    auto [h, m] = ops.hm_decompose(t);
    EXPECT_EQ(max_abs(h + m - t), 0.0);
    EXPECT_EQ(skew_inner(h, m).value(), 0.0);
    auto [h2, m2] = ops.hm_decompose(m);
    EXPECT_EQ(max_abs(h2), 0.0);
    EXPECT_EQ(max_abs(m2 - m), 0.0);
  }
}

TEST(RT, FlatAmbientVanishes) {
  auto M = builtin_submanifold("catenoid");
  LocalGeometry L(M, std::vector<double>{0.3, 0.1}, 2);
  Operators ops(L);
  std::mt19937_64 rng(7);
  EXPECT_LT(max_abs(ops.R_T(random_skew(rng, 3))), 1e-12);
}

TEST(RT, ConstantCurvatureIsMinusTwoKappaT) {
  for (const char* name : {"great2", "clifford", "great3"}) {
    const double kappa = std::string(name) == "clifford" ? 1.0 : 0.5;
    auto M = builtin_submanifold(name, kappa);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 2);
      Operators ops(L);
      MatJ T = random_skew(rng, L.dim());
      VecJ X = random_vec(rng, L.dim(), 0, L.dim());
      VecJ lhs = ops.R_T(T, X), rhs = -2.0 * kappa * (T * X);
      EXPECT_LT(max_abs(lhs - rhs), 1e-8) << name;
    }
  }
}

TEST(RT, DualityAndFrameIndependence) {
  std::mt19937_64 rng(13);
  for (const char* name : {"great2", "clifford", "great3"}) {
    auto M = builtin_submanifold(name);
    LocalGeometry L(M, random_point(M, rng), 2);
    Operators ops(L);
    const int N = L.dim();
    for (int k = 0; k < 5; ++k) {
      MatJ T = random_skew(rng, N);
      VecJ X = random_vec(rng, N, 0, N), Y = random_vec(rng, N, 0, N);
      EXPECT_NEAR(g_of(ops.R_T(T, X), Y).value(), skew_inner(L.curvature(X, Y), T).value(), 1e-8) << name;

      // Σ_i R(f_i, T f_i) over a block-rotated orthonormal basis f_i.
      Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
      const int p = L.p();
      Eigen::HouseholderQR<Eigen::MatrixXd> q1(Eigen::MatrixXd::Random(p, p)), q2(Eigen::MatrixXd::Random(N - p, N - p));
      Q.topLeftCorner(p, p) = q1.householderQ();
      Q.bottomRightCorner(N - p, N - p) = q2.householderQ();
      MatJ alt(N, N);
      for (int i = 0; i < N; ++i) {
        VecJ f(N);
        for (int a = 0; a < N; ++a) f[a] = Jet(Q(a, i));
        alt += L.curvature(f, T * f);
      }
      EXPECT_LT(max_abs(alt * X - ops.R_T(T, X)), 1e-8) << name;
    }
  }
}

TEST(STm, ValuesAndDuality) {
  {
    auto M = builtin_submanifold("plane");
    LocalGeometry L(M, std::vector<double>{0.1, 0.2}, 2);
    Operators ops(L);
    std::mt19937_64 rng(1);
    EXPECT_LT(max_abs(ops.S_Tm(random_skew(rng, 3))), 1e-15);
  }
  {
    auto M = builtin_submanifold("circle");
    LocalGeometry L(M, std::vector<double>{0.4}, 2);
    Operators ops(L);
    VecJ s = ops.S_Tm(L.S(L.basis(0)));
    EXPECT_NEAR(s[0].value(), -2.0, 1e-12);
    EXPECT_NEAR(s[1].value(), 0.0, 1e-12);
  }
  std::mt19937_64 rng(17);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 2);
      Operators ops(L);
      MatJ T = random_skew(rng, L.dim());
      VecJ X = random_vec(rng, L.dim(), 0, L.p());
      MatJ Tm = L.m_part(T);
      EXPECT_NEAR(g_of(ops.S_Tm(Tm), X).value(), -skew_inner(Tm, L.S(X)).value(), 1e-9) << name;
      EXPECT_LT(max_abs(ops.S_Tm(T) - ops.S_Tm_unsymmetrized(T)), 1e-10) << name;
    }
  }
}

TEST(P, ExampleValues) {
  {
    auto M = builtin_submanifold("plane");
    LocalGeometry L(M, std::vector<double>{0.3, -0.5}, 2);
    Operators ops(L);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) EXPECT_EQ(ops.P()(a, b).value(), a == b ? 1.0 : 0.0);
  }
  {
    auto M = builtin_submanifold("circle");
    LocalGeometry L(M, std::vector<double>{-0.7}, 2);
    Operators ops(L);
    VecJ v = ops.P(L.basis(0));
    EXPECT_NEAR(v[0].value(), 3.0, 1e-12);
    EXPECT_NEAR(v[1].value(), 0.0, 1e-12);
    EXPECT_NEAR(ops.modified_metric(L.basis(0), L.basis(0)).value(), 3.0, 1e-12);
  }
  {
    auto M = builtin_submanifold("sphere2");
    LocalGeometry L(M, std::vector<double>{1.1, 0.4}, 2);
    Operators ops(L);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) EXPECT_NEAR(ops.P()(a, b).value(), a == b ? 3.0 : 0.0, 1e-12);
  }
}

TEST(P, SymmetricPositiveInvertible) {
  std::mt19937_64 rng(19);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 2);
      Operators ops(L);
      const int p = L.p();
      VecJ X = random_vec(rng, L.dim(), 0, p), Y = random_vec(rng, L.dim(), 0, p);
      EXPECT_NEAR(g_of(ops.P(X), Y).value(), g_of(X, ops.P(Y)).value(), 1e-12);
      EXPECT_GT(g_of(ops.P(X), X).value(), 0.0);
      EXPECT_LT(max_abs(ops.P(ops.P_inverse(X)) - X), 1e-10) << name;
      EXPECT_LT(max_abs(ops.P_via_S(X) - ops.P(X)), 1e-12) << name;
    }
  }
}

TEST(P, DerivativeExpansion) {
  std::mt19937_64 rng(23);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 3);
      Operators ops(L);
      VecJ X = tangent_field(L, random_seed(rng, 3)), Y = tangent_field(L, random_seed(rng, 3)),
           Z = tangent_field(L, random_seed(rng, 3));
      const double lhs = g_of(ops.nabla_prime_P(X) * Y, Z).value();
      auto part = [&](const VecJ& A, const VecJ& B) {
        return skew_inner(L.S(A), L.nabla_prime_endo(X, L.S(B)) - L.S(L.nabla_prime(X, B))).value();
      };
      EXPECT_NEAR(lhs, part(Z, Y) + part(Y, Z), 1e-7) << name;
    }
  }
}

TEST(NablaEndo, CodazziGaussDecompositions) {
  std::mt19937_64 rng(29);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 3);
      Operators ops(L);
      VecJ X = tangent_field(L, random_seed(rng, 3)), Y = tangent_field(L, random_seed(rng, 3));
      MatJ T = endo_field(L, random_seed(rng, 5));
      auto [Th, Tm] = ops.hm_decompose(T);
      MatJ SX = L.S(X);
      EXPECT_LT(max_abs(L.m_part(L.nabla_endo(X, Th)) - commutator(SX, Th)), 1e-8) << name;
      EXPECT_LT(max_abs(L.h_part(L.nabla_endo(X, Th)) - L.nabla_prime_endo(X, Th)), 1e-8) << name;
      EXPECT_LT(max_abs(L.h_part(L.nabla_endo(X, Tm)) - commutator(SX, Tm)), 1e-8) << name;
      EXPECT_LT(max_abs(L.m_part(L.nabla_endo(X, Tm)) - L.nabla_prime_endo(X, Tm)), 1e-8) << name;
      // Gauss, checked against ∇′ curvature computed from connection matrices
      EXPECT_LT(max_abs(ops.curvature_prime(X, Y) - ops.curvature_prime_direct(X, Y)), 1e-7) << name;
      // Codazzi
      MatJ cod = L.nabla_prime_endo(X, L.S(Y)) - L.nabla_prime_endo(Y, L.S(X)) - L.S(L.bracket(X, Y));
      EXPECT_LT(max_abs(L.m_part(L.curvature(X, Y)) - cod), 1e-7) << name;
    }
  }
}

TEST(CurvaturePrime, Examples) {
  {
    auto M = builtin_submanifold("plane");
    LocalGeometry L(M, std::vector<double>{0.3, 0.1}, 3);
    Operators ops(L);
    EXPECT_LT(max_abs(ops.curvature_prime(L.basis(0), L.basis(1))), 1e-14);
  }
  {
    // round S²: g(R′(e1,e2)e2, e1) = 1
    auto M = builtin_submanifold("sphere2");
    LocalGeometry L(M, std::vector<double>{1.2, -0.3}, 3);
    Operators ops(L);
    MatJ R = ops.curvature_prime(L.basis(0), L.basis(1));
    EXPECT_NEAR(R(0, 1).value(), 1.0, 1e-8);
    EXPECT_NEAR(R(1, 0).value(), -1.0, 1e-8);
    EXPECT_LT(max_abs(L.m_part(R)), 1e-14);
  }
}

TEST(TildeNabla, ReducesToNablaPrimeWhenPConstant) {
  std::mt19937_64 rng(31);
  for (const char* name : {"plane", "sphere2"}) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 3);
      Operators ops(L);
      VecJ X = tangent_field(L, random_seed(rng, 3)), Y = tangent_field(L, random_seed(rng, 3));
      EXPECT_LT(max_abs(ops.tilde_nabla(X, Y) - L.nabla_prime(X, Y)), 1e-8) << name;
      EXPECT_LT(max_abs(ops.L_op(X, Y)), 1e-7) << name;
    }
  }
}

TEST(TildeNabla, KoszulResidual) {
  std::mt19937_64 rng(37);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 3);
      Operators ops(L);
      VecJ X = tangent_field(L, random_seed(rng, 3)), Y = tangent_field(L, random_seed(rng, 3)),
           Z = tangent_field(L, random_seed(rng, 3));
      const double lhs = g_of(ops.tilde_nabla(X, Y) - L.nabla_prime(X, Y), ops.P(Z)).value();
      const double rhs = 0.5 * (g_of(ops.nabla_prime_P(X) * Y, Z) + g_of(ops.nabla_prime_P(Y) * X, Z) -
                                g_of(X, ops.nabla_prime_P(Z) * Y))
                                   .value();
      EXPECT_NEAR(lhs, rhs, 1e-7) << name;
    }
  }
}

TEST(LOp, MatchesConnectionDifference) {
  std::mt19937_64 rng(41);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 8; ++k) {
      LocalGeometry L(M, random_point(M, rng), 3);
      Operators ops(L);
      VecJ X = tangent_field(L, random_seed(rng, 3)), Y = tangent_field(L, random_seed(rng, 3));
      VecJ diff = ops.tilde_nabla(X, Y) - L.nabla_prime(X, Y);
      EXPECT_LT(max_abs(ops.L_op(X, Y) - diff), 1e-6) << name;
    }
  }
}

TEST(Q, PropertiesAndSkewness) {
  std::mt19937_64 rng(43);
  for (const char* name : all_builtins()) {
    auto M = builtin_submanifold(name);
    for (int k = 0; k < 5; ++k) {
      LocalGeometry L(M, random_point(M, rng), 3);
      Operators ops(L);
      VecJ X = tangent_field(L, random_seed(rng, 3)), Y = tangent_field(L, random_seed(rng, 3));
      MatJ T = endo_field(L, random_seed(rng, 5));
      auto [Th, Tm] = ops.hm_decompose(T);
      EXPECT_NEAR(ops.modified_metric(ops.Q(Th, X), Y).value(),
                  skew_inner(ops.curvature_prime(X, Y), Th).value(), 1e-7)
          << name;
      const double rhs2 = skew_inner(L.nabla_prime_endo(X, L.S(Y)) - L.nabla_prime_endo(Y, L.S(X)) -
                                         L.S(L.bracket(X, Y)),
                                     Tm)
                              .value() +
                          skew_inner(L.nabla_prime_endo(X, Tm), L.S(Y)).value();
      EXPECT_NEAR(ops.modified_metric(ops.Q(Tm, X), Y).value(), rhs2, 1e-7) << name;
      EXPECT_NEAR(ops.modified_metric(ops.Q(Th, X), Y).value() + ops.modified_metric(X, ops.Q(Th, Y)).value(), 0.0,
                  1e-8)
          << name;
    }
  }
  auto M = builtin_submanifold("plane");
  LocalGeometry L(M, std::vector<double>{0.2, 0.2}, 3);
  Operators ops(L);
  std::mt19937_64 r2(1);
  EXPECT_LT(max_abs(ops.Q(random_skew(r2, 3), L.basis(0))), 1e-14);
}

TEST(TildeCurvature, ConstantScalingOfSphere) {
  // g̃ = 3g on the round unit sphere: sectional curvature 1/3
  auto M = builtin_submanifold("sphere2");
  LocalGeometry L(M, std::vector<double>{1.4, 0.2}, 3);
  Operators ops(L);
  EXPECT_NEAR(ops.tilde_sectional(L.basis(0), L.basis(1)), 1.0 / 3.0, 1e-7);
}
