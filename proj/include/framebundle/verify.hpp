// SPDX-License-Identifier: Apache-2.0
#pragma once

// Registry of identities, each evaluated as a residual at sampled points of a
// submanifold, and the report that collects them.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include <json.hpp>

#include "framebundle/catalog.hpp"
#include "framebundle/fd_oracle.hpp"
#include "framebundle/gauss_map.hpp"

namespace fb {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kReportSchema = "framebundle-report/1";

/// Tolerance ladder by derivative order of the quantities involved.
inline double ladder_tolerance(int derivative_order) {
  if (derivative_order <= 1) return 1e-8;
  if (derivative_order == 2) return 1e-7;
  return 1e-6;
}
inline constexpr double kFdTolerance = 1e-4;
inline constexpr double kVacuityFloor = 1e-8;

/// Per-point geometry, built lazily at jet order 3 (and 4 where curvature of
/// O(M,N) is iterated).
class PointContext {
 public:
  struct Stack {
    LocalGeometry L;
    Operators ops;
    FrameBundle B;
    OmnGeometry G;
    GaussMap g;
    Stack(const ImmersedSubmanifold& M, const VecD& u, int order) : L(M, u, order), ops(L), B(ops), G(B), g(ops) {}
  };

  PointContext(const ImmersedSubmanifold& M, VecD u) : M_(M), u_(std::move(u)) {}

  const ImmersedSubmanifold& M() const noexcept { return M_; }
  const VecD& u() const noexcept { return u_; }
  const Stack& at(int order) {
    auto& slot = order >= 4 ? s4_ : s3_;
    if (!slot) slot = std::make_unique<Stack>(M_, u_, order >= 4 ? 4 : 3);
    return *slot;
  }

 private:
  const ImmersedSubmanifold& M_;
  VecD u_;
  std::unique_ptr<Stack> s3_, s4_;
};

/// One evaluation: the residual and the size of the quantity that makes the
/// identity non-trivial.
struct Evaluation {
  double residual = 0.0;
  double magnitude = 0.0;
  std::map<std::string, double> extras;
};

enum class CaseKind { identity, oracle };

struct IdentityCase {
  std::string id;
  std::string anchor;     // the result it belongs to
  std::string statement;  // what is checked
  int derivative_order = 1;
  double tolerance = 1e-8;
  CaseKind kind = CaseKind::identity;
  int draws = 1;  // random field draws per point
  int jet_order = 3;
  std::function<bool(const ImmersedSubmanifold&)> applies;
  std::vector<std::string> nontrivial_on;  // builtins where magnitude must be nonzero
  std::function<Evaluation(PointContext&, std::mt19937_64&)> evaluate;
};

namespace verify_detail {

inline double mabs(const VecJ& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x.value()));
  return m;
}
inline double mabs(const MatJ& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j).value()));
  return m;
}
inline double mabs(const Lifted& l) { return std::max(mabs(l.h), mabs(l.v)); }
inline double mabs(const OmnField& f) { return std::max(mabs(f.X), mabs(f.T)); }

inline VecJ unit_vec(std::mt19937_64& rng, int N, int lo, int hi) {
  std::uniform_real_distribution<double> U(-1, 1);
  VecJ v(N, Jet(0.0));
  double n = 0.0;
  for (int a = lo; a < hi; ++a) {
    const double x = U(rng);
    v[a] = Jet(x);
    n += x * x;
  }
  return (1.0 / std::sqrt(n)) * v;
}

inline MatJ unit_skew(std::mt19937_64& rng, int N) {
  std::uniform_real_distribution<double> U(-1, 1);
  MatJ t(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const double x = U(rng);
      t(i, j) = Jet(x);
      t(j, i) = Jet(-x);
    }
  t *= 1.0 / std::sqrt(skew_inner(t, t).value());
  return t;
}

/// Tangent field normalised to unit length at the base point.
inline VecJ tangent_field(const LocalGeometry& L, std::mt19937_64& rng) {
  VecJ X = seeded_tangent_field(L, FieldSeed::random(rng, 3));
  return (1.0 / norm2(values(X))) * X;
}

/// Skew endomorphism field with nonconstant frame coefficients, unit at the base point.
inline MatJ endo_field(const LocalGeometry& L, std::mt19937_64& rng) {
  const int N = L.dim();
  const FieldSeed s = FieldSeed::random(rng, 6);
  auto uj = coordinate_jets(L.u(), L.order());
  auto c = s.coefficients<Jet>(std::span<const Jet>(uj), N * (N - 1) / 2);
  MatJ t(N, N);
  int k = 0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j, ++k) {
      t(i, j) = c[k];
      t(j, i) = -c[k];
    }
  const double n = std::sqrt(skew_inner(values(t), values(t)));
  t *= 1.0 / n;
  return t;
}

inline MatJ unit_or_zero(MatJ t) {
  const double n = std::sqrt(std::max(0.0, skew_inner(t, t).value()));
  if (n > 1e-12) t *= 1.0 / n;
  return t;
}

inline bool is_one_of(const ImmersedSubmanifold& M, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (M.name() == n) return true;
  return false;
}

/// 𝔥 = so(p) ⊕ so(n) is non-abelian.
inline bool nonabelian_h(const ImmersedSubmanifold& M) { return M.p() >= 3 || M.n() >= 3; }

/// Totally geodesic builtins in a space form, with their curvature κ.
inline std::optional<double> space_form_totally_geodesic(const ImmersedSubmanifold& M) {
  if (M.name() == "plane") return 0.0;
  if ((M.name() == "great2" || M.name() == "great3") && M.ambient().kind() == AmbientKind::SphereChart) {
    const double R = M.ambient().radius();
    return 1.0 / (R * R);
  }
  return std::nullopt;
}

inline std::vector<IdentityCase> build_registry() {
  std::vector<IdentityCase> r;
  auto all = [](const ImmersedSubmanifold&) { return true; };
  auto p2 = [](const ImmersedSubmanifold& M) { return M.p() >= 2; };
  const std::vector<std::string> curvedS = {"circle", "sphere2", "catenoid", "clifford"};
  const std::vector<std::string> curvedS2 = {"sphere2", "catenoid", "clifford"};
  const std::vector<std::string> curvedN = {"great2", "great3", "clifford"};
  const std::vector<std::string> nonflat_all = {"circle", "sphere2", "catenoid", "great2", "clifford", "great3"};

  auto add = [&](std::string id, std::string anchor, std::string statement, int order,
                 std::function<bool(const ImmersedSubmanifold&)> applies, std::vector<std::string> nontrivial,
                 std::function<Evaluation(PointContext&, std::mt19937_64&)> ev, int draws = 1, int jet_order = 3) {
    IdentityCase c;
    c.id = std::move(id);
    c.anchor = std::move(anchor);
    c.statement = std::move(statement);
    c.derivative_order = order;
    c.tolerance = ladder_tolerance(order);
    c.applies = std::move(applies);
    c.nontrivial_on = std::move(nontrivial);
    c.evaluate = std::move(ev);
    c.draws = draws;
    c.jet_order = jet_order;
    r.push_back(std::move(c));
  };

  // ---- invariant vertical fields, horizontal lift to O(M,N) ------------------
  const std::string A_vert = "invariant vertical vector fields";
  add("vertical.equivariance", A_vert, "frame components of T transform as g^T C g under a change of frame g in O(p)xO(n)",
      0, all, {}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        const int N = L.dim(), p = L.p();
        const MatD E = values(L.frame()), G = values(L.metric());
        const MatD C = values(unit_skew(rng, N));
        Eigen::MatrixXd Ee = to_eigen(E);
        Eigen::MatrixXd Te = Ee * to_eigen(C) * Ee.inverse();
        MatD T(N, N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) T(i, j) = Te(i, j);
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, N);
        std::uniform_real_distribution<double> U(-1, 1);
        Eigen::MatrixXd a(p, p), b(N - p, N - p);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < p; ++j) a(i, j) = U(rng);
        for (int i = 0; i < N - p; ++i)
          for (int j = 0; j < N - p; ++j) b(i, j) = U(rng);
        R.topLeftCorner(p, p) = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
        R.bottomRightCorner(N - p, N - p) = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ();
        MatD g(N, N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) g(i, j) = R(i, j);
        const MatD d = vertical_components(E * g, G, T) - g.transpose() * (vertical_components(E, G, T) * g);
        Evaluation e;
        e.residual = std::max(frobenius(vertical_components(E, G, T) - C), frobenius(d));
        e.magnitude = frobenius(C);
        return e;
      });

  const std::string A_lift = "horizontal lift to O(M,N)";
  add("lift.prime", A_lift,
      "the m-part of the connection form of the adapted section along X, computed in ambient components, is S_X", 1,
      all, curvedS, [](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        const VecJ X = unit_vec(rng, L.dim(), 0, L.p());
        MatJ Om(L.dim(), L.dim());
        for (int b = 0; b < L.dim(); ++b) Om.set_col(b, L.nabla_ambient_route(X, L.basis(b)));
        Evaluation e;
        e.residual = mabs(L.m_part(Om) - L.S(X));
        e.magnitude = mabs(L.S(X));
        return e;
      });

  // ---- decomposition of skew tensors, Codazzi and Gauss -------------------------
  const std::string A_gc = "Codazzi and Gauss formulas";
  auto gc_fields = [](PointContext& c, std::mt19937_64& rng) {
    const auto& L = c.at(3).L;
    return std::make_tuple(tangent_field(L, rng), endo_field(L, rng));
  };
  add("gauss-codazzi.h-m", A_gc, "(nabla_X T_h)_m = [S_X, T_h]", 2, all, curvedS2,
      [gc_fields](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        auto [X, T] = gc_fields(c, rng);
        const MatJ Th = L.h_part(T);
        Evaluation e;
        e.residual = mabs(L.m_part(L.nabla_endo(X, Th)) - commutator(L.S(X), Th));
        e.magnitude = mabs(commutator(L.S(X), Th));
        return e;
      },
      10);
  add("gauss-codazzi.h-h", A_gc, "(nabla_X T_h)_h = nabla'_X T_h", 2, all, {},
      [gc_fields](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        auto [X, T] = gc_fields(c, rng);
        const MatJ Th = L.h_part(T);
        Evaluation e;
        e.residual = mabs(L.h_part(L.nabla_endo(X, Th)) - L.nabla_prime_endo(X, Th));
        e.magnitude = mabs(L.nabla_prime_endo(X, Th));
        return e;
      },
      10);
  add("gauss-codazzi.m-h", A_gc, "(nabla_X T_m)_h = [S_X, T_m]", 2, all, curvedS2,
      [gc_fields](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        auto [X, T] = gc_fields(c, rng);
        const MatJ Tm = L.m_part(T);
        Evaluation e;
        e.residual = mabs(L.h_part(L.nabla_endo(X, Tm)) - commutator(L.S(X), Tm));
        e.magnitude = mabs(commutator(L.S(X), Tm));
        return e;
      },
      10);
  add("gauss-codazzi.m-m", A_gc, "(nabla_X T_m)_m = nabla'_X T_m", 2, all, nonflat_all,
      [gc_fields](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        auto [X, T] = gc_fields(c, rng);
        const MatJ Tm = L.m_part(T);
        Evaluation e;
        e.residual = mabs(L.m_part(L.nabla_endo(X, Tm)) - L.nabla_prime_endo(X, Tm));
        e.magnitude = mabs(L.nabla_prime_endo(X, Tm));
        return e;
      },
      10);
  add("gauss-codazzi.codazzi", A_gc, "R(X,Y)_m = nabla'_X S_Y - nabla'_Y S_X - S_[X,Y]", 2, p2, curvedS2,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        const VecJ X = tangent_field(L, rng), Y = tangent_field(L, rng);
        const MatJ a = L.nabla_prime_endo(X, L.S(Y));
        const MatJ cod = a - L.nabla_prime_endo(Y, L.S(X)) - L.S(L.bracket(X, Y));
        Evaluation e;
        e.residual = mabs(L.m_part(L.curvature(X, Y)) - cod);
        e.magnitude = mabs(a);
        return e;
      },
      10);
  add("gauss-codazzi.gauss", A_gc,
      "R(X,Y)_h = R'(X,Y) + [S_X, S_Y], with R' computed from the connection matrices of nabla'", 2, p2, curvedS2,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = tangent_field(s.L, rng), Y = tangent_field(s.L, rng);
        const MatJ ss = commutator(s.L.S(X), s.L.S(Y));
        Evaluation e;
        e.residual = mabs(s.L.h_part(s.L.curvature(X, Y)) - ss - s.ops.curvature_prime_direct(X, Y));
        e.magnitude = mabs(ss);
        return e;
      },
      10);

  // ---- R_T and S_T --------------------------------------------------------------
  const std::string A_ops = "relations for R_T and S_T";
  add("operators.rt-duality", A_ops, "g(R_T X, Y) = <R(X,Y), T>", 0, all, curvedN,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const int N = s.L.dim();
        const VecJ X = unit_vec(rng, N, 0, s.L.p()), Y = unit_vec(rng, N, 0, s.L.p());
        const MatJ T = unit_skew(rng, N);
        const double rhs = skew_inner(s.L.curvature(X, Y), T).value();
        Evaluation e;
        e.residual = std::abs(dot(s.ops.R_T(T, X), Y).value() - rhs);
        e.magnitude = std::abs(rhs);
        return e;
      });
  add("operators.st-duality", A_ops, "g(S_{T_m}, X) = -<T_m, S_X>", 1, all, curvedS,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const int N = s.L.dim();
        const VecJ X = unit_vec(rng, N, 0, s.L.p());
        const MatJ Tm = s.L.m_part(unit_skew(rng, N));
        const double rhs = -skew_inner(Tm, s.L.S(X)).value();
        Evaluation e;
        e.residual = std::abs(dot(s.ops.S_Tm(Tm), X).value() - rhs);
        e.magnitude = std::abs(rhs);
        return e;
      });

  // ---- P and g̃ ----------------------------------------------------------------
  const std::string A_P = "operator P and the metric g~";
  add("tilde-metric.lift", A_P, "g_SM(X^h', Y^h') = g(X, P Y)", 1, all, curvedS,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p()), Y = unit_vec(rng, s.L.dim(), 0, s.L.p());
        const double lhs = sasaki_mok(s.B.horizontal_lift_prime(X), s.B.horizontal_lift_prime(Y)).value();
        Evaluation e;
        e.residual = std::abs(lhs - s.ops.modified_metric(X, Y).value());
        e.magnitude = std::abs(skew_inner(s.L.S(X), s.L.S(Y)).value());
        return e;
      });
  add("tilde-metric.p-via-s", A_P, "P X = X - 2 sum_A S_{e_A}^2 X = X - S_{S_X}", 1, all, curvedS,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p());
        Evaluation e;
        e.residual = mabs(s.ops.P(X) - s.ops.P_via_S(X));
        e.magnitude = mabs(s.ops.P(X) - X);
        return e;
      });
  add("tilde-metric.symmetric-positive", A_P, "P is g-symmetric and positive definite", 1, all, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p()), Y = unit_vec(rng, s.L.dim(), 0, s.L.p());
        Evaluation e;
        const double sym = std::abs(dot(s.ops.P(X), Y).value() - dot(X, s.ops.P(Y)).value());
        e.residual = std::max(sym, std::max(0.0, -dot(s.ops.P(X), X).value()));
        e.magnitude = dot(s.ops.P(X), X).value();
        return e;
      });
  add("tilde-metric.round-sphere", A_P, "P = 3 id on the unit circle and the unit 2-sphere", 1,
      [](const ImmersedSubmanifold& M) { return is_one_of(M, {"circle", "sphere2"}); }, {"circle", "sphere2"},
      [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const int p = s.L.p();
        double d = 0.0;
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) d = std::max(d, std::abs(s.ops.P()(a, b).value() - (a == b ? 3.0 : 0.0)));
        Evaluation e;
        e.residual = d;
        e.magnitude = 3.0;
        return e;
      });
  add("tilde-metric.derivative", A_P,
      "g((nabla'_X P)Y, Z) = <S_Z, nabla'_X S_Y - S_{nabla'_X Y}> + <S_Y, nabla'_X S_Z - S_{nabla'_X Z}>", 2, all,
      {"catenoid"}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const auto& L = s.L;
        const VecJ X = tangent_field(L, rng), Y = tangent_field(L, rng), Z = tangent_field(L, rng);
        const double lhs = dot(s.ops.nabla_prime_P(X) * Y, Z).value();
        auto part = [&](const VecJ& A, const VecJ& B) {
          return skew_inner(L.S(A), L.nabla_prime_endo(X, L.S(B)) - L.S(L.nabla_prime(X, B))).value();
        };
        Evaluation e;
        e.residual = std::abs(lhs - part(Z, Y) - part(Y, Z));
        e.magnitude = std::abs(lhs);
        return e;
      });
  add("tilde-metric.koszul", A_P,
      "g(nabla~_X Y - nabla'_X Y, P Z) = 1/2 (g((nabla'_X P)Y,Z) + g((nabla'_Y P)X,Z) - g(X,(nabla'_Z P)Y))", 2, all,
      {"catenoid"}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const auto& L = s.L;
        const VecJ X = tangent_field(L, rng), Y = tangent_field(L, rng), Z = tangent_field(L, rng);
        const double lhs = dot(s.ops.tilde_nabla(X, Y) - L.nabla_prime(X, Y), s.ops.P(Z)).value();
        const double rhs = 0.5 * (dot(s.ops.nabla_prime_P(X) * Y, Z) + dot(s.ops.nabla_prime_P(Y) * X, Z) -
                                  dot(X, s.ops.nabla_prime_P(Z) * Y))
                                     .value();
        Evaluation e;
        e.residual = std::abs(lhs - rhs);
        e.magnitude = std::abs(lhs);
        return e;
      });

  // ---- Q_T and L ----------------------------------------------------------------
  const std::string A_Q = "operator Q_T";
  add("q-operator.h", A_Q, "g~(Q_T X, Y) = <R'(X,Y), T> for T in h", 2, p2, {"sphere2", "catenoid"},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = tangent_field(s.L, rng), Y = tangent_field(s.L, rng);
        const MatJ Th = unit_or_zero(s.L.h_part(endo_field(s.L, rng)));
        const double rhs = skew_inner(s.ops.curvature_prime(X, Y), Th).value();
        Evaluation e;
        e.residual = std::abs(s.ops.modified_metric(s.ops.Q(Th, X), Y).value() - rhs);
        e.magnitude = std::abs(rhs);
        return e;
      });
  add("q-operator.m", A_Q,
      "g~(Q_T X, Y) = <nabla'_X S_Y - nabla'_Y S_X - S_[X,Y], T> + <nabla'_X T, S_Y> for T in m", 2, all, curvedS,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const auto& L = s.L;
        const VecJ X = tangent_field(L, rng), Y = tangent_field(L, rng);
        const MatJ Tm = unit_or_zero(L.m_part(endo_field(L, rng)));
        const double a = skew_inner(L.nabla_prime_endo(X, Tm), L.S(Y)).value();
        const double rhs =
            skew_inner(L.nabla_prime_endo(X, L.S(Y)) - L.nabla_prime_endo(Y, L.S(X)) - L.S(L.bracket(X, Y)), Tm)
                .value() +
            a;
        Evaluation e;
        e.residual = std::abs(s.ops.modified_metric(s.ops.Q(Tm, X), Y).value() - rhs);
        e.magnitude = std::abs(a);
        return e;
      });
  add("q-operator.skew", A_Q, "Q_T is g~-skew for T in h", 2, p2, {"sphere2", "catenoid"},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = tangent_field(s.L, rng), Y = tangent_field(s.L, rng);
        const MatJ Th = unit_or_zero(s.L.h_part(endo_field(s.L, rng)));
        const double a = s.ops.modified_metric(s.ops.Q(Th, X), Y).value();
        Evaluation e;
        e.residual = std::abs(a + s.ops.modified_metric(X, s.ops.Q(Th, Y)).value());
        e.magnitude = std::abs(a);
        return e;
      });
  const std::string A_L = "operator L";
  add("operator-l", A_L, "L_X Y = nabla~_X Y - nabla'_X Y (nabla~ from the Koszul formula for g~)", 3, all,
      {"catenoid"}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = tangent_field(s.L, rng), Y = tangent_field(s.L, rng);
        const VecJ Lxy = s.ops.L_op(X, Y);
        Evaluation e;
        e.residual = mabs(Lxy - (s.ops.tilde_nabla(X, Y) - s.L.nabla_prime(X, Y)));
        e.magnitude = mabs(Lxy);
        return e;
      });

  // ---- the frame bundle O(N) ------------------------------------------------------
  const std::string A_on = "Levi-Civita connection of O(N)";
  add("frame-bundle.metric", A_on, "X g_SM(F, W) = g_SM(nabla_X F, W) + g_SM(F, nabla_X W)", 2, all, nonflat_all,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const auto& L = s.L;
        const int N = L.dim();
        Lifted d{unit_vec(rng, N, 0, L.p()), unit_skew(rng, N)};
        auto field = [&] {
          return Lifted{seeded_section(L, FieldSeed::random(rng, 4)), endo_field(L, rng)};
        };
        const Lifted F = field(), W = field();
        const double lhs = L.along(d.h, sasaki_mok(F, W)).value();
        Evaluation e;
        e.residual = std::abs(lhs - sasaki_mok(s.B.nabla(d, F), W).value() - sasaki_mok(F, s.B.nabla(d, W)).value());
        e.magnitude = std::abs(lhs);
        return e;
      });
  add("frame-bundle.torsion", A_on, "nabla_{X^h} Y^h - nabla_{Y^h} X^h = [X,Y]^h - R(X,Y)-bar", 2, p2, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = tangent_field(s.L, rng), Y = tangent_field(s.L, rng);
        const Lifted lhs = s.B.nabla_hh(X, Y) - s.B.nabla_hh(Y, X);
        Evaluation e;
        e.residual = mabs(lhs - Lifted{s.L.bracket(X, Y), -1.0 * s.L.curvature(X, Y)});
        e.magnitude = mabs(lhs);
        return e;
      });

  // ---- decompositions ------------------------------------------------------------
  auto decomposition = [](const FrameBundle& B, const Lifted& w, Evaluation& e) {
    const auto sp = B.decompose(w);
    const auto ls = B.decompose_least_squares(w);
    double r = mabs(sp.tangent + sp.normal - w);
    r = std::max(r, std::abs(sasaki_mok(sp.tangent, sp.normal).value()));
    for (const auto& g : B.tangent_generators()) r = std::max(r, std::abs(sasaki_mok(g, sp.normal).value()));
    for (const auto& g : B.normal_generators()) r = std::max(r, std::abs(sasaki_mok(g, sp.tangent).value()));
    r = std::max(r, mabs(sp.tangent - ls.tangent));
    e.residual = r;
    e.magnitude = mabs(w);
    e.extras["normal_part"] = mabs(sp.normal);
  };
  add("decomposition.horizontal", "decomposition of X^h",
      "X^h = tangent + normal with the closed forms; reconstruction, cross-orthogonality and agreement with a "
      "least-squares projection",
      1, all, {}, [decomposition](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        Evaluation e;
        decomposition(s.B, s.B.horizontal_lift(unit_vec(rng, s.L.dim(), 0, s.L.dim())), e);
        return e;
      });
  add("decomposition.vertical", "decomposition of T-bar",
      "T-bar = tangent + normal with the closed forms; reconstruction, cross-orthogonality and agreement with a "
      "least-squares projection",
      1, all, {}, [decomposition](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        Evaluation e;
        decomposition(s.B, s.B.vertical(unit_skew(rng, s.L.dim())), e);
        return e;
      });

  // ---- O(M,N) -----------------------------------------------------------------
  auto omn_field = [](const LocalGeometry& L, std::mt19937_64& rng) {
    return OmnField{tangent_field(L, rng), L.h_part(endo_field(L, rng))};
  };
  const std::string A_lc = "Levi-Civita connection of O(M,N)";
  add("omn.connection", A_lc, "nabla^{O(M,N)}_U V = tangent part of nabla^{O(N)}_U V", 3, all, nonflat_all,
      [omn_field](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const OmnField d = omn_field(s.L, rng), F = omn_field(s.L, rng);
        const Lifted a = s.G.lift(s.G.nabla(d, F));
        Evaluation e;
        e.residual = mabs(a - s.B.decompose(s.B.nabla(s.G.lift(d), s.G.lift(F))).tangent);
        e.magnitude = mabs(a);
        return e;
      });
  add("omn.connection-hprime", A_lc,
      "nabla^{O(N)}_{X^h'} Y^h' in closed form equals the generic O(N) connection on the lifts", 2, all, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = tangent_field(s.L, rng), Y = tangent_field(s.L, rng);
        const Lifted a = s.G.nabla_ON_hprime(X, Y);
        Evaluation e;
        e.residual = mabs(a - s.B.nabla(s.B.horizontal_lift_prime(X), s.B.horizontal_lift_prime(Y)));
        e.magnitude = mabs(a);
        return e;
      });
  const std::string A_pi = "second fundamental form of O(M,N)";
  add("omn.second-fundamental", A_pi,
      "Pi^{O(M,N)}(U,V) = normal part of nabla^{O(N)}_U V; symmetric; orthogonal to O(M,N)", 3, all, curvedS,
      [omn_field](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const OmnField d = omn_field(s.L, rng), F = omn_field(s.L, rng);
        const Lifted pi = s.G.second_fundamental(d, F);
        double r = mabs(pi - s.B.decompose(s.B.nabla(s.G.lift(d), s.G.lift(F))).normal);
        r = std::max(r, mabs(pi - s.G.second_fundamental(F, d)));
        for (const auto& t : s.B.tangent_generators()) r = std::max(r, std::abs(sasaki_mok(pi, t).value()));
        Evaluation e;
        e.residual = r;
        e.magnitude = mabs(pi);
        return e;
      });
  add("omn.second-fundamental.vertical", A_pi, "Pi^{O(M,N)}(T-bar, T'-bar) = 0", 0, all, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const MatJ T = s.L.h_part(endo_field(s.L, rng)), Tp = s.L.h_part(endo_field(s.L, rng));
        Evaluation e;
        e.residual = mabs(s.G.second_fundamental(s.G.vertical(T), s.G.vertical(Tp)));
        return e;
      });
  const std::string A_R = "curvature of O(M,N)";
  add("omn.curvature", A_R, "closed-form curvature of O(M,N) equals the iterated connection", 4, all, {"sphere2", "catenoid", "great2", "great3"},
      [omn_field](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(4);
        const OmnField U = omn_field(s.L, rng), V = omn_field(s.L, rng), W = omn_field(s.L, rng);
        const OmnField a = s.G.curvature(U, V, W);
        Evaluation e;
        e.residual = mabs(a - s.G.curvature_direct(U, V, W));
        e.magnitude = mabs(a);
        return e;
      },
      1, 4);
  add("omn.curvature.antisymmetry", A_R, "R^{O(M,N)}(U,V) = -R^{O(M,N)}(V,U)", 3, all, {},
      [omn_field](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const OmnField U = omn_field(s.L, rng), V = omn_field(s.L, rng), W = omn_field(s.L, rng);
        Evaluation e;
        e.residual = mabs(s.G.curvature(U, V, W) + s.G.curvature(V, U, W));
        return e;
      });
  add("omn.curvature.vertical", A_R, "R^{O(M,N)}(T-bar, T'-bar) T''-bar = -1/4 [[T,T'],T'']-bar", 0, nonabelian_h,
      {"great3"}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const MatJ T = s.L.h_part(unit_skew(rng, s.L.dim())), Tp = s.L.h_part(unit_skew(rng, s.L.dim())),
                   Tpp = s.L.h_part(unit_skew(rng, s.L.dim()));
        const MatJ expect = -0.25 * commutator(commutator(T, Tp), Tpp);
        Evaluation e;
        e.residual = mabs(s.G.curvature_vvv(T, Tp, Tpp).T - expect);
        e.magnitude = mabs(expect);
        return e;
      });
  const std::string A_K = "sectional curvature of O(M,N)";
  add("omn.sectional.horizontal", A_K,
      "K(X^h', Y^h') = K~(X,Y) - 3/4 |R'(X,Y)|^2 equals the value from the curvature tensor", 3, p2, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p()), Y = unit_vec(rng, s.L.dim(), 0, s.L.p());
        const double k = s.G.sectional_horizontal(X, Y);
        Evaluation e;
        e.residual = std::abs(k - s.G.sectional_tensor(s.G.horizontal(X), s.G.horizontal(Y)));
        e.magnitude = std::abs(k);
        return e;
      });
  add("omn.sectional.mixed", A_K, "K(X^h', T-bar) = 1/4 g~(Q_T X, Q_T X) equals the value from the curvature tensor",
      3, [](const ImmersedSubmanifold& M) { return M.p() >= 2 || M.n() >= 2; }, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p());
        const MatJ T = unit_or_zero(s.L.h_part(unit_skew(rng, s.L.dim())));
        const double k = s.G.sectional_mixed(X, T);
        Evaluation e;
        e.residual = std::abs(k - s.G.sectional_tensor(s.G.horizontal(X), s.G.vertical(T)));
        e.magnitude = std::abs(k);
        e.extras["stated_form_gap"] = std::abs(k - s.G.sectional_mixed_as_stated(X, T));
        return e;
      });
  add("omn.sectional.vertical", A_K, "K(T-bar, T'-bar) = 1/8 |[T,T']|^2 equals the value from the curvature tensor",
      3, nonabelian_h, {"great3"}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const int N = s.L.dim();
        const MatJ T = unit_or_zero(s.L.h_part(unit_skew(rng, N))), Tp = unit_or_zero(s.L.h_part(unit_skew(rng, N)));
        const double k = s.G.sectional_vertical(T, Tp);
        const double t = s.G.sectional_tensor(s.G.vertical(T), s.G.vertical(Tp));
        Evaluation e;
        e.residual = std::abs(k - t);
        e.magnitude = std::abs(t);
        e.extras["tensor_over_formula"] = k > 0 ? t / k : 0.0;
        return e;
      });
  add("omn.sectional.space-form-value", A_K,
      "for M totally geodesic in a space form of curvature k: K(X^h', Y^h') = k - 3/2 k^2", 3,
      [](const ImmersedSubmanifold& M) { return M.p() >= 2 && space_form_totally_geodesic(M).has_value(); },
      {"great2", "great3"}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const double k = *space_form_totally_geodesic(c.M());
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p()), Y = unit_vec(rng, s.L.dim(), 0, s.L.p());
        const double h = s.G.sectional_horizontal(X, Y);
        Evaluation e;
        e.residual = std::abs(h - (k - 1.5 * k * k));
        e.magnitude = std::abs(h);
        return e;
      });
  add("omn.sectional.nonnegative", "nonnegative sectional curvature",
      "for M totally geodesic in a space form of curvature 0 <= k <= 2/3 the sectional curvatures of O(M,N) on frame planes are >= 0",
      3,
      [](const ImmersedSubmanifold& M) {
        auto k = space_form_totally_geodesic(M);
        return k && *k <= 2.0 / 3.0;
      },
      {}, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const int N = s.L.dim(), p = s.L.p();
        double lo = 0.0;
        const VecJ X = unit_vec(rng, N, 0, p), Y = unit_vec(rng, N, 0, p);
        if (p >= 2) lo = std::min(lo, s.G.sectional_horizontal(X, Y));
        const MatJ T = unit_or_zero(s.L.h_part(unit_skew(rng, N))), Tp = unit_or_zero(s.L.h_part(unit_skew(rng, N)));
        if (skew_inner(T, T).value() > 0.5) {
          lo = std::min(lo, s.G.sectional_mixed(X, T));
          if (skew_inner(Tp, Tp).value() > 0.5 && std::abs(skew_inner(T, Tp).value()) < 0.99)
            lo = std::min(lo, s.G.sectional_vertical(T, Tp));
        }
        Evaluation e;
        e.residual = std::max(0.0, -lo);
        return e;
      });

  const std::string A_tg = "totally geodesic O(M,N)";
  add("omn.totally-geodesic", A_tg,
      "Pi^{O(M,N)} = 0 exactly when Pi = 0 and (R(U,V)W)^T = 0 for normal U, V, W (pointwise agreement)", 1, all, {},
      [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const auto& L = s.L;
        double pi_omn = 0.0, pi = 0.0, cond = 0.0;
        const auto gens = s.G.tangent_basis();
        for (std::size_t i = 0; i < gens.size(); ++i)
          for (std::size_t j = i; j < gens.size(); ++j)
            pi_omn = std::max(pi_omn, mabs(s.G.second_fundamental(gens[i], gens[j])));
        for (int A = 0; A < L.p(); ++A)
          for (int B = 0; B < L.p(); ++B) pi = std::max(pi, mabs(L.second_fundamental_form(L.basis(A), L.basis(B))));
        for (int a = L.p(); a < L.dim(); ++a)
          for (int b = L.p(); b < L.dim(); ++b)
            for (int d = L.p(); d < L.dim(); ++d)
              cond = std::max(cond, mabs(L.tangent_part(L.curvature(L.basis(a), L.basis(b)) * L.basis(d))));
        const double rhs = std::max(pi, cond);
        const bool a0 = pi_omn < 1e-9, b0 = rhs < 1e-9;
        Evaluation e;
        e.residual = a0 == b0 ? 0.0 : std::max(pi_omn, rhs);
        e.magnitude = pi_omn;
        e.extras["pi_omn"] = pi_omn;
        e.extras["pi"] = pi;
        e.extras["curvature_condition"] = cond;
        return e;
      });
  add("omn.totally-geodesic.space-form", "totally geodesic O(M,N) in a space form",
      "in a space form (R(U,V)W)^T = 0 for normal U, V, W, so O(M,N) is totally geodesic exactly when M is", 0,
      [](const ImmersedSubmanifold& M) { return M.ambient().kind() != AmbientKind::Custom; }, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& L = c.at(3).L;
        const VecJ U = unit_vec(rng, L.dim(), L.p(), L.dim()), V = unit_vec(rng, L.dim(), L.p(), L.dim()),
                   W = unit_vec(rng, L.dim(), L.p(), L.dim());
        Evaluation e;
        e.residual = mabs(L.tangent_part(L.curvature(U, V) * W));
        return e;
      });

  // ---- Gauss map and the theorem ---------------------------------------------------
  const std::string A_gr = "Gauss map and its tension field";
  add("gauss-map.pushforward-norm", A_gr, "|gamma_* X|^2 in g_Gr = g(X, P X) = g~(X, X)", 1, all, curvedS,
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p());
        const auto v = s.g.pushforward(X);
        Evaluation e;
        e.residual = std::abs(grassmann_metric(v, v).value() - s.ops.modified_metric(X, X).value());
        e.magnitude = skew_inner(v.v, v.v).value();
        return e;
      });
  add("gauss-map.connection-projection", A_gr,
      "the Grassmann connection along gamma is the projection of the O(N) connection along the adapted section", 2,
      all, curvedN, [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const VecJ X = unit_vec(rng, s.L.dim(), 0, s.L.p());
        const VecJ Y = tangent_field(s.L, rng);
        const MatJ T = s.L.m_part(endo_field(s.L, rng));
        const GrassmannVector a = s.g.nabla(s.g.pushforward(X), GrassmannVector{Y, T});
        const Lifted up = s.B.nabla(s.B.horizontal_lift_prime(X), Lifted{Y, T});
        Evaluation e;
        e.residual = std::max(mabs(a.h - up.h), mabs(a.v - s.L.m_part(up.v)));
        e.magnitude = mabs(s.g.nabla_vh(s.L.S(X), Y).h) + mabs(s.g.nabla_hv(X, T).h);
        return e;
      });
  add("gauss-map.tension-routes", A_gr,
      "closed-form tension field = sum_A nabla^gamma_{e_A} gamma_* e_A - gamma_*(nabla~_{e_A} e_A)", 3, all, {"circle", "sphere2"},
      [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const auto frame = s.ops.tilde_orthonormal_frame();
        const auto a = s.g.tension_field(frame);
        Evaluation e;
        e.residual = max_abs(a - s.g.tension_field_via_connection(frame));
        e.magnitude = max_abs(a);
        return e;
      });
  add("gauss-map.tension-submersion", A_gr,
      "tension field of gamma = projection of the tension field of the adapted section into O(N)", 3, all, {"circle", "sphere2"},
      [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const auto frame = s.ops.tilde_orthonormal_frame();
        Lifted t = Lifted::zero(s.L.dim());
        for (const auto& e : frame) {
          const Lifted le = s.B.horizontal_lift_prime(e);
          t += s.B.nabla(le, le) - s.B.horizontal_lift_prime(s.ops.tilde_nabla(e, e));
        }
        const auto a = s.g.tension_field(frame);
        Evaluation e;
        e.residual = std::max(mabs(a.h - t.h), mabs(a.v - s.L.m_part(t.v)));
        e.magnitude = max_abs(a);
        return e;
      });
  add("gauss-map.frame-invariance", A_gr, "the tension field does not depend on the g~-orthonormal frame", 3, all, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const int p = s.L.p();
        const auto frame = s.ops.tilde_orthonormal_frame();
        std::uniform_real_distribution<double> U(-1, 1);
        Eigen::MatrixXd A(p, p);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < p; ++j) A(i, j) = U(rng);
        Eigen::MatrixXd R = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
        std::vector<VecJ> rot;
        for (int a = 0; a < p; ++a) {
          VecJ v = s.L.zero();
          for (int b = 0; b < p; ++b) v = v + R(a, b) * frame[b];
          rot.push_back(v);
        }
        Evaluation e;
        e.residual = max_abs(s.g.tension_field(rot) - s.g.tension_field(frame));
        return e;
      });
  add("gauss-map.tension-split", A_gr, "r_H1^2 + r_H2^2 + r_H3^2 = |tau(gamma)|^2", 3, all, {"circle", "sphere2"},
      [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const auto r = s.g.residuals();
        const auto t = s.g.tension_field();
        const double n2 = grassmann_metric(t, t).value();
        Evaluation e;
        e.residual = std::abs(r.r_H1 * r.r_H1 + r.r_H2 * r.r_H2 + r.r_H3 * r.r_H3 - n2);
        e.magnitude = n2;
        return e;
      });

  const std::string A_th = "minimality of O(M,N) and harmonicity of the Gauss map";
  add("theorem.mean-curvature-normal", A_th,
      "the Z^h-components of the mean curvature of O(M,N) equal the vector of condition (M1) = (H1)", 3, all,
      {"circle", "sphere2"}, [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const auto H = s.G.mean_curvature();
        const auto r = s.g.residuals();
        Evaluation e;
        e.residual = norm2(H.Z - r.H1);
        e.magnitude = r.r_H1;
        return e;
      });
  add("theorem.mean-curvature-tilde", A_th,
      "g_SM(H^{O(M,N)}, T~) = <M2, T> for T in m, with T~ = T-bar + (S_T)^h", 3, all, {},
      [](PointContext& c, std::mt19937_64& rng) {
        const auto& s = c.at(3);
        const auto H = s.G.mean_curvature();
        const auto r = s.g.residuals();
        const MatJ T = unit_or_zero(s.L.m_part(unit_skew(rng, s.L.dim())));
        Evaluation e;
        e.residual = std::abs(sasaki_mok(H.H, s.B.normal_tilde(T)).value() - skew_inner(r.M2, values(T)));
        e.magnitude = r.r_M2;
        return e;
      });
  add("theorem.m1-is-h1", A_th, "condition (M1) is condition (H1): r_M1 and r_H1 are the same number", 3, all, {},
      [](PointContext& c, std::mt19937_64&) {
        const auto r = c.at(3).g.residuals();
        Evaluation e;
        e.residual = r.r_M1() == r.r_H1 ? 0.0 : std::abs(r.r_M1() - r.r_H1) + 1.0;
        e.magnitude = r.r_H1;
        return e;
      });
  add("theorem.h-implies-m", A_th, "M2 = H3 - S_{H2}, so (H2) and (H3) imply (M2)", 3, all, {},
      [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const auto r = s.g.residuals();
        Evaluation e;
        e.residual = s.g.split_identity_residual(r);
        e.magnitude = r.r_M2;
        return e;
      });
  add("theorem.m-implies-h", A_th, "g(H2, P Z) + <M2, S_Z> = 0 for tangent Z, so (M1) and (M2) imply (H2)", 3, all,
      {}, [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const auto r = s.g.residuals();
        Evaluation e;
        e.residual = s.g.pairing_identity_residual(r);
        e.magnitude = r.r_H2;
        return e;
      });
  add("theorem.equivalence", A_th,
      "O(M,N) minimal at the point (|H| < 1e-6) exactly when the Gauss map is harmonic there (max r_H < 1e-6)", 3, all,
      {}, [](PointContext& c, std::mt19937_64&) {
        const auto& s = c.at(3);
        const double h = s.G.mean_curvature().norm;
        const auto r = s.g.residuals();
        Evaluation e;
        e.residual = (h < 1e-6) == (r.max_H() < 1e-6) ? 0.0 : 1.0;
        e.magnitude = h;
        e.extras["mean_curvature"] = h;
        e.extras["r_H1"] = r.r_H1;
        e.extras["r_H2"] = r.r_H2;
        e.extras["r_H3"] = r.r_H3;
        e.extras["r_M2"] = r.r_M2;
        return e;
      });

  // ---- finite-difference oracles ------------------------------------------------------
  for (FdQuantity q : kFdQuantities) {
    IdentityCase c;
    c.id = "fd." + std::string(fd_name(q));
    c.anchor = "jets against central differences";
    c.statement = "jet value of " + std::string(fd_name(q)) + " matches its central-difference recomputation (relative)";
    c.derivative_order = fd_depth(q);
    c.tolerance = kFdTolerance;
    c.kind = CaseKind::oracle;
    const bool needs_p2 = q == FdQuantity::curvature_prime || q == FdQuantity::tilde_curvature;
    c.applies = [needs_p2](const ImmersedSubmanifold& M) { return !needs_p2 || M.p() >= 2; };
    c.evaluate = [q](PointContext& ctx, std::mt19937_64& rng) {
      const auto cmp = fd_oracle(q, ctx.M(), ctx.u(), rng);
      Evaluation e;
      e.residual = cmp.relative;
      for (double v : cmp.jet) e.magnitude = std::max(e.magnitude, std::abs(v));
      return e;
    };
    r.push_back(std::move(c));
  }
  return r;
}

}  // namespace verify_detail

inline const std::vector<IdentityCase>& registry() {
  static const std::vector<IdentityCase> r = verify_detail::build_registry();
  return r;
}

inline std::set<std::string> registry_anchors() {
  std::set<std::string> s;
  for (const auto& c : registry()) s.insert(c.anchor);
  return s;
}

// ---- running ---------------------------------------------------------------------

struct CaseResult {
  std::string id, anchor, statement, submanifold;
  CaseKind kind = CaseKind::identity;
  int derivative_order = 0;
  double tolerance = 0.0;
  std::vector<double> residuals;  // max over draws, one per point
  double max_residual = 0.0, mean_residual = 0.0;
  double min_magnitude = 0.0;
  std::map<std::string, double> extras;  // max over points
  bool vacuous = false;
  std::string error;
  bool pass = false;
};

struct SuiteOptions {
  int samples = 20;
  std::uint64_t seed = 1;
  std::optional<double> tolerance;  // overrides the ladder for every case
  std::vector<std::string> only;    // id prefixes; empty = all
  unsigned threads = 0;             // 0 = hardware concurrency
};

struct VerificationReport {
  std::uint64_t seed = 1;
  int samples = 0;
  std::vector<std::string> submanifolds;
  std::vector<CaseResult> cases;
  double runtime_seconds = 0.0;
  std::string timestamp;
  bool all_pass() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.pass; });
  }
  const CaseResult* find(std::string_view id, std::string_view submanifold) const {
    for (const auto& c : cases)
      if (c.id == id && c.submanifold == submanifold) return &c;
    return nullptr;
  }
};

namespace verify_detail {

inline bool selected(const IdentityCase& c, const SuiteOptions& o) {
  if (o.only.empty()) return true;
  for (const auto& pre : o.only)
    if (c.id.rfind(pre, 0) == 0) return true;
  return false;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct PointOutcome {
  double residual = 0.0, magnitude = 0.0;
  std::map<std::string, double> extras;
  std::string error;
};

}  // namespace verify_detail

/// Runs the selected cases on one submanifold; results are appended to `report`.
inline void run_cases(const ImmersedSubmanifold& M, const SuiteOptions& opt, VerificationReport& report) {
  using namespace verify_detail;
  std::vector<const IdentityCase*> cases;
  for (const auto& c : registry())
    if (selected(c, opt) && c.applies(M)) cases.push_back(&c);
  const auto points = sample_points(M.domain(), opt.samples, opt.seed, "verify/" + M.name());
  const std::size_t P = points.size(), C = cases.size();
  std::vector<PointOutcome> out(P * C);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < P; k = next++) {
      PointContext ctx(M, points[k]);
      for (std::size_t ci = 0; ci < C; ++ci) {
        const auto& cs = *cases[ci];
        auto& o = out[k * C + ci];
        std::mt19937_64 rng(stream_seed(opt.seed, cs.id + "/" + M.name() + "/" + std::to_string(k)));
        try {
          for (int d = 0; d < cs.draws; ++d) {
            Evaluation e = cs.evaluate(ctx, rng);
            o.residual = std::max(o.residual, e.residual);
            o.magnitude = std::max(o.magnitude, e.magnitude);
            for (const auto& [key, v] : e.extras) o.extras[key] = std::max(o.extras.count(key) ? o.extras[key] : v, v);
          }
        } catch (const std::exception& ex) {
          o.error = ex.what();
        }
      }
    }
  };
  unsigned nt = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, std::max<std::size_t>(P, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t ci = 0; ci < C; ++ci) {
    const auto& cs = *cases[ci];
    CaseResult r;
    r.id = cs.id;
    r.anchor = cs.anchor;
    r.statement = cs.statement;
    r.submanifold = M.name();
    r.kind = cs.kind;
    r.derivative_order = cs.derivative_order;
    r.tolerance = cs.kind == CaseKind::identity && opt.tolerance ? *opt.tolerance : cs.tolerance;
    r.min_magnitude = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t k = 0; k < P; ++k) {
      const auto& o = out[k * C + ci];
      if (!o.error.empty() && r.error.empty()) r.error = "point " + std::to_string(k) + ": " + o.error;
      r.residuals.push_back(o.residual);
      r.max_residual = std::max(r.max_residual, o.residual);
      sum += o.residual;
      r.min_magnitude = std::min(r.min_magnitude, o.magnitude);
      for (const auto& [key, v] : o.extras) r.extras[key] = std::max(r.extras.count(key) ? r.extras[key] : v, v);
    }
    if (P == 0) r.min_magnitude = 0.0;
    r.mean_residual = P ? sum / static_cast<double>(P) : 0.0;
    const bool required = std::find(cs.nontrivial_on.begin(), cs.nontrivial_on.end(), M.name()) != cs.nontrivial_on.end();
    r.vacuous = required && r.min_magnitude < kVacuityFloor;
    r.pass = r.error.empty() && !r.vacuous && r.max_residual < r.tolerance;
    report.cases.push_back(std::move(r));
  }
}

inline VerificationReport run_suite(const std::vector<ImmersedSubmanifold>& subs, const SuiteOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.seed = opt.seed;
  rep.samples = opt.samples;
  rep.timestamp = verify_detail::utc_timestamp();
  for (const auto& M : subs) {
    rep.submanifolds.push_back(M.name());
    run_cases(M, opt, rep);
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// ---- JSON -------------------------------------------------------------------------

/// 17 significant digits, enough to round-trip a double.
inline std::string number17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::ordered_json to_json(const CaseResult& c, bool with_points = true) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["anchor"] = c.anchor;
  j["statement"] = c.statement;
  j["submanifold"] = c.submanifold;
  j["kind"] = c.kind == CaseKind::identity ? "identity" : "oracle";
  j["derivative_order"] = c.derivative_order;
  j["tolerance"] = number17(c.tolerance);
  j["points"] = c.residuals.size();
  j["max_residual"] = number17(c.max_residual);
  j["mean_residual"] = number17(c.mean_residual);
  j["min_magnitude"] = number17(c.min_magnitude);
  if (!c.extras.empty()) {
    nlohmann::ordered_json e;
    for (const auto& [k, v] : c.extras) e[k] = number17(v);
    j["extras"] = e;
  }
  if (with_points) {
    auto arr = nlohmann::ordered_json::array();
    for (double r : c.residuals) arr.push_back(number17(r));
    j["residuals"] = arr;
  }
  j["vacuous"] = c.vacuous;
  j["error"] = c.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.error);
  j["pass"] = c.pass;
  return j;
}

inline nlohmann::ordered_json to_json(const VerificationReport& r, bool with_points = true) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["version"] = kVersion;
  j["command"] = "verify";
  j["seed"] = std::to_string(r.seed);
  j["samples"] = r.samples;
  j["submanifolds"] = r.submanifolds;
  auto cases = nlohmann::ordered_json::array();
  std::size_t passed = 0;
  for (const auto& c : r.cases) {
    cases.push_back(to_json(c, with_points));
    passed += c.pass;
  }
  j["cases"] = cases;
  j["summary"] = {{"cases", r.cases.size()}, {"passed", passed}, {"failed", r.cases.size() - passed},
                  {"all_pass", r.all_pass()}};
  j["meta"] = {{"timestamp", r.timestamp}, {"runtime_seconds", number17(r.runtime_seconds)}};
  return j;
}

}  // namespace fb
