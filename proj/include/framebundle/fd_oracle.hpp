// SPDX-License-Identifier: Apache-2.0
#pragma once

// Central-difference recomputation of jet-derived quantities. Only point
// values (metric entries, the immersion, adapted frames, g̃) are taken from
// the library; every derivative below is a finite difference.

#include <array>
#include <functional>
#include <random>
#include <string>
#include <string_view>

#include "framebundle/operators.hpp"

namespace fb {

enum class FdQuantity { christoffel, connection_form, nabla, nabla_prime, tilde_nabla, curvature, curvature_prime, tilde_curvature };

inline constexpr std::array<FdQuantity, 8> kFdQuantities = {
    FdQuantity::christoffel, FdQuantity::connection_form, FdQuantity::nabla,     FdQuantity::nabla_prime,
    FdQuantity::tilde_nabla, FdQuantity::curvature,       FdQuantity::curvature_prime, FdQuantity::tilde_curvature};

inline std::string_view fd_name(FdQuantity q) {
  switch (q) {
    case FdQuantity::christoffel: return "christoffel";
    case FdQuantity::connection_form: return "connection-form";
    case FdQuantity::nabla: return "nabla";
    case FdQuantity::nabla_prime: return "nabla-prime";
    case FdQuantity::tilde_nabla: return "tilde-nabla";
    case FdQuantity::curvature: return "curvature";
    case FdQuantity::curvature_prime: return "curvature-prime";
    case FdQuantity::tilde_curvature: return "tilde-curvature";
  }
  return "?";
}

/// Number of derivatives the oracle takes by differences (1 or 2).
inline int fd_depth(FdQuantity q) {
  switch (q) {
    case FdQuantity::curvature:
    case FdQuantity::curvature_prime:
    case FdQuantity::tilde_curvature: return 2;
    default: return 1;
  }
}

inline constexpr double kFdStepFirst = 1e-4;
inline constexpr double kFdStepHigher = 1e-3;

/// |a − b|_∞ / max(1, |a|_∞).
inline double relative_error(const VecD& a, const VecD& b) {
  double d = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(a[i]));
  }
  return d / std::max(1.0, s);
}

// ---- test fields ------------------------------------------------------------

/// Smooth coefficient functions c_k(u) = b_k sin(Σ_B a_{k+B} u_B) + c_k.
struct FieldSeed {
  std::vector<double> a, b, c;

  static FieldSeed random(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> U(-1, 1);
    FieldSeed s;
    for (int k = 0; k < count; ++k) {
      s.a.push_back(U(rng));
      s.b.push_back(U(rng));
      s.c.push_back(U(rng));
    }
    return s;
  }

  template <class T>
  std::vector<T> coefficients(std::span<const T> u, int count) const {
    using std::sin;
    std::vector<T> out;
    for (int k = 0; k < count; ++k) {
      T arg = T(0.0);
      for (std::size_t B = 0; B < u.size(); ++B) arg = arg + u[B] * a[(k + B) % a.size()];
      out.push_back(sin(arg) * b[k % b.size()] + T(c[k % c.size()]));
    }
    return out;
  }
};

/// Tangent field with chart components from `seed`, in frame components.
inline VecJ seeded_tangent_field(const LocalGeometry& L, const FieldSeed& seed) {
  auto uj = coordinate_jets(L.u(), L.order());
  auto c = seed.coefficients<Jet>(std::span<const Jet>(uj), L.p());
  return L.chart_to_frame(VecJ(c.begin(), c.end()));
}

/// Section of TN|M with adapted-frame components from `seed`.
inline VecJ seeded_section(const LocalGeometry& L, const FieldSeed& seed) {
  auto uj = coordinate_jets(L.u(), L.order());
  auto c = seed.coefficients<Jet>(std::span<const Jet>(uj), L.dim());
  return VecJ(c.begin(), c.end());
}

// ---- the oracle -------------------------------------------------------------

struct FdComparison {
  VecD jet, fd;
  double relative = 0.0;
};

class FdOracle {
 public:
  using Field = std::function<VecD(const VecD&)>;

  FdOracle(const ImmersedSubmanifold& M, VecD u) : M_(M), u_(std::move(u)), N_(M.dim()), p_(M.p()) {}

  // values at a parameter point
  VecD x(const VecD& u) const { return M_.point(u); }
  MatD jacobian(const VecD& u) const {
    auto uj = coordinate_jets(u, 1);
    MatD J(N_, p_);
    for (int i = 0; i < N_; ++i) {
      Jet c = M_.map_component(i)(std::span<const Jet>(uj));
      for (int A = 0; A < p_; ++A) J(i, A) = c.partial1(A);
    }
    return J;
  }
  MatD frame(const VecD& u) const { return M_.adapted_frame_at(u).vectors; }
  MatD tangent_projector(const VecD& u) const {
    const MatD E = frame(u), G = M_.ambient().metric_at(x(u));
    MatD P(N_, N_);
    for (int i = 0; i < N_; ++i)
      for (int j = 0; j < N_; ++j) {
        double s = 0.0;
        for (int a = 0; a < p_; ++a)
          for (int k = 0; k < N_; ++k) s += E(i, a) * E(k, a) * G(k, j);
        P(i, j) = s;
      }
    return P;
  }
  MatD gtilde(const VecD& u) const {
    LocalGeometry L(M_, u, 2);
    return values(Operators(L).gtilde_chart());
  }

  /// Γ^i_jk from differences of the metric; result[i](j,k).
  std::vector<MatD> christoffel(const VecD& xp, double h = kFdStepFirst) const {
    const auto& amb = M_.ambient();
    std::vector<MatD> dg;
    for (int k = 0; k < N_; ++k) {
      VecD a = xp, b = xp;
      a[k] += h;
      b[k] -= h;
      dg.push_back((amb.metric_at(a) - amb.metric_at(b)) * (0.5 / h));
    }
    return raise(amb.metric_at(xp), dg);
  }

  /// Γ̃^C_AB of g̃ from differences of g̃.
  std::vector<MatD> tilde_christoffel(const VecD& u, double h = kFdStepFirst) const {
    std::vector<MatD> dg;
    for (int A = 0; A < p_; ++A) dg.push_back((gtilde(shift(u, A, h)) - gtilde(shift(u, A, -h))) * (0.5 / h));
    return raise(gtilde(u), dg);
  }

  /// ∇_X V in ambient components; X by chart components at u, V a field u ↦ ambient vector.
  VecD nabla(const VecD& u, const VecD& xc, const Field& V, double h = kFdStepFirst) const {
    VecD r = directional(u, xc, V, h);
    const VecD Xa = jacobian(u) * xc;
    const VecD v = V(u);
    const auto G = christoffel(x(u));
    for (int i = 0; i < N_; ++i)
      for (int j = 0; j < N_; ++j)
        for (int k = 0; k < N_; ++k) r[i] += G[i](j, k) * Xa[j] * v[k];
    return r;
  }

  /// ∇′_X V = (∇_X V^⊤)^⊤ + (∇_X V^⊥)^⊥.
  VecD nabla_prime(const VecD& u, const VecD& xc, const Field& V, double h = kFdStepFirst) const {
    Field Vt = [&](const VecD& w) { return tangent_projector(w) * V(w); };
    Field Vn = [&](const VecD& w) { return V(w) - tangent_projector(w) * V(w); };
    const MatD P = tangent_projector(u);
    const VecD dt = nabla(u, xc, Vt, h), dn = nabla(u, xc, Vn, h);
    return P * dt + (dn - P * dn);
  }

  /// Ω_A = Eᵀ G (∂_A E + Γ(∂_A φ, E)), all A, flattened.
  VecD connection_form(double h = kFdStepFirst) const {
    VecD out;
    const MatD E = frame(u_), G = M_.ambient().metric_at(x(u_));
    for (int A = 0; A < p_; ++A) {
      VecD ea(p_, 0.0);
      ea[A] = 1.0;
      MatD W(N_, N_);
      for (int b = 0; b < N_; ++b) {
        Field col = [&, b](const VecD& w) { return frame(w).col(b); };
        W.set_col(b, nabla(u_, ea, col, h));
      }
      MatD Om = E.transpose() * (G * W);
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j) out.push_back(Om(i, j));
    }
    return out;
  }

  /// R^i_jkl = ∂_kΓ^i_lj − ∂_lΓ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj at φ(u), flattened.
  VecD curvature(double h = kFdStepHigher) const {
    const VecD x0 = x(u_);
    const auto G = christoffel(x0);
    std::vector<std::vector<MatD>> dG;
    for (int k = 0; k < N_; ++k) {
      VecD a = x0, b = x0;
      a[k] += h;
      b[k] -= h;
      auto Ga = christoffel(a), Gb = christoffel(b);
      std::vector<MatD> d;
      for (int i = 0; i < N_; ++i) d.push_back((Ga[i] - Gb[i]) * (0.5 / h));
      dG.push_back(std::move(d));
    }
    return riemann(G, dG, N_);
  }

  /// R′(∂_A,∂_B)Z for A < B by second covariant differences, flattened.
  VecD curvature_prime(const Field& Z, double h = kFdStepHigher) const {
    VecD out;
    for (int A = 0; A < p_; ++A)
      for (int B = A + 1; B < p_; ++B) {
        Field WA = [&, A](const VecD& w) { return nabla_prime(w, unit(A), Z); };
        Field WB = [&, B](const VecD& w) { return nabla_prime(w, unit(B), Z); };
        VecD r = nabla_prime(u_, unit(A), WB, h) - nabla_prime(u_, unit(B), WA, h);
        out.insert(out.end(), r.begin(), r.end());
      }
    return out;
  }

  /// R̃^C_DAB of g̃ in the chart, flattened.
  VecD tilde_curvature(double h = kFdStepHigher) const {
    const auto G = tilde_christoffel(u_);
    std::vector<std::vector<MatD>> dG;
    for (int A = 0; A < p_; ++A) {
      auto Ga = tilde_christoffel(shift(u_, A, h)), Gb = tilde_christoffel(shift(u_, A, -h));
      std::vector<MatD> d;
      for (int i = 0; i < p_; ++i) d.push_back((Ga[i] - Gb[i]) * (0.5 / h));
      dG.push_back(std::move(d));
    }
    return riemann(G, dG, p_);
  }

  /// ∇̃_X Y in chart components; Y by chart components u ↦ c(u).
  VecD tilde_nabla(const VecD& xc, const Field& yc, double h = kFdStepFirst) const {
    VecD r = directional(u_, xc, yc, h);
    const VecD y = yc(u_);
    const auto G = tilde_christoffel(u_);
    for (int C = 0; C < p_; ++C)
      for (int A = 0; A < p_; ++A)
        for (int B = 0; B < p_; ++B) r[C] += G[C](A, B) * xc[A] * y[B];
    return r;
  }

  // ---- comparisons against the jet library ----------------------------------

  FdComparison compare(FdQuantity q, std::mt19937_64& rng) const {
    const int order = q == FdQuantity::tilde_curvature ? 3 : 2;
    LocalGeometry L(M_, u_, order);
    FdComparison c;
    const FieldSeed sx = FieldSeed::random(rng, 3), sy = FieldSeed::random(rng, 4);
    const VecD xc = sx.coefficients<double>(std::span<const double>(u_), p_);
    const VecJ X = L.chart_to_frame(lift(xc));
    // a section with frame components from sy
    Field section = [&](const VecD& w) { return frame(w) * sy.coefficients<double>(std::span<const double>(w), N_); };
    switch (q) {
      case FdQuantity::christoffel: {
        for (const auto& m : L.christoffel())
          for (int j = 0; j < N_; ++j)
            for (int k = 0; k < N_; ++k) c.jet.push_back(m(j, k).value());
        for (const auto& m : christoffel(x(u_)))
          for (int j = 0; j < N_; ++j)
            for (int k = 0; k < N_; ++k) c.fd.push_back(m(j, k));
        break;
      }
      case FdQuantity::connection_form: {
        for (int A = 0; A < p_; ++A) {
          MatD Om = values(L.omega_chart(A));
          for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j) c.jet.push_back(Om(i, j));
        }
        c.fd = connection_form();
        break;
      }
      case FdQuantity::nabla:
      case FdQuantity::nabla_prime: {
        const VecJ V = seeded_section(L, sy);
        const VecJ r = q == FdQuantity::nabla ? L.nabla(X, V) : L.nabla_prime(X, V);
        c.jet = values(L.frame_to_ambient(r));
        c.fd = q == FdQuantity::nabla ? nabla(u_, xc, section) : nabla_prime(u_, xc, section);
        break;
      }
      case FdQuantity::tilde_nabla: {
        Operators ops(L);
        const VecJ Y = seeded_tangent_field(L, sy);
        c.jet = values(L.frame_to_chart(ops.tilde_nabla(X, Y)));
        Field yc = [&](const VecD& w) { return sy.coefficients<double>(std::span<const double>(w), p_); };
        c.fd = tilde_nabla(xc, yc);
        break;
      }
      case FdQuantity::curvature: {
        for (int i = 0; i < N_; ++i)
          for (int j = 0; j < N_; ++j)
            for (int k = 0; k < N_; ++k)
              for (int l = 0; l < N_; ++l) c.jet.push_back(L.riemann(i, j, k, l).value());
        c.fd = curvature();
        break;
      }
      case FdQuantity::curvature_prime: {
        Operators ops(L);
        const VecJ Z = seeded_section(L, sy);
        for (int A = 0; A < p_; ++A)
          for (int B = A + 1; B < p_; ++B) {
            VecJ r = ops.curvature_prime(L.chart_to_frame(lift(unit(A))), L.chart_to_frame(lift(unit(B)))) * Z;
            VecD v = values(L.frame_to_ambient(r));
            c.jet.insert(c.jet.end(), v.begin(), v.end());
          }
        c.fd = curvature_prime(section);
        break;
      }
      case FdQuantity::tilde_curvature: {
        Operators ops(L);
        for (int C = 0; C < p_; ++C)
          for (int D = 0; D < p_; ++D)
            for (int A = 0; A < p_; ++A)
              for (int B = 0; B < p_; ++B) {
                VecJ r = ops.tilde_curvature(L.chart_to_frame(lift(unit(A))), L.chart_to_frame(lift(unit(B))),
                                             L.chart_to_frame(lift(unit(D))));
                c.jet.push_back(L.frame_to_chart(r)[C].value());
              }
        c.fd = tilde_curvature();
        break;
      }
    }
    c.relative = relative_error(c.jet, c.fd);
    return c;
  }

 private:
  VecD unit(int A) const {
    VecD e(p_, 0.0);
    e[A] = 1.0;
    return e;
  }
  static VecD shift(VecD u, int A, double h) {
    u[A] += h;
    return u;
  }
  VecD directional(const VecD& u, const VecD& xc, const Field& V, double h) const {
    VecD r;
    for (int A = 0; A < p_; ++A) {
      if (xc[A] == 0.0) continue;
      VecD d = (0.5 / h) * (V(shift(u, A, h)) - V(shift(u, A, -h)));
      if (r.empty()) r.assign(d.size(), 0.0);
      for (std::size_t i = 0; i < d.size(); ++i) r[i] += xc[A] * d[i];
    }
    if (r.empty()) r.assign(V(u).size(), 0.0);
    return r;
  }
  static std::vector<MatD> raise(const MatD& g, const std::vector<MatD>& dg) {
    const int n = g.rows();
    const MatD gi = inverse(g, "metric");
    std::vector<MatD> G(n, MatD(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += 0.5 * gi(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
          G[i](j, k) = s;
        }
    return G;
  }
  static VecD riemann(const std::vector<MatD>& G, const std::vector<std::vector<MatD>>& dG, int n) {
    VecD out;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = dG[k][i](l, j) - dG[l][i](k, j);
            for (int m = 0; m < n; ++m) s += G[i](k, m) * G[m](l, j) - G[i](l, m) * G[m](k, j);
            out.push_back(s);
          }
    return out;
  }

  const ImmersedSubmanifold& M_;
  VecD u_;
  int N_, p_;
};

/// Recompute quantity `q` at `u` by differences and compare with the jets.
inline FdComparison fd_oracle(FdQuantity q, const ImmersedSubmanifold& M, const VecD& u, std::mt19937_64& rng) {
  return FdOracle(M, u).compare(q, rng);
}

}  // namespace fb
