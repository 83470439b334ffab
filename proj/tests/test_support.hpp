#pragma once

#include <random>
#include <vector>

#include "framebundle/catalog.hpp"

namespace fbt {

using namespace fb;

inline const std::vector<const char*>& all_builtins() {
  static const std::vector<const char*> v = {"plane", "circle", "sphere2", "catenoid", "great2", "clifford", "great3"};
  return v;
}

inline VecD random_point(const ImmersedSubmanifold& M, std::mt19937_64& rng, double margin = 0.05) {
  VecD u;
  for (auto [lo, hi] : M.domain().shrunk(margin).bounds)
    u.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
  return u;
}

/// Constant-coefficient frame vector supported on indices [lo, hi).
inline VecJ random_vec(std::mt19937_64& rng, int N, int lo, int hi) {
  std::uniform_real_distribution<double> U(-1, 1);
  VecJ v(N, Jet(0.0));
  for (int a = lo; a < hi; ++a) v[a] = Jet(U(rng));
  return v;
}

inline MatJ random_skew(std::mt19937_64& rng, int N) {
  std::uniform_real_distribution<double> U(-1, 1);
  MatJ t(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const double x = U(rng);
      t(i, j) = Jet(x);
      t(j, i) = Jet(-x);
    }
  return t;
}

/// Random tangent vector field with nonconstant chart coefficients.
struct FieldSeed {
  std::vector<double> a, b, c;
};

inline FieldSeed random_seed(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> U(-1, 1);
  FieldSeed s;
  for (int k = 0; k < count; ++k) {
    s.a.push_back(U(rng));
    s.b.push_back(U(rng));
    s.c.push_back(U(rng));
  }
  return s;
}

inline VecJ tangent_field(const LocalGeometry& L, const FieldSeed& s) {
  auto uj = coordinate_jets(L.u(), L.order());
  VecJ c(L.p());
  for (int A = 0; A < L.p(); ++A) {
    Jet arg(0.0);
    for (int B = 0; B < L.p(); ++B) arg += uj[B] * s.a[(A + B) % s.a.size()];
    c[A] = fb::sin(arg) * s.b[A % s.b.size()] + Jet(s.c[A % s.c.size()]);
  }
  return L.chart_to_frame(c);
}

/// Random skew endomorphism field with nonconstant frame coefficients.
inline MatJ endo_field(const LocalGeometry& L, const FieldSeed& s) {
  auto uj = coordinate_jets(L.u(), L.order());
  const int N = L.dim();
  MatJ t(N, N);
  int k = 0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j, ++k) {
      Jet arg(0.0);
      for (int B = 0; B < L.p(); ++B) arg += uj[B] * s.a[(k + B) % s.a.size()];
      Jet v = fb::cos(arg) * s.b[k % s.b.size()] + Jet(s.c[k % s.c.size()]);
      t(i, j) = v;
      t(j, i) = -v;
    }
  return t;
}

inline double max_abs(const VecJ& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x.value()));
  return m;
}
inline double max_abs(const MatJ& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j).value()));
  return m;
}

}  // namespace fbt
