// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic sample points in a chart box: a Halton sequence with a
// Cranley–Patterson rotation drawn from a seeded generator.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "framebundle/submanifold.hpp"

namespace fb {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Seed for one stream: FNV-1a over the decimal seed and the stream name.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream) {
  return fnv1a(stream, fnv1a(std::to_string(seed) + "/"));
}

inline double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline constexpr double kSampleMargin = 0.05;

inline std::vector<VecD> sample_points(const ChartBox& box, int count, std::uint64_t seed,
                                       std::string_view stream = "points", double margin = kSampleMargin) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23};
  const ChartBox b = box.shrunk(margin);
  const int d = b.dim();
  if (d > 9) throw std::invalid_argument("sampling supports at most 9 chart dimensions");
  std::mt19937_64 rng(stream_seed(seed, stream));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  VecD shift(d);
  for (auto& s : shift) s = U(rng);
  std::vector<VecD> pts;
  for (int k = 0; k < count; ++k) {
    VecD u(d);
    for (int i = 0; i < d; ++i) {
      double t = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[i]) + shift[i];
      if (t >= 1.0) t -= 1.0;
      u[i] = b.bounds[i].first + t * (b.bounds[i].second - b.bounds[i].first);
    }
    pts.push_back(std::move(u));
  }
  return pts;
}

}  // namespace fb
