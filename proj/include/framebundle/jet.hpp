// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Truncated multivariate Taylor polynomials ("jets").
///
/// A Jet carries the Taylor coefficients of a smooth function of `nvars`
/// variables around a base point, truncated at total degree `order`. All
/// arithmetic and the elementary functions below are exact on the truncated
/// polynomial ring, so partial derivatives read off a Jet are exact up to
/// rounding. Binary operations between jets of different order truncate to
/// the smaller order; differentiation lowers the order by one.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fb {

inline constexpr int kMaxJetVars = 12;
inline constexpr int kMaxJetOrder = 8;

/// Raised when a function is evaluated outside its (smooth) domain.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what, std::size_t offset = 0, std::size_t length = 0)
      : std::domain_error(what), offset_(offset), length_(length) {}
  std::size_t offset() const noexcept { return offset_; }
  std::size_t length() const noexcept { return length_; }

 private:
  std::size_t offset_;
  std::size_t length_;
};

/// Monomial bookkeeping shared by all jets of a given (nvars, order).
///
/// Monomials are ordered by total degree first, so the monomials of a lower
/// order layout form a prefix of any higher order layout with the same
/// number of variables. Truncation is therefore a resize.
class JetLayout {
 public:
  struct Product {
    int i, j, k;  // i <= j, monomial(i) * monomial(j) = monomial(k)
  };
  struct DerivTerm {
    int src, dst;
    double factor;
  };

  static const JetLayout& get(int nvars, int order) {
    if (nvars < 1 || nvars > kMaxJetVars || order < 0 || order > kMaxJetOrder) {
      throw std::invalid_argument("jet layout out of range: nvars=" + std::to_string(nvars) +
                                  " order=" + std::to_string(order));
    }
    auto& slot = cache()[nvars][order];
    const JetLayout* hit = slot.load(std::memory_order_acquire);
    if (hit) return *hit;
    static std::mutex mu;
    std::lock_guard lock(mu);
    hit = slot.load(std::memory_order_relaxed);
    if (!hit) {
      auto* created = new JetLayout(nvars, order);  // lives for the program
      slot.store(created, std::memory_order_release);
      hit = created;
    }
    return *hit;
  }

  int nvars() const noexcept { return nvars_; }
  int order() const noexcept { return order_; }
  int size() const noexcept { return static_cast<int>(degree_.size()); }
  int degree(int idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(int idx) const {
    return {exps_.data() + static_cast<std::size_t>(idx) * nvars_, static_cast<std::size_t>(nvars_)};
  }
  /// Number of monomials of total degree <= d.
  int count_up_to(int d) const { return d < 0 ? 0 : prefix_[std::min(d, order_)]; }
  int index_of(std::span<const std::uint8_t> e) const {
    auto it = index_.find(encode(e));
    return it == index_.end() ? -1 : it->second;
  }
  /// Products sorted by target index; those with k < count_up_to(r) are
  /// exactly the products needed to multiply at order r.
  const std::vector<Product>& products() const noexcept { return products_; }
  const std::vector<DerivTerm>& derivative_terms(int var) const { return deriv_[var]; }
  /// For idx > 0: monomial(idx) = monomial(pred) * x_{pred_var}.
  int predecessor(int idx) const { return pred_[idx].first; }
  int predecessor_var(int idx) const { return pred_[idx].second; }
  /// prod_v exponents[v]!  (converts Taylor coefficients to partial derivatives)
  double factorial_weight(int idx) const { return fact_[idx]; }

 private:
  using Cache = std::array<std::array<std::atomic<const JetLayout*>, kMaxJetOrder + 1>, kMaxJetVars + 1>;
  static Cache& cache() {
    static Cache c{};
    return c;
  }

  static std::uint64_t encode(std::span<const std::uint8_t> e) {
    std::uint64_t key = 0;
    for (auto v : e) key = (key << 5) | v;
    return key;
  }

  JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
    std::vector<std::uint8_t> cur(nvars, 0);
    for (int d = 0; d <= order; ++d) {
      enumerate(cur, 0, d);
      prefix_.push_back(static_cast<int>(degree_.size()));
    }
    for (int i = 0; i < size(); ++i) index_[encode(exponents(i))] = i;

    std::vector<std::uint8_t> tmp(nvars);
    for (int i = 0; i < size(); ++i) {
      for (int j = i; j < size(); ++j) {
        if (degree_[i] + degree_[j] > order) continue;
        auto ei = exponents(i), ej = exponents(j);
        for (int v = 0; v < nvars; ++v) tmp[v] = static_cast<std::uint8_t>(ei[v] + ej[v]);
        products_.push_back({i, j, index_of(tmp)});
      }
    }
    std::stable_sort(products_.begin(), products_.end(),
                     [](const Product& a, const Product& b) { return a.k < b.k; });

    deriv_.resize(nvars);
    for (int v = 0; v < nvars; ++v) {
      for (int i = 0; i < size(); ++i) {
        auto e = exponents(i);
        if (e[v] == 0) continue;
        std::copy(e.begin(), e.end(), tmp.begin());
        tmp[v] -= 1;
        deriv_[v].push_back({i, index_of(tmp), static_cast<double>(e[v])});
      }
    }

    pred_.assign(size(), {-1, -1});
    fact_.assign(size(), 1.0);
    for (int i = 1; i < size(); ++i) {
      auto e = exponents(i);
      std::copy(e.begin(), e.end(), tmp.begin());
      for (int v = 0; v < nvars; ++v) {
        if (tmp[v] > 0) {
          tmp[v] -= 1;
          pred_[i] = {index_of(tmp), v};
          break;
        }
      }
      double w = 1.0;
      for (auto k : e)
        for (int q = 2; q <= k; ++q) w *= q;
      fact_[i] = w;
    }
  }

  void enumerate(std::vector<std::uint8_t>& cur, int pos, int remaining) {
    if (pos == nvars_ - 1) {
      cur[pos] = static_cast<std::uint8_t>(remaining);
      exps_.insert(exps_.end(), cur.begin(), cur.end());
      int d = 0;
      for (auto v : cur) d += v;
      degree_.push_back(d);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      cur[pos] = static_cast<std::uint8_t>(k);
      enumerate(cur, pos + 1, remaining - k);
    }
    cur[pos] = 0;
  }

  int nvars_, order_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<int> prefix_;
  std::unordered_map<std::uint64_t, int> index_;
  std::vector<Product> products_;
  std::vector<std::vector<DerivTerm>> deriv_;
  std::vector<std::pair<int, int>> pred_;
  std::vector<double> fact_;
};

class Jet {
 public:
  // A jet without layout is an exact constant; it promotes to any layout on contact.
  Jet() = default;
  explicit Jet(double constant) : c_{constant} {}
  Jet(const JetLayout& layout, double constant) : L_(&layout), c_(layout.size(), 0.0) { c_[0] = constant; }

  static Jet variable(const JetLayout& layout, int var, double value) {
    Jet j(layout, value);
    if (layout.order() >= 1) j.c_[1 + var] = 1.0;  // degree-1 monomials follow the constant, var-ordered
    return j;
  }

  bool is_constant() const noexcept { return L_ == nullptr; }
  const JetLayout& layout() const {
    if (!L_) throw std::logic_error("layout requested from a constant jet");
    return *L_;
  }
  int nvars() const { return L_ ? L_->nvars() : 0; }
  int order() const { return L_ ? L_->order() : 0; }
  double value() const { return c_.at(0); }
  std::span<const double> coeffs() const noexcept { return c_; }
  double coeff(int idx) const { return c_.at(idx); }

  /// Exact partial derivative d^|a| f / dx^a at the base point.
  double partial(std::span<const int> multi) const {
    if (!L_) {
      for (int m : multi)
        if (m) return 0.0;
      return c_[0];
    }
    std::vector<std::uint8_t> e(multi.begin(), multi.end());
    int idx = layout().index_of(e);
    if (idx < 0) throw std::out_of_range("partial derivative beyond jet order");
    return c_[idx] * L_->factorial_weight(idx);
  }
  double partial1(int var) const { return (L_ && L_->order() >= 1) ? c_.at(1 + var) : 0.0; }

  Jet derivative(int var) const {
    if (!L_) return Jet(0.0);
    const auto& L = layout();
    if (L.order() < 1) throw std::logic_error("jet order exhausted by differentiation");
    Jet r(JetLayout::get(L.nvars(), L.order() - 1), 0.0);
    for (const auto& t : L.derivative_terms(var)) {
      if (t.dst < r.size()) r.c_[t.dst] += t.factor * c_[t.src];
    }
    return r;
  }

  Jet truncated(int order) const {
    if (!L_) return *this;
    const auto& L = layout();
    if (order >= L.order()) return *this;
    Jet r;
    r.L_ = &JetLayout::get(L.nvars(), order);
    r.c_.assign(c_.begin(), c_.begin() + r.L_->size());
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  Jet& operator+=(const Jet& o) { return accumulate(o, 1.0); }
  Jet& operator-=(const Jet& o) { return accumulate(o, -1.0); }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) { return *this += -s; }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator/=(double s) {
    for (auto& v : c_) v /= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = mul(*this, o);
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(double s, const Jet& b);

  /// f(a) for a univariate f given its derivatives f^(k)(a0), k = 0..order.
  static Jet compose_univariate(const Jet& a, std::span<const double> derivs) {
    if (!a.L_) return Jet(derivs[0]);
    const auto& L = a.layout();
    Jet h = a;
    h.c_[0] = 0.0;
    Jet r(L, derivs[0]);
    Jet hp = h;
    double fact = 1.0;
    for (int k = 1; k <= L.order(); ++k) {
      fact *= k;
      const double w = derivs[k] / fact;
      for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += w * hp.c_[i];
      if (k < L.order()) hp = mul(hp, h);
    }
    return r;
  }

 private:
  int size() const { return static_cast<int>(c_.size()); }

  Jet& accumulate(const Jet& o, double sign) {
    if (!o.L_) {
      c_[0] += sign * o.c_[0];
      return *this;
    }
    if (!L_) {
      const double c = c_[0];
      *this = o;
      if (sign < 0) *this = -*this;
      c_[0] += c;
      return *this;
    }
    const auto& La = layout();
    const auto& Lb = o.layout();
    if (La.nvars() != Lb.nvars()) throw std::invalid_argument("jet variable count mismatch");
    if (Lb.order() < La.order()) *this = truncated(Lb.order());
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += sign * o.c_[i];
    return *this;
  }

  static Jet mul(const Jet& a, const Jet& b) {
    if (!a.L_) return b * a.c_[0];
    if (!b.L_) return a * b.c_[0];
    const auto& La = a.layout();
    const auto& Lb = b.layout();
    if (La.nvars() != Lb.nvars()) throw std::invalid_argument("jet variable count mismatch");
    const JetLayout& L = La.order() <= Lb.order() ? La : Lb;
    Jet r(L, 0.0);
    const int n = L.size();
    const auto& big = (La.order() >= Lb.order() ? La : Lb).products();
    const double* x = a.c_.data();
    const double* y = b.c_.data();
    double* z = r.c_.data();
    for (const auto& pr : big) {
      if (pr.k >= n) break;
      if (pr.i == pr.j) {
        z[pr.k] += x[pr.i] * y[pr.i];
      } else {
        z[pr.k] += x[pr.i] * y[pr.j] + x[pr.j] * y[pr.i];
      }
    }
    return r;
  }

  friend class JetSubstitution;
  const JetLayout* L_ = nullptr;
  std::vector<double> c_{0.0};
};

namespace detail {

inline std::vector<double> reciprocal_derivs(double a0, int order) {
  std::vector<double> d(order + 1);
  double p = 1.0 / a0;
  double f = 1.0;
  for (int k = 0; k <= order; ++k) {
    d[k] = ((k % 2) ? -1.0 : 1.0) * f * p;
    p /= a0;
    f *= (k + 1);
  }
  return d;
}

/// d^k/dx^k x^c at a0, for real c.
inline std::vector<double> power_derivs(double a0, double c, int order) {
  std::vector<double> d(order + 1);
  double coef = 1.0;
  for (int k = 0; k <= order; ++k) {
    d[k] = coef * std::pow(a0, c - k);
    coef *= (c - k);
  }
  return d;
}

}  // namespace detail

inline Jet reciprocal(const Jet& b) {
  const double b0 = b.value();
  if (b0 == 0.0) throw DomainError("division by zero");
  return Jet::compose_univariate(b, detail::reciprocal_derivs(b0, b.order()));
}

// The value slot is set from a correctly rounded quotient so order-0 results
// agree bit-for-bit with plain double evaluation.
inline Jet operator/(const Jet& a, const Jet& b) {
  Jet r = a * reciprocal(b);
  r.c_[0] = a.value() / b.value();
  return r;
}
inline Jet operator/(double s, const Jet& b) {
  Jet r = reciprocal(b) * s;
  r.c_[0] = s / b.value();
  return r;
}

inline Jet exp(const Jet& a) {
  std::vector<double> d(a.order() + 1, std::exp(a.value()));
  return Jet::compose_univariate(a, d);
}

inline Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("log of non-positive value");
  std::vector<double> d(a.order() + 1);
  d[0] = std::log(a0);
  double f = 1.0, p = 1.0 / a0;
  for (int k = 1; k <= a.order(); ++k) {
    d[k] = ((k % 2) ? 1.0 : -1.0) * f * p;
    f *= k;
    p /= a0;
  }
  return Jet::compose_univariate(a, d);
}

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {s, c, -s, -c};
  std::vector<double> d(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) d[k] = cyc[k % 4];
  return Jet::compose_univariate(a, d);
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {c, -s, -c, s};
  std::vector<double> d(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) d[k] = cyc[k % 4];
  return Jet::compose_univariate(a, d);
}

namespace detail {

// Derivatives of tan (sign = +1) or tanh (sign = -1) through the polynomial
// recursion P_{k+1}(t) = P_k'(t)(1 + sign t^2), P_0(t) = t.
inline std::vector<double> tan_like_derivs(double t, double sign, int order) {
  std::vector<double> d(order + 1);
  std::vector<double> poly{0.0, 1.0};
  for (int k = 0; k <= order; ++k) {
    double v = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) v = v * t + poly[i];
    d[k] = v;
    std::vector<double> dp(poly.size() + 1, 0.0);
    for (std::size_t i = 1; i < poly.size(); ++i) {
      dp[i - 1] += i * poly[i];
      dp[i + 1] += sign * i * poly[i];
    }
    poly = std::move(dp);
  }
  return d;
}

}  // namespace detail

inline Jet tan(const Jet& a) {
  if (std::cos(a.value()) == 0.0) throw DomainError("tan at a pole");
  auto d = detail::tan_like_derivs(std::tan(a.value()), 1.0, a.order());
  d[0] = std::tan(a.value());
  return Jet::compose_univariate(a, d);
}

inline Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  std::vector<double> d(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) d[k] = (k % 2) ? c : s;
  return Jet::compose_univariate(a, d);
}

inline Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  std::vector<double> d(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) d[k] = (k % 2) ? s : c;
  return Jet::compose_univariate(a, d);
}

inline Jet tanh(const Jet& a) {
  auto d = detail::tan_like_derivs(std::tanh(a.value()), -1.0, a.order());
  d[0] = std::tanh(a.value());
  return Jet::compose_univariate(a, d);
}

inline Jet sqrt(const Jet& a) {
  const double a0 = a.value();
  if (a0 < 0.0 || (a0 == 0.0 && a.order() > 0)) throw DomainError("sqrt of negative value");
  if (a.order() == 0) return a.is_constant() ? Jet(std::sqrt(a0)) : Jet(a.layout(), std::sqrt(a0));
  return Jet::compose_univariate(a, detail::power_derivs(a0, 0.5, a.order()));
}

/// a^c for real c; requires a > 0.
inline Jet pow(const Jet& a, double c) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("non-integer power of non-positive value");
  return Jet::compose_univariate(a, detail::power_derivs(a0, c, a.order()));
}

/// Integer power by repeated squaring; any sign of the base.
inline Jet ipow(const Jet& a, long k) {
  if (k < 0) return reciprocal(ipow(a, -k));
  Jet result(1.0);
  Jet base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

/// Jets of the coordinate functions x_v = x0_v + dx_v.
inline std::vector<Jet> coordinate_jets(std::span<const double> x0, int order) {
  const auto& L = JetLayout::get(static_cast<int>(x0.size()), order);
  std::vector<Jet> out;
  out.reserve(x0.size());
  for (std::size_t v = 0; v < x0.size(); ++v) out.push_back(Jet::variable(L, static_cast<int>(v), x0[v]));
  return out;
}

/// Substitution x = x0 + h(u) into jets expanded at x0. `h` holds jets in
/// the new variables with zero constant term; monomials h^m are built once
/// and shared by every jet composed through the same substitution.
class JetSubstitution {
 public:
  JetSubstitution(std::vector<Jet> h, int max_order) : h_(std::move(h)) {
    if (h_.empty()) throw std::invalid_argument("empty substitution");
    for (auto& hv : h_) hv.c_[0] = 0.0;
    L_ = &JetLayout::get(static_cast<int>(h_.size()), max_order);
    powers_.resize(L_->size());
    powers_[0] = Jet(1.0);
    for (int m = 1; m < L_->size(); ++m) powers_[m] = powers_[L_->predecessor(m)] * h_[L_->predecessor_var(m)];
  }

  Jet apply(const Jet& f) const {
    if (f.is_constant()) return f;
    if (f.nvars() != L_->nvars()) throw std::invalid_argument("substitution variable count mismatch");
    const int n = std::min(f.layout().size(), L_->size());
    Jet r(f.value());
    for (int m = 1; m < n; ++m) {
      const double c = f.coeff(m);
      if (c != 0.0) r += powers_[m] * c;
    }
    if (f.order() < L_->order() && !r.is_constant()) r = r.truncated(f.order());
    return r;
  }

 private:
  std::vector<Jet> h_;
  const JetLayout* L_;
  std::vector<Jet> powers_;
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace fb
