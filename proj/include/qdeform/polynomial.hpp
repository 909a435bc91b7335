// Dense univariate polynomials in x0 with the handful of operations the
// angular realization needs (dilatation, exact division, q-derivatives).
#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace qdeform {

template <typename Real> class Polynomial {
public:
  Polynomial() = default;
  Polynomial(std::initializer_list<Real> coeffs) : c_(coeffs) { trim(); }
  explicit Polynomial(std::vector<Real> coeffs) : c_(std::move(coeffs)) {
    trim();
  }

  static Polynomial constant(const Real &value) { return Polynomial({value}); }
  static Polynomial monomial(int k, const Real &value = Real(1)) {
    std::vector<Real> c(static_cast<std::size_t>(k) + 1, Real(0));
    c.back() = value;
    return Polynomial(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  std::size_t size() const { return c_.size(); }
  const std::vector<Real> &coefficients() const { return c_; }

  Real operator[](int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Real(0);
  }

  Real operator()(const Real &x) const {
    Real acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      acc = acc * x + *it;
    }
    return acc;
  }

  Polynomial &operator+=(const Polynomial &o) {
    if (o.c_.size() > c_.size()) {
      c_.resize(o.c_.size(), Real(0));
    }
    for (std::size_t k = 0; k < o.c_.size(); ++k) {
      c_[k] += o.c_[k];
    }
    trim();
    return *this;
  }
  Polynomial &operator-=(const Polynomial &o) { return *this += o * Real(-1); }
  Polynomial &operator*=(const Real &s) {
    for (auto &a : c_) {
      a *= s;
    }
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial &b) {
    return a += b;
  }
  friend Polynomial operator-(Polynomial a, const Polynomial &b) {
    return a -= b;
  }
  friend Polynomial operator*(Polynomial a, const Real &s) { return a *= s; }
  friend Polynomial operator*(const Real &s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial &a, const Polynomial &b) {
    if (a.is_zero() || b.is_zero()) {
      return {};
    }
    std::vector<Real> r(a.c_.size() + b.c_.size() - 1, Real(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        r[i + j] += a.c_[i] * b.c_[j];
      }
    }
    return Polynomial(std::move(r));
  }

  /// P(s x).
  Polynomial dilated(const Real &s) const {
    std::vector<Real> r = c_;
    Real f(1);
    for (auto &a : r) {
      a *= f;
      f *= s;
    }
    return Polynomial(std::move(r));
  }

  /// x P(x).
  Polynomial times_x() const {
    if (is_zero()) {
      return {};
    }
    std::vector<Real> r(c_.size() + 1, Real(0));
    std::copy(c_.begin(), c_.end(), r.begin() + 1);
    return Polynomial(std::move(r));
  }

  /// Applies k -> weight(k) * x^{k-1}; the k = 0 term is dropped.
  template <typename Weight> Polynomial lowered(Weight &&weight) const {
    if (c_.size() <= 1) {
      return {};
    }
    std::vector<Real> r(c_.size() - 1, Real(0));
    for (std::size_t k = 1; k < c_.size(); ++k) {
      r[k - 1] = weight(static_cast<int>(k)) * c_[k];
    }
    return Polynomial(std::move(r));
  }

  /// Quotient of an exact division; the remainder is returned through
  /// `remainder_norm` (max |coefficient|) for the caller to judge.
  Polynomial divided_by(const Polynomial &d, Real *remainder_norm) const {
    if (d.is_zero()) {
      throw std::domain_error("polynomial division by zero");
    }
    std::vector<Real> num = c_;
    const int nd = d.degree();
    if (degree() < nd) {
      if (remainder_norm) {
        *remainder_norm = max_abs();
      }
      return {};
    }
    std::vector<Real> quot(static_cast<std::size_t>(degree() - nd + 1),
                           Real(0));
    for (int i = degree() - nd; i >= 0; --i) {
      const Real coef = num[i + nd] / d.c_[nd];
      quot[i] = coef;
      for (int j = 0; j <= nd; ++j) {
        num[i + j] -= coef * d.c_[j];
      }
    }
    if (remainder_norm) {
      Real worst(0);
      for (int k = 0; k < nd; ++k) {
        using std::abs;
        Real a = abs(num[k]);
        if (a > worst) {
          worst = a;
        }
      }
      *remainder_norm = worst;
    }
    return Polynomial(std::move(quot));
  }

  Real max_abs() const {
    Real worst(0);
    for (const auto &a : c_) {
      using std::abs;
      Real v = abs(a);
      if (v > worst) {
        worst = v;
      }
    }
    return worst;
  }

private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) {
      c_.pop_back();
    }
  }

  std::vector<Real> c_;
};

} // namespace qdeform
