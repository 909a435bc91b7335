// Jackson-type q-integration over x0 in (-1, 1) and the inner product on
// angular functions.
#pragma once

#include "angular.hpp"
#include "qcore.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qdeform {

enum class JacksonMode { closed_form, series };

/// Integration rule for d[x0]. Series mode sums the geometric grid
/// x_k = q^k and therefore needs 0 < q < 1; closed form works for any q > 0.
template <typename Real> class QMeasure {
public:
  explicit QMeasure(const QParam<Real> &p, JacksonMode mode = JacksonMode::closed_form,
                    int series_depth = 200)
      : p_(p), mode_(mode), depth_(series_depth) {
    if (mode_ == JacksonMode::series) {
      if (!(p.q() < 1)) {
        throw std::invalid_argument("series Jackson integration requires 0 < q < 1");
      }
      if (depth_ <= 0) {
        throw std::invalid_argument("series depth must be positive");
      }
    }
  }

  const QParam<Real> &param() const { return p_; }
  JacksonMode mode() const { return mode_; }
  int series_depth() const { return depth_; }

private:
  QParam<Real> p_;
  JacksonMode mode_;
  int depth_;
};

namespace detail {

/// sum_{k < depth} x_{2k+1}^n (x_{2k} - x_{2k+2}), x_k = q^k.
template <typename Real> Real jackson_half_series(int n, const QParam<Real> &p, int depth) {
  using std::pow;
  const Real q = p.q();
  const Real q2 = q * q;
  const Real qn1 = pow(q, n);
  Real sum(0);
  Real grid(1);   // q^{2k}
  Real sample(1); // q^{(2k+1) n} / q^n
  const Real step = pow(q2, n);
  for (int k = 0; k < depth; ++k) {
    sum += qn1 * sample * grid * (1 - q2);
    grid *= q2;
    sample *= step;
  }
  return sum;
}

} // namespace detail

/// Integral of x0^n over (-1, 1): (1 + (-1)^n) / [n+1].
template <typename Real> Real integrate_monomial(int n, const QMeasure<Real> &mu) {
  if (n < 0) {
    throw std::invalid_argument("monomial degree must be nonnegative");
  }
  if (n % 2 != 0) {
    return Real(0);
  }
  if (mu.mode() == JacksonMode::closed_form) {
    return Real(2) / qnum(n + 1, mu.param());
  }
  return 2 * detail::jackson_half_series(n, mu.param(), mu.series_depth());
}

template <typename Real>
Real integrate_polynomial(const Polynomial<Real> &poly, const QMeasure<Real> &mu) {
  Real sum(0);
  for (int k = 0; k <= poly.degree(); k += 2) {
    if (poly[k] != 0) {
      sum += poly[k] * integrate_monomial(k, mu);
    }
  }
  return sum;
}

/// <f, g> by expanding conj(P_f) W P_g in monomials and integrating each
/// with the closed form. Exact in exact arithmetic; loses digits to
/// cancellation when q is far from 1.
template <typename Real>
Real inner_product_monomial(const AngularFunction<Real> &f, const AngularFunction<Real> &g,
                            const QMeasure<Real> &mu) {
  if (f.winding() != g.winding() || f.is_zero() || g.is_zero()) {
    return Real(0);
  }
  const Real two_pi = boost::math::constants::two_pi<Real>();
  const auto weight = winding::adjoint_weight(f.winding(), mu.param());
  return two_pi * integrate_polynomial(f.polynomial() * weight * g.polynomial(), mu);
}

namespace detail {

/// W_m(x) of `winding::adjoint_weight` kept in factored form
/// prefactor * prod_i -(1 - a_i x^2)/[2].
template <typename Real> class FactoredWeight {
public:
  FactoredWeight(int m, const QParam<Real> &p) {
    const int j = m >= 0 ? m : -m;
    for (int i = 0; i < j; ++i) {
      a_.push_back(m >= 0 ? p.pow(-2 - 4 * i) : p.pow(2 + 4 * i));
    }
    const Real mag = m >= 0 ? p.pow(-m) : p.pow(j);
    // (-1)^j from the adjoint signs times (-1)^j from the factors.
    prefactor_ = mag;
    const Real inv_two = Real(1) / qnum(2, p);
    for (int i = 0; i < j; ++i) {
      prefactor_ *= inv_two;
    }
  }

  Real operator()(const Real &x) const {
    const Real x2 = x * x;
    Real w = prefactor_;
    for (const auto &a : a_) {
      w *= 1 - a * x2;
    }
    return w;
  }

private:
  std::vector<Real> a_;
  Real prefactor_;
};

/// Sum over the grid x_k = s^{2k+1}, k < depth, of the even part of
/// conj(P_f) W P_g, weighted by s^{2k}(1 - s^2). Pointwise evaluation keeps
/// the summands free of the cancellations a monomial expansion suffers
/// when q is far from 1.
template <typename Real>
Real grid_sum(const AngularFunction<Real> &f, const AngularFunction<Real> &g, const Real &s,
              int depth) {
  const FactoredWeight<Real> weight(f.winding(), f.param());
  const Real s2 = s * s;
  Real sum(0);
  Real width = 1 - s2; // s^{2k}(1 - s^2)
  Real x = s;
  for (int k = 0; k < depth; ++k) {
    const Real plus = f.polynomial()(x) * g.polynomial()(x);
    const Real minus = f.polynomial()(-x) * g.polynomial()(-x);
    sum += (plus + minus) * weight(x) * width;
    x *= s2;
    width *= s2;
  }
  return sum;
}

/// Grid depth at which s^{2 depth} drops below the working precision.
template <typename Real> int exhaustive_depth(const Real &s) {
  using std::log;
  const double eps = to_double(Real(std::numeric_limits<Real>::epsilon()));
  const double ls = std::log(to_double(s));
  return static_cast<int>(std::ceil(std::log(eps * 1e-3) / (2 * ls))) + 1;
}

} // namespace detail

/// <f, g> = integral of f^+ g over phi and d[x0]. The phi integral is a
/// Kronecker delta on the windings (times 2 pi); the x~ factors of f^+ g
/// reduce to the polynomial weight of `winding::adjoint_weight`.
///
/// Closed-form mode: the functional x0^n -> (1 + (-1)^n)/[n+1] is the same
/// for q and 1/q, so away from q = 1 it is evaluated as the convergent grid
/// sum with base min(q, 1/q), run until the tail is below the working
/// precision. At (or extremely near) q = 1 the monomial rule is used.
/// Series mode: the grid sum with base q and the measure's depth.
template <typename Real>
Real inner_product(const AngularFunction<Real> &f, const AngularFunction<Real> &g,
                   const QMeasure<Real> &mu) {
  if (f.winding() != g.winding() || f.is_zero() || g.is_zero()) {
    return Real(0);
  }
  const Real two_pi = boost::math::constants::two_pi<Real>();
  const auto &p = mu.param();
  if (mu.mode() == JacksonMode::series) {
    return two_pi * detail::grid_sum(f, g, p.q(), mu.series_depth());
  }
  if (!p.classical()) {
    const Real s = p.q() < 1 ? p.q() : Real(1) / p.q();
    const int depth = detail::exhaustive_depth(s);
    if (depth <= 200000) {
      return two_pi * detail::grid_sum(f, g, s, depth);
    }
  }
  return inner_product_monomial(f, g, mu);
}

template <typename Real>
Real inner_product(const AngularFunction<Real> &f, const AngularFunction<Real> &g) {
  return inner_product(f, g, QMeasure<Real>(f.param()));
}

template <typename Real> struct ConvergenceRow {
  int depth = 0;
  Real partial_sum;
  Real error; // |partial - 1/[n+1]|
};

template <typename Real> struct ConvergenceTable {
  int degree = 0;
  Real q;
  Real limit; // 1/[n+1]
  std::vector<ConvergenceRow<Real>> rows;
  std::optional<int> depth_for_target; // first depth with error below target
};

/// Partial sums of the half-line series for x0^n at the requested depths,
/// and the smallest depth (searched up to `max_search`) meeting `target`.
template <typename Real>
ConvergenceTable<Real> series_convergence_probe(int n, const QParam<Real> &p,
                                                const std::vector<int> &depths,
                                                Real target = Real(1e-12),
                                                int max_search = 100000) {
  if (!(p.q() < 1)) {
    throw std::invalid_argument("series convergence probe requires 0 < q < 1");
  }
  if (n < 0) {
    throw std::invalid_argument("monomial degree must be nonnegative");
  }
  using std::abs;
  using std::pow;
  ConvergenceTable<Real> table;
  table.degree = n;
  table.q = p.q();
  table.limit = Real(1) / qnum(n + 1, p);
  for (int d : depths) {
    const Real s = detail::jackson_half_series(n, p, d);
    table.rows.push_back({d, s, Real(abs(s - table.limit))});
  }
  // Incremental search for the first depth within target.
  const Real q2 = p.q() * p.q();
  const Real qn1 = pow(p.q(), n);
  const Real step = pow(q2, n);
  Real sum(0), grid(1), sample(1);
  for (int k = 0; k < max_search; ++k) {
    sum += qn1 * sample * grid * (1 - q2);
    grid *= q2;
    sample *= step;
    if (abs(sum - table.limit) < target) {
      table.depth_for_target = k + 1;
      break;
    }
  }
  return table;
}

} // namespace qdeform
