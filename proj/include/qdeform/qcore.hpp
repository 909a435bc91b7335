// q-number arithmetic and the closed-form su_q(2) invariants.
//
// Everything here is templated on the scalar type so that the same code
// runs in double precision and in the 50-digit mode used for oracle runs.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace qdeform {

using high_precision = boost::multiprecision::cpp_bin_float_50;

enum class Precision { standard, high };

inline std::string to_string(Precision p) {
  return p == Precision::high ? "high" : "double";
}

/// Identity-check tolerance matched to the scalar type.
template <typename Real> Real default_tolerance() {
  if constexpr (std::is_same_v<Real, double>) {
    return Real(1e-10);
  } else {
    return Real("1e-30");
  }
}

template <typename Real> double to_double(const Real &x) {
  return static_cast<double>(x);
}

/// Deformation parameter q > 0 together with lambda = q - 1/q.
///
/// q == 1 is stored as an exact classical branch; callers that divide by
/// lambda must check classical() first.
template <typename Real> class QParam {
public:
  explicit QParam(const Real &q) : q_(q) {
    using std::isfinite;
    using boost::multiprecision::isfinite;
    if (!(q > 0) || !isfinite(q)) {
      throw std::invalid_argument("q must be a finite positive real");
    }
    using std::log;
    using boost::multiprecision::log;
    log_q_ = (q == 1) ? Real(0) : Real(log(q));
    lambda_ = (q == 1) ? Real(0) : Real(q - 1 / q);
  }

  const Real &q() const { return q_; }
  const Real &lambda() const { return lambda_; }
  const Real &log_q() const { return log_q_; }
  bool classical() const { return q_ == 1; }

  /// q^exponent; exact 1 on the classical branch.
  Real pow(const Real &exponent) const {
    if (classical()) {
      return Real(1);
    }
    using std::exp;
    using boost::multiprecision::exp;
    return exp(exponent * log_q_);
  }
  Real pow(int exponent) const { return pow(Real(exponent)); }

  QParam inverse() const { return QParam(Real(1) / q_); }
  /// Parameter with base q^2, used by the rebased q-numbers.
  QParam squared() const { return QParam(q_ * q_); }

  template <typename Other> QParam<Other> cast() const {
    return QParam<Other>(Other(q_));
  }

private:
  Real q_;
  Real log_q_;
  Real lambda_;
};

/// [n] = (q^n - q^-n)/(q - q^-1), evaluated as sinh(n ln q)/sinh(ln q).
template <typename Real> Real qnum(const Real &n, const QParam<Real> &p) {
  if (p.classical()) {
    return n;
  }
  using std::sinh;
  using boost::multiprecision::sinh;
  return Real(sinh(n * p.log_q()) / sinh(p.log_q()));
}

template <typename Real> Real qnum(int n, const QParam<Real> &p) {
  return qnum(Real(n), p);
}

/// [n] written as [2] [n/2]_{q^2}; identical to qnum(n) for every q.
template <typename Real> Real qnum_rebased(int n, const QParam<Real> &p) {
  return qnum(2, p) * qnum(Real(n) / 2, p.squared());
}

/// [n]! with [0]! = 1.
template <typename Real> Real qfactorial(int n, const QParam<Real> &p) {
  if (n < 0) {
    throw std::invalid_argument("qfactorial: n must be nonnegative");
  }
  Real result(1);
  for (int k = 2; k <= n; ++k) {
    result *= qnum(k, p);
  }
  return result;
}

/// [n]!! = [n][n-2]... with [0]!! = [-1]!! = 1.
template <typename Real>
Real qdouble_factorial(int n, const QParam<Real> &p) {
  if (n < -1) {
    throw std::invalid_argument("qdouble_factorial: n must be >= -1");
  }
  Real result(1);
  for (int k = n; k > 1; k -= 2) {
    result *= qnum(k, p);
  }
  return result;
}

/// Eigenvalues of the three su_q(2) invariants on the (2l+1)-dimensional irrep.
template <typename Real> struct InvariantSet {
  int l = 0;
  Real casimir;       // C_l  = [l][l+1]
  Real casimir_prime; // C'_l = [2l][2l+2]/[2]^2
  Real c;             // c_l  = (q^{2l+1} + q^{-2l-1})/[2]
};

/// c_l via cosh((2l+1) ln q)/cosh(ln q); this is exactly 1 at l = 0.
template <typename Real> Real invariant_c(int l, const QParam<Real> &p) {
  if (p.classical()) {
    return Real(1);
  }
  using std::cosh;
  using boost::multiprecision::cosh;
  return Real(cosh(Real(2 * l + 1) * p.log_q()) / cosh(p.log_q()));
}

template <typename Real>
InvariantSet<Real> invariants(int l, const QParam<Real> &p) {
  if (l < 0) {
    throw std::invalid_argument("invariants: l must be nonnegative");
  }
  const Real two = qnum(2, p);
  InvariantSet<Real> out;
  out.l = l;
  out.casimir = qnum(l, p) * qnum(l + 1, p);
  out.casimir_prime = qnum(2 * l, p) * qnum(2 * l + 2, p) / (two * two);
  out.c = invariant_c(l, p);
  return out;
}

} // namespace qdeform
