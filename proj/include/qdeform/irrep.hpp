// Block-sparse operator matrices on the truncated harmonic basis
// {|l, m> : l <= lmax} and the matrix-level identity verifier.
#pragma once

#include "parallel.hpp"
#include "qcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdeform {

/// Operator restricted to l' , l <= lmax, stored as dense (2l'+1) x (2l+1)
/// blocks keyed by (l', l). Rows/columns inside a block run over m + l.
template <typename Real> class OperatorMatrix {
public:
  struct Block {
    int rows = 0;
    int cols = 0;
    std::vector<Real> data;

    Block() = default;
    Block(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), Real(0)) {}
    Real &at(int i, int j) { return data[static_cast<std::size_t>(i * cols + j)]; }
    const Real &at(int i, int j) const { return data[static_cast<std::size_t>(i * cols + j)]; }
  };
  using Key = std::pair<int, int>;

  OperatorMatrix(const QParam<Real> &p, int lmax, std::optional<int> delta_m = std::nullopt)
      : p_(p), lmax_(lmax), delta_m_(delta_m) {
    if (lmax < 0) {
      throw std::invalid_argument("lmax must be nonnegative");
    }
  }

  static OperatorMatrix identity(const QParam<Real> &p, int lmax) {
    return diagonal(p, lmax, [](int, int) { return Real(1); });
  }

  template <typename Fn> static OperatorMatrix diagonal(const QParam<Real> &p, int lmax, Fn &&fn) {
    OperatorMatrix out(p, lmax, 0);
    for (int l = 0; l <= lmax; ++l) {
      for (int m = -l; m <= l; ++m) {
        out.set(l, m, l, m, fn(l, m));
      }
    }
    return out;
  }

  const QParam<Real> &param() const { return p_; }
  int lmax() const { return lmax_; }
  /// Fixed m' - m carried by the operator; nullopt when mixed or unknown.
  std::optional<int> delta_m() const { return delta_m_; }
  const std::map<Key, Block> &blocks() const { return blocks_; }

  Real get(int lp, int mp, int l, int m) const {
    auto it = blocks_.find({lp, l});
    if (it == blocks_.end() || std::abs(mp) > lp || std::abs(m) > l) {
      return Real(0);
    }
    return it->second.at(mp + lp, m + l);
  }

  void set(int lp, int mp, int l, int m, const Real &v) { block(lp, l).at(mp + lp, m + l) = v; }
  void add(int lp, int mp, int l, int m, const Real &v) { block(lp, l).at(mp + lp, m + l) += v; }

  /// Entry of the diagonal at (l, m).
  Real diagonal_entry(int l, int m) const { return get(l, m, l, m); }

  OperatorMatrix adjoint() const {
    OperatorMatrix out(p_, lmax_, delta_m_ ? std::optional<int>(-*delta_m_) : std::nullopt);
    for (const auto &[key, b] : blocks_) {
      auto &t = out.block(key.second, key.first);
      for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
          t.at(j, i) = b.at(i, j);
        }
      }
    }
    return out;
  }

  OperatorMatrix &operator+=(const OperatorMatrix &o) {
    check_compatible(o);
    if (delta_m_ != o.delta_m_) {
      delta_m_ = blocks_.empty() ? o.delta_m_ : (o.blocks_.empty() ? delta_m_ : std::nullopt);
    }
    for (const auto &[key, b] : o.blocks_) {
      auto &t = block(key.first, key.second);
      for (std::size_t i = 0; i < b.data.size(); ++i) {
        t.data[i] += b.data[i];
      }
    }
    return *this;
  }
  OperatorMatrix &operator-=(const OperatorMatrix &o) { return *this += o * Real(-1); }
  OperatorMatrix &operator*=(const Real &s) {
    for (auto &[key, b] : blocks_) {
      for (auto &v : b.data) {
        v *= s;
      }
    }
    return *this;
  }

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix &b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix &b) { return a -= b; }
  friend OperatorMatrix operator*(OperatorMatrix a, const Real &s) { return a *= s; }
  friend OperatorMatrix operator*(const Real &s, OperatorMatrix a) { return a *= s; }

  friend OperatorMatrix operator*(const OperatorMatrix &a, const OperatorMatrix &b) {
    a.check_compatible(b);
    std::optional<int> dm;
    if (a.delta_m_ && b.delta_m_) {
      dm = *a.delta_m_ + *b.delta_m_;
    }
    OperatorMatrix out(a.p_, a.lmax_, dm);
    for (const auto &[ka, ba] : a.blocks_) {
      for (const auto &[kb, bb] : b.blocks_) {
        if (ka.second != kb.first) {
          continue;
        }
        auto &t = out.block(ka.first, kb.second);
        for (int i = 0; i < ba.rows; ++i) {
          for (int s = 0; s < ba.cols; ++s) {
            const Real &av = ba.at(i, s);
            if (av == 0) {
              continue;
            }
            for (int j = 0; j < bb.cols; ++j) {
              t.at(i, j) += av * bb.at(s, j);
            }
          }
        }
      }
    }
    return out;
  }

  /// max |entry| over blocks with l', l <= l_limit.
  Real max_abs(int l_limit) const {
    Real worst(0);
    for (const auto &[key, b] : blocks_) {
      if (key.first > l_limit || key.second > l_limit) {
        continue;
      }
      for (const auto &v : b.data) {
        using std::abs;
        Real a = abs(v);
        if (a > worst) {
          worst = a;
        }
      }
    }
    return worst;
  }

private:
  Block &block(int lp, int l) {
    if (lp < 0 || l < 0 || lp > lmax_ || l > lmax_) {
      throw std::out_of_range("block outside the truncated basis");
    }
    auto it = blocks_.find({lp, l});
    if (it == blocks_.end()) {
      it = blocks_.emplace(Key{lp, l}, Block(2 * lp + 1, 2 * l + 1)).first;
    }
    return it->second;
  }

  void check_compatible(const OperatorMatrix &o) const {
    if (o.lmax_ != lmax_ || o.p_.q() != p_.q()) {
      throw std::invalid_argument("operator matrices built at different (q, lmax)");
    }
  }

  QParam<Real> p_;
  int lmax_;
  std::optional<int> delta_m_;
  std::map<Key, Block> blocks_;
};

/// Spherical components (v_{+1}, v_0, v_{-1}) of a q-vector operator.
template <typename Real> struct QVector {
  OperatorMatrix<Real> plus;
  OperatorMatrix<Real> zero;
  OperatorMatrix<Real> minus;

  const OperatorMatrix<Real> &operator[](int k) const {
    switch (k) {
    case 1: return plus;
    case 0: return zero;
    case -1: return minus;
    default: throw std::out_of_range("q-vector component must be -1, 0 or +1");
    }
  }
  OperatorMatrix<Real> &operator[](int k) {
    return const_cast<OperatorMatrix<Real> &>(std::as_const(*this)[k]);
  }
};

template <typename Real> struct Generators {
  OperatorMatrix<Real> L0;
  OperatorMatrix<Real> Lplus;
  OperatorMatrix<Real> Lminus;
};

/// Diagonal q^{s L0}.
template <typename Real> OperatorMatrix<Real> q_power_L0(const QParam<Real> &p, int lmax, int s) {
  return OperatorMatrix<Real>::diagonal(p, lmax, [&](int, int m) { return p.pow(s * m); });
}

/// Diagonal [L0 + shift].
template <typename Real>
OperatorMatrix<Real> qnum_L0(const QParam<Real> &p, int lmax, int scale, int shift) {
  return OperatorMatrix<Real>::diagonal(p, lmax,
                                        [&](int, int m) { return qnum(scale * m + shift, p); });
}

/// L0 = m and L+-|l,m> = sqrt([l -+ m][l +- m + 1]) |l,m+-1>, positive real.
template <typename Real> Generators<Real> build_generators(const QParam<Real> &p, int lmax) {
  using std::sqrt;
  Generators<Real> g{OperatorMatrix<Real>::diagonal(p, lmax, [](int, int m) { return Real(m); }),
                     OperatorMatrix<Real>(p, lmax, 1), OperatorMatrix<Real>(p, lmax, -1)};
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      if (m < l) {
        g.Lplus.set(l, m + 1, l, m, Real(sqrt(qnum(l - m, p) * qnum(l + m + 1, p))));
      }
      if (m > -l) {
        g.Lminus.set(l, m - 1, l, m, Real(sqrt(qnum(l + m, p) * qnum(l - m + 1, p))));
      }
    }
  }
  return g;
}

/// Lambda_{+-1} = -+ sqrt(1/[2]) q^{-L0} L+-,
/// Lambda_0 = (q L+ L- - q^{-1} L- L+)/[2].
template <typename Real> QVector<Real> build_lambda(const QParam<Real> &p, int lmax) {
  using std::sqrt;
  const auto g = build_generators(p, lmax);
  const Real root2 = sqrt(qnum(2, p));
  const auto qm = q_power_L0(p, lmax, -1);
  QVector<Real> v{(qm * g.Lplus) * (Real(-1) / root2), OperatorMatrix<Real>(p, lmax, 0),
                  (qm * g.Lminus) * (Real(1) / root2)};
  v.zero = (g.Lplus * g.Lminus * p.q() - g.Lminus * g.Lplus * (Real(1) / p.q())) *
           (Real(1) / qnum(2, p));
  return v;
}

/// c = q^{-2 L0} + lambda Lambda_0 in operator form.
template <typename Real> OperatorMatrix<Real> build_invariant_c(const QParam<Real> &p, int lmax) {
  const auto lam = build_lambda(p, lmax);
  return q_power_L0(p, lmax, -2) + lam.zero * p.lambda();
}

/// Which closed forms to use for <l+-1, m+k| x_k |l, m>.
enum class PositionCoefficients {
  consistent, // agree with Jackson integration and with hermiticity
  alternate   // minus sign on the x0 lower term, q^{l-m} on the x_{-1} upper term
};

/// <l', m+k| x_k |l, m> for l' = l + 1 (`up`) or l - 1.
template <typename Real>
Real position_coefficient(int k, bool up, int l, int m, const QParam<Real> &p,
                          PositionCoefficients form = PositionCoefficients::consistent) {
  using std::sqrt;
  auto Q = [&](int n) { return qnum(n, p); };
  auto root = [](const Real &x) { return x > 0 ? Real(sqrt(x)) : Real(0); };
  const bool alt = form == PositionCoefficients::alternate;
  if (!up && l == 0) {
    return Real(0);
  }
  switch (k) {
  case 1:
    return up ? p.pow(l - m) * root(Q(l + m + 1) * Q(l + m + 2) / (Q(2) * Q(2 * l + 1) * Q(2 * l + 3)))
              : -p.pow(-l - m - 1) *
                    root(Q(l - m) * Q(l - m - 1) / (Q(2) * Q(2 * l + 1) * Q(2 * l - 1)));
  case 0:
    return up ? p.pow(-m) * root(Q(l - m + 1) * Q(l + m + 1) / (Q(2 * l + 1) * Q(2 * l + 3)))
              : (alt ? Real(-1) : Real(1)) * p.pow(-m) *
                    root(Q(l - m) * Q(l + m) / (Q(2 * l + 1) * Q(2 * l - 1)));
  case -1:
    return up ? p.pow(alt ? l - m : -l - m) *
                    root(Q(l - m + 1) * Q(l - m + 2) / (Q(2) * Q(2 * l + 1) * Q(2 * l + 3)))
              : -p.pow(l - m + 1) *
                    root(Q(l + m) * Q(l + m - 1) / (Q(2) * Q(2 * l + 1) * Q(2 * l - 1)));
  default:
    throw std::invalid_argument("position component must be -1, 0 or +1");
  }
}

/// Unit position vector x_k with the blocks (l +- 1, l) filled.
template <typename Real>
QVector<Real> build_position(const QParam<Real> &p, int lmax,
                             PositionCoefficients form = PositionCoefficients::consistent) {
  if (lmax < 1) {
    throw std::invalid_argument("position matrices need lmax >= 1");
  }
  QVector<Real> x{OperatorMatrix<Real>(p, lmax, 1), OperatorMatrix<Real>(p, lmax, 0),
                  OperatorMatrix<Real>(p, lmax, -1)};
  for (int k : {1, 0, -1}) {
    for (int l = 0; l <= lmax; ++l) {
      for (int m = -l; m <= l; ++m) {
        const int mt = m + k;
        if (l + 1 <= lmax && std::abs(mt) <= l + 1) {
          x[k].set(l + 1, mt, l, m, position_coefficient(k, true, l, m, p, form));
        }
        if (l >= 1 && std::abs(mt) <= l - 1) {
          x[k].set(l - 1, mt, l, m, position_coefficient(k, false, l, m, p, form));
        }
      }
    }
  }
  return x;
}

/// -(1/q) u_1 v_{-1} + u_0 v_0 - q u_{-1} v_1.
template <typename Real>
OperatorMatrix<Real> scalar_product(const QVector<Real> &u, const QVector<Real> &v) {
  const auto &p = u.zero.param();
  return (u.plus * v.minus) * (Real(-1) / p.q()) + u.zero * v.zero -
         (u.minus * v.plus) * p.q();
}

enum class PartialMethod { composed, matrix_elements };

/// Transverse derivative d_k, either composed from x, Lambda and c, or by
/// rescaling the x blocks with [2l+2]/[2] (up) and -[2l]/[2] (down).
template <typename Real>
QVector<Real> build_partial(const QParam<Real> &p, int lmax, PartialMethod method,
                            const QVector<Real> *position = nullptr) {
  std::optional<QVector<Real>> x_local;
  if (!position) {
    x_local = build_position(p, lmax);
  }
  const QVector<Real> &x = position ? *position : *x_local;
  if (method == PartialMethod::composed) {
    const auto lam = build_lambda(p, lmax);
    const auto c = build_invariant_c(p, lmax);
    const Real q = p.q();
    QVector<Real> d{x.plus * lam.zero * (Real(1) / q) - x.zero * lam.plus * q + x.plus * c,
                    x.plus * lam.minus - x.zero * lam.zero * p.lambda() - x.minus * lam.plus +
                        x.zero * c,
                    x.minus * lam.zero * (-q) + x.zero * lam.minus * (Real(1) / q) +
                        x.minus * c};
    return d;
  }
  const Real two = qnum(2, p);
  QVector<Real> d{OperatorMatrix<Real>(p, lmax, 1), OperatorMatrix<Real>(p, lmax, 0),
                  OperatorMatrix<Real>(p, lmax, -1)};
  for (int k : {1, 0, -1}) {
    for (const auto &[key, b] : x[k].blocks()) {
      const int lp = key.first;
      const int l = key.second;
      Real factor(0);
      if (lp == l + 1) {
        factor = qnum(2 * l + 2, p) / two;
      } else if (lp == l - 1) {
        factor = -qnum(2 * l, p) / two;
      }
      for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
          d[k].set(lp, i - lp, l, j - l, factor * b.at(i, j));
        }
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Verification.

/// One identity: name, the relation it checks, and its residual.
struct IdentityResult {
  std::string module;
  std::string name;
  std::string relation;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

/// A candidate closed form checked against the construction; informative
/// only, does not gate the verdict.
struct Finding {
  std::string name;
  std::string relation;
  double residual = 0;
  bool holds = false;
  std::string detail;
};

struct AlgebraReport {
  double q = 1;
  int lmax = 0;
  int interior_lmax = 0;
  std::vector<IdentityResult> identities;
  std::vector<Finding> findings;
  std::string partial_square_match; // the single consistent candidate, or "none"/"ambiguous"
  bool truncation_stable = false;
  double truncation_difference = 0;

  bool all_pass() const {
    return std::all_of(identities.begin(), identities.end(),
                       [](const IdentityResult &r) { return r.pass || r.skipped; });
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto &r : identities) {
      if (!r.pass && !r.skipped) {
        out.push_back(r.name);
      }
    }
    return out;
  }
};

/// max|lhs - rhs| / max(1, max|lhs|, max|rhs|) over blocks with l', l <= limit.
template <typename Real>
Real relative_residual(const OperatorMatrix<Real> &lhs, const OperatorMatrix<Real> &rhs,
                       int limit) {
  const Real diff = (lhs - rhs).max_abs(limit);
  Real scale(1);
  const Real a = lhs.max_abs(limit);
  const Real b = rhs.max_abs(limit);
  if (a > scale) scale = a;
  if (b > scale) scale = b;
  return diff / scale;
}

/// The full matrix realization at (q, lmax).
template <typename Real> struct OperatorSet {
  QParam<Real> p;
  int lmax;
  Generators<Real> gen;
  QVector<Real> lambda;
  OperatorMatrix<Real> c;
  QVector<Real> x;
  QVector<Real> partial;
  QVector<Real> partial_elements;

  static OperatorSet build(const QParam<Real> &p, int lmax,
                           const std::function<void(QVector<Real> &)> &tamper_position = {}) {
    auto x = build_position(p, lmax);
    if (tamper_position) {
      tamper_position(x);
    }
    return OperatorSet{p,
                       lmax,
                       build_generators(p, lmax),
                       build_lambda(p, lmax),
                       build_invariant_c(p, lmax),
                       x,
                       build_partial(p, lmax, PartialMethod::composed, &x),
                       build_partial(p, lmax, PartialMethod::matrix_elements, &x)};
  }
};

namespace detail {

/// Largest residual of (L0 v_k - v_k L0 - k v_k) and
/// (L+- v_k - q^k v_k L+-) q^{L0} - sqrt[2] v_{k+-1}.
template <typename Real>
Real vector_condition_residual(const Generators<Real> &g, const QVector<Real> &v,
                               const QParam<Real> &p, int lmax, int limit) {
  using std::sqrt;
  const Real root2 = sqrt(qnum(2, p));
  const auto qL0 = q_power_L0(p, lmax, 1);
  const OperatorMatrix<Real> zero(p, lmax);
  Real worst(0);
  auto keep = [&](const Real &r) {
    if (r > worst) worst = r;
  };
  for (int k : {1, 0, -1}) {
    keep(relative_residual(g.L0 * v[k] - v[k] * g.L0, v[k] * Real(k), limit));
    for (int s : {1, -1}) {
      const auto &L = s > 0 ? g.Lplus : g.Lminus;
      const auto lhs = (L * v[k] - v[k] * L * p.pow(k)) * qL0;
      const int target = k + s;
      const auto rhs = (target >= -1 && target <= 1) ? v[target] * root2 : zero;
      keep(relative_residual(lhs, rhs, limit));
    }
  }
  return worst;
}

template <typename Real>
IdentityResult make_result(std::string module, std::string name, std::string relation,
                           const Real &residual, double tolerance) {
  IdentityResult r;
  r.module = std::move(module);
  r.name = std::move(name);
  r.relation = std::move(relation);
  r.residual = to_double(residual);
  r.tolerance = tolerance;
  r.pass = r.residual < tolerance;
  return r;
}

} // namespace detail

/// Residuals of every matrix-level identity restricted to interior blocks
/// l', l <= interior. `tamper` may modify the position matrices (fault
/// injection in tests).
template <typename Real>
AlgebraReport verify_algebra_interior(const QParam<Real> &p, int lmax, int interior,
                                      double tolerance, int threads,
                                      const std::function<void(QVector<Real> &)> &tamper = {}) {
  const auto ops = OperatorSet<Real>::build(p, lmax, tamper);
  const auto &g = ops.gen;
  const auto &x = ops.x;
  const auto &d = ops.partial;
  const auto &lam = ops.lambda;
  const int N = interior;
  const Real q = p.q();
  const Real lambda = p.lambda();
  const OperatorMatrix<Real> zero(p, lmax);

  using Task = std::function<IdentityResult()>;
  std::vector<Task> tasks;
  auto add = [&](std::string module, std::string name, std::string relation, auto fn) {
    tasks.push_back([=]() { return detail::make_result(module, name, relation, fn(), tolerance); });
  };

  add("irrep", "generator_L0_commutator", "[L0, L+-] = +-L+-", [&] {
    Real r1 = relative_residual(g.L0 * g.Lplus - g.Lplus * g.L0, g.Lplus, N);
    Real r2 = relative_residual(g.L0 * g.Lminus - g.Lminus * g.L0, g.Lminus * Real(-1), N);
    return r1 > r2 ? r1 : r2;
  });
  add("irrep", "generator_Lplus_Lminus_commutator", "[L+, L-] = [2 L0]", [&] {
    return relative_residual(g.Lplus * g.Lminus - g.Lminus * g.Lplus, qnum_L0(p, lmax, 2, 0), N);
  });
  add("irrep", "casimir_eigenvalue", "L- L+ + [L0][L0+1] = [l][l+1]", [&] {
    const auto lhs = g.Lminus * g.Lplus + qnum_L0(p, lmax, 1, 0) * qnum_L0(p, lmax, 1, 1);
    const auto rhs = OperatorMatrix<Real>::diagonal(
        p, lmax, [&](int l, int) { return invariants(l, p).casimir; });
    return relative_residual(lhs, rhs, N);
  });
  add("irrep", "lambda_vector_conditions", "Lambda is a q-vector",
      [&] { return detail::vector_condition_residual(g, lam, p, lmax, N); });
  add("irrep", "lambda_square_invariant", "Lambda.Lambda = [2l][2l+2]/[2]^2", [&] {
    const auto rhs = OperatorMatrix<Real>::diagonal(
        p, lmax, [&](int l, int) { return invariants(l, p).casimir_prime; });
    return relative_residual(scalar_product(lam, lam), rhs, N);
  });
  add("irrep", "invariant_c_eigenvalue", "q^{-2L0} + lambda Lambda0 = c_l", [&] {
    const auto rhs =
        OperatorMatrix<Real>::diagonal(p, lmax, [&](int l, int) { return invariant_c(l, p); });
    return relative_residual(ops.c, rhs, N);
  });
  add("irrep", "position_vector_conditions", "x is a q-vector",
      [&] { return detail::vector_condition_residual(g, x, p, lmax, N); });
  add("irrep", "position_q_commutation", "x0 x+-1 = q^{-+2} x+-1 x0", [&] {
    Real r1 = relative_residual(x.zero * x.plus, x.plus * x.zero * p.pow(-2), N);
    Real r2 = relative_residual(x.zero * x.minus, x.minus * x.zero * p.pow(2), N);
    return r1 > r2 ? r1 : r2;
  });
  add("irrep", "position_cross_commutation", "x1 x-1 = x-1 x1 + lambda x0^2", [&] {
    return relative_residual(x.plus * x.minus, x.minus * x.plus + x.zero * x.zero * lambda, N);
  });
  add("irrep", "unit_sphere", "x.x = 1", [&] {
    return relative_residual(scalar_product(x, x), OperatorMatrix<Real>::identity(p, lmax), N);
  });
  add("irrep", "position_hermiticity", "x1^+ = -x-1/q, x0^+ = x0", [&] {
    Real r1 = relative_residual(x.plus.adjoint(), x.minus * (Real(-1) / q), N);
    Real r2 = relative_residual(x.zero.adjoint(), x.zero, N);
    Real r3 = relative_residual(x.minus.adjoint(), x.plus * (-q), N);
    Real w = r1 > r2 ? r1 : r2;
    return w > r3 ? w : r3;
  });
  add("irrep", "partial_dual_construction", "composed d = matrix-element d", [&] {
    Real worst(0);
    for (int k : {1, 0, -1}) {
      Real r = relative_residual(d[k], ops.partial_elements[k], N);
      if (r > worst) worst = r;
    }
    return worst;
  });
  add("irrep", "partial_vector_conditions", "d is a q-vector",
      [&] { return detail::vector_condition_residual(g, d, p, lmax, N); });
  add("irrep", "partial_hermiticity", "d_k^+ = -(-1/q)^k d_-k", [&] {
    Real worst(0);
    for (int k : {1, 0, -1}) {
      Real sign = (k == 0) ? Real(-1) : (k == 1 ? Real(1) / q : q);
      // -(-1/q)^k : k=1 -> 1/q, k=0 -> -1, k=-1 -> q
      Real r = relative_residual(d[k].adjoint(), d[-k] * sign, N);
      if (r > worst) worst = r;
    }
    return worst;
  });
  add("irrep", "partial_q_commutation_plus", "d0 d1 = q^-2 d1 d0",
      [&] { return relative_residual(d.zero * d.plus, d.plus * d.zero * p.pow(-2), N); });
  add("irrep", "partial_q_commutation_minus", "d0 d-1 = q^2 d-1 d0",
      [&] { return relative_residual(d.zero * d.minus, d.minus * d.zero * p.pow(2), N); });
  add("irrep", "partial_cross_commutation", "d1 d-1 = d-1 d1 + lambda d0^2", [&] {
    return relative_residual(d.plus * d.minus, d.minus * d.plus + d.zero * d.zero * lambda, N);
  });
  add("irrep", "position_dot_partial", "x.d = c, d.x = -c", [&] {
    Real r1 = relative_residual(scalar_product(x, d), ops.c, N);
    Real r2 = relative_residual(scalar_product(d, x), ops.c * Real(-1), N);
    return r1 > r2 ? r1 : r2;
  });
  if (!p.classical()) {
    add("irrep", "partial_from_c_commutator", "[c, x] = lambda^2 d", [&] {
      Real worst(0);
      const Real inv = Real(1) / (lambda * lambda);
      for (int k : {1, 0, -1}) {
        Real r = relative_residual(d[k], (ops.c * x[k] - x[k] * ops.c) * inv, N);
        if (r > worst) worst = r;
      }
      return worst;
    });
  } else {
    tasks.push_back([=]() {
      IdentityResult r{"irrep", "partial_from_c_commutator", "[c, x] = lambda^2 d", 0, tolerance};
      r.skipped = true;
      r.note = "lambda = 0 at q = 1";
      return r;
    });
  }
  add("irrep", "partial_diagonal_blocks_vanish", "<l|d|l> = 0", [&] {
    Real worst(0);
    for (int k : {1, 0, -1}) {
      for (const auto &[key, b] : d[k].blocks()) {
        if (key.first != key.second || key.first > N) continue;
        for (const auto &v : b.data) {
          using std::abs;
          Real a = abs(v);
          if (a > worst) worst = a;
        }
      }
    }
    return worst;
  });
  add("irrep", "momentum_square_angular_coefficient", "-(c + d.d) = C' + c^2 - c", [&] {
    // p^2 = -(1/r^2)[(A-1)A + c + d.d] with A = r d/dr + 1, so the
    // centrifugal coefficient is -(c + d.d).
    const auto lhs = (ops.c + scalar_product(d, d)) * Real(-1);
    const auto rhs = OperatorMatrix<Real>::diagonal(p, lmax, [&](int l, int) {
      const auto inv = invariants(l, p);
      return inv.casimir_prime + inv.c * inv.c - inv.c;
    });
    return relative_residual(lhs, rhs, N);
  });

  AlgebraReport report;
  report.q = to_double(q);
  report.lmax = lmax;
  report.interior_lmax = N;
  report.identities = parallel_map(tasks.size(), threads, [&](std::size_t i) { return tasks[i](); });

  // d.d diagonal against the candidate closed forms.
  const auto dd = scalar_product(d, d);
  struct Candidate {
    const char *name;
    const char *relation;
    std::function<Real(int)> value;
  };
  const Real two = qnum(2, p);
  const std::vector<Candidate> candidates = {
      {"2l_plus_1_form", "-[2l][2l+1]/[2]^2 - c^2",
       [&](int l) {
         const Real cl = invariant_c(l, p);
         return -qnum(2 * l, p) * qnum(2 * l + 1, p) / (two * two) - cl * cl;
       }},
      {"radial_coefficient_form", "-([2l][2l+2]/[2]^2 + c^2 - c)",
       [&](int l) {
         const auto inv = invariants(l, p);
         return -(inv.casimir_prime + inv.c * inv.c - inv.c);
       }},
      {"lambda_square_form", "-([2l][2l+2]/[2]^2 + c^2)",
       [&](int l) {
         const auto inv = invariants(l, p);
         return -(inv.casimir_prime + inv.c * inv.c);
       }},
  };
  std::vector<std::string> matched;
  const int l_check = std::min(N, 4);
  for (const auto &cand : candidates) {
    Real worst(0);
    for (int l = 0; l <= l_check; ++l) {
      for (int m = -l; m <= l; ++m) {
        using std::abs;
        const Real ref = cand.value(l);
        Real scale = abs(ref) > 1 ? Real(abs(ref)) : Real(1);
        Real r = abs(dd.diagonal_entry(l, m) - ref) / scale;
        if (r > worst) worst = r;
      }
    }
    Finding f;
    f.name = std::string("partial_square_") + cand.name;
    f.relation = cand.relation;
    f.residual = to_double(worst);
    f.holds = f.residual < tolerance;
    f.detail = "diagonal of d.d for l <= " + std::to_string(l_check);
    if (f.holds) matched.push_back(cand.name);
    report.findings.push_back(f);
  }
  report.partial_square_match =
      matched.size() == 1 ? matched.front() : (matched.empty() ? "none" : "ambiguous");
  return report;
}

/// verify_algebra at interior l <= lmax - 2, plus the truncation check:
/// the same interior residuals recomputed at lmax + 2 must agree.
template <typename Real>
AlgebraReport verify_algebra(const QParam<Real> &p, int lmax,
                             std::optional<double> tolerance = std::nullopt, int threads = 1,
                             const std::function<void(QVector<Real> &)> &tamper = {}) {
  if (lmax < 3) {
    throw std::invalid_argument("verify_algebra needs lmax >= 3");
  }
  const double tol = tolerance.value_or(to_double(default_tolerance<Real>()));
  const int interior = lmax - 2;
  auto report = verify_algebra_interior(p, lmax, interior, tol, threads, tamper);
  const auto wider = verify_algebra_interior(p, lmax + 2, interior, tol, threads, tamper);
  double diff = 0;
  for (std::size_t i = 0; i < report.identities.size() && i < wider.identities.size(); ++i) {
    diff = std::max(diff, std::abs(report.identities[i].residual - wider.identities[i].residual));
  }
  report.truncation_difference = diff;
  // Interior products never reach the truncation edge, so the residuals
  // agree up to accumulated rounding.
  report.truncation_stable = diff <= std::max(tol * 1e-3, 1e-13);
  return report;
}

} // namespace qdeform
