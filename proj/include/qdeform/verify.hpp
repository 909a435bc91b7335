// The full identity catalogue at one q: function-level checks on the
// monomial realization, Jackson-integral checks, the position expansion
// cross-checked by integration, and the matrix-level algebra.
#pragma once

#include "angular.hpp"
#include "irrep.hpp"
#include "jackson.hpp"
#include "parallel.hpp"
#include "qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qdeform {

/// Multiplies one family of position coefficients by `factor`. Test
/// fixture for checking that the verifier notices a wrong coefficient.
struct PositionFault {
  int component = 1; // k in x_k
  bool upper = true; // the l -> l+1 term
  double factor = 1.0;
};

struct VerifyOptions {
  int lmax = 6;
  std::optional<double> tolerance;  // default_tolerance<Real>() when unset
  std::optional<int> series_depth;  // chosen from the tolerance when unset
  int threads = 1;
  int random_samples = 8;
  std::uint64_t seed = 20240917;
  std::optional<PositionFault> corrupt_position;
};

struct VerifyReport {
  double q = 1;
  Precision precision = Precision::standard;
  double tolerance = 0;
  int lmax = 0;
  std::vector<IdentityResult> identities;
  std::vector<Finding> findings;
  std::string partial_square_match;
  bool truncation_stable = false;

  bool all_pass() const {
    for (const auto &r : identities) {
      if (!r.pass && !r.skipped) {
        return false;
      }
    }
    return true;
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
  const IdentityResult *find(const std::string &name) const {
    for (const auto &r : identities) {
      if (r.name == name) {
        return &r;
      }
    }
    return nullptr;
  }
};

/// Position coefficient with the optional fault applied.
template <typename Real>
Real faulted_position_coefficient(int k, bool up, int l, int m, const QParam<Real> &p,
                                  const std::optional<PositionFault> &fault) {
  Real v = position_coefficient(k, up, l, m, p);
  if (fault && fault->component == k && fault->upper == up) {
    v *= Real(fault->factor);
  }
  return v;
}

namespace detail {

template <typename Real> class FunctionSampler {
public:
  FunctionSampler(const QParam<Real> &p, std::uint64_t seed) : p_(p), rng_(seed) {}

  AngularFunction<Real> operator()(int winding, int degree = 6) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<Real> c(static_cast<std::size_t>(degree) + 1);
    for (auto &v : c) {
      v = Real(coeff(rng_));
    }
    return AngularFunction<Real>(p_, winding, Polynomial<Real>(std::move(c)));
  }
  AngularFunction<Real> any() {
    std::uniform_int_distribution<int> w(-3, 3);
    return (*this)(w(rng_));
  }

private:
  QParam<Real> p_;
  std::mt19937_64 rng_;
};

template <typename Real> void keep_max(Real &worst, const Real &r) {
  if (r > worst) {
    worst = r;
  }
}

/// |a - b - c| relative to max(1, |a|, |b|, |c|): the residual of a = b + c
/// measured against the size of the terms being compared.
template <typename Real>
Real term_residual(const AngularFunction<Real> &a, const AngularFunction<Real> &b,
                   const AngularFunction<Real> &c) {
  Real scale(1);
  for (const auto *t : {&a, &b, &c}) {
    if (t->max_abs() > scale) scale = t->max_abs();
  }
  return ((a - b) - c).max_abs() / scale;
}

template <typename Real>
AngularFunction<Real> q_power_L0(const AngularFunction<Real> &f, int s) {
  return f.scaled(f.param().pow(s * f.winding()));
}

/// Largest residual of the q-vector conditions for `v` on the samples.
template <typename Real, typename V>
Real function_vector_residual(const std::vector<AngularFunction<Real>> &samples, V &&v) {
  using std::sqrt;
  Real worst(0);
  for (const auto &f : samples) {
    const auto &p = f.param();
    const Real root2 = sqrt(qnum(2, p));
    for (int k : {1, 0, -1}) {
      const auto vf = v(k, f);
      keep_max(worst, term_residual(vf.scaled(Real(vf.winding())), v(k, f.scaled(Real(f.winding()))),
                                    vf.scaled(Real(k))));
      const auto g = q_power_L0(f, 1);
      for (int s : {1, -1}) {
        auto L = [s](const AngularFunction<Real> &h) {
          return s > 0 ? apply_Lplus(h) : apply_Lminus(h);
        };
        const auto first = L(v(k, g));
        const auto second = v(k, L(g)).scaled(p.pow(k));
        const int t = k + s;
        const auto rhs = (t >= -1 && t <= 1) ? v(t, f).scaled(root2)
                                             : AngularFunction<Real>(p, first.winding());
        keep_max(worst, term_residual(first, second, rhs));
      }
    }
  }
  return worst;
}

} // namespace detail

/// Function-level and integration identities.
template <typename Real>
std::vector<IdentityResult> verify_functions(const QParam<Real> &p, const VerifyOptions &opt,
                                             double tol, VerifyReport &report) {
  using std::abs;
  using std::sqrt;
  const int lh = std::min(opt.lmax, 6); // harmonic checks
  const int lg = std::min(opt.lmax, 4); // Gram matrix
  const int lx = std::min(opt.lmax, 3); // position expansion
  const Real q = p.q();
  const Real lambda = p.lambda();
  const Real root2 = sqrt(qnum(2, p));

  detail::FunctionSampler<Real> sample(p, opt.seed);
  std::vector<AngularFunction<Real>> fs;
  for (int i = 0; i < opt.random_samples; ++i) {
    fs.push_back(sample.any());
  }
  std::vector<std::pair<AngularFunction<Real>, AngularFunction<Real>>> pairs;
  for (int i = 0; i < opt.random_samples; ++i) {
    const auto f = sample.any();
    pairs.emplace_back(f, sample(f.winding() + 1));
  }

  // Harmonics are shared by most checks; build them once.
  std::map<std::pair<int, int>, AngularFunction<Real>> Y;
  for (int l = 0; l <= lh + 1; ++l) {
    for (int m = -l; m <= l; ++m) {
      Y.emplace(std::make_pair(l, m), harmonic(HarmonicLabel(l, m), p));
    }
  }
  auto y = [&](int l, int m) -> const AngularFunction<Real> & { return Y.at({l, m}); };

  using Task = std::function<IdentityResult()>;
  std::vector<Task> tasks;
  auto add = [&](std::string module, std::string name, std::string relation, auto fn) {
    tasks.push_back([=]() { return detail::make_result(module, name, relation, fn(), tol); });
  };

  add("angular", "casimir_on_harmonics", "C Y_lm = [l][l+1] Y_lm", [&] {
    Real worst(0);
    for (int l = 0; l <= lh; ++l)
      for (int m = -l; m <= l; ++m)
        detail::keep_max(worst, relative_distance(apply_casimir(y(l, m)),
                                                  y(l, m).scaled(qnum(l, p) * qnum(l + 1, p))));
    return worst;
  });
  add("angular", "ladder_product_eigenvalue", "L+ L- Phi_lm = [l+m][l-m+1] Phi_lm", [&] {
    Real worst(0);
    for (int l = 0; l <= lh; ++l)
      for (int m = 0; m <= l; ++m) {
        const auto phi = build_phi(HarmonicLabel(l, m), p);
        detail::keep_max(worst, relative_distance(apply_Lplus(apply_Lminus(phi)),
                                                  phi.scaled(qnum(l + m, p) * qnum(l - m + 1, p))));
      }
    return worst;
  });
  add("angular", "highest_lowest_weight", "L+ Y_ll = 0, L- Y_l,-l = 0", [&] {
    Real worst(0);
    for (int l = 0; l <= lh; ++l) {
      detail::keep_max(worst, apply_Lplus(y(l, l)).max_abs());
      detail::keep_max(worst, apply_Lminus(y(l, -l)).max_abs());
    }
    return worst;
  });
  add("angular", "generator_commutators", "[L0, L+-] = +-L+-, [L+, L-] = [2 L0]", [&] {
    Real worst(0);
    for (const auto &f : fs) {
      for (int s : {1, -1}) {
        auto L = [s](const AngularFunction<Real> &h) {
          return s > 0 ? apply_Lplus(h) : apply_Lminus(h);
        };
        const auto Lf = L(f);
        const auto lhs = Lf.scaled(Real(Lf.winding())) - L(f.scaled(Real(f.winding())));
        detail::keep_max(worst, relative_distance(lhs, Lf.scaled(Real(s))));
      }
      const auto lhs = apply_Lplus(apply_Lminus(f)) - apply_Lminus(apply_Lplus(f));
      detail::keep_max(worst, relative_distance(lhs, f.scaled(qnum(2 * f.winding(), p))));
    }
    return worst;
  });
  add("angular", "position_vector_conditions", "x is a q-vector (functions)", [&] {
    return detail::function_vector_residual(
        fs, [](int k, const AngularFunction<Real> &f) { return mul_position(k, f); });
  });
  add("angular", "lambda_vector_conditions", "Lambda is a q-vector (functions)", [&] {
    return detail::function_vector_residual(
        fs, [](int k, const AngularFunction<Real> &f) { return apply_lambda(k, f); });
  });
  add("angular", "invariant_c_on_harmonics", "(q^{-2L0} + lambda Lambda0) Y_lm = c_l Y_lm", [&] {
    Real worst(0);
    for (int l = 0; l <= lh; ++l)
      for (int m = -l; m <= l; ++m)
        detail::keep_max(worst, relative_distance(apply_invariant_c(y(l, m)),
                                                  y(l, m).scaled(invariant_c(l, p))));
    return worst;
  });
  add("angular", "unit_sphere_functions", "(-1/q) x1 x-1 + x0 x0 - q x-1 x1 = 1", [&] {
    Real worst(0);
    for (const auto &f : fs) {
      const auto lhs = mul_position(1, mul_position(-1, f)).scaled(Real(-1) / q) +
                       mul_position(0, mul_position(0, f)) -
                       mul_position(-1, mul_position(1, f)).scaled(q);
      detail::keep_max(worst, relative_distance(lhs, f));
    }
    return worst;
  });
  add("angular", "position_commutation_functions",
      "x0 x+-1 = q^{-+2} x+-1 x0, x1 x-1 = x-1 x1 + lambda x0^2", [&] {
        Real worst(0);
        for (const auto &f : fs) {
          for (int s : {1, -1}) {
            detail::keep_max(worst, relative_distance(mul_position(0, mul_position(s, f)),
                                                      mul_position(s, mul_position(0, f))
                                                          .scaled(p.pow(-2 * s))));
          }
          const auto rhs = mul_position(-1, mul_position(1, f)) +
                           mul_position(0, mul_position(0, f)).scaled(lambda);
          detail::keep_max(worst, relative_distance(mul_position(1, mul_position(-1, f)), rhs));
        }
        return worst;
      });
  add("angular", "harmonic_position_noncommutativity",
      "x_k Y_lm versus Y_lm x_k with the L+- correction terms", [&] {
        Real worst(0);
        for (int l = 0; l <= lh; ++l)
          for (int m = -l; m <= l; ++m) {
            const auto &f = y(l, m);
            detail::keep_max(worst, relative_distance(mul_position(0, f),
                                                      mul_position_right(0, f).scaled(p.pow(-2 * m))));
            auto r1 = mul_position_right(1, f);
            if (m < l) {
              r1 += mul_position_right(0, y(l, m + 1))
                        .scaled(lambda / root2 * p.pow(-m - 1) *
                                Real(sqrt(qnum(l - m, p) * qnum(l + m + 1, p))));
            }
            detail::keep_max(worst, relative_distance(mul_position(1, f), r1));
            auto r2 = mul_position_right(-1, f);
            if (m > -l) {
              r2 -= mul_position_right(0, y(l, m - 1))
                        .scaled(lambda / root2 * p.pow(-m + 1) *
                                Real(sqrt(qnum(l + m, p) * qnum(l - m + 1, p))));
            }
            detail::keep_max(worst, relative_distance(mul_position(-1, f), r2));
          }
        return worst;
      });
  add("angular", "ladder_identity", "q^{L0}-weighted lowering kernel maps Phi_lm to Phi_l,m+1", [&] {
    Real worst(0);
    for (int l = 1; l <= std::min(lh, 5); ++l)
      for (int m = 0; m < l; ++m)
        detail::keep_max(worst, ladder_identity_check(HarmonicLabel(l, m), p).residual);
    return worst;
  });
  add("angular", "hypergeometric_equivalence", "2F1 closed form = recursion", [&] {
    Real worst(0);
    for (int l = 0; l <= lh; ++l)
      for (int m = 0; m <= l; ++m)
        detail::keep_max(worst, relative_distance(hypergeom_phi(HarmonicLabel(l, m), p),
                                                  build_phi(HarmonicLabel(l, m), p)));
    return worst;
  });
  add("angular", "lowering_raising_adjoint", "<L+ f, g> = <f, L- g>", [&] {
    Real worst(0);
    for (const auto &[f, g] : pairs) {
      const Real a = inner_product(apply_Lplus(f), g);
      const Real b = inner_product(f, apply_Lminus(g));
      Real scale(1);
      if (abs(a) > scale) scale = abs(a);
      detail::keep_max(worst, Real(abs(a - b) / scale));
    }
    return worst;
  });
  add("jackson", "gram_orthonormality", "<Y_lm, Y_l'm'> = delta", [&] {
    Real worst(0);
    for (int l = 0; l <= lg; ++l)
      for (int m = -l; m <= l; ++m)
        for (int l2 = 0; l2 <= lg; ++l2)
          for (int m2 = -l2; m2 <= l2; ++m2) {
            const Real v = inner_product(y(l, m), y(l2, m2));
            const Real ref = (l == l2 && m == m2) ? Real(1) : Real(0);
            detail::keep_max(worst, Real(abs(v - ref)));
          }
    return worst;
  });
  if (q < 1) {
    int depth = opt.series_depth.value_or(0);
    if (!opt.series_depth) {
      // q^{2 depth} below tol / 100, with a floor.
      using std::log;
      depth = std::max(200, static_cast<int>(std::ceil(std::log(tol * 1e-2) /
                                                       (2.0 * std::log(to_double(q))))) + 1);
    }
    add("jackson", "series_matches_closed_form", "geometric-grid sum = (1 + (-1)^n)/[n+1]", [&, depth] {
      const QMeasure<Real> series(p, JacksonMode::series, depth);
      const QMeasure<Real> closed(p);
      Real worst(0);
      for (const auto &f : fs) {
        const Real a = integrate_polynomial(f.polynomial(), series);
        const Real b = integrate_polynomial(f.polynomial(), closed);
        detail::keep_max(worst, Real(abs(a - b)));
      }
      return worst;
    });
  } else {
    IdentityResult r;
    r.module = "jackson";
    r.name = "series_matches_closed_form";
    r.relation = "geometric-grid sum = (1 + (-1)^n)/[n+1]";
    r.tolerance = tol;
    r.skipped = true;
    r.note = "series grid needs q < 1";
    tasks.push_back([r] { return r; });
  }
  add("jackson", "q_inverse_symmetry", "integrals and invariants unchanged under q -> 1/q", [&] {
    const auto pi = p.inverse();
    const QMeasure<Real> a(p), b(pi);
    Real worst(0);
    for (int n = 0; n <= 12; ++n) {
      detail::keep_max(worst, Real(abs(integrate_monomial(n, a) - integrate_monomial(n, b))));
    }
    for (int l = 0; l <= opt.lmax; ++l) {
      const auto u = invariants(l, p);
      const auto v = invariants(l, pi);
      detail::keep_max(worst, Real(abs(u.casimir - v.casimir) / (1 + abs(u.casimir))));
      detail::keep_max(worst,
                       Real(abs(u.casimir_prime - v.casimir_prime) / (1 + abs(u.casimir_prime))));
      detail::keep_max(worst, Real(abs(u.c - v.c) / (1 + abs(u.c))));
    }
    return worst;
  });

  // x_k Y_lm = a Y_{l+1,m+k} + b Y_{l-1,m+k}: the coefficients against
  // Jackson inner products, and the expansion exact coefficient-wise.
  const auto &fault = opt.corrupt_position;
  const char *names[3] = {"x1_product_expansion", "x0_product_expansion",
                          "xm1_product_expansion"};
  const char *relations[3] = {"x1 Y_lm = a Y_l+1,m+1 + b Y_l-1,m+1",
                              "x0 Y_lm = a Y_l+1,m + b Y_l-1,m",
                              "x-1 Y_lm = a Y_l+1,m-1 + b Y_l-1,m-1"};
  for (int k : {1, 0, -1}) {
    add("angular", names[1 - k], relations[1 - k], [&, k] {
      Real worst(0);
      for (int l = 0; l <= lx; ++l)
        for (int m = -l; m <= l; ++m) {
          const auto xy = mul_position(k, y(l, m));
          AngularFunction<Real> expansion(p, m + k);
          for (bool up : {true, false}) {
            const int lt = up ? l + 1 : l - 1;
            if (lt < 0 || std::abs(m + k) > lt) {
              continue;
            }
            const Real c = faulted_position_coefficient(k, up, l, m, p, fault);
            detail::keep_max(worst, Real(abs(inner_product(y(lt, m + k), xy) - c)));
            expansion += y(lt, m + k).scaled(c);
          }
          detail::keep_max(worst, relative_distance(xy, expansion));
        }
      return worst;
    });
  }

  auto results = parallel_map(tasks.size(), opt.threads, [&](std::size_t i) { return tasks[i](); });

  // Informative findings: alternative readings that do not hold.
  {
    Real worst(0);
    for (int k : {1, 0, -1})
      for (int l = 0; l <= lx; ++l)
        for (int m = -l; m <= l; ++m)
          for (bool up : {true, false}) {
            const int lt = up ? l + 1 : l - 1;
            if (lt < 0 || std::abs(m + k) > lt) continue;
            const Real ref = inner_product(y(lt, m + k), mul_position(k, y(l, m)));
            const Real alt =
                position_coefficient(k, up, l, m, p, PositionCoefficients::alternate);
            detail::keep_max(worst, Real(abs(alt - ref)));
          }
    report.findings.push_back(Finding{"alternate_position_coefficients",
                                      "-q^{-m} on <l-1,m|x0|l,m>, q^{l-m} on <l+1,m-1|x-1|l,m>",
                                      to_double(worst), to_double(worst) < tol,
                                      "deviation from Jackson inner products, l <= " +
                                          std::to_string(lx)});
  }
  {
    Real worst(0);
    for (int l = 1; l <= std::min(lh, 5); ++l)
      for (int m = 0; m < l; ++m)
        detail::keep_max(worst, ladder_identity_check(HarmonicLabel(l, m), p).unweighted_residual);
    report.findings.push_back(Finding{"ladder_without_q_L0_weight",
                                      "lowering kernel alone maps Phi_lm to Phi_l,m+1",
                                      to_double(worst), to_double(worst) < tol,
                                      "holds only at m = 0 unless q = 1"});
  }
  {
    Real worst(0);
    for (int l = 0; l <= lh; ++l)
      for (int m = 0; m <= l; ++m)
        detail::keep_max(worst, relative_distance(hypergeom_phi(HarmonicLabel(l, m), p, std::optional<Real>(p.pow(-m))),
                                                  build_phi(HarmonicLabel(l, m), p)));
    report.findings.push_back(Finding{"hypergeometric_argument_q_minus_m",
                                      "2F1 argument q^{-m} x0^2 instead of q^{-2m} x0^2",
                                      to_double(worst), to_double(worst) < tol,
                                      "coefficient deviation from the recursion"});
  }
  {
    // Seeding odd series with a_1 = 1 instead of q^{-m}.
    Real worst(0);
    for (int l = 1; l <= lg; ++l)
      for (int m = 0; m <= l; ++m) {
        if ((l - m) % 2 == 0) continue;
        const HarmonicLabel lab(l, m);
        const auto f = build_phi(lab, p).scaled(normalization_constant(lab, p) * p.pow(m));
        detail::keep_max(worst, Real(abs(inner_product(f, f) - 1)));
      }
    report.findings.push_back(Finding{"odd_series_unit_seed_norm",
                                      "<Y, Y> = 1 with a_1 = 1 for odd l - m", to_double(worst),
                                      to_double(worst) < tol,
                                      "norm deviation; the q^{-m} seed is exact"});
  }
  return results;
}

/// Runs the complete catalogue at one q.
template <typename Real>
VerifyReport verify_all(const QParam<Real> &p, const VerifyOptions &opt = {}) {
  if (opt.lmax < 3) {
    throw std::invalid_argument("verification needs lmax >= 3");
  }
  const double tol = opt.tolerance.value_or(to_double(default_tolerance<Real>()));
  VerifyReport report;
  report.q = to_double(p.q());
  report.precision = std::is_same_v<Real, double> ? Precision::standard : Precision::high;
  report.tolerance = tol;
  report.lmax = opt.lmax;

  std::function<void(QVector<Real> &)> tamper;
  if (opt.corrupt_position) {
    const auto fault = *opt.corrupt_position;
    tamper = [fault](QVector<Real> &x) {
      auto &xk = x[fault.component];
      OperatorMatrix<Real> fixed(xk.param(), xk.lmax(), xk.delta_m());
      for (const auto &[key, b] : xk.blocks()) {
        const bool up = key.first == key.second + 1;
        const Real s = up == fault.upper ? Real(fault.factor) : Real(1);
        for (int i = 0; i < b.rows; ++i)
          for (int j = 0; j < b.cols; ++j)
            if (b.at(i, j) != 0) fixed.set(key.first, i - key.first, key.second, j - key.second, s * b.at(i, j));
      }
      xk = fixed;
    };
  }

  auto functions = verify_functions(p, opt, tol, report);
  const auto algebra = verify_algebra(p, opt.lmax, tol, opt.threads, tamper);
  report.identities = std::move(functions);
  report.identities.insert(report.identities.end(), algebra.identities.begin(),
                           algebra.identities.end());
  report.identities.push_back(detail::make_result(
      "irrep", "truncation_stability", "interior residuals identical at lmax + 2",
      Real(algebra.truncation_difference), std::max(tol * 1e-3, 1e-13)));
  report.findings.insert(report.findings.end(), algebra.findings.begin(), algebra.findings.end());
  report.partial_square_match = algebra.partial_square_match;
  report.truncation_stable = algebra.truncation_stable;
  return report;
}

} // namespace qdeform
