// Effective angular quantum number, closed-form Coulomb and oscillator
// spectra, a shooting-method check of both, and the degeneracy and
// multipole reports.
//
// Units: hbar = mass = 1, V(r) = -1/r (Coulomb) or r^2/2 (oscillator).
#pragma once

#include "angular.hpp"
#include "jackson.hpp"
#include "parallel.hpp"
#include "qcore.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace qdeform {

enum class Potential { coulomb, oscillator };

inline std::string to_string(Potential v) {
  return v == Potential::coulomb ? "coulomb" : "oscillator";
}

inline Potential parse_potential(const std::string &s) {
  if (s == "coulomb") return Potential::coulomb;
  if (s == "oscillator") return Potential::oscillator;
  throw std::invalid_argument("unknown potential '" + s + "' (coulomb|oscillator)");
}

/// L(L+1) = [2l][2l+2]/[2]^2 + c_l^2 - c_l.
template <typename Real> Real centrifugal_coefficient(int l, const QParam<Real> &p) {
  const auto inv = invariants(l, p);
  return inv.casimir_prime + inv.c * inv.c - inv.c;
}

/// Nonnegative root of L(L+1) = centrifugal_coefficient(l). Exactly 0 for
/// l = 0 and exactly l at q = 1.
template <typename Real> Real solve_L(int l, const QParam<Real> &p) {
  if (l < 0) {
    throw std::invalid_argument("l must be nonnegative");
  }
  if (l == 0) {
    return Real(0);
  }
  if (p.classical()) {
    return Real(l);
  }
  using std::sqrt;
  const Real rhs = centrifugal_coefficient(l, p);
  if (rhs < 0) {
    throw std::logic_error("negative centrifugal coefficient");
  }
  return (sqrt(1 + 4 * rhs) - 1) / 2;
}

struct SpectrumEntry {
  Potential potential = Potential::coulomb;
  int n = 0;
  int l = 0;
  double q = 1;
  double L = 0;
  double E = 0;
};

template <typename Real> Real coulomb_energy_value(int n, const Real &L) {
  const Real nu = n + L + 1;
  return Real(-1) / (2 * nu * nu);
}

template <typename Real> Real oscillator_energy_value(int n, const Real &L) {
  return 2 * n + L + Real(3) / 2;
}

template <typename Real>
SpectrumEntry energy(Potential v, int n, int l, const QParam<Real> &p) {
  if (n < 0) {
    throw std::invalid_argument("n must be nonnegative");
  }
  const Real L = solve_L(l, p);
  const Real E = v == Potential::coulomb ? coulomb_energy_value(n, L)
                                         : oscillator_energy_value(n, L);
  return SpectrumEntry{v, n, l, to_double(p.q()), to_double(L), to_double(E)};
}

template <typename Real> SpectrumEntry coulomb_energy(int n, int l, const QParam<Real> &p) {
  return energy(Potential::coulomb, n, l, p);
}

template <typename Real> SpectrumEntry oscillator_energy(int n, int l, const QParam<Real> &p) {
  return energy(Potential::oscillator, n, l, p);
}

/// All (q, n <= nmax, l <= lmax) entries, sorted by (q, l, n).
template <typename Real = double>
std::vector<SpectrumEntry> spectrum_table(Potential v, const std::vector<double> &qs, int nmax,
                                          int lmax, int threads = 1) {
  if (nmax < 0 || lmax < 0) {
    throw std::invalid_argument("nmax and lmax must be nonnegative");
  }
  std::vector<std::tuple<double, int, int>> keys;
  for (double q : qs)
    for (int l = 0; l <= lmax; ++l)
      for (int n = 0; n <= nmax; ++n) keys.emplace_back(q, l, n);
  std::sort(keys.begin(), keys.end());
  return parallel_map(keys.size(), threads, [&](std::size_t i) {
    const auto [q, l, n] = keys[i];
    return energy(v, n, l, QParam<Real>(Real(q)));
  });
}

// ---------------------------------------------------------------------------
// Shooting verifier.

struct RadialConfig {
  double r_min = 1e-6;
  std::optional<double> r_max; // chosen from the state when unset
  int steps = 20000;           // Numerov steps on the logarithmic grid
  int max_iterations = 200;    // bisection steps
  double energy_tolerance = 1e-11;
  double window_fraction = 0.2; // initial bracket E_closed (1 -+ fraction)
  int max_widenings = 6;
};

enum class RadialStatus { converged, no_bracket, not_converged };

inline std::string to_string(RadialStatus s) {
  switch (s) {
  case RadialStatus::converged: return "converged";
  case RadialStatus::no_bracket: return "no_bracket";
  default: return "not_converged";
  }
}

struct RadialReport {
  Potential potential = Potential::coulomb;
  int n = 0;
  int l = 0;
  double q = 1;
  double L = 0;
  double E_closed = 0;
  double E_numeric = 0;
  double delta_E = 0;
  // Depth of the decaying tail at the converged energy: min |w| beyond the
  // outer turning point over max |w| inside it. Small when the decaying
  // solution is matched.
  double boundary_residual = 0;
  int nodes = -1;
  int iterations = 0;
  int widenings = 0;
  double r_max = 0;
  double centrifugal = 0; // coefficient of 1/(2 r^2) in the radial equation
  double seconds = 0;
  RadialStatus status = RadialStatus::not_converged;
};

namespace detail {

struct ShotResult {
  int nodes = 0;
  double end_value = 0;
  double peak = 0;
  double tail_min = 0; // smallest |w| beyond the turning point
};

/// Integrates w'' = [2 r^2 (V - E) + (L + 1/2)^2] w on t = ln r, where the
/// reduced radial function is r u(r) = e^{t/2} w(t), starting from the
/// regular solution w ~ r^{L+1/2}.
/// `t_turn` splits the range: `peak` is taken before it, `tail_min` after.
inline ShotResult shoot(Potential v, double L, double E, double t0, double t1, int steps,
                        double t_turn = 0) {
  const double h = (t1 - t0) / steps;
  const double h2 = h * h / 12.0;
  const double a = (L + 0.5) * (L + 0.5);
  auto F = [&](double t) {
    const double r = std::exp(t);
    const double V = v == Potential::coulomb ? -1.0 / r : 0.5 * r * r;
    return 2.0 * r * r * (V - E) + a;
  };
  double w_prev = std::exp((L + 0.5) * t0);
  double w = std::exp((L + 0.5) * (t0 + h));
  double f_prev = F(t0);
  double f = F(t0 + h);
  ShotResult out;
  out.peak = std::max(std::abs(w_prev), std::abs(w));
  out.tail_min = std::numeric_limits<double>::infinity();
  for (int i = 1; i < steps; ++i) {
    const double f_next = F(t0 + (i + 1) * h);
    const double w_next =
        (2.0 * w * (1.0 + 5.0 * h2 * f) - w_prev * (1.0 - h2 * f_prev)) / (1.0 - h2 * f_next);
    if ((w_next < 0) != (w < 0) && w != 0) {
      ++out.nodes;
    }
    w_prev = w;
    w = w_next;
    f_prev = f;
    f = f_next;
    if (t0 + (i + 1) * h <= t_turn) {
      out.peak = std::max(out.peak, std::abs(w));
    } else {
      out.tail_min = std::min(out.tail_min, std::abs(w));
    }
    if (!std::isfinite(w)) {
      break;
    }
    // Rescale to stay in range; node counting is scale-free.
    if (std::abs(w) > 1e200) {
      w *= 1e-200;
      w_prev *= 1e-200;
      out.peak *= 1e-200;
      out.tail_min *= 1e-200;
    }
  }
  out.end_value = w;
  return out;
}

} // namespace detail

/// Outer classical turning point of V(r) + L(L+1)/(2 r^2) at energy E.
inline double turning_point(Potential v, double L, double E) {
  const double a = L * (L + 1);
  if (v == Potential::coulomb) {
    return (-1.0 - std::sqrt(std::max(0.0, 1.0 + 2.0 * E * a))) / (2.0 * E);
  }
  return std::sqrt(E + std::sqrt(std::max(0.0, E * E - a)));
}

/// Default outer radius: well past the classical turning point.
inline double default_r_max(Potential v, int n, double L, double E) {
  if (v == Potential::coulomb) {
    const double nu = n + L + 1;
    return std::max(40.0, 2 * nu * nu + 30 * nu);
  }
  return std::sqrt(2 * E) + 8.0;
}

/// Solves the radial problem by bisection on E, using the node count of
/// the outward solution (it exceeds n exactly when E is above the n-th
/// level), and compares with the closed form.
template <typename Real = double>
RadialReport radial_verify(Potential v, int n, int l, const QParam<Real> &p,
                           const RadialConfig &cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.r_min > 0) || cfg.steps < 10 || (cfg.r_max && !(*cfg.r_max > cfg.r_min))) {
    throw std::invalid_argument("radial grid needs 0 < r_min < r_max and at least 10 steps");
  }
  const auto entry = energy(v, n, l, p);
  RadialReport rep;
  rep.potential = v;
  rep.n = n;
  rep.l = l;
  rep.q = entry.q;
  rep.L = entry.L;
  rep.E_closed = entry.E;
  rep.centrifugal = entry.L * (entry.L + 1);
  rep.r_max = cfg.r_max.value_or(default_r_max(v, n, entry.L, entry.E));

  const double t0 = std::log(cfg.r_min);
  const double t1 = std::log(rep.r_max);
  auto above = [&](double E) { return detail::shoot(v, entry.L, E, t0, t1, cfg.steps).nodes > n; };

  double frac = cfg.window_fraction;
  double lo = 0, hi = 0;
  bool bracketed = false;
  for (int w = 0; w <= cfg.max_widenings; ++w) {
    const double span = std::abs(entry.E) * frac;
    lo = entry.E - span;
    hi = entry.E + span;
    if (v == Potential::coulomb) {
      hi = std::min(hi, -1e-12); // bound states only
    } else {
      lo = std::max(lo, 0.0);
    }
    if (!above(lo) && above(hi)) {
      bracketed = true;
      rep.widenings = w;
      break;
    }
    frac *= 2;
  }
  if (!bracketed) {
    rep.status = RadialStatus::no_bracket;
    rep.widenings = cfg.max_widenings;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  }

  int it = 0;
  while (hi - lo > cfg.energy_tolerance && it < cfg.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? hi : lo) = mid;
    ++it;
  }
  rep.iterations = it;
  rep.E_numeric = 0.5 * (lo + hi);
  rep.delta_E = std::abs(rep.E_numeric - rep.E_closed);
  const double t_turn = std::log(turning_point(v, entry.L, rep.E_numeric));
  const auto shot = detail::shoot(v, entry.L, rep.E_numeric, t0, t1, cfg.steps, t_turn);
  rep.boundary_residual = shot.peak > 0 && std::isfinite(shot.tail_min)
                              ? shot.tail_min / shot.peak
                              : 1.0;
  // Just below the level the solution has exactly the nodes of the state.
  rep.nodes = detail::shoot(v, entry.L, lo, t0, t1, cfg.steps).nodes;
  rep.status = hi - lo <= cfg.energy_tolerance ? RadialStatus::converged
                                               : RadialStatus::not_converged;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Degeneracies.

struct EnergyLevel {
  double E = 0;
  std::vector<std::pair<int, int>> members; // (n, l)
  int states = 0;                           // sum of 2l + 1
};

/// Entries sharing n + l (Coulomb) or 2n + l (oscillator): degenerate at q = 1.
struct Shell {
  int key = 0;
  std::vector<std::pair<int, int>> members;
  std::vector<double> energies;
  double spread = 0;
  bool split = false;
};

struct DegeneracyReport {
  Potential potential = Potential::coulomb;
  double q = 1;
  double tolerance = 1e-9;
  std::vector<EnergyLevel> levels;
  std::vector<Shell> shells;
  bool accidental_degeneracy = false; // some level holds more than one l
  bool m_degeneracy_intact = true;    // 2l + 1 states per (n, l)
};

template <typename Real = double>
DegeneracyReport degeneracy_report(Potential v, const QParam<Real> &p, int nmax, int lmax,
                                   double tolerance = 1e-9) {
  if (nmax < 1 || lmax < 1) {
    throw std::invalid_argument("degeneracy report needs nmax, lmax >= 1");
  }
  std::vector<SpectrumEntry> rows;
  for (int l = 0; l <= lmax; ++l)
    for (int n = 0; n <= nmax; ++n) rows.push_back(energy(v, n, l, p));
  std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) {
    return std::tie(a.E, a.n, a.l) < std::tie(b.E, b.n, b.l);
  });

  DegeneracyReport rep;
  rep.potential = v;
  rep.q = to_double(p.q());
  rep.tolerance = tolerance;
  for (const auto &r : rows) {
    if (rep.levels.empty() || std::abs(r.E - rep.levels.back().E) > tolerance) {
      rep.levels.push_back(EnergyLevel{r.E, {}, 0});
    }
    rep.levels.back().members.emplace_back(r.n, r.l);
    rep.levels.back().states += 2 * r.l + 1;
  }
  for (const auto &lvl : rep.levels) {
    if (lvl.members.size() > 1) {
      rep.accidental_degeneracy = true;
    }
  }

  std::map<int, Shell> shells;
  for (const auto &r : rows) {
    const int key = v == Potential::coulomb ? r.n + r.l : 2 * r.n + r.l;
    auto &s = shells[key];
    s.key = key;
    s.members.emplace_back(r.n, r.l);
    s.energies.push_back(r.E);
  }
  for (auto &[key, s] : shells) {
    if (s.members.size() < 2) {
      continue;
    }
    const auto [mn, mx] = std::minmax_element(s.energies.begin(), s.energies.end());
    s.spread = *mx - *mn;
    s.split = s.spread > tolerance;
    rep.shells.push_back(s);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Moments of the angle-independent state.

struct MultipoleReport {
  double q = 1;
  double x0_squared = 0;           // <x0^2>/<1>
  double classical_x0_squared = 0; // 1/3
  double quadrupole = 0;           // <P_2(x0)> = (3 <x0^2> - 1)/2
  std::vector<std::pair<int, double>> even_moments;  // (2n, <P_2n(x0)>)
};

/// Classical Legendre polynomial P_n as a Polynomial, by Bonnet's recursion.
template <typename Real> Polynomial<Real> legendre_polynomial(int n) {
  Polynomial<Real> prev = Polynomial<Real>::constant(Real(1));
  if (n == 0) return prev;
  Polynomial<Real> cur = Polynomial<Real>::monomial(1, Real(1));
  for (int k = 1; k < n; ++k) {
    auto next = (cur.times_x() * Real(2 * k + 1) - prev * Real(k)) * (Real(1) / Real(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

template <typename Real>
MultipoleReport multipole_report(const QParam<Real> &p, int max_order = 8) {
  const AngularFunction<Real> one(p, 0, Polynomial<Real>::constant(Real(1)));
  const QMeasure<Real> mu(p);
  const Real norm = inner_product(one, one, mu);
  const auto x2 = mul_position(0, mul_position(0, one));
  MultipoleReport rep;
  rep.q = to_double(p.q());
  rep.x0_squared = to_double(inner_product(one, x2, mu) / norm);
  rep.classical_x0_squared = 1.0 / 3.0;
  for (int order = 2; order <= max_order; order += 2) {
    const AngularFunction<Real> pn(p, 0, legendre_polynomial<Real>(order));
    rep.even_moments.emplace_back(order, to_double(inner_product(one, pn, mu) / norm));
  }
  rep.quadrupole = rep.even_moments.front().second;
  return rep;
}

} // namespace qdeform
