// JSON conversions (nlohmann) for the value types the CLI emits.
#pragma once

#include "angular.hpp"
#include "irrep.hpp"
#include "spectra.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace qdeform {

/// Rounds to 15 significant digits so that dumps are byte-stable across
/// platforms and thread counts.
inline double round15(double x) {
  if (!std::isfinite(x) || x == 0) {
    return x == 0 ? 0.0 : x;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

/// "%.15g", the textual form used in CSV output.
inline std::string format15(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x == 0 ? 0.0 : x);
  return buf;
}

template <typename Real>
void to_json(nlohmann::json &j, const AngularFunction<Real> &f) {
  std::vector<double> c;
  for (int k = 0; k <= f.polynomial().degree(); ++k) {
    c.push_back(round15(to_double(f.coefficient(k))));
  }
  j = nlohmann::json{{"q", round15(to_double(f.param().q()))},
                     {"winding", f.winding()},
                     {"coefficients", c}};
}

/// Reads {q, winding, coefficients}.
inline AngularFunction<double> angular_function_from_json(const nlohmann::json &j) {
  const QParam<double> p(j.at("q").get<double>());
  return AngularFunction<double>(
      p, j.at("winding").get<int>(),
      Polynomial<double>(j.at("coefficients").get<std::vector<double>>()));
}

inline void to_json(nlohmann::json &j, const IdentityResult &r) {
  j = nlohmann::json{{"module", r.module},
                     {"name", r.name},
                     {"relation", r.relation},
                     {"residual", round15(r.residual)},
                     {"tolerance", round15(r.tolerance)},
                     {"status", r.skipped ? "skipped" : (r.pass ? "pass" : "fail")}};
  if (!r.note.empty()) {
    j["note"] = r.note;
  }
}

inline void to_json(nlohmann::json &j, const Finding &f) {
  j = nlohmann::json{{"name", f.name},
                     {"relation", f.relation},
                     {"residual", round15(f.residual)},
                     {"holds", f.holds},
                     {"detail", f.detail}};
}

inline void to_json(nlohmann::json &j, const SpectrumEntry &e) {
  j = nlohmann::json{{"potential", to_string(e.potential)},
                     {"q", round15(e.q)},
                     {"n", e.n},
                     {"l", e.l},
                     {"L", round15(e.L)},
                     {"E", round15(e.E)}};
}

inline void to_json(nlohmann::json &j, const RadialReport &r) {
  j = nlohmann::json{{"potential", to_string(r.potential)},
                     {"q", round15(r.q)},
                     {"n", r.n},
                     {"l", r.l},
                     {"L", round15(r.L)},
                     {"E_closed", round15(r.E_closed)},
                     {"E_numeric", round15(r.E_numeric)},
                     {"delta_E", round15(r.delta_E)},
                     {"boundary_residual", round15(r.boundary_residual)},
                     {"nodes", r.nodes},
                     {"iterations", r.iterations},
                     {"r_max", round15(r.r_max)},
                     {"status", to_string(r.status)}};
}

} // namespace qdeform
