// Command-line front end: spectrum tables, harmonic coefficient dumps,
// Jackson integrals and the verification suite, as JSON or CSV.
//
// run() is kept separate from main() so tests can drive it in-process and
// inject a corrupted position coefficient.
#pragma once

#include <qdeform/angular.hpp>
#include <qdeform/jackson.hpp>
#include <qdeform/parallel.hpp>
#include <qdeform/qcore.hpp>
#include <qdeform/serialize.hpp>
#include <qdeform/spectra.hpp>
#include <qdeform/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdeform::cli {

inline constexpr const char *version = "1.0.0";
inline constexpr int max_lmax = 64;

enum class Format { json, csv };

struct RunConfig {
  std::string command;
  std::vector<double> q{1.0};
  int lmax = -1; // per-command default when negative
  int nmax = 2;
  std::string potential;
  std::optional<double> tolerance;
  Precision precision = Precision::standard;
  Format format = Format::json;
  std::string out;
  bool oracle = false;
  std::optional<int> series_depth;
  int degree = 0;
  int threads = 1;
};

/// Test-only knobs that are deliberately not reachable from the command line.
struct Hooks {
  std::optional<PositionFault> corrupt_position;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<nlohmann::json> rows;
  double tolerance = 0;
  int exit_code = 0;
};

namespace detail {

inline std::string csv_field(const nlohmann::json &v) {
  std::string s;
  if (v.is_null()) {
    return s;
  } else if (v.is_string()) {
    s = v.get<std::string>();
  } else if (v.is_boolean()) {
    s = v.get<bool>() ? "true" : "false";
  } else if (v.is_number_integer()) {
    s = std::to_string(v.get<long long>());
  } else if (v.is_number()) {
    s = format15(v.get<double>());
  } else {
    s = v.dump();
  }
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    return s;
  }
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

inline std::string render_csv(const Table &t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      os << (i ? "," : "") << fields[i];
    }
    os << "\r\n";
  };
  std::vector<std::string> header;
  for (const auto &c : t.columns) header.push_back(csv_field(c));
  line(header);
  for (const auto &r : t.rows) {
    std::vector<std::string> fields;
    for (const auto &c : t.columns) {
      fields.push_back(csv_field(r.contains(c) ? r.at(c) : nlohmann::json()));
    }
    line(fields);
  }
  return os.str();
}

inline std::string render_json(const Table &t, const RunConfig &cfg) {
  nlohmann::json qs = nlohmann::json::array();
  for (double q : cfg.q) qs.push_back(round15(q));
  nlohmann::json doc;
  doc["meta"] = {{"version", version},
                 {"command", cfg.command},
                 {"q", qs},
                 {"tolerance", round15(t.tolerance)},
                 {"precision", to_string(cfg.precision)}};
  doc["rows"] = t.rows;
  return doc.dump(2) + "\n";
}

template <typename Real> double effective_tolerance(const RunConfig &cfg) {
  return cfg.tolerance.value_or(to_double(default_tolerance<Real>()));
}

template <typename Real> Table spectrum(const RunConfig &cfg) {
  const auto v = parse_potential(cfg.potential);
  Table t;
  t.columns = {"potential", "q", "n", "l", "L", "E"};
  t.tolerance = effective_tolerance<Real>(cfg);
  for (const auto &e : spectrum_table<Real>(v, cfg.q, cfg.nmax, cfg.lmax, cfg.threads)) {
    t.rows.push_back(e);
  }
  return t;
}

template <typename Real> Table harmonics(const RunConfig &cfg) {
  Table t;
  t.columns = {"q", "l", "m", "k", "a_k", "normalization"};
  if (cfg.oracle) {
    t.columns.insert(t.columns.end(), {"recursion_a_k", "difference"});
  }
  // Coefficient-wise agreement of the two constructions is expected to
  // roughly the working precision.
  t.tolerance = cfg.tolerance.value_or(std::is_same_v<Real, double> ? 1e-12 : 1e-30);
  for (double qv : cfg.q) {
    const QParam<Real> p{Real(qv)};
    for (int l = 0; l <= cfg.lmax; ++l) {
      for (int m = 0; m <= l; ++m) {
        const HarmonicLabel label(l, m);
        const auto rec = build_phi(label, p);
        const auto phi = cfg.oracle ? hypergeom_phi(label, p) : rec;
        const double norm = to_double(normalization_constant(label, p));
        for (int k = (l - m) % 2; k <= l - m; k += 2) {
          nlohmann::json row{{"q", round15(qv)},
                             {"l", l},
                             {"m", m},
                             {"k", k},
                             {"a_k", round15(to_double(phi.coefficient(k)))},
                             {"normalization", round15(norm)}};
          if (cfg.oracle) {
            using std::abs;
            const Real a = phi.coefficient(k);
            const Real b = rec.coefficient(k);
            const Real scale = std::max(Real(1), Real(abs(b)));
            const double diff = to_double(Real(abs(a - b)) / scale);
            row["recursion_a_k"] = round15(to_double(b));
            row["difference"] = round15(diff);
            if (!(diff < t.tolerance)) {
              t.exit_code = 1;
            }
          }
          t.rows.push_back(std::move(row));
        }
      }
    }
  }
  return t;
}

inline bool resolved(const std::string &match) {
  return !match.empty() && match != "none" && match != "ambiguous";
}

template <typename Real> Table verify(const RunConfig &cfg, const Hooks &hooks) {
  if (cfg.lmax < 3) {
    throw UsageError("verify needs --lmax >= 3");
  }
  Table t;
  t.columns = {"q", "kind", "module", "name", "relation", "residual", "tolerance", "status",
               "note"};
  t.tolerance = effective_tolerance<Real>(cfg);
  VerifyOptions opt;
  opt.lmax = cfg.lmax;
  opt.tolerance = t.tolerance;
  opt.series_depth = cfg.series_depth;
  opt.threads = cfg.threads;
  opt.corrupt_position = hooks.corrupt_position;
  for (double qv : cfg.q) {
    const auto report = verify_all(QParam<Real>(Real(qv)), opt);
    for (const auto &r : report.identities) {
      nlohmann::json row = r;
      row["q"] = round15(qv);
      row["kind"] = "identity";
      t.rows.push_back(std::move(row));
    }
    for (const auto &f : report.findings) {
      t.rows.push_back({{"q", round15(qv)},
                        {"kind", "finding"},
                        {"name", f.name},
                        {"relation", f.relation},
                        {"residual", round15(f.residual)},
                        {"status", f.holds ? "holds" : "does_not_hold"},
                        {"note", f.detail}});
    }
    t.rows.push_back({{"q", round15(qv)},
                      {"kind", "resolution"},
                      {"module", "irrep"},
                      {"name", "partial_square_form"},
                      {"relation", "the d.d candidate consistent with the construction"},
                      {"status", resolved(report.partial_square_match) ? "resolved" : "unresolved"},
                      {"note", report.partial_square_match}});
    if (!report.all_pass()) {
      t.exit_code = 1;
    }
  }
  return t;
}

template <typename Real> Table integrate(const RunConfig &cfg) {
  if (cfg.degree < 0) {
    throw UsageError("--degree must be nonnegative");
  }
  if (cfg.series_depth) {
    if (*cfg.series_depth <= 0) {
      throw UsageError("--series-depth must be positive");
    }
    for (double q : cfg.q) {
      if (!(q < 1)) {
        throw UsageError("series integration requires q < 1");
      }
    }
  }
  Table t;
  t.columns = {"q", "degree", "closed_form", "series", "series_depth", "difference"};
  t.tolerance = effective_tolerance<Real>(cfg);
  Real target(1e-13);
  if constexpr (!std::is_same_v<Real, double>) {
    target = Real("1e-40");
  }
  for (double qv : cfg.q) {
    const QParam<Real> p{Real(qv)};
    const Real closed = integrate_monomial(cfg.degree, QMeasure<Real>(p));
    nlohmann::json row{{"q", round15(qv)},
                       {"degree", cfg.degree},
                       {"closed_form", round15(to_double(closed))},
                       {"series", nullptr},
                       {"series_depth", nullptr},
                       {"difference", nullptr}};
    if (qv < 1) {
      int depth = 0;
      if (cfg.series_depth) {
        depth = *cfg.series_depth;
      } else {
        const auto probe = series_convergence_probe(cfg.degree, p, {}, target, 1000000);
        depth = probe.depth_for_target.value_or(1000000);
      }
      const Real series = integrate_monomial(cfg.degree, QMeasure<Real>(p, JacksonMode::series, depth));
      using std::abs;
      row["series"] = round15(to_double(series));
      row["series_depth"] = depth;
      row["difference"] = round15(to_double(Real(abs(series - closed))));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

template <typename Real> Table dispatch(const RunConfig &cfg, const Hooks &hooks) {
  if (cfg.command == "spectrum") return spectrum<Real>(cfg);
  if (cfg.command == "harmonics") return harmonics<Real>(cfg);
  if (cfg.command == "verify") return verify<Real>(cfg, hooks);
  return integrate<Real>(cfg);
}

inline Precision parse_precision(const std::string &s) {
  if (s == "double") return Precision::standard;
  if (s == "high") return Precision::high;
  throw UsageError("precision must be 'double' or 'high' (got '" + s + "')");
}

} // namespace detail

/// Runs one command. Exit codes: 0 success, 1 verification failure,
/// 2 usage error. Nothing is written to `out` (or --out) on error paths.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err,
               const Hooks &hooks = {}) {
  RunConfig cfg;
  std::string precision;
  std::string format = "json";

  CLI::App app{"q-deformed angular momentum: spectra, harmonics, integrals, identity checks",
               "qdeform"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  auto common = [&](CLI::App *sub) {
    sub->add_option("--q", cfg.q, "deformation parameter (repeatable)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tolerance, "tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--precision", precision, "double|high (env QDEFORM_PRECISION)")
        ->check(CLI::IsMember({"double", "high"}));
    sub->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "write to PATH instead of stdout");
  };

  auto *spectrum = app.add_subcommand("spectrum", "closed-form energy table");
  common(spectrum);
  spectrum->add_option("--potential", cfg.potential, "coulomb|oscillator")
      ->required()
      ->check(CLI::IsMember({"coulomb", "oscillator"}));
  spectrum->add_option("--nmax", cfg.nmax, "largest radial quantum number")
      ->check(CLI::NonNegativeNumber);
  spectrum->add_option("--lmax", cfg.lmax, "largest l")->check(CLI::NonNegativeNumber);

  auto *harmonics = app.add_subcommand("harmonics", "Phi_lm coefficients and normalizations");
  common(harmonics);
  harmonics->add_option("--lmax", cfg.lmax, "largest l")->check(CLI::NonNegativeNumber);
  harmonics->add_flag("--oracle", cfg.oracle, "emit the hypergeometric form, compared with the recursion");

  auto *verify = app.add_subcommand("verify", "run the identity catalogue at each q");
  common(verify);
  verify->add_option("--lmax", cfg.lmax, "truncation (>= 3)")->check(CLI::NonNegativeNumber);
  verify->add_option("--series-depth", cfg.series_depth, "depth for the series-vs-closed-form check");

  auto *integrate = app.add_subcommand("integrate", "Jackson integral of x0^degree over (-1, 1)");
  common(integrate);
  integrate->add_option("--degree", cfg.degree, "monomial degree")->check(CLI::NonNegativeNumber);
  integrate->add_option("--series-depth", cfg.series_depth, "series mode with N grid points (q < 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion *>(&e) ? e.what() : app.help()) << "\n";
      return 0;
    }
    err << "qdeform: " << e.what() << "\n";
    return 2;
  }

  try {
    for (auto *sub : app.get_subcommands()) {
      cfg.command = sub->get_name();
    }
    if (precision.empty()) {
      if (const char *env = std::getenv("QDEFORM_PRECISION"); env && *env) {
        precision = env;
      }
    }
    cfg.precision = detail::parse_precision(precision.empty() ? "double" : precision);
    cfg.format = format == "csv" ? Format::csv : Format::json;
    cfg.threads = default_thread_count();
    if (cfg.q.empty()) {
      throw UsageError("--q needs a value");
    }
    if (cfg.lmax < 0) {
      cfg.lmax = cfg.command == "verify" ? 6 : cfg.command == "harmonics" ? 3 : 2;
    }
    if (cfg.lmax > max_lmax) {
      throw UsageError("--lmax is limited to " + std::to_string(max_lmax));
    }

    const Table t = cfg.precision == Precision::high
                        ? detail::dispatch<high_precision>(cfg, hooks)
                        : detail::dispatch<double>(cfg, hooks);
    const std::string text =
        cfg.format == Format::csv ? detail::render_csv(t) : detail::render_json(t, cfg);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f || !(f << text) || !f.flush()) {
        err << "qdeform: cannot write " << cfg.out << "\n";
        return 2;
      }
    }
    return t.exit_code;
  } catch (const std::exception &e) {
    // Library preconditions reached through user input are usage errors.
    err << "qdeform: " << e.what() << "\n";
    return 2;
  }
}

} // namespace qdeform::cli
