#include <qdeform/angular.hpp>
#include <qdeform/serialize.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace qdeform;
using Catch::Approx;
using F = AngularFunction<double>;

namespace {

F random_function(const QParam<double> &p, std::mt19937_64 &rng, int winding, int degree = 5) {
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  for (auto &x : c) x = d(rng);
  return F(p, winding, Polynomial<double>(c));
}

double distance(const F &a, const F &b) { return relative_distance(a, b); }

// Legendre P_l by Rodrigues' formula on integer coefficients, differentiated
// m further times: d^{l+m}/dx^{l+m} (x^2 - 1)^l / (2^l l!).
std::vector<double> rodrigues_derivative(int l, int m) {
  std::vector<double> c(static_cast<std::size_t>(2 * l) + 1, 0.0);
  double binom = 1;
  for (int j = 0; j <= l; ++j) {
    c[static_cast<std::size_t>(2 * j)] = ((l - j) % 2 == 0 ? 1 : -1) * binom;
    binom = binom * (l - j) / (j + 1);
  }
  for (int d = 0; d < l + m; ++d) {
    for (std::size_t k = 0; k + 1 < c.size(); ++k) c[k] = c[k + 1] * double(k + 1);
    c.back() = 0;
  }
  double scale = std::pow(2.0, l);
  for (int k = 2; k <= l; ++k) scale *= k;
  for (auto &x : c) x /= scale;
  return c;
}

double factorial(int n) {
  double r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

} // namespace

TEST_CASE("position multiplication basics", "[angular]") {
  const QParam<double> p(1.3);
  const F one(p, 0, Polynomial<double>::constant(1));
  const auto x0 = mul_position(0, one);
  CHECK(x0.winding() == 0);
  CHECK(x0.coefficient(0) == 0.0);
  CHECK(x0.coefficient(1) == 1.0);
  const F xt1(p, 1, Polynomial<double>::constant(1));
  const auto r = mul_position(0, xt1);
  CHECK(r.winding() == 1);
  CHECK(r.coefficient(1) == Approx(std::pow(1.3, -2)));
  CHECK_THROWS_AS(mul_position(2, one), std::invalid_argument);
}

TEST_CASE("unit length of the position vector", "[angular][property]") {
  std::mt19937_64 rng(3);
  for (double q : {0.5, 0.9, 1.0, 1.5}) {
    const QParam<double> p(q);
    for (int m = -3; m <= 3; ++m) {
      const auto f = random_function(p, rng, m);
      auto s = mul_position(1, mul_position(-1, f)).scaled(-1 / q);
      s += mul_position(0, mul_position(0, f));
      s -= mul_position(-1, mul_position(1, f)).scaled(q);
      CHECK(distance(s, f) < 1e-12);
    }
  }
}

TEST_CASE("Phi by recursion", "[angular]") {
  for (double q : {0.7, 1.0, 1.3}) {
    const QParam<double> p(q);
    const auto p11 = build_phi(HarmonicLabel(1, 1), p);
    CHECK(p11.winding() == 1);
    CHECK(p11.polynomial().degree() == 0);
    CHECK(p11.coefficient(0) == 1.0);
    const auto p20 = build_phi(HarmonicLabel(2, 0), p);
    CHECK(p20.coefficient(0) == 1.0);
    CHECK(p20.coefficient(1) == 0.0);
    CHECK(p20.coefficient(2) == Approx(-qnum(3, p)).epsilon(1e-14));
    const auto p10 = build_phi(HarmonicLabel(1, 0), p);
    CHECK(p10.polynomial().degree() == 1);
    CHECK(p10.coefficient(1) == 1.0);
  }
  CHECK(build_phi(HarmonicLabel(2, 0), QParam<double>(1.0)).coefficient(2) == -3.0);
  CHECK_THROWS_AS(HarmonicLabel(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(HarmonicLabel(-1, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_phi(HarmonicLabel(2, -1), QParam<double>(1.3)), std::invalid_argument);
}

TEST_CASE("parity structure of Phi", "[angular][property]") {
  const QParam<double> p(0.8);
  for (int l = 0; l <= 6; ++l) {
    for (int m = 0; m <= l; ++m) {
      const auto phi = build_phi(HarmonicLabel(l, m), p);
      CHECK(phi.polynomial().degree() == l - m);
      for (int k = 0; k <= l - m; ++k) {
        if ((k - (l - m)) % 2 != 0) {
          CHECK(phi.coefficient(k) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("hypergeometric form reproduces the recursion", "[angular]") {
  for (double q : {0.5, 0.9, 1.0, 1.5}) {
    const QParam<double> p(q);
    for (int l = 0; l <= 6; ++l) {
      for (int m = 0; m <= l; ++m) {
        const HarmonicLabel lab(l, m);
        CHECK(distance(hypergeom_phi(lab, p), build_phi(lab, p)) < 1e-12);
      }
    }
  }
  // The argument read as q^{-m} x0^2 (instead of (q^{-m} x0)^2) differs once m > 0.
  const QParam<double> p(1.5);
  const HarmonicLabel lab(4, 2);
  const auto alt = hypergeom_phi(lab, p, std::optional<double>(std::pow(1.5, -2)));
  CHECK(distance(alt, build_phi(lab, p)) > 1e-3);
}

TEST_CASE("basic hypergeometric series terminates", "[angular]") {
  const QParam<double> base(1.0);
  // 2F1(1, -2; 1; z) = (1 - z)^2 classically.
  const auto t = basic_hypergeometric_2f1(1.0, -2.0, 1.0, base, 10);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == 1.0);
  CHECK(t[1] == Approx(-2.0));
  CHECK(t[2] == Approx(1.0));
}

TEST_CASE("normalization constants", "[angular]") {
  const double y00 = 1 / std::sqrt(4 * M_PI);
  for (double q : {0.5, 1.0, 2.0}) {
    CHECK(normalization_constant(HarmonicLabel(0, 0), QParam<double>(q)) == Approx(y00));
  }
}

TEST_CASE("classical harmonics match Legendre functions", "[angular]") {
  // At q = 1, x~_1 = -sin(theta) e^{i phi} / sqrt 2, so Y_lm corresponds to the
  // polynomial sqrt((2l+1)/4pi (l-m)!/(l+m)!) d^m P_l/dx^m times (-sqrt 2)^m
  // up to the overall phase convention.
  const QParam<double> p(1.0);
  for (int l = 0; l <= 3; ++l) {
    for (int m = 0; m <= l; ++m) {
      const auto y = normalize_y(HarmonicLabel(l, m), p);
      const auto d = rodrigues_derivative(l, m);
      const double n = std::sqrt((2 * l + 1) / (4 * M_PI) * factorial(l - m) / factorial(l + m)) *
                       std::pow(std::sqrt(2.0), m);
      int k_lead = l - m;
      const double sign = (y.coefficient(k_lead) > 0) == (d[static_cast<std::size_t>(k_lead)] > 0) ? 1 : -1;
      for (int k = 0; k <= l - m; ++k) {
        CHECK(y.coefficient(k) == Approx(sign * n * d[static_cast<std::size_t>(k)]).margin(1e-13));
      }
    }
  }
}

TEST_CASE("negative m at q = 1 follows Y_{l,-m} = (-1)^m conj(Y_lm)", "[angular]") {
  // In the x~_{-1} basis this reads: same polynomial as Y_lm.
  const QParam<double> p(1.0);
  for (int l = 1; l <= 4; ++l) {
    for (int m = 1; m <= l; ++m) {
      const auto neg = harmonic(HarmonicLabel(l, -m), p);
      const auto pos = harmonic(HarmonicLabel(l, m), p);
      CHECK(neg.winding() == -m);
      CHECK(distance(neg, F(p, -m, pos.polynomial())) < 1e-12);
    }
  }
}

TEST_CASE("highest and lowest weights", "[angular]") {
  for (double q : {0.6, 1.0, 1.4}) {
    const QParam<double> p(q);
    for (int l = 0; l <= 5; ++l) {
      CHECK(apply_Lplus(build_phi(HarmonicLabel(l, l), p)).is_zero());
    }
    for (int l = 0; l <= 4; ++l) {
      const auto y = harmonic(HarmonicLabel(l, -l), p);
      CHECK(apply_Lminus(y).max_abs() < 1e-12);
    }
  }
}

TEST_CASE("ladder product and Casimir eigenvalues", "[angular]") {
  for (double q : {0.5, 0.9, 1.0, 1.5}) {
    const QParam<double> p(q);
    for (int l = 0; l <= 5; ++l) {
      for (int m = 0; m <= l; ++m) {
        const HarmonicLabel lab(l, m);
        const auto phi = build_phi(lab, p);
        const auto lhs = apply_Lplus(apply_Lminus(phi));
        CHECK(distance(lhs, phi.scaled(qnum(l + m, p) * qnum(l - m + 1, p))) < 1e-11);
        const auto y = harmonic(lab, p);
        CHECK(distance(apply_casimir(y), y.scaled(qnum(l, p) * qnum(l + 1, p))) < 1e-11);
        CHECK(distance(apply_invariant_c(phi), phi.scaled(invariant_c(l, p))) < 1e-11);
      }
      for (int m = -l; m < 0; ++m) {
        const auto y = harmonic(HarmonicLabel(l, m), p);
        CHECK(distance(apply_casimir(y), y.scaled(qnum(l, p) * qnum(l + 1, p))) < 1e-11);
      }
    }
  }
}

TEST_CASE("Lambda0 is diagonal on Phi", "[angular]") {
  const QParam<double> one(1.0);
  for (int l = 0; l <= 4; ++l) {
    for (int m = 0; m <= l; ++m) {
      const auto phi = build_phi(HarmonicLabel(l, m), one);
      CHECK(distance(apply_lambda(0, phi), phi.scaled(m)) < 1e-12);
    }
  }
  const QParam<double> p(1.3);
  const auto phi = build_phi(HarmonicLabel(3, 1), p);
  const auto r = apply_lambda(0, phi);
  const double ratio = r.coefficient(2) / phi.coefficient(2);
  CHECK(distance(r, phi.scaled(ratio)) < 1e-12);
}

TEST_CASE("generator commutators on random functions", "[angular][property]") {
  std::mt19937_64 rng(5);
  for (double q : {0.5, 0.9, 1.0, 1.5}) {
    const QParam<double> p(q);
    for (int m = -3; m <= 3; ++m) {
      const auto f = random_function(p, rng, m);
      // [L0, L+] = L+
      const auto a = apply_L0(apply_Lplus(f)) - apply_Lplus(apply_L0(f));
      CHECK(distance(a, apply_Lplus(f)) < 1e-12);
      const auto b = apply_L0(apply_Lminus(f)) - apply_Lminus(apply_L0(f));
      CHECK(distance(b, apply_Lminus(f).scaled(-1)) < 1e-12);
      // [L+, L-] = [2 L0]
      const auto c = apply_Lplus(apply_Lminus(f)) - apply_Lminus(apply_Lplus(f));
      CHECK(distance(c, f.scaled(qnum(2 * m, p))) < 1e-10);
    }
  }
}

TEST_CASE("ladder identity with the q^L0 weight", "[angular]") {
  const QParam<double> p(1.3);
  CHECK(ladder_identity_check(HarmonicLabel(2, 0), p).holds);
  CHECK(ladder_identity_check(HarmonicLabel(2, 1), p).holds);
  for (double q : {0.5, 0.9, 1.3, 1.5}) {
    const QParam<double> pq(q);
    for (int l = 1; l <= 5; ++l) {
      for (int m = 0; m < l; ++m) {
        const auto r = ladder_identity_check(HarmonicLabel(l, m), pq);
        CHECK(r.holds);
        if (m == 0) {
          CHECK(r.unweighted_residual < 1e-10);
        }
      }
    }
  }
  // Dropping the weight breaks it once m > 0.
  CHECK(ladder_identity_check(HarmonicLabel(3, 1), p).unweighted_residual > 1e-3);
  CHECK_THROWS(ladder_identity_check(HarmonicLabel(2, 2), p));
}

TEST_CASE("high precision Phi agrees with double", "[angular]") {
  const QParam<high_precision> ph(high_precision("1.5"));
  const QParam<double> pd(1.5);
  for (int l = 0; l <= 6; ++l) {
    for (int m = 0; m <= l; ++m) {
      const HarmonicLabel lab(l, m);
      const auto a = hypergeom_phi(lab, ph);
      const auto b = build_phi(lab, ph);
      CHECK(to_double(relative_distance(a, b)) < 1e-40);
      const auto d = build_phi(lab, pd);
      for (int k = 0; k <= l - m; ++k) {
        CHECK(to_double(b.coefficient(k)) == Approx(d.coefficient(k)).epsilon(1e-13).margin(1e-300));
      }
    }
  }
}

TEST_CASE("JSON round trip of an angular function", "[angular]") {
  const QParam<double> p(0.75);
  const auto y = harmonic(HarmonicLabel(3, -2), p);
  const nlohmann::json j = y;
  CHECK(j.at("winding") == -2);
  const auto back = angular_function_from_json(j);
  CHECK(back.winding() == -2);
  CHECK(distance(back, y) < 1e-14);
}
