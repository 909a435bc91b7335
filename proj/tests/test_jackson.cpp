#include <qdeform/angular.hpp>
#include <qdeform/jackson.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace qdeform;
using Catch::Approx;

namespace {

// Direct Jackson sum over (-1, 1): both half-lines of
// sum_k f(x_{2k+1}) (x_{2k} - x_{2k+2}), x_k = q^k.
template <typename Fn> double jackson_sum(Fn f, double q, int depth) {
  double s = 0;
  for (int k = 0; k < depth; ++k) {
    const double x = std::pow(q, 2 * k + 1);
    const double w = std::pow(q, 2 * k) - std::pow(q, 2 * k + 2);
    s += (f(x) + f(-x)) * w;
  }
  return s;
}

double closed_qnum(int n, double q) { return (std::pow(q, n) - std::pow(q, -n)) / (q - 1 / q); }

} // namespace

TEST_CASE("monomial integrals", "[jackson]") {
  for (double q : {0.5, 1.0, 1.7}) {
    const QMeasure<double> mu{QParam<double>(q)};
    CHECK(integrate_monomial(0, mu) == Approx(2.0).epsilon(1e-15));
    CHECK(integrate_monomial(1, mu) == 0.0);
    CHECK(integrate_monomial(7, mu) == 0.0);
  }
  const QMeasure<double> half{QParam<double>(0.5)};
  CHECK(integrate_monomial(2, half) == Approx(2 / 5.25).epsilon(1e-14));
  CHECK(integrate_monomial(2, half) == Approx(0.380952380952381).epsilon(1e-13));
  CHECK(integrate_monomial(2, QMeasure<double>(QParam<double>(1.0))) == Approx(2.0 / 3));
  CHECK_THROWS(integrate_monomial(-1, half));
}

TEST_CASE("series mode matches an independent Jackson sum", "[jackson]") {
  for (double q : {0.3, 0.5, 0.9}) {
    const QParam<double> p(q);
    for (int n = 0; n <= 8; ++n) {
      const QMeasure<double> mu(p, JacksonMode::series, 400);
      const double direct = jackson_sum([n](double x) { return std::pow(x, n); }, q, 400);
      CHECK(integrate_monomial(n, mu) == Approx(direct).epsilon(1e-12).margin(1e-14));
    }
  }
}

TEST_CASE("series mode rejects q >= 1", "[jackson]") {
  CHECK_THROWS_AS(QMeasure<double>(QParam<double>(1.0), JacksonMode::series),
                  std::invalid_argument);
  CHECK_THROWS_AS(QMeasure<double>(QParam<double>(1.5), JacksonMode::series),
                  std::invalid_argument);
  CHECK_THROWS_AS(QMeasure<double>(QParam<double>(0.5), JacksonMode::series, 0),
                  std::invalid_argument);
  CHECK_NOTHROW(QMeasure<double>(QParam<double>(1.5)));
}

TEST_CASE("polynomial integrals", "[jackson]") {
  for (double q : {0.5, 0.9, 1.0, 2.0}) {
    const QParam<double> p(q);
    const QMeasure<double> mu(p);
    const Polynomial<double> phi20({1.0, 0.0, -qnum(3, p)});
    CHECK(std::abs(integrate_polynomial(phi20, mu)) < 1e-14);
  }
  CHECK(integrate_polynomial(Polynomial<double>({0.0, 0.0, 1.0}),
                             QMeasure<double>(QParam<double>(1.0))) == Approx(2.0 / 3));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-1, 1);
  const QParam<double> p(0.5);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> c(9);
    for (auto &x : c) x = d(rng);
    const Polynomial<double> poly(c);
    const double closed = integrate_polynomial(poly, QMeasure<double>(p));
    const double series = integrate_polynomial(poly, QMeasure<double>(p, JacksonMode::series, 200));
    CHECK(std::abs(closed - series) < 1e-12);
  }
}

TEST_CASE("closed form is symmetric under q -> 1/q and positive on even powers",
          "[jackson][property]") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> qd(0.2, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double q = qd(rng);
    const QMeasure<double> a{QParam<double>(q)}, b{QParam<double>(1 / q)};
    for (int n = 0; n <= 12; ++n) {
      CHECK(integrate_monomial(n, a) == Approx(integrate_monomial(n, b)).epsilon(1e-12).margin(1e-300));
      if (n % 2 == 0) {
        CHECK(integrate_monomial(n, a) > 0);
      }
    }
  }
}

TEST_CASE("convergence probe", "[jackson]") {
  const auto t = series_convergence_probe(0, QParam<double>(0.5), {10, 25, 50});
  REQUIRE(t.depth_for_target);
  CHECK(*t.depth_for_target <= 50);
  CHECK(t.rows.back().error < 1e-12);
  // Partial sums increase monotonically towards the limit.
  CHECK(t.rows[0].partial_sum < t.rows[1].partial_sum);
  CHECK(t.rows[1].partial_sum <= t.rows[2].partial_sum);
  const auto t9 = series_convergence_probe(2, QParam<double>(0.9), {1000});
  CHECK(t9.rows[0].partial_sum == Approx(1 / closed_qnum(3, 0.9)).epsilon(1e-12));
  REQUIRE(t9.depth_for_target);
  // Nearer q = 1 more terms are needed.
  const auto t99 = series_convergence_probe(2, QParam<double>(0.99), {});
  REQUIRE(t99.depth_for_target);
  CHECK(*t99.depth_for_target > *t9.depth_for_target);
  CHECK_THROWS(series_convergence_probe(0, QParam<double>(1.0), {}));
}

TEST_CASE("inner products of harmonics", "[jackson]") {
  for (double q : {0.5, 0.9, 1.0, 1.5}) {
    const QParam<double> p(q);
    std::vector<AngularFunction<double>> ys;
    std::vector<HarmonicLabel> labels;
    for (int l = 0; l <= 4; ++l)
      for (int m = -l; m <= l; ++m) {
        labels.emplace_back(l, m);
        ys.push_back(harmonic(labels.back(), p));
      }
    double worst = 0;
    for (std::size_t i = 0; i < ys.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j) {
        const double g = inner_product(ys[i], ys[j]);
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    INFO("q = " << q);
    CHECK(worst < 1e-9);
  }
  const QParam<double> p(1.5);
  CHECK(std::abs(inner_product(harmonic(HarmonicLabel(1, 0), p), harmonic(HarmonicLabel(0, 0), p))) < 1e-15);
}

TEST_CASE("grid inner product agrees with the monomial rule", "[jackson]") {
  // Two independent evaluations in 50-digit arithmetic.
  for (const char *qs : {"0.5", "0.9", "1.5"}) {
    const QParam<high_precision> p{high_precision(qs)};
    const QMeasure<high_precision> mu(p);
    for (int l = 0; l <= 4; ++l) {
      for (int m = -l; m <= l; ++m) {
        const auto y = harmonic(HarmonicLabel(l, m), p);
        const auto a = inner_product(y, y, mu);
        const auto b = inner_product_monomial(y, y, mu);
        CHECK(to_double(abs(a - b)) < 1e-35);
        CHECK(to_double(abs(a - 1)) < 1e-35);
      }
    }
  }
}

TEST_CASE("series inner product against closed form for q < 1", "[jackson]") {
  const QParam<double> p(0.5);
  const auto y = harmonic(HarmonicLabel(3, 1), p);
  const auto z = mul_position(0, mul_position(0, y));
  const double closed = inner_product(y, z);
  const double series = inner_product(y, z, QMeasure<double>(p, JacksonMode::series, 300));
  CHECK(series == Approx(closed).epsilon(1e-12));
}

TEST_CASE("x0 squared expectation in the uniform state", "[jackson]") {
  for (double q : {0.5, 1.0, 1.3, 2.0}) {
    const QParam<double> p(q);
    const AngularFunction<double> one(p, 0, Polynomial<double>::constant(1));
    const auto x2 = mul_position(0, mul_position(0, one));
    CHECK(inner_product(one, x2) / inner_product(one, one) == Approx(1 / qnum(3, p)).epsilon(1e-12));
  }
  const QParam<double> half(0.5);
  const AngularFunction<double> one(half, 0, Polynomial<double>::constant(1));
  CHECK(inner_product(one, mul_position(0, mul_position(0, one))) / inner_product(one, one) ==
        Approx(0.190476190476).epsilon(1e-10));
}

TEST_CASE("different windings are orthogonal", "[jackson]") {
  const QParam<double> p(0.8);
  CHECK(inner_product(harmonic(HarmonicLabel(2, 1), p), harmonic(HarmonicLabel(2, 0), p)) == 0.0);
}
