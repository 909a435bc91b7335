// Short tour of the library at one deformation parameter: harmonics and
// their norms, the deformed spectra, and the x0 moments of the ground state.
#include <qdeform/angular.hpp>
#include <qdeform/jackson.hpp>
#include <qdeform/spectra.hpp>

#include <cstdio>
#include <cstdlib>

using namespace qdeform;

int main(int argc, char **argv) {
  const double qv = argc > 1 ? std::atof(argv[1]) : 1.3;
  const QParam<double> p(qv);
  std::printf("q = %g   [2] = %.12g   c_1 = %.12g\n\n", qv, qnum(2, p), invariant_c(1, p));

  std::printf("Y_lm coefficients in x0 and <Y, Y>:\n");
  for (int l = 0; l <= 2; ++l) {
    for (int m = -l; m <= l; ++m) {
      const auto y = harmonic(HarmonicLabel(l, m), p);
      std::printf("  l=%d m=%+d  norm=%.12f  a =", l, m, inner_product(y, y));
      for (int k = 0; k <= y.polynomial().degree(); ++k) {
        std::printf(" %+.6f", y.coefficient(k));
      }
      std::printf("\n");
    }
  }

  std::printf("\n  n  l        L      E_coulomb   E_oscillator\n");
  for (int l = 0; l <= 2; ++l) {
    for (int n = 0; n <= 1; ++n) {
      const auto c = coulomb_energy(n, l, p);
      const auto o = oscillator_energy(n, l, p);
      std::printf("  %d  %d  %9.6f  %11.8f  %11.8f\n", n, l, c.L, c.E, o.E);
    }
  }

  const auto check = radial_verify(Potential::coulomb, 1, 1, p);
  std::printf("\nshooting, coulomb n=1 l=1: E = %.12f (|dE| = %.1e, %s)\n", check.E_numeric,
              check.delta_E, to_string(check.status).c_str());

  const auto mp = multipole_report(p);
  std::printf("<x0^2> = %.9f (classically %.9f), <P2(x0)> = %.9f\n", mp.x0_squared,
              mp.classical_x0_squared, mp.quadrupole);
  return 0;
}
