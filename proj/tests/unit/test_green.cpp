#include <doctest.h>

#include <cmath>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include "anderson/operators.hpp"
#include "anderson/rng.hpp"

using namespace anderson;

namespace {

// G(a) = int_0^inf prod_j e^{-2t} I_{a_j}(2t) dt, the continuous-time walk representation.
double bessel_oracle(const Site& a) {
  struct P {
    int a[3];
  } p{{static_cast<int>(std::llabs(a[0])), static_cast<int>(std::llabs(a[1])), static_cast<int>(std::llabs(a[2]))}};
  gsl_function f;
  f.function = [](double t, void* params) {
    const auto* q = static_cast<const P*>(params);
    double v = 1.0;
    for (int j = 0; j < 3; ++j) v *= gsl_sf_bessel_In_scaled(q->a[j], 2.0 * t);
    return v;
  };
  f.params = &p;
  gsl_set_error_handler_off();
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  double result = 0.0, err = 0.0;
  gsl_integration_qagiu(&f, 0.0, 0.0, 1e-10, 2000, w, &result, &err);
  gsl_integration_workspace_free(w);
  return result;
}

// closed form at the origin: sqrt(6)/(32 pi^3) Gamma(1/24)Gamma(5/24)Gamma(7/24)Gamma(11/24), divided by 2d
double watson_origin() {
  const double pi = std::numbers::pi;
  const double W = std::sqrt(6.0) / (32.0 * pi * pi * pi) * std::tgamma(1.0 / 24) * std::tgamma(5.0 / 24) *
                   std::tgamma(7.0 / 24) * std::tgamma(11.0 / 24);
  return W / 6.0;
}

}  // namespace

TEST_CASE("Green's function at the origin") {
  const double oracle = 0.252731009858663;  // recorded high-precision value
  CHECK(watson_origin() == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(lattice_green(Site{0, 0, 0}) - oracle) < 1e-6);
}

TEST_CASE("Green's function against recorded and Bessel oracles") {
  const struct {
    Site a;
    double g;
  } table[] = {
      {{1, 0, 0}, 0.0860643431919651}, {{1, 1, 0}, 0.055191433687706},  {{1, 1, 1}, 0.0435783543976942},
      {{2, 0, 0}, 0.0428893145423345}, {{2, 1, 0}, 0.0359316034734588}, {{3, 2, 1}, 0.0211576619678648},
      {{5, 0, 0}, 0.0161010753339086}, {{10, 0, 0}, 0.00797826154189813}, {{20, 0, 0}, 0.00398137857301644},
  };
  for (const auto& row : table) {
    const double g = lattice_green(row.a);
    CHECK(std::abs(g - row.g) < 1e-6);
    CHECK(std::abs(bessel_oracle(row.a) - row.g) < 1e-8);
  }
}

TEST_CASE("Green's function identities") {
  const double g0 = lattice_green(Site{0, 0, 0});
  CHECK(std::abs(6 * g0 - 6 * lattice_green(Site{1, 0, 0}) - 1.0) < 1e-5);
  SequentialRng rng(5);
  for (int i = 0; i < 5; ++i) {
    Site a{static_cast<std::int64_t>(rng.below(9)) - 4, static_cast<std::int64_t>(rng.below(9)) - 4,
           static_cast<std::int64_t>(rng.below(9)) - 4};
    double lap = 6 * lattice_green(a);
    for (int j = 0; j < 3; ++j)
      for (int d : {-1, 1}) {
        Site b = a;
        b[j] += d;
        lap -= lattice_green(b);
      }
    const double delta = (a == Site{0, 0, 0}) ? 1.0 : 0.0;
    CHECK(std::abs(lap - delta) < 1e-5);
  }
  // positivity, cap by G(0), radial monotonicity along an axis
  double prev = g0;
  for (int r = 1; r <= 12; ++r) {
    const double g = lattice_green(Site{r, 0, 0});
    CHECK(g > 0.0);
    CHECK(g <= g0);
    CHECK(g < prev);
    prev = g;
  }
  CHECK(green_asymptotic_constant(3) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)));
  const double g30 = lattice_green(Site{30, 0, 0});
  CHECK(std::abs(g30 * 30.0 / green_asymptotic_constant(3) - 1.0) < 0.02);
  CHECK_THROWS_AS(lattice_green(std::vector<std::int64_t>{0, 0}, 2), DomainError);
}

TEST_CASE("four-dimensional Green's function") {
  // -Delta G = delta in d = 4: 8 G(0) - 8 G(e1) = 1
  const double g0 = lattice_green(std::vector<std::int64_t>{0, 0, 0, 0}, 4);
  const double g1 = lattice_green(std::vector<std::int64_t>{1, 0, 0, 0}, 4);
  CHECK(std::abs(8 * g0 - 8 * g1 - 1.0) < 1e-5);
}
