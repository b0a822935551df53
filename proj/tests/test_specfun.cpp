#include <cmath>
#include <vector>

#include "doctest.h"
#include "podeval/rng.hpp"
#include "podeval/specfun.hpp"

using namespace podeval;
namespace sf = podeval::specfun;

namespace {

// Independent oracle: midpoint-rule integration of the Beta(a,b) density.
// Step 1e-8; long double accumulation keeps the summation error well below
// the comparison tolerance.
double beta_cdf_by_quadrature(double a, double b, double x) {
  const double lnb = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double h = 1e-8;
  const long long n = static_cast<long long>(x / h);
  long double sum = 0.0L;
  for (long long i = 0; i < n; ++i) {
    const double t = (i + 0.5) * h;
    sum += std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - lnb);
  }
  return static_cast<double>(sum * h);
}

// Independent oracle: erf by its Taylor series (converges fast for |z| < 3).
double erf_series(double z) {
  const double z2 = z * z;
  double term = z, sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= -z2 / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
  }
  return sum * 2.0 / std::sqrt(sf::pi);
}

double normal_cdf_series(double z) { return 0.5 * (1.0 + erf_series(z * sf::inv_sqrt2)); }

// Independent oracle: lower incomplete gamma by its power series,
// P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a (a+1) ... (a+n)).
double gamma_p_series_oracle(double a, double x) {
  double denom = a, term = 1.0 / a, sum = term;
  for (int n = 1; n < 500; ++n) {
    denom += 1.0;
    term *= x / denom;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
}

double bisect(double lo, double hi, double target, const auto& f) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("log_gamma anchors") {
  CHECK(sf::log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sf::log_gamma(0.5) == doctest::Approx(0.5 * std::log(sf::pi)).epsilon(1e-12));
  CHECK(sf::log_gamma(10.0) == doctest::Approx(std::log(362880.0)).epsilon(1e-12));
  CHECK_THROWS_AS(sf::log_gamma(0.0), bad_domain);
  CHECK_THROWS_AS(sf::log_gamma(-2.0), bad_domain);
}

TEST_CASE("log_gamma relative error over the contract range") {
  // recurrence consistency: ln G(x+1) = ln G(x) + ln x, plus std::lgamma spot checks
  for (double x : {1e-3, 1e-2, 0.3, 1.5, 7.0, 123.0, 4567.0, 1e6}) {
    CHECK(sf::log_gamma(x + 1.0) - sf::log_gamma(x) == doctest::Approx(std::log(x)).epsilon(1e-11));
    const double ref = std::lgamma(x);
    if (std::fabs(ref) > 1e-8) CHECK(sf::log_gamma(x) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("reg_inc_beta boundaries and uniform case") {
  CHECK(sf::reg_inc_beta(2.5, 3.5, 0.0) == 0.0);
  CHECK(sf::reg_inc_beta(2.5, 3.5, 1.0) == 1.0);
  CHECK(sf::reg_inc_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(sf::reg_inc_beta(-1.0, 1.0, 0.5), bad_domain);
  CHECK_THROWS_AS(sf::reg_inc_beta(1.0, 1.0, 1.5), bad_domain);
}

TEST_CASE("reg_inc_beta against quadrature oracle") {
  CHECK(sf::reg_inc_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-9));
  const double oracle = beta_cdf_by_quadrature(2.0, 3.0, 0.4);
  CHECK(oracle == doctest::Approx(0.5248).epsilon(1e-7));
  CHECK(sf::reg_inc_beta(2.0, 3.0, 0.4) == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("inv_reg_inc_beta anchors and round trip") {
  CHECK(sf::inv_reg_inc_beta(3.0, 3.0, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(sf::inv_reg_inc_beta(1.0, 1.0, 0.25) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(sf::inv_reg_inc_beta(2.0, 3.0, 0.5248) == doctest::Approx(0.4).epsilon(1e-8));

  splitmix64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const double a = 0.2 + 6.0 * rng.uniform01();
    const double b = 0.2 + 6.0 * rng.uniform01();
    const double p = rng.uniform01();
    const double x = sf::inv_reg_inc_beta(a, b, p);
    CHECK(std::fabs(sf::reg_inc_beta(a, b, x) - p) <= 1e-9);
  }
}

TEST_CASE("inv_reg_inc_beta monotone in p") {
  splitmix64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const double a = 0.3 + 5.0 * rng.uniform01();
    const double b = 0.3 + 5.0 * rng.uniform01();
    double prev = 0.0;
    for (double p = 0.02; p < 1.0; p += 0.02) {
      const double x = sf::inv_reg_inc_beta(a, b, p);
      CHECK(x >= prev - 1e-12);
      prev = x;
    }
  }
}

TEST_CASE("normal cdf/quantile") {
  CHECK(sf::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sf::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(sf::normal_quantile(0.0), bad_domain);
  CHECK_THROWS_AS(sf::normal_quantile(1.0), bad_domain);

  // derived anchor: bisection on an independently implemented erf series
  const double oracle =
      bisect(0.0, 3.0, 0.9, [](double z) { return normal_cdf_series(z); });
  CHECK(oracle == doctest::Approx(1.2815515655).epsilon(1e-9));
  CHECK(sf::normal_quantile(0.9) == doctest::Approx(1.2815515655).epsilon(1e-9));
  CHECK(sf::normal_quantile(0.9) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("normal round-trip and symmetry properties") {
  splitmix64 rng(41);
  for (int i = 0; i < 500; ++i) {
    const double p = rng.uniform01();
    if (p <= 0.0 || p >= 1.0) continue;
    CHECK(std::fabs(sf::normal_cdf(sf::normal_quantile(p)) - p) <= 1e-10);
  }
  for (int i = 0; i < 500; ++i) {
    const double z = 16.0 * rng.symmetric();
    CHECK(sf::normal_cdf(z) + sf::normal_cdf(-z) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("f_quantile anchors") {
  for (int k : {1, 2, 4, 7, 20}) {
    CHECK(sf::f_quantile(0.5, k, k) == doctest::Approx(1.0).epsilon(1e-8));
  }
  // closed form for d1 = 2: CDF = 1 - (1 + 2f/d2)^(-d2/2)
  const double expected = 10.0 * (std::pow(2.0, 0.1) - 1.0);
  CHECK(sf::f_quantile(0.5, 2, 20) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(expected == doctest::Approx(0.71773).epsilon(1e-4));
  CHECK_THROWS_AS(sf::f_quantile(0.5, 0, 4), bad_domain);
}

TEST_CASE("F reciprocity and round trip") {
  splitmix64 rng(53);
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 30);
    const double p = 0.01 + 0.98 * rng.uniform01();
    const double f1 = sf::f_quantile(p, d, d);
    const double f2 = sf::f_quantile(1.0 - p, d, d);
    CHECK(f1 * f2 == doctest::Approx(1.0).epsilon(1e-8));
  }
  for (int i = 0; i < 100; ++i) {
    const int d1 = 1 + static_cast<int>(rng.uniform01() * 20);
    const int d2 = 1 + static_cast<int>(rng.uniform01() * 40);
    const double p = 0.01 + 0.98 * rng.uniform01();
    const double f = sf::f_quantile(p, d1, d2);
    CHECK(sf::f_cdf(f, d1, d2) == doctest::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("chi2_quantile anchors") {
  // chi-square with 2 dof is exponential: closed forms
  CHECK(sf::chi2_quantile(0.5, 2) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(sf::chi2_quantile(0.95, 2) == doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-10));

  // derived anchor: bisection on an independently coded gamma-CDF series
  const double oracle = bisect(0.0, 10.0, 0.90,
                               [](double x) { return gamma_p_series_oracle(0.5, 0.5 * x); });
  CHECK(oracle == doctest::Approx(2.7055435).epsilon(1e-7));
  CHECK(sf::chi2_quantile(0.90, 1) == doctest::Approx(2.7055435).epsilon(1e-7));
  CHECK(sf::chi2_quantile(0.90, 1) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("chi2 round trip over randomized grid") {
  splitmix64 rng(67);
  for (int i = 0; i < 200; ++i) {
    const int k = 1 + static_cast<int>(rng.uniform01() * 30);
    const double p = 0.005 + 0.99 * rng.uniform01();
    const double x = sf::chi2_quantile(p, k);
    CHECK(sf::chi2_cdf(x, k) == doctest::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("cdfs are nondecreasing and bounded") {
  splitmix64 rng(79);
  for (int i = 0; i < 200; ++i) {
    const double a = 0.3 + 4.0 * rng.uniform01();
    const double b = 0.3 + 4.0 * rng.uniform01();
    double prev = 0.0;
    for (double x = 0.0; x <= 1.0; x += 0.05) {
      const double v = sf::reg_inc_beta(a, b, std::min(x, 1.0));
      CHECK(v >= prev - 1e-13);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}
