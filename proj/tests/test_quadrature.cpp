#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "maldens/error.hpp"
#include "maldens/quadrature.hpp"

using namespace maldens;

TEST_CASE("uniform_grid") {
  auto g = uniform_grid(1.0, 5);
  CHECK(std::vector<double>(g.points().begin(), g.points().end()) ==
        std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
  CHECK(uniform_grid(1.0, 2).size() == 2);
  auto g3 = uniform_grid(2.0, 3);
  CHECK(g3[1] == 1.0);
  CHECK(g3[2] == 2.0);
  CHECK(g3.is_uniform());
  CHECK(g3.spacing() == 1.0);
  CHECK_THROWS_AS(uniform_grid(0.0, 4), InvalidArgument);
  CHECK_THROWS_AS(uniform_grid(-1.0, 4), InvalidArgument);
  CHECK_THROWS_AS(uniform_grid(1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid({0.1, 0.5}), InvalidArgument);
  CHECK_FALSE(TimeGrid({0.0, 0.1, 1.0}).is_uniform());
}

TEST_CASE("trapezoid") {
  auto g = uniform_grid(1.0, 101);
  std::vector<double> one(101, 1.0), x(g.points().begin(), g.points().end()), x2(101);
  for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
  CHECK(trapezoid(one, g) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(trapezoid(x, g) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(trapezoid(x2, g) - 1.0 / 3.0) < 1e-4);
  CHECK_THROWS_AS(trapezoid(std::vector<double>(3, 1.0), g), InvalidArgument);

  // Exact on linear integrands for an irregular grid.
  TimeGrid irr({0.0, 0.013, 0.2, 0.71, 0.9, 1.7});
  std::vector<double> lin(irr.size());
  for (std::size_t i = 0; i < irr.size(); ++i) lin[i] = 3.0 - 2.0 * irr[i];
  CHECK(trapezoid(lin, irr) == doctest::Approx(3.0 * 1.7 - 1.7 * 1.7).epsilon(1e-14));

  auto cum = cumulative_trapezoid(x, g);
  CHECK(cum.front() == 0.0);
  CHECK(cum.back() == doctest::Approx(0.5));
  const auto& w = g.trapezoid_weights();
  CHECK(std::inner_product(w.begin(), w.end(), x2.begin(), 0.0) ==
        doctest::Approx(trapezoid(x2, g)).epsilon(1e-14));
}

TEST_CASE("laguerre_expectation") {
  CHECK(laguerre_expectation([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(laguerre_expectation([](double u) { return u; }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(laguerre_expectation([](double u) { return std::exp(-u); }, 32) - 0.5) < 1e-10);

  // Moments k! up to degree 2n-1.
  const std::size_t n = 8;
  double fact = 1.0;
  for (int k = 0; k <= 15; ++k) {
    if (k > 0) fact *= k;
    const double got = laguerre_expectation([k](double u) { return std::pow(u, k); }, n);
    CAPTURE(k);
    CHECK(got == doctest::Approx(fact).epsilon(1e-11));
  }
  const auto& rule = cached_rule(RuleKind::laguerre, 32);
  for (double w : rule.weights) CHECK(w > 0.0);
  CHECK_THROWS_AS(laguerre_expectation([](double u) { return 1.0 / (u - u); }), NumericalError);
}

TEST_CASE("jacobi_singular_integral") {
  CHECK(jacobi_singular_integral([](double) { return 1.0; }, -0.25) ==
        doctest::Approx(1.0 / 0.75).epsilon(1e-14));
  CHECK(jacobi_singular_integral([](double w) { return w; }, -0.25) ==
        doctest::Approx(1.0 / 1.75).epsilon(1e-14));
  // Reference values from an independent high-precision evaluation
  // (tests/oracles/kernel_oracles.py).
  const double e_ref = 2.9253034918143632035;
  CHECK(std::abs(jacobi_singular_integral([](double w) { return std::exp(w); }, -0.5, 16) - e_ref) <
        1e-8);
  const double c_ref = 0.27466266504011512376;
  auto c3 = [](double w) { return std::cos(3.0 * w); };
  const double e8 = std::abs(jacobi_singular_integral(c3, -0.25, 8) - c_ref);
  const double e32 = std::abs(jacobi_singular_integral(c3, -0.25, 32) - c_ref);
  CHECK(e32 <= e8);
  CHECK(e32 < 1e-13);
  CHECK_THROWS_AS(jacobi_singular_integral(c3, -1.0), InvalidArgument);

  // Beta(0.5, 0.25) through the (1-w)^beta factor of the general rule.
  auto rule = gauss_jacobi(20, -0.5, -0.75);
  CHECK(rule.apply([](double) { return 1.0; }) == doctest::Approx(5.2441151085842396209).epsilon(1e-13));
}

TEST_CASE("graded_integral resolves algebraic end singularities") {
  EndBehavior sing{true, -0.4};
  // integral of x^{-0.4} over [0, 2]
  const double v = graded_integral([](double x) { return std::pow(x, -0.4); }, 0.0, 2.0, sing);
  CHECK(v == doctest::Approx(std::pow(2.0, 0.6) / 0.6).epsilon(1e-12));
  // (2 - x)^{-0.4} toward the right end
  const double r = graded_integral([](double x) { return std::pow(2.0 - x, -0.4); }, 0.0, 2.0, {}, sing);
  CHECK(r == doctest::Approx(std::pow(2.0, 0.6) / 0.6).epsilon(1e-12));
  // Beta(0.6, 0.7) with both ends singular
  const double b = graded_integral([](double x) { return std::pow(x, -0.4) * std::pow(1 - x, -0.3); },
                                   0.0, 1.0, sing, EndBehavior{true, -0.3});
  CHECK(b == doctest::Approx(std::exp(std::lgamma(0.6) + std::lgamma(0.7) - std::lgamma(1.3)))
                 .epsilon(1e-11));
  CHECK(graded_integral([](double x) { return x * x; }, 0.0, 3.0) == doctest::Approx(9.0));
}
