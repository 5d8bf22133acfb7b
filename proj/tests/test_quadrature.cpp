#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cellrate/quadrature.hpp"

using namespace cellrate;

TEST_CASE("polynomial integral to tight tolerance") {
  const double v = quadrature([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(v - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("rayleigh density integrates to one over the half line") {
  const double rho = 1e-2;
  auto f = [&](double r) {
    return 2.0 * M_PI * rho * r * std::exp(-M_PI * rho * r * r);
  };
  const double scale = 1.0 / std::sqrt(M_PI * rho);
  const double v = quadrature_to_infinity(f, 0.0, scale, 1e-10);
  CHECK(std::abs(v - 1.0) < 1e-9);
}

TEST_CASE("inverse square-root singularity after the endpoint substitution") {
  // int_0^1 x^(-1/2) dx = 2
  const double v =
      quadrature_power_singularity([](double) { return 1.0; }, 0.5, 1.0, 1e-8);
  CHECK(std::abs(v - 2.0) < 1e-8);
}

TEST_CASE("singular transform handles a nontrivial weight") {
  // int_0^2 x^(-1/3) * exp(-x) dx, checked against a fine reference.
  auto g = [](double x) { return std::exp(-x); };
  const double v = quadrature_power_singularity(g, 1.0 / 3.0, 2.0, 1e-12);
  // reference via midpoint-free split: x^(-1/3)e^{-x} = sum over dense GK on
  // [eps, 2] + analytic head int_0^eps x^(-1/3)(1 - x + ...) dx
  const double eps = 1e-6;
  auto f = [](double x) { return std::pow(x, -1.0 / 3.0) * std::exp(-x); };
  const double tail = quadrature(f, eps, 2.0, 1e-13);
  const double head = 1.5 * std::pow(eps, 2.0 / 3.0) -
                      0.6 * std::pow(eps, 5.0 / 3.0);  // series of the head
  CHECK(v == doctest::Approx(head + tail).epsilon(1e-9));
}

TEST_CASE("non-convergent integrand raises after depth 60") {
  auto step = [](double x) { return x < 0.31830988618367 ? 0.0 : 1.0; };
  CHECK_THROWS_AS(quadrature(step, 0.0, 1.0, 1e-14), NumericError);
}

TEST_CASE("brent finds bracketed roots") {
  auto f = [](double x) { return std::cos(x) - x; };
  const double r = find_root_brent(f, 0.0, 1.0, f(0.0), f(1.0));
  CHECK(std::abs(std::cos(r) - r) < 1e-14);
  CHECK_THROWS_AS(find_root_brent(f, 2.0, 3.0, f(2.0), f(3.0)), NumericError);
}
