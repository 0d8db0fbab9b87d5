#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bsip/config.hpp"
#include "bsip/error.hpp"
#include "bsip/numeric.hpp"

using namespace bsip;

TEST_CASE("l2 norm") {
  std::vector<double> v{3.0, 4.0};
  CHECK(l2_norm(v) == doctest::Approx(5.0));
  CHECK(l2_norm(std::vector<double>{}) == 0.0);
}

TEST_CASE("cumulative trapezoid integrates polynomials") {
  const double dt = 0.001;
  std::vector<double> f(1001);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2.0 * i * dt;  // 2t
  auto F = cumulative_trapezoid(f, dt);
  CHECK(F.front() == 0.0);
  CHECK(F.back() == doctest::Approx(1.0).epsilon(1e-12));

  // double integral of a constant is exact for the trapezoid rule
  std::vector<double> one(501, 1.0);
  auto FF = double_cumulative_trapezoid(one, dt);
  for (std::size_t i = 0; i < one.size(); i += 50) {
    double t = i * dt;
    CHECK(FF[i] == doctest::Approx(0.5 * t * t).epsilon(1e-12));
  }
}

TEST_CASE("statistics") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(mean(v) == doctest::Approx(2.5));
  CHECK(stddev(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(median(v) == doctest::Approx(2.5));
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  // type 7: h = (n-1) p
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(stddev(std::vector<double>{1.0}) == 0.0);
}

TEST_CASE("golden section") {
  auto f = [](double x) { return (x - 0.3) * (x - 0.3) + 1.0; };
  CHECK(golden_section_minimize(f, 0.0, 1.0, 1e-8) == doctest::Approx(0.3).epsilon(1e-6));
  auto g = [](double x) { return std::abs(x + 2.0); };
  CHECK(golden_section_minimize(g, -5.0, 5.0, 1e-9) == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("angle wrap and unwrap") {
  const double pi = std::numbers::pi;
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3.0 * pi / 2.0) == doctest::Approx(-pi / 2.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    double w = wrap_angle(u(rng));
    CHECK(w > -pi);
    CHECK(w <= pi);
  }

  std::vector<double> truth, wrapped;
  for (int i = 0; i < 400; ++i) {
    truth.push_back(0.05 * i);
    wrapped.push_back(wrap_angle(truth.back()));
  }
  auto un = unwrap(wrapped);
  for (std::size_t i = 0; i < un.size(); ++i) CHECK(un[i] == doctest::Approx(truth[i]));
}

TEST_CASE("key value config") {
  auto cfg = KeyValueConfig::parse("# comment\nmass = 70\nname = a b\nlist = 1, 2,3\n", "t");
  CHECK(cfg.number("mass") == 70.0);
  CHECK(cfg.string("name") == "a b");
  CHECK(cfg.numbers("list", 3) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(cfg.number_or("missing", 2.5) == 2.5);
  CHECK_THROWS_AS(cfg.numbers("list", 2), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n", "t"), Error);
  CHECK_THROWS_AS(parse_double("1.5x"), InputError);
  CHECK_THROWS_AS(parse_double("nan"), InputError);
}
