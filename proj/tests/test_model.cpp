#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bsip/error.hpp"
#include "bsip/model.hpp"
#include "bsip/numeric.hpp"
#include "bsip/synth.hpp"

using namespace bsip;

namespace {

const double pi = std::numbers::pi;

Landmarks chain(std::initializer_list<Vec2> pts) {
  Landmarks a{};
  std::size_t k = 0;
  for (Vec2 p : pts) a[k++] = p;
  for (; k < kLandmarks; ++k) a[k] = {a[k - 1].x, a[k - 1].y + 1.0};
  return a;
}

Landmarks random_chain(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Landmarks a{};
  for (auto& p : a) p = {u(rng), u(rng)};
  return a;
}

}  // namespace

TEST_CASE("joint angles") {
  CHECK(joint_angles(chain({{0, 0}, {0, 1}}))[0] == doctest::Approx(pi / 2));
  CHECK(joint_angles(chain({{0, 0}, {1, 0}, {2, 0}}))[1] == doctest::Approx(0.0));
  CHECK(joint_angles(chain({{0, 0}, {1, 0}, {1, -1}}))[1] == doctest::Approx(-pi / 2));
  CHECK_THROWS_AS(joint_angles(chain({{0, 0}, {0, 0}})), DegenerateError);
  try {
    joint_angles(chain({{0, 0}, {1, 0}, {1, 0}}));
  } catch (const DegenerateError& e) {
    CHECK(std::string(e.what()).find("shank") != std::string::npos);
  }

  std::mt19937_64 rng(11);
  for (int k = 0; k < 500; ++k) {
    for (double th : joint_angles(random_chain(rng))) {
      CHECK(th > -pi);
      CHECK(th <= pi);
    }
  }
}

TEST_CASE("segment angles") {
  std::vector<SegmentValues> th{{pi / 2, 0, 0, 0}};
  auto phi = segment_angles(th);
  for (double p : phi[0]) CHECK(p == doctest::Approx(pi / 2));
  th = {{pi / 2, -pi / 4, 0, 0}};
  CHECK(segment_angles(th)[0][1] == doctest::Approx(pi / 4));

  // trunk rotating through +-pi: compare with cumulative sum then unwrap
  std::vector<SegmentValues> frames;
  std::vector<double> reference;
  for (int i = 0; i < 200; ++i) {
    double t4 = 0.9 + 0.02 * i;
    SegmentValues f{1.2, -0.8, 1.1, t4};
    for (double& v : f) v = wrap_angle(v);
    frames.push_back(f);
    reference.push_back(wrap_angle(f[0] + f[1] + f[2] + f[3]));
  }
  auto un = unwrap(reference);
  auto phis = segment_angles(frames);
  for (std::size_t i = 0; i < phis.size(); ++i) {
    CHECK(phis[i][3] == doctest::Approx(un[i]).epsilon(1e-12));
    if (i > 0) CHECK(phis[i][3] > phis[i - 1][3]);
  }
}

TEST_CASE("segment lengths") {
  std::vector<Landmarks> frames(5, chain({{0, 0}, {0, 0.4}}));
  CHECK(segment_lengths(frames).length[0] == doctest::Approx(0.4));

  std::vector<Landmarks> f100(100, chain({{0, 0}, {0, 0.4}}));
  f100[37][1] = {0, 0.9};
  auto sl = segment_lengths(f100);
  CHECK(sl.length[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(sl.max_relative_deviation[0] == doctest::Approx(1.25));
  CHECK_FALSE(sl.warnings.empty());

  // rigid rotation leaves lengths unchanged
  std::mt19937_64 rng(3);
  std::vector<Landmarks> rnd, rot;
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (int i = 0; i < 20; ++i) {
    Landmarks a = random_chain(rng);
    rnd.push_back(a);
    for (auto& p : a) p = {c * p.x - s * p.y, s * p.x + c * p.y};
    rot.push_back(a);
  }
  auto l0 = segment_lengths(rnd).length, l1 = segment_lengths(rot).length;
  for (std::size_t j = 0; j < kSegments; ++j) CHECK(std::abs(l0[j] - l1[j]) < 1e-12);

  Scenario sc = Scenario::squat_jump();
  sc.sigma_marker = 0.001;
  sc.seed = 5;
  auto trial = generate(sc);
  auto noisy = segment_lengths(trial.markers.frames()).length;
  for (std::size_t j = 0; j < kSegments; ++j)
    CHECK(std::abs(noisy[j] - sc.lengths[j]) / sc.lengths[j] < 0.005);
}

TEST_CASE("body center of mass") {
  AnthropometricTable t;
  for (auto& seg : t.segments) seg = {0.5, 0.25, 0.3};
  Landmarks sym{{{-1, 0}, {-0.5, 1}, {0, 2}, {0.5, 1}, {1, 0}}};
  CHECK(std::abs(body_com(sym, t).x) < 1e-15);

  AnthropometricTable single;
  single.segments = {{{0.5, 0, 0.3}, {0.3, 1.0, 0.3}, {0.5, 0, 0.3}, {0.5, 0, 0.3}}};
  Landmarks a{{{0, 0}, {1, 0}, {1, 2}, {3, 3}, {4, 5}}};
  Vec2 g = body_com(a, single);
  CHECK(g.x == doctest::Approx(1.0));
  CHECK(g.y == doctest::Approx(0.6));

  // brute force on a reference posture
  const auto w = AnthropometricTable::winter();
  Landmarks posture{{{0.12, 0}, {0, 0.05}, {0.15, 0.43}, {-0.2, 0.7}, {0.05, 1.22}}};
  double sum = 0, gx = 0, gy = 0;
  for (std::size_t j = 0; j < kSegments; ++j) sum += w.segments[j].mass_fraction;
  for (std::size_t j = 0; j < kSegments; ++j) {
    double al = w.segments[j].com_ratio, f = w.segments[j].mass_fraction / sum;
    gx += f * (posture[j].x + al * (posture[j + 1].x - posture[j].x));
    gy += f * (posture[j].y + al * (posture[j + 1].y - posture[j].y));
  }
  Vec2 gw = body_com(posture, w);
  CHECK(gw.x == doctest::Approx(gx).epsilon(1e-14));
  CHECK(gw.y == doctest::Approx(gy).epsilon(1e-14));

  // translation
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    Landmarks p = random_chain(rng), q = p;
    Vec2 d{0.37, -1.2};
    for (auto& v : q) v += d;
    Vec2 g0 = body_com(p, w), g1 = body_com(q, w);
    CHECK(std::abs(g1.x - g0.x - d.x) < 1e-14);
    CHECK(std::abs(g1.y - g0.y - d.y) < 1e-14);
  }

  auto weights = landmark_com_weights(w);
  double ws = 0, lx = 0;
  for (std::size_t k = 0; k < kLandmarks; ++k) {
    ws += weights[k];
    lx += weights[k] * posture[k].x;
  }
  CHECK(ws == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lx == doctest::Approx(gx).epsilon(1e-14));
}

TEST_CASE("mass fraction renormalization keeps ratios") {
  auto w = AnthropometricTable::winter();
  auto n = w.normalized_fractions();
  double sum = 0;
  for (double f : n) sum += f;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t i = 0; i < kSegments; ++i)
    for (std::size_t j = 0; j < kSegments; ++j) {
      double r0 = w.segments[i].mass_fraction / w.segments[j].mass_fraction;
      CHECK(std::abs(n[i] / n[j] - r0) <= 1e-12 * r0);
    }
  auto m = w.masses(70.0);
  CHECK(m[0] + m[1] + m[2] + m[3] == doctest::Approx(70.0));
}

TEST_CASE("inertia from gyration ratio") {
  CHECK(inertia_from_gyration(1, 1, 1) == 1.0);

  const double m = 69.1 * 0.6780, r = 0.4960;
  const double l = std::sqrt(4.2067 / m) / r;
  CHECK(inertia_from_gyration(m, l, r) == doctest::Approx(4.2067).epsilon(1e-12));

  for (double rr : {0.1, 0.3, 0.496, 1.0}) {
    double i = inertia_from_gyration(7.3, 0.41, rr);
    CHECK(std::abs(gyration_from_inertia(i, 7.3, 0.41) - rr) < 1e-12);
  }
  CHECK(gyration_from_inertia(-0.5, 2.0, 1.0) < 0.0);
  CHECK_THROWS_AS(inertia_from_gyration(1, 1, 1.2), RangeError);
  CHECK_THROWS_AS(inertia_from_gyration(1, 1, 0.0), RangeError);
  CHECK_THROWS_AS(inertia_from_gyration(0, 1, 0.5), RangeError);
}

TEST_CASE("anthropometric table config") {
  auto w = AnthropometricTable::winter();
  auto back = parse_anthropometric_table(format_anthropometric_table(w));
  for (std::size_t j = 0; j < kSegments; ++j) {
    CHECK(back.segments[j].com_ratio == w.segments[j].com_ratio);
    CHECK(back.segments[j].mass_fraction == w.segments[j].mass_fraction);
    CHECK(back.segments[j].gyration_ratio == w.segments[j].gyration_ratio);
  }
  CHECK_THROWS_AS(parse_anthropometric_table("foot = 0.5, 0.1, 0.4\n"), Error);
  auto bad = w;
  bad.segments[3].mass_fraction = 0.9;
  CHECK_THROWS_AS(bad.validate(), RangeError);
  CHECK(w.with_trunk_com_ratio(0.45).segments[3].com_ratio == 0.45);
}
