#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bsip/error.hpp"
#include "bsip/invdyn.hpp"
#include "bsip/numeric.hpp"
#include "bsip/synth.hpp"

using namespace bsip;

namespace {

struct Oracle {
  Scenario scenario;
  SyntheticTrial trial;
  TrialWindow exact;
  SegmentValues masses{};
  SegmentValues inertias{};
};

Oracle oracle(Scenario s = Scenario::squat_jump()) {
  Oracle o{s, generate(s), {}, {}, {}};
  o.exact = exact_window(o.trial.truth);
  o.masses = s.table.masses(s.mass);
  o.inertias = o.trial.truth.inertias;
  return o;
}

TrialWindow smoothed_window(const Oracle& o, double sp) {
  SmoothingParameters p;
  p.fill(sp);
  auto kin = SmoothedKinematics::fit(o.trial.markers, p);
  return sample_window(kin, o.trial.force, o.trial.truth.window, o.trial.truth.lag,
                       o.scenario.table.com_ratios());
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ||R_5|| / ||R_1||
double residual_ratio(const std::vector<JointForces>& f) {
  double r5 = 0, r1 = 0;
  for (const auto& fi : f) {
    r5 += fi[4].x * fi[4].x + fi[4].y * fi[4].y;
    r1 += fi[0].x * fi[0].x + fi[0].y * fi[0].y;
  }
  return std::sqrt(r5 / r1);
}

}  // namespace

TEST_CASE("static posture") {
  Scenario s = Scenario::squat_jump();
  s.theta_end = s.theta_start;
  auto o = oracle(s);
  auto loads = compute_loads(o.exact, s.table, s.mass);
  for (const auto& f : loads.forces) {
    double above = 0;
    for (std::size_t k = kSegments; k-- > 0;) {
      above += o.masses[k];
      CHECK(f[k].y == doctest::Approx(kGravity * above).epsilon(1e-12));
      CHECK(std::abs(f[k].x) < 1e-9);
    }
    CHECK(std::abs(f[4].y) < 1e-9);
  }
  auto c0 = residual_torque(o.exact, loads.moments, o.inertias, 0);
  CHECK(max_abs(c0.residual) < 1e-9);
}

TEST_CASE("joint force recursion") {
  auto o = oracle();
  auto loads = compute_loads(o.exact, o.scenario.table, o.scenario.mass);
  for (std::size_t i = 0; i < o.exact.size(); ++i) {
    CHECK(loads.forces[i][0] == o.exact.reaction[i]);
    CHECK(std::abs(loads.forces[i][4].x) < 1e-9);
    CHECK(std::abs(loads.forces[i][4].y) < 1e-9);
  }

  // all mass on the trunk: the foot, shank and thigh carry R unchanged
  AnthropometricTable trunk = o.scenario.table;
  for (std::size_t j = 0; j < 3; ++j) trunk.segments[j].mass_fraction = 0.0;
  trunk.segments[3].mass_fraction = 1.0;
  auto f = joint_forces(o.exact, trunk.masses(70.0));
  for (const auto& fi : f) {
    CHECK(fi[1] == fi[0]);
    CHECK(fi[3] == fi[0]);
  }

  // smoothed noiseless data: residual force small against the reaction
  auto w = smoothed_window(o, 1.0);
  auto sf = joint_forces(w, o.masses);
  CHECK(residual_ratio(sf) < 1e-2);
  Scenario slow = Scenario::squat_jump();
  slow.push_off = 1.0;
  auto os = oracle(slow);
  CHECK(residual_ratio(joint_forces(smoothed_window(os, 1.0), os.masses)) < 1e-3);

  // the same residual through the force-balance path
  SmoothingParameters p;
  p.fill(1.0);
  auto kin = SmoothedKinematics::fit(o.trial.markers, p);
  auto rf = residual_force(kin, o.trial.force, o.trial.truth.window, o.trial.truth.lag,
                           o.scenario.table, o.scenario.mass);
  for (std::size_t i = 0; i < sf.size(); ++i) {
    CHECK(sf[i][4].x == doctest::Approx(rf.rx[i]).epsilon(1e-9).scale(1.0));
    CHECK(sf[i][4].y == doctest::Approx(rf.ry[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("intersegment moments") {
  TrialWindow w;
  w.time = {0.0};
  w.landmarks = {Landmarks{{{0, 0}, {0.3, 0}, {0.3, 0.4}, {0.1, 0.8}, {0.2, 1.3}}}};
  std::vector<JointForces> zero(1);
  SegmentValues ratios{0.5, 0.4, 0.45, 0.6};
  auto m0 = intersegment_moments(w, zero, ratios);
  for (double m : m0[0]) CHECK(m == 0.0);

  std::vector<JointForces> vert(1);
  for (std::size_t k = 0; k < kLandmarks; ++k) vert[0][k] = {0.0, 100.0 - 10.0 * k};
  auto m = intersegment_moments(w, vert, ratios)[0];
  CHECK(m[0] == doctest::Approx(-0.3 * (0.5 * 100.0 + 0.5 * 90.0)));

  // net moment of the end forces about the segment COM
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 200.0);
  std::vector<JointForces> f(1);
  for (auto& v : f[0]) v = {n(rng), n(rng)};
  auto mm = intersegment_moments(w, f, ratios)[0];
  const auto& a = w.landmarks[0];
  for (std::size_t j = 0; j < kSegments; ++j) {
    Vec2 g = a[j] + ratios[j] * (a[j + 1] - a[j]);
    // R_j acts on segment j at A_j, -R_{j+1} at A_{j+1}
    double about_g = cross(a[j] - g, f[0][j]) + cross(a[j + 1] - g, -1.0 * f[0][j + 1]);
    CHECK(mm[j] == doctest::Approx(about_g).epsilon(1e-12));
  }
}

TEST_CASE("joint torques against a top-down oracle") {
  auto o = oracle();
  const auto& w = o.exact;
  auto loads = compute_loads(w, o.scenario.table, o.scenario.mass);
  auto torques = joint_torques(w, loads.moments, o.inertias);
  double cmax = max_abs(w.torque);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(torques[i][0] == w.torque[i]);
    const auto& a = w.landmarks[i];
    auto g = segment_coms(a, o.scenario.table.com_ratios());
    for (std::size_t k = 0; k < kLandmarks; ++k) {
      double expected = 0;
      for (std::size_t j = k; j < kSegments; ++j) {
        Vec2 load = o.masses[j] * (w.com_acceleration[i][j] + Vec2{0.0, kGravity});
        expected += cross(g[j] - a[k], load) + o.inertias[j] * w.phi_ddot[i][j];
      }
      CHECK(std::abs(torques[i][k] - expected) < 1e-9 * std::max(cmax, 1.0));
    }
    // telescope
    double direct = w.torque[i];
    for (std::size_t j = 0; j < kSegments; ++j)
      direct += loads.moments[i][j] - o.inertias[j] * w.phi_ddot[i][j];
    CHECK(std::abs(torques[i][4] - direct) < 1e-9 * std::max(cmax, 1.0));
  }

  // a wrong trunk inertia leaves a residual
  auto wrong = o.inertias;
  wrong[3] *= 1.1;
  auto c = residual_torque(w, loads.moments, wrong, 0);
  CHECK(max_abs(c.residual) > 1e-3 * cmax);
}

TEST_CASE("residual torque degrees") {
  auto o = oracle();
  const auto& w = o.exact;
  auto loads = compute_loads(w, o.scenario.table, o.scenario.mass);
  const double cmax = max_abs(w.torque);
  const double tw = w.size() * w.dt;

  for (int d = 0; d <= 2; ++d) {
    auto c = residual_torque(w, loads.moments, o.inertias, d);
    CHECK(c.degree == d);
    CHECK(c.residual.size() == w.size());
    const double scale = cmax * std::pow(tw, d);
    CHECK(max_abs(c.residual) < 1e-5 * scale);
    if (d > 0) {
      CHECK(c.residual.front() == 0.0);
      CHECK(c.experimental.front() == 0.0);
    }
  }
  CHECK_THROWS_AS(residual_torque(w, loads.moments, o.inertias, 3), RangeError);
  CHECK_THROWS_AS(residual_torque(w, loads.moments, o.inertias, -1), RangeError);

  // d/dt of degree 2 against degree 1 on smoothed data with a wrong trunk inertia
  auto sw = smoothed_window(o, 1.0);
  auto sl = compute_loads(sw, o.scenario.table, o.scenario.mass);
  auto wrong = o.inertias;
  wrong[3] *= 1.3;
  auto c1 = residual_torque(sw, sl.moments, wrong, 1);
  auto c2 = residual_torque(sw, sl.moments, wrong, 2);
  const double s1 = max_abs(c1.residual);
  std::vector<double> fd, inner;
  for (std::size_t i = 1; i + 1 < sw.size(); ++i) {
    fd.push_back((c2.residual[i + 1] - c2.residual[i - 1]) / (2 * sw.dt));
    inner.push_back(c1.residual[i]);
  }
  std::vector<double> diff(fd.size());
  for (std::size_t i = 0; i < fd.size(); ++i) diff[i] = fd[i] - inner[i];
  CHECK(l2_norm(diff) < 1e-3 * l2_norm(inner));
  // zero slope of degree 2 at the onset
  CHECK(std::abs(c2.residual[1] - c2.residual[0]) / sw.dt < 1e-3 * s1);
}

TEST_CASE("error metric") {
  std::vector<double> a{1, 2, 3}, b{1, 2, 3}, neg{-1, -2, -3}, zero{0, 0, 0};
  CHECK(epsilon(a, b) == 0.0);
  CHECK(epsilon(a, neg) == doctest::Approx(1.0));
  CHECK(epsilon(a, zero) == doctest::Approx(1.0));
  CHECK_THROWS_AS(epsilon(zero, zero), DegenerateError);

  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> lam(1e-3, 1e3);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> x(50), y(50);
    for (auto& v : x) v = n(rng);
    for (auto& v : y) v = n(rng) * (k % 3);
    double e = epsilon(x, y);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    double l = lam(rng);
    for (auto& v : x) v *= l;
    for (auto& v : y) v *= l;
    CHECK(std::abs(epsilon(x, y) - e) < 1e-12);
  }
}
