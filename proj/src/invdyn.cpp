#include "bsip/invdyn.hpp"

#include <cmath>
#include <string>

#include "bsip/error.hpp"
#include "bsip/numeric.hpp"

namespace bsip {

namespace {

double moment_sum(const SegmentValues& m) { return m[0] + m[1] + m[2] + m[3]; }

}  // namespace

TrialWindow sample_window(const SmoothedKinematics& kin, const ForceRecord& force,
                          const PushOffWindow& window, long nu, const SegmentValues& com_ratios) {
  if (window.first > window.last || window.last >= force.size()) {
    throw RangeError("push-off window outside the force record");
  }
  TrialWindow w;
  w.dt = 1.0 / force.rate;
  const std::size_t n = window.size();
  std::vector<SegmentValues> theta;
  theta.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t fi = window.first + i;
    const double t = force.marker_time(fi, nu);
    if (!kin.contains(t)) {
      throw RangeError("lag " + std::to_string(nu) + " maps the push-off window outside the marker record");
    }
    const Landmarks a = kin.landmarks(t, 0);
    const Landmarks v = kin.landmarks(t, 1);
    const Landmarks acc = kin.landmarks(t, 2);
    w.time.push_back(t);
    w.landmarks.push_back(a);
    theta.push_back(joint_angles(a));

    std::array<Vec2, kSegments> g{};
    SegmentValues rate{}, accel{};
    for (std::size_t j = 0; j < kSegments; ++j) {
      g[j] = (1.0 - com_ratios[j]) * acc[j] + com_ratios[j] * acc[j + 1];
      const Vec2 d = a[j + 1] - a[j];
      const Vec2 dd = v[j + 1] - v[j];
      const Vec2 ddd = acc[j + 1] - acc[j];
      const double q = dot(d, d);
      rate[j] = cross(d, dd) / q;
      accel[j] = cross(d, ddd) / q - 2.0 * cross(d, dd) * dot(d, dd) / (q * q);
    }
    w.com_acceleration.push_back(g);
    w.phi_dot.push_back(rate);
    w.phi_ddot.push_back(accel);
    w.reaction.push_back({force.rx[fi], force.ry[fi]});
    w.torque.push_back(force.torque[fi]);
  }
  w.phi = segment_angles(theta);
  return w;
}

std::vector<JointForces> joint_forces(const TrialWindow& w, const SegmentValues& masses) {
  std::vector<JointForces> out(w.size());
  const Vec2 gravity{0.0, -kGravity};
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i][0] = w.reaction[i];
    for (std::size_t k = 0; k < kSegments; ++k) {
      out[i][k + 1] = out[i][k] - masses[k] * (w.com_acceleration[i][k] - gravity);
    }
  }
  return out;
}

std::vector<SegmentValues> intersegment_moments(const TrialWindow& w,
                                                std::span<const JointForces> forces,
                                                const SegmentValues& com_ratios) {
  std::vector<SegmentValues> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& a = w.landmarks[i];
    const auto& r = forces[i];
    for (std::size_t j = 0; j < kSegments; ++j) {
      const double al = com_ratios[j];
      const Vec2 d = a[j + 1] - a[j];
      out[i][j] = -d.x * (al * r[j].y + (1.0 - al) * r[j + 1].y) +
                  d.y * (al * r[j].x + (1.0 - al) * r[j + 1].x);
    }
  }
  return out;
}

std::vector<JointTorques> joint_torques(const TrialWindow& w,
                                        std::span<const SegmentValues> moments,
                                        const SegmentValues& inertias) {
  std::vector<JointTorques> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i][0] = w.torque[i];
    for (std::size_t k = 0; k < kSegments; ++k) {
      out[i][k + 1] = out[i][k] + moments[i][k] - inertias[k] * w.phi_ddot[i][k];
    }
  }
  return out;
}

ResidualTorque residual_torque(const TrialWindow& w, std::span<const SegmentValues> moments,
                               const SegmentValues& inertias, int degree) {
  if (degree < 0 || degree > 2) {
    throw RangeError("residual torque degree must be 0, 1 or 2, got " + std::to_string(degree));
  }
  const std::size_t n = w.size();
  std::vector<double> c(w.torque.begin(), w.torque.end());
  std::vector<double> msum(n);
  for (std::size_t i = 0; i < n; ++i) msum[i] = moment_sum(moments[i]);

  ResidualTorque out;
  out.degree = degree;
  if (degree == 0) {
    out.experimental = c;
  } else if (degree == 1) {
    out.experimental = cumulative_trapezoid(c, w.dt);
    msum = cumulative_trapezoid(msum, w.dt);
  } else {
    out.experimental = double_cumulative_trapezoid(c, w.dt);
    msum = double_cumulative_trapezoid(msum, w.dt);
  }
  out.angular.resize(n);
  out.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < kSegments; ++j) {
      const double col = degree == 0   ? w.phi_ddot[i][j]
                         : degree == 1 ? w.phi_dot[i][j]
                                       : w.phi[i][j] - w.phi[0][j];
      s += inertias[j] * col;
    }
    out.angular[i] = -msum[i] + s;
    out.residual[i] = out.experimental[i] - out.angular[i];
  }
  return out;
}

double epsilon(std::span<const double> experimental, std::span<const double> angular) {
  if (experimental.size() != angular.size()) throw InputError("epsilon: series lengths differ");
  const double ne = l2_norm(experimental);
  const double na = l2_norm(angular);
  if (ne == 0.0 && na == 0.0) throw DegenerateError("epsilon undefined: both series are zero");
  double ss = 0.0;
  for (std::size_t i = 0; i < experimental.size(); ++i) {
    const double d = experimental[i] - angular[i];
    ss += d * d;
  }
  return std::sqrt(ss) / (ne + na);
}

JointLoads compute_loads(const TrialWindow& w, const AnthropometricTable& table, double mass) {
  JointLoads loads;
  loads.forces = joint_forces(w, table.masses(mass));
  loads.moments = intersegment_moments(w, loads.forces, table.com_ratios());
  return loads;
}

}  // namespace bsip
