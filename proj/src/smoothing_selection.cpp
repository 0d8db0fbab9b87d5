#include <cmath>
#include <limits>
#include <sstream>

#include "bsip/error.hpp"
#include "bsip/numeric.hpp"
#include "bsip/spline.hpp"

namespace bsip {

namespace {

std::vector<double> window_times(const SmoothedKinematics& kin, const ForceRecord& force,
                                 const PushOffWindow& window, long nu) {
  if (window.last >= force.size() || window.first > window.last) {
    throw RangeError("push-off window outside the force record");
  }
  std::vector<double> t;
  t.reserve(window.size());
  for (std::size_t i = window.first; i <= window.last; ++i) {
    const double tm = force.marker_time(i, nu);
    if (!kin.contains(tm)) {
      throw RangeError("lag " + std::to_string(nu) +
                       " maps the push-off window outside the marker record");
    }
    t.push_back(tm);
  }
  return t;
}

// Accelerations of every landmark along the window, [landmark][sample].
using LandmarkAccelerations = std::array<std::vector<Vec2>, kLandmarks>;

std::vector<Vec2> landmark_acceleration(const SmoothedKinematics& kin, std::size_t j,
                                        const std::vector<double>& t) {
  std::vector<Vec2> a(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) a[i] = kin.position(j, t[i], 2);
  return a;
}

double objective_from(const LandmarkAccelerations& acc, const std::array<double, kLandmarks>& w,
                      const ForceRecord& force, const PushOffWindow& window, double mass) {
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    Vec2 g{};
    for (std::size_t j = 0; j < kLandmarks; ++j) g += w[j] * acc[j][i];
    const std::size_t fi = window.first + i;
    const double rx = force.rx[fi] - mass * g.x;
    const double ry = force.ry[fi] - mass * kGravity - mass * g.y;
    sx += rx * rx;
    sy += ry * ry;
  }
  return std::sqrt(sx) + std::sqrt(sy);
}

}  // namespace

ResidualForce residual_force(const SmoothedKinematics& kin, const ForceRecord& force,
                             const PushOffWindow& window, long nu,
                             const AnthropometricTable& table, double mass) {
  const auto t = window_times(kin, force, window, nu);
  const auto w = landmark_com_weights(table);
  ResidualForce out;
  out.time = t;
  for (std::size_t i = 0; i < t.size(); ++i) {
    Vec2 g{};
    for (std::size_t j = 0; j < kLandmarks; ++j) g += w[j] * kin.position(j, t[i], 2);
    const std::size_t fi = window.first + i;
    out.rx_measured.push_back(force.rx[fi]);
    out.ry_measured.push_back(force.ry[fi]);
    out.rx_kinematic.push_back(mass * g.x);
    out.ry_kinematic.push_back(mass * (g.y + kGravity));
    out.rx.push_back(out.rx_measured.back() - out.rx_kinematic.back());
    out.ry.push_back(out.ry_measured.back() - out.ry_kinematic.back());
  }
  return out;
}

double residual_force_objective(const SmoothedKinematics& kin, const ForceRecord& force,
                                const PushOffWindow& window, long nu,
                                const AnthropometricTable& table, double mass) {
  const auto r = residual_force(kin, force, window, nu, table, mass);
  return l2_norm(r.rx) + l2_norm(r.ry);
}

std::vector<double> smoothing_grid(const SmoothingSelectionOptions& options) {
  if (options.grid_points < 2) throw InputError("smoothing grid needs at least two points");
  std::vector<double> grid;
  for (int q = 0; q < options.grid_points; ++q) {
    const double e = options.log10_min +
                     (options.log10_max - options.log10_min) * q / (options.grid_points - 1);
    grid.push_back(1.0 - std::pow(10.0, e));
  }
  return grid;
}

SmoothingSelection select_parameters(const MarkerRecord& markers, const ForceRecord& force,
                                     const PushOffWindow& window, long nu,
                                     const AnthropometricTable& table, double mass,
                                     const SmoothingParameters& initial,
                                     const SmoothingSelectionOptions& options) {
  SmoothingSelection out;
  out.grid = smoothing_grid(options);
  auto kin = SmoothedKinematics::fit(markers, initial);
  const auto t = window_times(kin, force, window, nu);
  const auto w = landmark_com_weights(table);

  LandmarkAccelerations acc;
  for (std::size_t j = 0; j < kLandmarks; ++j) acc[j] = landmark_acceleration(kin, j, t);

  SmoothingParameters current = initial;
  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    for (std::size_t j = 0; j < kLandmarks; ++j) {
      std::vector<double> curve(out.grid.size());
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_q = out.grid.size();
      std::vector<Vec2> best_acc;
      for (std::size_t q = 0; q < out.grid.size(); ++q) {
        const auto trial = kin.with_landmark(markers, j, out.grid[q]);
        auto cand = acc;
        cand[j] = landmark_acceleration(trial, j, t);
        const double f = objective_from(cand, w, force, window, mass);
        curve[q] = f;
        if (std::isfinite(f) && f < best) {
          best = f;
          best_q = q;
          best_acc = std::move(cand[j]);
        }
      }
      if (best_q == out.grid.size()) {
        std::ostringstream msg;
        msg << "smoothing selection failed for landmark " << (j + 1)
            << ": objective non-finite on the whole grid (";
        for (std::size_t q = 0; q < curve.size(); ++q) {
          msg << (q ? ", " : "") << out.grid[q] << ":" << curve[q];
        }
        msg << ")";
        throw Error(msg.str());
      }
      current[j] = out.grid[best_q];
      kin = kin.with_landmark(markers, j, current[j]);
      acc[j] = std::move(best_acc);
      out.objective = best;
      if (sweep + 1 == options.sweeps) out.final_sweep_curves[j] = std::move(curve);
    }
  }
  out.smoothing = current;
  return out;
}

}  // namespace bsip
