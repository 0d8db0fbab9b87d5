#pragma once

#include <array>
#include <vector>

#include "bsip/model.hpp"

namespace bsip {

// One landmark sampled on the marker clock.
struct LandmarkTrajectory {
  std::vector<double> x;  // m
  std::vector<double> y;  // m
};

// Marker capture (nominally 100 Hz). time[i] is the marker clock.
struct MarkerRecord {
  double rate = 100.0;
  std::vector<double> time;
  std::array<LandmarkTrajectory, kLandmarks> landmarks;

  std::size_t size() const { return time.size(); }
  Landmarks frame(std::size_t i) const;
  std::vector<Landmarks> frames() const;
  // Uniform sampling within tol seconds, at least two samples, finite coordinates.
  void validate(double tol = 1e-6) const;
};

// Force-plate record (nominally 1000 Hz) on its own clock. With lag nu (in
// samples), sample i corresponds to marker time time[0] + (i + nu) / rate.
struct ForceRecord {
  double rate = 1000.0;
  std::vector<double> time;
  std::vector<double> rx;      // N
  std::vector<double> ry;      // N
  std::vector<double> torque;  // N m about A1

  std::size_t size() const { return time.size(); }
  double marker_time(std::size_t i, long nu) const {
    return time.front() + (static_cast<double>(i) + static_cast<double>(nu)) / rate;
  }
  void validate(double tol = 1e-6) const;
};

// Push-off [t0, tf] as inclusive force-sample indices.
struct PushOffWindow {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first + 1; }
};

}  // namespace bsip
