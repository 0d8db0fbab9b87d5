#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "bsip/model.hpp"
#include "bsip/trial.hpp"

namespace bsip {

// Cubic smoothing spline minimizing
//   sp * sum (y_i - F(x_i))^2 + (1 - sp) * integral F''^2
// with natural end conditions. sp = 1 interpolates, sp = 0 gives the
// least-squares line.
class SmoothingSpline {
 public:
  SmoothingSpline() = default;

  // Reinsch construction through the pentadiagonal system
  // (sp R + (1 - sp) Q'Q) c = Q'y. Needs >= 4 strictly increasing abscissae.
  static SmoothingSpline fit(std::span<const double> x, std::span<const double> y, double sp);

  // Value (order 0) or derivative (order 1, 2) of the piecewise cubic.
  // Throws RangeError outside [first knot, last knot] or for other orders.
  double eval(double t, int order = 0) const;

  double smoothing() const { return sp_; }
  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }
  const std::vector<double>& knots() const { return x_; }
  // Fitted values F(x_i) and second derivatives F''(x_i) at the knots.
  const std::vector<double>& values() const { return f_; }
  const std::vector<double>& second_derivatives() const { return m_; }

  // integral of F''^2 over the knot range.
  double roughness() const;

 private:
  std::size_t interval(double t) const;

  std::vector<double> x_;
  std::vector<double> f_;
  std::vector<double> m_;
  double sp_ = 1.0;
};

using SmoothingParameters = std::array<double, kLandmarks>;

// Ten splines (x and y of each landmark) sharing the marker time base.
class SmoothedKinematics {
 public:
  SmoothedKinematics() = default;
  static SmoothedKinematics fit(const MarkerRecord& markers, const SmoothingParameters& sp);

  // Refits only landmark j with a new parameter.
  SmoothedKinematics with_landmark(const MarkerRecord& markers, std::size_t j, double sp) const;

  Vec2 position(std::size_t landmark, double t, int order = 0) const;
  Landmarks landmarks(double t, int order = 0) const;

  double lower() const { return channels_[0].lower(); }
  double upper() const { return channels_[0].upper(); }
  bool contains(double t) const;
  const SmoothingParameters& smoothing() const { return sp_; }

 private:
  std::array<SmoothingSpline, 2 * kLandmarks> channels_;
  SmoothingParameters sp_{};
};

// Nearly interpolating parameter used before the smoothing is selected.
inline constexpr double kProvisionalSmoothing = 1.0 - 1e-6;

// Residual force R~ = R + m g - m G'' on the push-off window (force samples
// first..last mapped to marker time with lag nu).
struct ResidualForce {
  std::vector<double> time;  // marker clock
  std::vector<double> rx_measured, ry_measured;
  std::vector<double> rx_kinematic, ry_kinematic;  // m G''_x, m (G''_y + g)
  std::vector<double> rx, ry;                      // measured minus kinematic
};

ResidualForce residual_force(const SmoothedKinematics& kin, const ForceRecord& force,
                             const PushOffWindow& window, long nu,
                             const AnthropometricTable& table, double mass);

// ||R~_x|| + ||R~_y|| over the window.
double residual_force_objective(const SmoothedKinematics& kin, const ForceRecord& force,
                                const PushOffWindow& window, long nu,
                                const AnthropometricTable& table, double mass);

struct SmoothingSelectionOptions {
  double log10_min = -10.0;  // bounds of 1 - sp
  double log10_max = -1.0;
  int grid_points = 31;
  int sweeps = 2;
};

struct SmoothingSelection {
  SmoothingParameters smoothing{};
  double objective = 0.0;
  std::vector<double> grid;  // candidate sp values
  // Objective along the grid for each landmark during the final sweep.
  std::array<std::vector<double>, kLandmarks> final_sweep_curves;
};

std::vector<double> smoothing_grid(const SmoothingSelectionOptions& options);

// Coordinate descent over landmarks on the log grid of 1 - sp, minimizing the
// residual-force objective. Throws Error if every candidate is non-finite.
SmoothingSelection select_parameters(const MarkerRecord& markers, const ForceRecord& force,
                                     const PushOffWindow& window, long nu,
                                     const AnthropometricTable& table, double mass,
                                     const SmoothingParameters& initial,
                                     const SmoothingSelectionOptions& options = {});

}  // namespace bsip
