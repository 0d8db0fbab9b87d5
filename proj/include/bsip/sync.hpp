#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bsip/model.hpp"
#include "bsip/spline.hpp"
#include "bsip/trial.hpp"

namespace bsip {

struct EventDetectionOptions {
  std::size_t smoothing_half_width = 5;  // centered moving average of R_y, samples
  std::size_t baseline_samples = 100;    // quiet stance used for the derivative RMS
  double threshold_factor = 5.0;
  double sustain_seconds = 0.020;
  double takeoff_force = 5.0;  // N
};

// Onset: first sample where |d(smoothed R_y)/dt| exceeds threshold_factor times
// the baseline derivative RMS for sustain_seconds. Take-off: the push-off ends
// on the last sample before R_y first drops below takeoff_force.
PushOffWindow detect_push_off(const ForceRecord& force, const EventDetectionOptions& options = {});

// R_y(t_i) = double integral of (R_y - m g) from t0 - m y_G(t_i) + m y_G(t0) on
// the window, force shifted by lag nu. com_height maps marker time to y_G and
// throws RangeError outside its domain.
std::vector<double> residual_double_integral(const ForceRecord& force, const PushOffWindow& window,
                                             const std::function<double(double)>& com_height,
                                             double mass, long nu);

struct SyncOptions {
  long nu_min = -500;
  long nu_max = 500;
  int alpha_grid_points = 201;
  double alpha_tolerance = 1e-4;
};

struct EtaValue {
  double eta = 0.0;  // min over nu of ||R_y||, N s^2
  long nu = 0;       // argmin, ties toward smaller |nu|
};

// Precomputed pieces of the synchronization objective. y_G is affine in the
// trunk COM ratio, y_G = Y0 + alpha4 Y1, sampled once over every scanned lag.
class SyncProblem {
 public:
  SyncProblem(const SmoothedKinematics& kin, const ForceRecord& force, PushOffWindow window,
              const AnthropometricTable& table, double mass, const SyncOptions& options = {});

  // R_y series for a given trunk COM ratio and lag.
  std::vector<double> residual(double alpha4, long nu) const;
  EtaValue eta(double alpha4) const;

  // Affine decomposition R_y = A alpha4 + B at lag nu.
  std::pair<std::vector<double>, std::vector<double>> affine_coefficients(long nu) const;

  double mass() const { return mass_; }
  long nu_lo() const { return nu_lo_; }
  long nu_hi() const { return nu_hi_; }
  const PushOffWindow& window() const { return window_; }
  const std::vector<double>& force_double_integral() const { return force_integral_; }

 private:
  std::size_t offset(long nu) const { return static_cast<std::size_t>(nu - nu_lo_); }

  PushOffWindow window_;
  double mass_;
  long nu_lo_ = 0;
  long nu_hi_ = 0;
  std::vector<long> scan_order_;
  std::vector<double> force_integral_;
  std::vector<double> y0_, y1_;  // indexed by window sample + (nu - nu_lo)
};

struct EtaCurvePoint {
  double alpha4;
  double eta;
  long nu;
};

struct SyncResult {
  long nu = 0;
  double alpha4 = 0.0;
  double eta = 0.0;
  std::vector<EtaCurvePoint> curve;  // the uniform alpha4 grid
};

// Grid scan of eta over alpha4 in [0,1], refined by golden section around the
// best grid point. Throws Error when eta is non-finite everywhere.
SyncResult synchronize(const SyncProblem& problem, const SyncOptions& options = {});
SyncResult synchronize(const SmoothedKinematics& kin, const ForceRecord& force,
                       const PushOffWindow& window, const AnthropometricTable& table, double mass,
                       const SyncOptions& options = {});

struct Alpha4Estimate {
  double alpha4 = 0.0;
  double unclamped = 0.0;
  bool clamped = false;
};

// Least-squares alpha4 at a fixed lag: solves A_i alpha4 + B_i = 0.
// Throws DegenerateError when A is zero to within 1e-9 m of y_G motion
// (motionless trunk).
Alpha4Estimate alpha4_least_squares(const SyncProblem& problem, long nu);

struct ComHeightComparison {
  std::vector<double> time;              // synchronized marker time
  std::vector<double> from_force;        // y_G(t0) + double integral of (R_y / m - g)
  std::vector<double> synchronized;      // kinematic y_G at lag nu
  std::vector<double> unsynchronized;    // kinematic y_G at lag 0, NaN outside the record
};

ComHeightComparison ycom_three_ways(const SmoothedKinematics& kin, const ForceRecord& force,
                                    const PushOffWindow& window, const AnthropometricTable& table,
                                    double mass, long nu);

}  // namespace bsip
