#pragma once

#include <array>
#include <span>
#include <vector>

#include "bsip/model.hpp"
#include "bsip/spline.hpp"
#include "bsip/trial.hpp"

namespace bsip {

using JointForces = std::array<Vec2, kLandmarks>;  // R_1 (ground) .. R_5 (residual)
using JointTorques = std::array<double, kLandmarks>;  // C_1 (ground) .. C_5 (residual)

// Everything inverse dynamics needs on the push-off window, one entry per
// force sample. Built from smoothed kinematics or filled directly with exact
// signals.
struct TrialWindow {
  double dt = 1e-3;
  std::vector<double> time;  // marker clock
  std::vector<Landmarks> landmarks;
  std::vector<std::array<Vec2, kSegments>> com_acceleration;  // G''_j
  std::vector<SegmentValues> phi, phi_dot, phi_ddot;
  std::vector<Vec2> reaction;   // R, N
  std::vector<double> torque;   // C about A1, N m

  std::size_t size() const { return time.size(); }
};

// Samples landmarks and their spline derivatives at the synchronized window
// times. Angular rates come from the analytic derivative of the segment
// direction: phi' = (d x d') / |d|^2.
TrialWindow sample_window(const SmoothedKinematics& kin, const ForceRecord& force,
                          const PushOffWindow& window, long nu, const SegmentValues& com_ratios);

// R_1 = R, R_{k+1} = R_k - m_k (G''_k - g).
std::vector<JointForces> joint_forces(const TrialWindow& w, const SegmentValues& masses);

// M_j = -(x_{j+1} - x_j)(a_j R_y,j + (1 - a_j) R_y,j+1)
//       + (y_{j+1} - y_j)(a_j R_x,j + (1 - a_j) R_x,j+1)
std::vector<SegmentValues> intersegment_moments(const TrialWindow& w,
                                                std::span<const JointForces> forces,
                                                const SegmentValues& com_ratios);

// C_1 = C, C_{k+1} = C_k + M_k - I_k phi''_k. C_5 is the residual torque.
std::vector<JointTorques> joint_torques(const TrialWindow& w,
                                        std::span<const SegmentValues> moments,
                                        const SegmentValues& inertias);

struct ResidualTorque {
  int degree = 0;
  std::vector<double> experimental;  // C, its integral or double integral
  std::vector<double> angular;       // -sum M + sum I phi'' (or integrated forms)
  std::vector<double> residual;      // experimental - angular
};

// Degree 0: value. Degree 1: integral of C against -integral(sum M) + sum I phi'(t).
// Degree 2: double integral of C against -double integral(sum M) + sum I (phi(t) - phi(t0)).
// Throws RangeError for other degrees.
ResidualTorque residual_torque(const TrialWindow& w, std::span<const SegmentValues> moments,
                               const SegmentValues& inertias, int degree);

// ||a - b|| / (||a|| + ||b||). Throws DegenerateError if both are zero.
double epsilon(std::span<const double> experimental, std::span<const double> angular);

// Forces and moments together, for a table and a total mass.
struct JointLoads {
  std::vector<JointForces> forces;
  std::vector<SegmentValues> moments;
};

JointLoads compute_loads(const TrialWindow& w, const AnthropometricTable& table, double mass);

}  // namespace bsip
