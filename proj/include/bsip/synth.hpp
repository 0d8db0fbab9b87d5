#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "bsip/invdyn.hpp"
#include "bsip/model.hpp"
#include "bsip/trial.hpp"

namespace bsip {

// Squat-jump scenario: each joint angle follows a minimum-jerk quintic
// 10 s^3 - 15 s^4 + 6 s^5 between two static postures over its own phase of
// the push-off, toe A1 fixed.
struct Scenario {
  std::string name = "squat_jump";
  AnthropometricTable table = AnthropometricTable::winter().with_trunk_com_ratio(0.45);
  double mass = 70.0;
  SegmentValues lengths{0.15, 0.43, 0.44, 0.55};
  SegmentValues theta_start{};  // rad
  SegmentValues theta_end{};    // rad
  // Start and end of each joint's motion as fractions of the push-off. The
  // earliest start must be 0 and the latest end 1.
  SegmentValues phase_start{0.1, 0.05, 0.0, 0.0};
  SegmentValues phase_end{1.0, 1.0, 1.0, 0.95};
  Vec2 toe{0.0, 0.0};
  double onset = 0.9;       // t0, s
  double push_off = 0.35;   // t_f - t0, s
  double duration = 2.2;    // marker record length, s
  double marker_rate = 100.0;
  double force_rate = 1000.0;
  long lag = 0;             // force sample i is at physical time (i + lag) / force_rate
  double sigma_marker = 0.0;  // m
  double sigma_force = 0.0;   // N; the torque channel gets 0.1 m times this
  std::uint64_t seed = 1;

  static Scenario squat_jump();
  SegmentValues true_inertias() const;
  // Throws ScenarioError on invalid parameters or a push-off with R_y <= 5 N.
  void validate() const;
};

// Keys: name, mass, lengths, theta_start_deg, theta_end_deg, onset, push_off,
// duration, phase_start, phase_end, lag, sigma_marker, sigma_force, seed,
// alpha4, and optionally the
// four table rows foot/shank/thigh/hat (Winter otherwise).
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& s);

// Exact chain state at physical time t.
struct ExactState {
  Landmarks position{}, velocity{}, acceleration{};
  SegmentValues phi{}, phi_dot{}, phi_ddot{};
  Vec2 reaction{};  // R
  double torque = 0.0;  // C about A1
};

ExactState exact_state(const Scenario& s, double t);

struct SyntheticTruth {
  Scenario scenario;
  SegmentValues inertias{};
  double alpha4 = 0.0;
  long lag = 0;
  PushOffWindow window;  // force samples of [t0, t_f]
  MarkerRecord markers;  // noiseless
  ForceRecord force;     // noiseless
  std::vector<double> com_height;  // y_G at the marker samples
};

struct SyntheticTrial {
  MarkerRecord markers;
  ForceRecord force;
  SyntheticTruth truth;
};

SyntheticTrial generate(const Scenario& s);

// Inverse dynamics on the exact window signals. Returns the largest |R_5|
// component and |C_5| over the push-off.
struct ClosureResiduals {
  double force = 0.0;   // N
  double torque = 0.0;  // N m
};

TrialWindow exact_window(const SyntheticTruth& truth);
ClosureResiduals closure_check(const SyntheticTruth& truth,
                               std::optional<SegmentValues> inertias = std::nullopt);

// Standard normal draws from mt19937_64 by Box-Muller, using the top 53 bits
// of each engine output. Stable across platforms.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bsip
