#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace bsip {

// Planar chain: landmark A1 (5th metatarsophalangeal) up to A5 (acromion),
// segments foot, shank, thigh and head-arms-trunk (HAT).
inline constexpr std::size_t kLandmarks = 5;
inline constexpr std::size_t kSegments = 4;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

using Landmarks = std::array<Vec2, kLandmarks>;
using SegmentValues = std::array<double, kSegments>;

struct SegmentParams {
  double com_ratio = 0.5;       // alpha_j = A_j G_j / A_j A_{j+1}
  double mass_fraction = 0.25;  // m_j / m
  double gyration_ratio = 0.3;  // r_j / l_j
};

// Per-segment anthropometric coefficients. Mass fractions are stored verbatim
// (published tables do not sum exactly to one); masses() renormalizes.
struct AnthropometricTable {
  std::string name = "custom";
  std::array<SegmentParams, kSegments> segments{};

  // Winter coefficients for foot, shank, thigh and HAT.
  static AnthropometricTable winter();

  // Throws RangeError when a ratio is outside [0,1] or the fractions do not
  // sum to 1 within [0.99, 1.01].
  void validate() const;

  SegmentValues com_ratios() const;
  SegmentValues gyration_ratios() const;
  // Mass fractions rescaled to sum exactly to one.
  SegmentValues normalized_fractions() const;
  SegmentValues masses(double total_mass) const;

  AnthropometricTable with_trunk_com_ratio(double alpha4) const;
};

// Key-value config: one line per segment, `foot = alpha, mass_fraction, gyration_ratio`
// (keys foot, shank, thigh, hat), optional `name = ...`, `#` comments.
AnthropometricTable parse_anthropometric_table(const std::string& text,
                                               const std::string& origin = "<string>");
AnthropometricTable load_anthropometric_table(const std::string& path);
std::string format_anthropometric_table(const AnthropometricTable& table);

// theta_1 is the angle from the horizontal unit vector to A1A2, theta_j (j >= 2)
// the angle from A_{j-1}A_j to A_jA_{j+1}; all in (-pi, pi].
// Throws DegenerateError when two consecutive landmarks coincide.
SegmentValues joint_angles(const Landmarks& a);

// Absolute segment orientations phi_j = theta_1 + ... + theta_j, unwrapped over
// the frame sequence so that no channel jumps by more than pi.
std::vector<SegmentValues> segment_angles(std::span<const SegmentValues> joint_angle_frames);

struct SegmentLengths {
  SegmentValues length{};              // per-frame median, m
  SegmentValues max_relative_deviation{};
  std::vector<std::string> warnings;   // deviation above 10 %
};

SegmentLengths segment_lengths(std::span<const Landmarks> frames);

std::array<Vec2, kSegments> segment_coms(const Landmarks& a, const SegmentValues& com_ratios);

// Body center of mass as the normalized-mass-fraction weighted mean of segment COMs.
Vec2 body_com(const Landmarks& a, const AnthropometricTable& table);

// Weights w_k such that G = sum_k w_k A_k. They sum to one.
std::array<double, kLandmarks> landmark_com_weights(const AnthropometricTable& table);

struct ChainState {
  Landmarks landmarks{};
  SegmentValues joint_angles{};
  SegmentValues segment_angles{};  // single frame, wrapped cumulative sum
  SegmentValues lengths{};
  std::array<Vec2, kSegments> segment_coms{};
  Vec2 body_com{};
};

ChainState chain_state(const Landmarks& a, const AnthropometricTable& table);

// I = m (r~ l)^2. Throws RangeError unless m > 0, l > 0 and r~ in (0, 1].
double inertia_from_gyration(double mass, double length, double gyration_ratio);

// Signed inverse map: sign(I) sqrt(|I| / m) / l, so that negative inertias
// map to non-positive ratios and get rejected by the gyration filter.
double gyration_from_inertia(double inertia, double mass, double length);

}  // namespace bsip
