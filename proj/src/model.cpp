#include "bsip/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "bsip/config.hpp"
#include "bsip/error.hpp"
#include "bsip/numeric.hpp"

namespace bsip {

namespace {

constexpr std::array<const char*, kSegments> kSegmentKeys = {"foot", "shank", "thigh", "hat"};
constexpr double kMinSegmentLength = 1e-6;

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

AnthropometricTable AnthropometricTable::winter() {
  AnthropometricTable t;
  t.name = "winter";
  t.segments = {{
      {0.5000, 0.0290, 0.4750},
      {0.5670, 0.0930, 0.3020},
      {0.5670, 0.2000, 0.3230},
      {0.6260, 0.6780, 0.4960},
  }};
  return t;
}

void AnthropometricTable::validate() const {
  double sum = 0.0;
  for (std::size_t j = 0; j < kSegments; ++j) {
    const auto& s = segments[j];
    const std::string seg = kSegmentKeys[j];
    if (!in_unit_interval(s.com_ratio)) throw RangeError(seg + ": com ratio outside [0,1]");
    if (!in_unit_interval(s.mass_fraction)) throw RangeError(seg + ": mass fraction outside [0,1]");
    if (!in_unit_interval(s.gyration_ratio)) throw RangeError(seg + ": gyration ratio outside [0,1]");
    sum += s.mass_fraction;
  }
  if (sum < 0.99 || sum > 1.01) {
    std::ostringstream msg;
    msg << "mass fractions sum to " << sum << ", expected a value in [0.99, 1.01]";
    throw RangeError(msg.str());
  }
}

SegmentValues AnthropometricTable::com_ratios() const {
  SegmentValues v{};
  for (std::size_t j = 0; j < kSegments; ++j) v[j] = segments[j].com_ratio;
  return v;
}

SegmentValues AnthropometricTable::gyration_ratios() const {
  SegmentValues v{};
  for (std::size_t j = 0; j < kSegments; ++j) v[j] = segments[j].gyration_ratio;
  return v;
}

SegmentValues AnthropometricTable::normalized_fractions() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.mass_fraction;
  if (!(sum > 0.0)) throw RangeError("mass fractions sum to zero");
  SegmentValues v{};
  for (std::size_t j = 0; j < kSegments; ++j) v[j] = segments[j].mass_fraction / sum;
  return v;
}

SegmentValues AnthropometricTable::masses(double total_mass) const {
  if (!(total_mass > 0.0)) throw RangeError("total mass must be positive");
  auto v = normalized_fractions();
  for (double& m : v) m *= total_mass;
  return v;
}

AnthropometricTable AnthropometricTable::with_trunk_com_ratio(double alpha4) const {
  AnthropometricTable t = *this;
  t.segments[3].com_ratio = alpha4;
  return t;
}

AnthropometricTable parse_anthropometric_table(const std::string& text, const std::string& origin) {
  const auto cfg = KeyValueConfig::parse(text, origin);
  AnthropometricTable table;
  table.name = cfg.string_or("name", "custom");
  for (const auto& key : cfg.keys()) {
    const bool known = key == "name" ||
                       std::find_if(kSegmentKeys.begin(), kSegmentKeys.end(),
                                    [&](const char* k) { return key == k; }) != kSegmentKeys.end();
    if (!known) throw ParseError(origin, 0, "unknown key '" + key + "'");
  }
  for (std::size_t j = 0; j < kSegments; ++j) {
    const auto v = cfg.numbers(kSegmentKeys[j], 3);
    table.segments[j] = {v[0], v[1], v[2]};
  }
  table.validate();
  return table;
}

AnthropometricTable load_anthropometric_table(const std::string& path) {
  return parse_anthropometric_table(read_text_file(path), path);
}

std::string format_anthropometric_table(const AnthropometricTable& table) {
  std::ostringstream out;
  out << "# segment = com_ratio, mass_fraction, gyration_ratio\n";
  out << "name = " << table.name << "\n";
  out << std::setprecision(17);
  for (std::size_t j = 0; j < kSegments; ++j) {
    const auto& s = table.segments[j];
    out << kSegmentKeys[j] << " = " << s.com_ratio << ", " << s.mass_fraction << ", "
        << s.gyration_ratio << "\n";
  }
  return out.str();
}

SegmentValues joint_angles(const Landmarks& a) {
  std::array<Vec2, kSegments> seg{};
  for (std::size_t j = 0; j < kSegments; ++j) {
    seg[j] = a[j + 1] - a[j];
    if (norm(seg[j]) <= kMinSegmentLength) {
      throw DegenerateError("segment " + std::to_string(j + 1) + " (" + kSegmentKeys[j] +
                            ") has coincident landmarks");
    }
  }
  SegmentValues theta{};
  theta[0] = wrap_angle(std::atan2(seg[0].y, seg[0].x));
  for (std::size_t j = 1; j < kSegments; ++j) {
    theta[j] = wrap_angle(std::atan2(cross(seg[j - 1], seg[j]), dot(seg[j - 1], seg[j])));
  }
  return theta;
}

std::vector<SegmentValues> segment_angles(std::span<const SegmentValues> joint_angle_frames) {
  const std::size_t n = joint_angle_frames.size();
  std::vector<SegmentValues> out(n);
  for (std::size_t j = 0; j < kSegments; ++j) {
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += joint_angle_frames[i][k];
      raw[i] = s;
    }
    const auto unwrapped = unwrap(raw);
    for (std::size_t i = 0; i < n; ++i) out[i][j] = unwrapped[i];
  }
  return out;
}

SegmentLengths segment_lengths(std::span<const Landmarks> frames) {
  if (frames.empty()) throw InputError("segment lengths need at least one frame");
  SegmentLengths out;
  for (std::size_t j = 0; j < kSegments; ++j) {
    std::vector<double> per_frame;
    per_frame.reserve(frames.size());
    for (const auto& f : frames) per_frame.push_back(norm(f[j + 1] - f[j]));
    const double med = median(per_frame);
    if (!(med > kMinSegmentLength)) {
      throw DegenerateError("segment " + std::to_string(j + 1) + " has zero median length");
    }
    double dev = 0.0;
    for (double l : per_frame) dev = std::max(dev, std::abs(l - med) / med);
    out.length[j] = med;
    out.max_relative_deviation[j] = dev;
    if (dev > 0.10) {
      std::ostringstream w;
      w << "segment " << (j + 1) << " (" << kSegmentKeys[j] << ") length deviates up to "
        << std::setprecision(3) << 100.0 * dev << "% from its median";
      out.warnings.push_back(w.str());
    }
  }
  return out;
}

std::array<Vec2, kSegments> segment_coms(const Landmarks& a, const SegmentValues& com_ratios) {
  std::array<Vec2, kSegments> g{};
  for (std::size_t j = 0; j < kSegments; ++j) {
    g[j] = a[j] + com_ratios[j] * (a[j + 1] - a[j]);
  }
  return g;
}

Vec2 body_com(const Landmarks& a, const AnthropometricTable& table) {
  const auto frac = table.normalized_fractions();
  const auto g = segment_coms(a, table.com_ratios());
  Vec2 out{};
  for (std::size_t j = 0; j < kSegments; ++j) out += frac[j] * g[j];
  return out;
}

std::array<double, kLandmarks> landmark_com_weights(const AnthropometricTable& table) {
  const auto frac = table.normalized_fractions();
  std::array<double, kLandmarks> w{};
  for (std::size_t j = 0; j < kSegments; ++j) {
    const double alpha = table.segments[j].com_ratio;
    w[j] += frac[j] * (1.0 - alpha);
    w[j + 1] += frac[j] * alpha;
  }
  return w;
}

ChainState chain_state(const Landmarks& a, const AnthropometricTable& table) {
  ChainState s;
  s.landmarks = a;
  s.joint_angles = joint_angles(a);
  double cum = 0.0;
  for (std::size_t j = 0; j < kSegments; ++j) {
    cum += s.joint_angles[j];
    s.segment_angles[j] = wrap_angle(cum);
    s.lengths[j] = norm(a[j + 1] - a[j]);
  }
  s.segment_coms = segment_coms(a, table.com_ratios());
  s.body_com = body_com(a, table);
  return s;
}

double inertia_from_gyration(double mass, double length, double gyration_ratio) {
  if (!(mass > 0.0)) throw RangeError("segment mass must be positive");
  if (!(length > 0.0)) throw RangeError("segment length must be positive");
  if (!(gyration_ratio > 0.0 && gyration_ratio <= 1.0)) {
    throw RangeError("gyration ratio outside (0,1]");
  }
  const double r = gyration_ratio * length;
  return mass * r * r;
}

double gyration_from_inertia(double inertia, double mass, double length) {
  if (!(mass > 0.0) || !(length > 0.0)) throw RangeError("mass and length must be positive");
  const double r = std::sqrt(std::abs(inertia) / mass) / length;
  return inertia < 0.0 ? -r : r;
}

}  // namespace bsip
