#include "bsip/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "bsip/config.hpp"
#include "bsip/error.hpp"
#include "bsip/numeric.hpp"

namespace bsip {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTakeoffForce = 5.0;
constexpr std::size_t kMinBaseline = 125;  // force samples before onset
constexpr std::size_t kMinFlight = 25;     // force samples after take-off
constexpr const char* kSegmentKeys[kSegments] = {"foot", "shank", "thigh", "hat"};

SegmentValues cumulative(const SegmentValues& theta) {
  SegmentValues phi{};
  double s = 0.0;
  for (std::size_t j = 0; j < kSegments; ++j) phi[j] = s += theta[j];
  return phi;
}

long sample_index(double t, double rate) { return std::lround(t * rate); }

}  // namespace

Scenario Scenario::squat_jump() {
  Scenario s;
  s.theta_start = {150 * kDeg, -88 * kDeg, 88 * kDeg, -92 * kDeg};
  s.theta_end = {136.5 * kDeg, -60 * kDeg, 45 * kDeg, -50.5 * kDeg};
  return s;
}

SegmentValues Scenario::true_inertias() const {
  const auto m = table.masses(mass);
  const auto r = table.gyration_ratios();
  SegmentValues out{};
  for (std::size_t j = 0; j < kSegments; ++j) out[j] = inertia_from_gyration(m[j], lengths[j], r[j]);
  return out;
}

void Scenario::validate() const {
  try {
    table.validate();
  } catch (const Error& e) {
    throw ScenarioError(std::string("scenario '") + name + "': " + e.what());
  }
  for (std::size_t j = 0; j < kSegments; ++j) {
    const auto& p = table.segments[j];
    if (!(p.gyration_ratio > 0.0 && p.gyration_ratio <= 1.0)) {
      throw ScenarioError("scenario '" + name + "': gyration ratio of " + kSegmentKeys[j] +
                          " outside (0, 1]");
    }
    if (!(p.com_ratio >= 0.0 && p.com_ratio <= 1.0)) {
      throw ScenarioError("scenario '" + name + "': COM ratio of " + kSegmentKeys[j] + " outside [0, 1]");
    }
    if (!(lengths[j] > 1e-6) || !std::isfinite(lengths[j])) {
      throw ScenarioError("scenario '" + name + "': length of " + kSegmentKeys[j] + " must be positive");
    }
    if (!std::isfinite(theta_start[j]) || !std::isfinite(theta_end[j])) {
      throw ScenarioError("scenario '" + name + "': non-finite joint angle");
    }
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ScenarioError("scenario '" + name + "': mass must be positive");
  if (!(push_off > 0.0) || !(onset > 0.0) || !(onset + push_off < duration)) {
    throw ScenarioError("scenario '" + name + "': push-off must lie inside the record");
  }
  double earliest = 1.0, latest = 0.0;
  for (std::size_t j = 0; j < kSegments; ++j) {
    if (!(phase_start[j] >= 0.0 && phase_start[j] < phase_end[j] && phase_end[j] <= 1.0)) {
      throw ScenarioError("scenario '" + name + "': phase of joint " + std::to_string(j + 1) +
                          " must satisfy 0 <= start < end <= 1");
    }
    earliest = std::min(earliest, phase_start[j]);
    latest = std::max(latest, phase_end[j]);
  }
  if (earliest != 0.0 || latest != 1.0) {
    throw ScenarioError("scenario '" + name + "': joint phases must start at 0 and end at 1");
  }
  if (!(marker_rate > 0.0) || !(force_rate > 0.0)) {
    throw ScenarioError("scenario '" + name + "': sampling rates must be positive");
  }
  if (!(sigma_marker >= 0.0) || !(sigma_force >= 0.0)) {
    throw ScenarioError("scenario '" + name + "': noise levels must be non-negative");
  }
  const long n = sample_index(duration, force_rate) + 1;
  const long first = sample_index(onset, force_rate) - lag;
  const long last = sample_index(onset + push_off, force_rate) - lag;
  if (first < static_cast<long>(kMinBaseline) || last + static_cast<long>(kMinFlight) >= n) {
    throw ScenarioError("scenario '" + name + "': lag " + std::to_string(lag) +
                        " leaves too little quiet stance or flight in the force record");
  }
  for (long k = first + lag; k <= last + lag; ++k) {
    const double t = static_cast<double>(k) / force_rate;
    const auto st = exact_state(*this, t);
    if (!(st.reaction.y > kTakeoffForce)) {
      throw ScenarioError("scenario '" + name + "': vertical reaction drops to " +
                          std::to_string(st.reaction.y) + " N at t = " + std::to_string(t) +
                          " s before take-off");
    }
  }
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  const auto cfg = KeyValueConfig::parse(text, origin);
  static const char* known[] = {"name", "mass", "lengths", "theta_start_deg", "theta_end_deg", "onset",
                                "push_off", "duration", "phase_start", "phase_end", "lag", "sigma_marker", "sigma_force", "seed",
                                "alpha4", "foot", "shank", "thigh", "hat", "table"};
  for (const auto& key : cfg.keys()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known)) {
      throw ParseError(origin, 0, "unknown key '" + key + "'");
    }
  }
  Scenario s = Scenario::squat_jump();
  s.name = cfg.string_or("name", s.name);
  s.mass = cfg.number_or("mass", s.mass);
  if (cfg.has("lengths")) {
    const auto v = cfg.numbers("lengths", kSegments);
    std::copy(v.begin(), v.end(), s.lengths.begin());
  }
  for (const auto& [key, target] : {std::pair{"theta_start_deg", &s.theta_start},
                                    std::pair{"theta_end_deg", &s.theta_end}}) {
    if (!cfg.has(key)) continue;
    const auto v = cfg.numbers(key, kSegments);
    for (std::size_t j = 0; j < kSegments; ++j) (*target)[j] = v[j] * kDeg;
  }
  for (const auto& [key, target] : {std::pair{"phase_start", &s.phase_start},
                                    std::pair{"phase_end", &s.phase_end}}) {
    if (!cfg.has(key)) continue;
    const auto v = cfg.numbers(key, kSegments);
    std::copy(v.begin(), v.end(), target->begin());
  }
  s.onset = cfg.number_or("onset", s.onset);
  s.push_off = cfg.number_or("push_off", s.push_off);
  s.duration = cfg.number_or("duration", s.duration);
  s.lag = cfg.integer_or("lag", s.lag);
  s.sigma_marker = cfg.number_or("sigma_marker", s.sigma_marker);
  s.sigma_force = cfg.number_or("sigma_force", s.sigma_force);
  const long seed = cfg.integer_or("seed", static_cast<long>(s.seed));
  if (seed < 0) throw ParseError(origin, 0, "seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);

  bool any_row = false;
  for (const char* k : kSegmentKeys) any_row = any_row || cfg.has(k);
  if (any_row) {
    s.table.name = cfg.string_or("table", "custom");
    for (std::size_t j = 0; j < kSegments; ++j) {
      const auto v = cfg.numbers(kSegmentKeys[j], 3);
      s.table.segments[j] = {v[0], v[1], v[2]};
    }
  } else {
    s.table = AnthropometricTable::winter();
    if (cfg.has("table") && cfg.string("table") != "winter") {
      throw ParseError(origin, 0, "unknown table '" + cfg.string("table") + "'");
    }
  }
  s.table = s.table.with_trunk_com_ratio(cfg.number_or("alpha4", any_row ? s.table.segments[3].com_ratio : 0.45));
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_text_file(path), path); }

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << std::setprecision(17);
  const auto list = [&](const SegmentValues& v, double scale) {
    for (std::size_t j = 0; j < kSegments; ++j) out << (j ? ", " : "") << v[j] * scale;
    out << "\n";
  };
  out << "name = " << s.name << "\n";
  out << "mass = " << s.mass << "\n";
  out << "lengths = ";
  list(s.lengths, 1.0);
  out << "theta_start_deg = ";
  list(s.theta_start, 1.0 / kDeg);
  out << "theta_end_deg = ";
  list(s.theta_end, 1.0 / kDeg);
  out << "phase_start = ";
  list(s.phase_start, 1.0);
  out << "phase_end = ";
  list(s.phase_end, 1.0);
  out << "onset = " << s.onset << "\npush_off = " << s.push_off << "\nduration = " << s.duration << "\n";
  out << "lag = " << s.lag << "\nsigma_marker = " << s.sigma_marker << "\nsigma_force = " << s.sigma_force
      << "\nseed = " << s.seed << "\n";
  out << "table = " << s.table.name << "\n";
  for (std::size_t j = 0; j < kSegments; ++j) {
    const auto& p = s.table.segments[j];
    out << kSegmentKeys[j] << " = " << p.com_ratio << ", " << p.mass_fraction << ", " << p.gyration_ratio
        << "\n";
  }
  return out.str();
}

ExactState exact_state(const Scenario& s, double t) {
  SegmentValues th{}, thd{}, thdd{};
  for (std::size_t j = 0; j < kSegments; ++j) {
    const double T = (s.phase_end[j] - s.phase_start[j]) * s.push_off;
    const double u = std::clamp((t - s.onset - s.phase_start[j] * s.push_off) / T, 0.0, 1.0);
    const double v = 1.0 - u;
    const double p = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    const double dp = 30.0 * u * u * v * v / T;
    const double ddp = 60.0 * u * v * (1.0 - 2.0 * u) / (T * T);
    const double d = s.theta_end[j] - s.theta_start[j];
    th[j] = s.theta_start[j] + d * p;
    thd[j] = d * dp;
    thdd[j] = d * ddp;
  }
  ExactState st;
  st.phi = cumulative(th);
  st.phi_dot = cumulative(thd);
  st.phi_ddot = cumulative(thdd);
  st.position[0] = s.toe;
  for (std::size_t j = 0; j < kSegments; ++j) {
    const Vec2 e{std::cos(st.phi[j]), std::sin(st.phi[j])};
    const Vec2 n{-e.y, e.x};
    const double l = s.lengths[j];
    const double w = st.phi_dot[j];
    st.position[j + 1] = st.position[j] + l * e;
    st.velocity[j + 1] = st.velocity[j] + (l * w) * n;
    st.acceleration[j + 1] = st.acceleration[j] + (l * st.phi_ddot[j]) * n - (l * w * w) * e;
  }

  const auto m = s.table.masses(s.mass);
  const auto alpha = s.table.com_ratios();
  const auto inertia = s.true_inertias();
  const Vec2 up{0.0, kGravity};
  for (std::size_t j = 0; j < kSegments; ++j) {
    const Vec2 g = st.position[j] + alpha[j] * (st.position[j + 1] - st.position[j]);
    const Vec2 gdd = (1.0 - alpha[j]) * st.acceleration[j] + alpha[j] * st.acceleration[j + 1];
    const Vec2 f = m[j] * (gdd + up);
    st.reaction += f;
    st.torque += cross(g - st.position[0], f) + inertia[j] * st.phi_ddot[j];
  }
  return st;
}

double GaussianSource::uniform() {
  // (0, 1]
  return 1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double a = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

SyntheticTrial generate(const Scenario& s) {
  s.validate();
  SyntheticTrial out;
  auto& truth = out.truth;
  truth.scenario = s;
  truth.inertias = s.true_inertias();
  truth.alpha4 = s.table.segments[3].com_ratio;
  truth.lag = s.lag;
  const long t0 = sample_index(s.onset, s.force_rate);
  const long tf = sample_index(s.onset + s.push_off, s.force_rate);
  truth.window = {static_cast<std::size_t>(t0 - s.lag), static_cast<std::size_t>(tf - s.lag)};

  const auto weights = landmark_com_weights(s.table);
  const long nm = sample_index(s.duration, s.marker_rate) + 1;
  auto& mk = truth.markers;
  mk.rate = s.marker_rate;
  for (long k = 0; k < nm; ++k) {
    const double t = static_cast<double>(k) / s.marker_rate;
    const auto st = exact_state(s, t);
    mk.time.push_back(t);
    double y = 0.0;
    for (std::size_t j = 0; j < kLandmarks; ++j) {
      mk.landmarks[j].x.push_back(st.position[j].x);
      mk.landmarks[j].y.push_back(st.position[j].y);
      y += weights[j] * st.position[j].y;
    }
    truth.com_height.push_back(y);
  }

  // the plate reads zero after take-off unless the push-off raised nothing
  const auto start = exact_state(s, static_cast<double>(t0) / s.force_rate);
  const auto end = exact_state(s, static_cast<double>(tf) / s.force_rate);
  double rise = 0.0;
  for (std::size_t j = 0; j < kLandmarks; ++j) rise += weights[j] * (end.position[j].y - start.position[j].y);
  const bool airborne = rise > 0.0;

  const long nf = sample_index(s.duration, s.force_rate) + 1;
  auto& fr = truth.force;
  fr.rate = s.force_rate;
  for (long i = 0; i < nf; ++i) {
    const long k = i + s.lag;
    fr.time.push_back(static_cast<double>(i) / s.force_rate);
    if (airborne && k > tf) {
      fr.rx.push_back(0.0);
      fr.ry.push_back(0.0);
      fr.torque.push_back(0.0);
      continue;
    }
    const auto st = exact_state(s, static_cast<double>(k) / s.force_rate);
    fr.rx.push_back(st.reaction.x);
    fr.ry.push_back(st.reaction.y);
    fr.torque.push_back(st.torque);
  }

  GaussianSource noise(s.seed);
  out.markers = mk;
  for (std::size_t k = 0; k < out.markers.size(); ++k) {
    for (auto& lm : out.markers.landmarks) {
      lm.x[k] += s.sigma_marker * noise.next();
      lm.y[k] += s.sigma_marker * noise.next();
    }
  }
  out.force = fr;
  const double sigma_torque = 0.1 * s.sigma_force;
  for (std::size_t i = 0; i < out.force.size(); ++i) {
    out.force.rx[i] += s.sigma_force * noise.next();
    out.force.ry[i] += s.sigma_force * noise.next();
    out.force.torque[i] += sigma_torque * noise.next();
  }
  return out;
}

TrialWindow exact_window(const SyntheticTruth& truth) {
  const auto& s = truth.scenario;
  const auto alpha = s.table.com_ratios();
  TrialWindow w;
  w.dt = 1.0 / s.force_rate;
  for (std::size_t i = truth.window.first; i <= truth.window.last; ++i) {
    const double t = truth.force.marker_time(i, truth.lag);
    const auto st = exact_state(s, t);
    w.time.push_back(t);
    w.landmarks.push_back(st.position);
    std::array<Vec2, kSegments> g{};
    for (std::size_t j = 0; j < kSegments; ++j) {
      g[j] = (1.0 - alpha[j]) * st.acceleration[j] + alpha[j] * st.acceleration[j + 1];
    }
    w.com_acceleration.push_back(g);
    w.phi.push_back(st.phi);
    w.phi_dot.push_back(st.phi_dot);
    w.phi_ddot.push_back(st.phi_ddot);
    w.reaction.push_back({truth.force.rx[i], truth.force.ry[i]});
    w.torque.push_back(truth.force.torque[i]);
  }
  return w;
}

ClosureResiduals closure_check(const SyntheticTruth& truth, std::optional<SegmentValues> inertias) {
  const auto w = exact_window(truth);
  const auto& s = truth.scenario;
  const auto loads = compute_loads(w, s.table, s.mass);
  const auto torques = joint_torques(w, loads.moments, inertias.value_or(truth.inertias));
  ClosureResiduals r;
  for (std::size_t i = 0; i < w.size(); ++i) {
    r.force = std::max({r.force, std::abs(loads.forces[i][4].x), std::abs(loads.forces[i][4].y)});
    r.torque = std::max(r.torque, std::abs(torques[i][4]));
  }
  return r;
}

}  // namespace bsip
