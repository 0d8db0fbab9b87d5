#include "bsip/sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsip/error.hpp"
#include "bsip/lls.hpp"
#include "bsip/numeric.hpp"

namespace bsip {

namespace {

void check_window(const ForceRecord& force, const PushOffWindow& window) {
  if (window.first > window.last || window.last >= force.size()) {
    throw RangeError("push-off window [" + std::to_string(window.first) + ", " +
                     std::to_string(window.last) + "] outside the force record of " +
                     std::to_string(force.size()) + " samples");
  }
}

std::vector<double> integrate_force(const ForceRecord& force, const PushOffWindow& window,
                                    double mass) {
  std::vector<double> f(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    f[i] = force.ry[window.first + i] - mass * kGravity;
  }
  return double_cumulative_trapezoid(f, 1.0 / force.rate);
}

double com_height(const SmoothedKinematics& kin, const std::array<double, kLandmarks>& w, double t) {
  double y = 0.0;
  for (std::size_t k = 0; k < kLandmarks; ++k) y += w[k] * kin.position(k, t, 0).y;
  return y;
}

}  // namespace

PushOffWindow detect_push_off(const ForceRecord& force, const EventDetectionOptions& options) {
  const std::size_t n = force.size();
  const std::size_t hw = options.smoothing_half_width;
  const auto sustain =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(options.sustain_seconds * force.rate)));
  if (n < options.baseline_samples + sustain + 3) {
    throw RangeError("force record too short for push-off detection");
  }
  std::vector<double> smoothed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= hw ? i - hw : 0;
    const std::size_t hi = std::min(n - 1, i + hw);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) s += force.ry[k];
    smoothed[i] = s / static_cast<double>(hi - lo + 1);
  }
  std::vector<double> deriv(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    deriv[i] = (smoothed[i + 1] - smoothed[i - 1]) * force.rate / 2.0;
  }
  double ss = 0.0;
  for (std::size_t i = 1; i <= options.baseline_samples; ++i) ss += deriv[i] * deriv[i];
  const double threshold =
      options.threshold_factor * std::sqrt(ss / static_cast<double>(options.baseline_samples));

  std::size_t run = 0;
  std::size_t onset = n;
  for (std::size_t i = options.baseline_samples + 1; i + 1 < n; ++i) {
    run = std::abs(deriv[i]) > threshold ? run + 1 : 0;
    if (run == sustain) {
      onset = i + 1 - sustain;
      break;
    }
  }
  if (onset == n) throw RangeError("no push-off onset found in the force record");

  for (std::size_t i = onset + 1; i < n; ++i) {
    if (force.ry[i] < options.takeoff_force) {
      if (i - 1 <= onset) throw InputError("empty push-off window");
      return {onset, i - 1};
    }
  }
  throw RangeError("force record ends before take-off");
}

std::vector<double> residual_double_integral(const ForceRecord& force, const PushOffWindow& window,
                                             const std::function<double(double)>& com_height_at,
                                             double mass, long nu) {
  check_window(force, window);
  auto r = integrate_force(force, window, mass);
  const double y0 = com_height_at(force.marker_time(window.first, nu));
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] -= mass * (com_height_at(force.marker_time(window.first + i, nu)) - y0);
  }
  return r;
}

SyncProblem::SyncProblem(const SmoothedKinematics& kin, const ForceRecord& force,
                         PushOffWindow window, const AnthropometricTable& table, double mass,
                         const SyncOptions& options)
    : window_(window), mass_(mass) {
  check_window(force, window);
  if (!(mass > 0.0)) throw RangeError("total mass must be positive");
  if (options.nu_min > options.nu_max) throw InputError("empty lag scan range");

  nu_lo_ = options.nu_min;
  while (nu_lo_ <= options.nu_max && !kin.contains(force.marker_time(window.first, nu_lo_))) ++nu_lo_;
  nu_hi_ = options.nu_max;
  while (nu_hi_ >= nu_lo_ && !kin.contains(force.marker_time(window.last, nu_hi_))) --nu_hi_;
  if (nu_lo_ > nu_hi_ || !kin.contains(force.marker_time(window.first, nu_lo_))) {
    throw RangeError("no lag in [" + std::to_string(options.nu_min) + ", " +
                     std::to_string(options.nu_max) +
                     "] keeps the push-off window inside the marker record");
  }
  for (long nu = nu_lo_; nu <= nu_hi_; ++nu) scan_order_.push_back(nu);
  std::stable_sort(scan_order_.begin(), scan_order_.end(),
                   [](long a, long b) { return std::labs(a) < std::labs(b); });

  force_integral_ = integrate_force(force, window, mass);

  const auto w0 = landmark_com_weights(table.with_trunk_com_ratio(0.0));
  const auto w1 = landmark_com_weights(table.with_trunk_com_ratio(1.0));
  std::array<double, kLandmarks> dw{};
  for (std::size_t k = 0; k < kLandmarks; ++k) dw[k] = w1[k] - w0[k];
  const std::size_t span = window.size() + static_cast<std::size_t>(nu_hi_ - nu_lo_);
  y0_.resize(span);
  y1_.resize(span);
  for (std::size_t u = 0; u < span; ++u) {
    const double t = force.marker_time(window.first + u, nu_lo_);
    y0_[u] = com_height(kin, w0, t);
    y1_[u] = com_height(kin, dw, t);
  }
}

std::vector<double> SyncProblem::residual(double alpha4, long nu) const {
  if (nu < nu_lo_ || nu > nu_hi_) {
    throw RangeError("lag " + std::to_string(nu) + " outside the feasible scan range");
  }
  const std::size_t o = offset(nu);
  std::vector<double> r(window_.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double dy0 = y0_[o + i] - y0_[o];
    const double dy1 = y1_[o + i] - y1_[o];
    r[i] = force_integral_[i] - mass_ * (dy0 + alpha4 * dy1);
  }
  return r;
}

EtaValue SyncProblem::eta(double alpha4) const {
  EtaValue best{std::numeric_limits<double>::infinity(), 0};
  bool found = false;
  for (long nu : scan_order_) {
    const std::size_t o = offset(nu);
    double ss = 0.0;
    for (std::size_t i = 0; i < window_.size(); ++i) {
      const double dy0 = y0_[o + i] - y0_[o];
      const double dy1 = y1_[o + i] - y1_[o];
      const double r = force_integral_[i] - mass_ * (dy0 + alpha4 * dy1);
      ss += r * r;
    }
    const double n = std::sqrt(ss);
    if (std::isfinite(n) && (!found || n < best.eta)) {
      best = {n, nu};
      found = true;
    }
  }
  if (!found) best = {std::numeric_limits<double>::quiet_NaN(), 0};
  return best;
}

std::pair<std::vector<double>, std::vector<double>> SyncProblem::affine_coefficients(long nu) const {
  const auto b = residual(0.0, nu);
  const std::size_t o = offset(nu);
  std::vector<double> a(window_.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = -mass_ * (y1_[o + i] - y1_[o]);
  return {a, b};
}

SyncResult synchronize(const SyncProblem& problem, const SyncOptions& options) {
  if (options.alpha_grid_points < 3) throw InputError("alpha4 grid needs at least 3 points");
  SyncResult out;
  const int g = options.alpha_grid_points;
  std::size_t best = 0;
  bool found = false;
  for (int k = 0; k < g; ++k) {
    const double a = static_cast<double>(k) / (g - 1);
    const auto e = problem.eta(a);
    out.curve.push_back({a, e.eta, e.nu});
    if (std::isfinite(e.eta) && (!found || e.eta < out.curve[best].eta)) {
      best = static_cast<std::size_t>(k);
      found = true;
    }
  }
  if (!found) throw Error("synchronization failed: eta is non-finite over the whole alpha4 grid");

  const double step = 1.0 / (g - 1);
  const double lo = std::max(0.0, out.curve[best].alpha4 - step);
  const double hi = std::min(1.0, out.curve[best].alpha4 + step);
  const auto objective = [&](double a) {
    const double e = problem.eta(a).eta;
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  };
  const double refined = golden_section_minimize(objective, lo, hi, options.alpha_tolerance);
  const auto refined_eta = problem.eta(refined);
  if (std::isfinite(refined_eta.eta) && refined_eta.eta <= out.curve[best].eta) {
    out.alpha4 = refined;
    out.eta = refined_eta.eta;
    out.nu = refined_eta.nu;
  } else {
    out.alpha4 = out.curve[best].alpha4;
    out.eta = out.curve[best].eta;
    out.nu = out.curve[best].nu;
  }
  return out;
}

SyncResult synchronize(const SmoothedKinematics& kin, const ForceRecord& force,
                       const PushOffWindow& window, const AnthropometricTable& table, double mass,
                       const SyncOptions& options) {
  return synchronize(SyncProblem(kin, force, window, table, mass, options), options);
}

Alpha4Estimate alpha4_least_squares(const SyncProblem& problem, long nu) {
  const auto [a, b] = problem.affine_coefficients(nu);
  // trunk ratio shifts y_G by less than a nanometre on average
  const double spread = l2_norm(a) / (problem.mass() * std::sqrt(static_cast<double>(a.size())));
  if (!(spread > 1e-9)) {
    throw DegenerateError("alpha4 least squares: trunk does not move, every alpha4 fits equally");
  }
  Eigen::MatrixXd design(a.size(), 1);
  Eigen::VectorXd rhs(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    design(static_cast<Eigen::Index>(i), 0) = a[i];
    rhs(static_cast<Eigen::Index>(i)) = -b[i];
  }
  Alpha4Estimate out;
  out.unclamped = lls_solve(design, rhs)(0);
  out.alpha4 = std::clamp(out.unclamped, 0.0, 1.0);
  out.clamped = out.alpha4 != out.unclamped;
  return out;
}

ComHeightComparison ycom_three_ways(const SmoothedKinematics& kin, const ForceRecord& force,
                                    const PushOffWindow& window, const AnthropometricTable& table,
                                    double mass, long nu) {
  check_window(force, window);
  const auto w = landmark_com_weights(table);
  ComHeightComparison out;
  const auto integral = integrate_force(force, window, mass);
  const double y_start = com_height(kin, w, force.marker_time(window.first, nu));
  for (std::size_t i = 0; i < window.size(); ++i) {
    const std::size_t fi = window.first + i;
    const double t = force.marker_time(fi, nu);
    out.time.push_back(t);
    out.from_force.push_back(y_start + integral[i] / mass);
    out.synchronized.push_back(com_height(kin, w, t));
    const double t_raw = force.marker_time(fi, 0);
    out.unsynchronized.push_back(kin.contains(t_raw) ? com_height(kin, w, t_raw)
                                                     : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace bsip
