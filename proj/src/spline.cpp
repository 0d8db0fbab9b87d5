#include "bsip/spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsip/error.hpp"

namespace bsip {

namespace {

// Symmetric positive definite pentadiagonal solve by banded LDL'.
// diag[i] = A(i,i), off1[i] = A(i,i+1), off2[i] = A(i,i+2).
std::vector<double> solve_pentadiagonal(std::vector<double> diag, std::vector<double> off1,
                                        std::vector<double> off2, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> d(n), l1(n, 0.0), l2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double di = diag[i];
    if (i >= 1) di -= l1[i - 1] * l1[i - 1] * d[i - 1];
    if (i >= 2) di -= l2[i - 2] * l2[i - 2] * d[i - 2];
    if (!(di > 0.0)) throw Error("smoothing spline system is not positive definite");
    d[i] = di;
    if (i + 1 < n) {
      double e = off1[i];
      if (i >= 1) e -= l2[i - 1] * l1[i - 1] * d[i - 1];
      l1[i] = e / di;
    }
    if (i + 2 < n) l2[i] = off2[i] / di;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 1) rhs[i] -= l1[i - 1] * rhs[i - 1];
    if (i >= 2) rhs[i] -= l2[i - 2] * rhs[i - 2];
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= d[i];
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n) rhs[k] -= l1[k] * rhs[k + 1];
    if (k + 2 < n) rhs[k] -= l2[k] * rhs[k + 2];
  }
  return rhs;
}

}  // namespace

SmoothingSpline SmoothingSpline::fit(std::span<const double> x, std::span<const double> y,
                                     double sp) {
  const std::size_t n = x.size();
  if (n != y.size()) throw InputError("spline fit: abscissae and ordinates differ in length");
  if (n < 4) throw InputError("spline fit: need at least 4 samples");
  if (!(sp >= 0.0 && sp <= 1.0)) throw RangeError("spline fit: smoothing parameter outside [0,1]");
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    if (!(h[i] > 0.0)) {
      throw InputError("spline fit: abscissae not strictly increasing at index " +
                       std::to_string(i + 1));
    }
  }

  // Interior knots k = 1..n-2 map to unknown index k-1. Column c of Q has
  // entries q0 = 1/h_c, q1 = -1/h_c - 1/h_{c+1}, q2 = 1/h_{c+1} on rows c..c+2.
  const std::size_t m = n - 2;
  std::vector<double> q0(m), q1(m), q2(m);
  for (std::size_t c = 0; c < m; ++c) {
    q0[c] = 1.0 / h[c];
    q2[c] = 1.0 / h[c + 1];
    q1[c] = -q0[c] - q2[c];
  }
  std::vector<double> diag(m), off1(m, 0.0), off2(m, 0.0), rhs(m);
  for (std::size_t c = 0; c < m; ++c) {
    const double r_diag = (h[c] + h[c + 1]) / 3.0;
    const double qtq_diag = q0[c] * q0[c] + q1[c] * q1[c] + q2[c] * q2[c];
    diag[c] = sp * r_diag + (1.0 - sp) * qtq_diag;
    if (c + 1 < m) {
      const double r_off = h[c + 1] / 6.0;
      const double qtq_off = q1[c] * q0[c + 1] + q2[c] * q1[c + 1];
      off1[c] = sp * r_off + (1.0 - sp) * qtq_off;
    }
    if (c + 2 < m) off2[c] = (1.0 - sp) * q2[c] * q0[c + 2];
    rhs[c] = q0[c] * y[c] + q1[c] * y[c + 1] + q2[c] * y[c + 2];
  }
  const auto c = solve_pentadiagonal(std::move(diag), std::move(off1), std::move(off2),
                                     std::move(rhs));

  SmoothingSpline s;
  s.sp_ = sp;
  s.x_.assign(x.begin(), x.end());
  s.f_.assign(y.begin(), y.end());
  s.m_.assign(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    s.f_[k] -= (1.0 - sp) * q0[k] * c[k];
    s.f_[k + 1] -= (1.0 - sp) * q1[k] * c[k];
    s.f_[k + 2] -= (1.0 - sp) * q2[k] * c[k];
    s.m_[k + 1] = sp * c[k];
  }
  return s;
}

std::size_t SmoothingSpline::interval(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(x_.begin(), it));
  if (idx == 0) return 0;
  return std::min(idx - 1, x_.size() - 2);
}

double SmoothingSpline::eval(double t, int order) const {
  if (x_.empty()) throw Error("spline evaluated before fitting");
  if (order < 0 || order > 2) throw RangeError("spline derivative order must be 0, 1 or 2");
  const double slack = 1e-12 * std::max(1.0, upper() - lower());
  if (!(t >= lower() - slack && t <= upper() + slack)) {
    throw RangeError("spline evaluated outside its knot range at t = " + std::to_string(t));
  }
  t = std::clamp(t, lower(), upper());
  const std::size_t i = interval(t);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h;
  const double b = 1.0 - a;
  const double mi = m_[i], mj = m_[i + 1];
  switch (order) {
    case 0:
      return a * f_[i] + b * f_[i + 1] + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
    case 1:
      return (f_[i + 1] - f_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * mi +
             (3.0 * b * b - 1.0) / 6.0 * h * mj;
    default:
      return a * mi + b * mj;
  }
}

double SmoothingSpline::roughness() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double h = x_[i + 1] - x_[i];
    s += h / 3.0 * (m_[i] * m_[i] + m_[i] * m_[i + 1] + m_[i + 1] * m_[i + 1]);
  }
  return s;
}

SmoothedKinematics SmoothedKinematics::fit(const MarkerRecord& markers,
                                           const SmoothingParameters& sp) {
  SmoothedKinematics k;
  k.sp_ = sp;
  for (std::size_t j = 0; j < kLandmarks; ++j) {
    k.channels_[2 * j] = SmoothingSpline::fit(markers.time, markers.landmarks[j].x, sp[j]);
    k.channels_[2 * j + 1] = SmoothingSpline::fit(markers.time, markers.landmarks[j].y, sp[j]);
  }
  return k;
}

SmoothedKinematics SmoothedKinematics::with_landmark(const MarkerRecord& markers, std::size_t j,
                                                     double sp) const {
  SmoothedKinematics k = *this;
  k.sp_[j] = sp;
  k.channels_[2 * j] = SmoothingSpline::fit(markers.time, markers.landmarks[j].x, sp);
  k.channels_[2 * j + 1] = SmoothingSpline::fit(markers.time, markers.landmarks[j].y, sp);
  return k;
}

Vec2 SmoothedKinematics::position(std::size_t landmark, double t, int order) const {
  return {channels_[2 * landmark].eval(t, order), channels_[2 * landmark + 1].eval(t, order)};
}

Landmarks SmoothedKinematics::landmarks(double t, int order) const {
  Landmarks a{};
  for (std::size_t j = 0; j < kLandmarks; ++j) a[j] = position(j, t, order);
  return a;
}

bool SmoothedKinematics::contains(double t) const {
  const double slack = 1e-12 * std::max(1.0, upper() - lower());
  return t >= lower() - slack && t <= upper() + slack;
}

}  // namespace bsip
