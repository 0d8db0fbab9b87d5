#include "bsip/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bsip/error.hpp"

namespace bsip {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double dt) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
  }
  return out;
}

std::vector<double> double_cumulative_trapezoid(std::span<const double> f, double dt) {
  const auto once = cumulative_trapezoid(f, dt);
  return cumulative_trapezoid(once, dt);
}

double mean(std::span<const double> v) {
  if (v.empty()) throw InputError("mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double quantile(std::span<const double> v, double p) {
  if (v.empty()) throw InputError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw RangeError("quantile probability outside [0,1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median(std::span<const double> v) { return quantile(v, 0.5); }

double golden_section_minimize(const std::function<double(double)>& f, double lo,
                               double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

std::vector<double> unwrap(std::span<const double> angles) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(angles.begin(), angles.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < angles.size(); ++i) {
    const double step = angles[i] - angles[i - 1];
    if (step > std::numbers::pi) {
      offset -= two_pi * std::ceil((step - std::numbers::pi) / two_pi);
    } else if (step < -std::numbers::pi) {
      offset += two_pi * std::ceil((-step - std::numbers::pi) / two_pi);
    }
    out[i] = angles[i] + offset;
  }
  return out;
}

}  // namespace bsip
