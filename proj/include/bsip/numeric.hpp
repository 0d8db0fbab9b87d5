#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bsip {

inline constexpr double kGravity = 9.81;  // m/s^2, gravity vector is (0, -g)

// l2 norm (root of the sum of squares, not divided by the count).
double l2_norm(std::span<const double> v);

// Cumulative trapezoidal integral with zero initial value and uniform step dt.
std::vector<double> cumulative_trapezoid(std::span<const double> f, double dt);

// Double cumulative trapezoid: integral from the first sample of the integral
// from the first sample. Both constants of integration are zero.
std::vector<double> double_cumulative_trapezoid(std::span<const double> f, double dt);

double mean(std::span<const double> v);

// Sample standard deviation (n - 1 denominator). Zero for fewer than 2 values.
double stddev(std::span<const double> v);

// Quantile by linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::span<const double> v, double p);

double median(std::span<const double> v);

// Golden-section minimization of a unimodal function on [lo, hi] until the
// bracket is narrower than tol. Returns the abscissa of the best evaluated point.
double golden_section_minimize(const std::function<double(double)>& f, double lo,
                               double hi, double tol);

// Unwraps an angle sequence so that consecutive samples never differ by more than pi.
std::vector<double> unwrap(std::span<const double> angles);

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace bsip
