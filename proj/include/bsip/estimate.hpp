#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsip/invdyn.hpp"
#include "bsip/model.hpp"

namespace bsip {

enum class Method { A, B, C };

char method_letter(Method m);
Method parse_method(const std::string& s);  // "A", "B" or "C"; InputError otherwise

// Overdetermined system A I = B on the push-off window. Method A solves all
// four inertias, Method B only I_4 (y_i = I_4 x_i), Method C is evaluated
// with the reference inertias using the Method A layout.
struct LinearSystem {
  Method method = Method::A;
  int degree = 0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<std::size_t> rows;  // window sample of each row
};

// Method B needs the reference I_1..I_3; they are ignored otherwise.
// Degree 1 and 2 drop the first sample (identically zero) and any row whose
// design entries are all zero. Throws InputError on an empty window or when
// fewer than 10 rows per unknown remain.
LinearSystem build_system(const TrialWindow& w, std::span<const SegmentValues> moments, int degree,
                          Method method, const SegmentValues& reference_inertias = {});

struct EstimationResult {
  Method method = Method::A;
  int degree = 0;
  SegmentValues inertias{};
  std::array<bool, kSegments> fixed{};  // taken from the reference table
  double epsilon = 0.0;
  double r2 = 0.0;
  double r4_tilde = 0.0;
  bool valid = false;            // r4_tilde in (0, 1]
  bool negative_inertia = false;
  std::size_t rows = 0;
};

struct EstimationContext {
  SegmentValues reference_inertias{};  // m_j (r~_j l_j)^2 from the table
  SegmentValues masses{};
  SegmentValues lengths{};
};

EstimationContext make_context(const AnthropometricTable& table, double mass,
                               const SegmentValues& lengths);

EstimationResult estimate(Method method, int degree, const TrialWindow& w,
                          std::span<const SegmentValues> moments, const EstimationContext& ctx);

// 1 - ||A x - B||^2 / ||B - mean(B)||^2
double r_squared(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x);

bool gyration_ratio_valid(double r4_tilde);

// Per-trial outcome used by the batch summary.
struct TrialOutcome {
  std::string name;
  double alpha4 = 0.0;
  long nu = 0;
  std::vector<EstimationResult> results;

  // B2 if estimated, otherwise the first result.
  const EstimationResult* validity_source() const;
  bool valid() const;
};

struct FilterResult {
  std::vector<std::size_t> retained;  // indices into the batch
  std::size_t removed = 0;
};

FilterResult gyration_filter(std::span<const TrialOutcome> trials);

struct Statistics {
  std::size_t n = 0;
  double mean = 0.0, sd = 0.0;
  double q025 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q975 = 0.0;
};

Statistics describe(std::span<const double> v);

struct CellSummary {
  Method method = Method::A;
  int degree = 0;
  std::size_t n = 0;
  double median_epsilon = 0.0;
  double mean_log_epsilon = 0.0, sd_log_epsilon = 0.0;
  double mean_log_one_minus_r2 = 0.0, sd_log_one_minus_r2 = 0.0;
  std::size_t r2_samples = 0;  // trials with 1 - R^2 > 0
  std::vector<double> log_epsilon;
};

// 10^(mean log eps_denominator - mean log eps_numerator): how many times
// smaller the numerator cell's error is.
struct ErrorRatio {
  std::string numerator, denominator;  // cell labels such as "A2"
  double value = 0.0;
};

struct BatchSummary {
  std::size_t trials = 0;
  std::size_t retained = 0;
  std::size_t removed = 0;
  std::vector<CellSummary> cells;
  std::vector<ErrorRatio> ratios;
  Statistics alpha4;
  Statistics r4_tilde;
};

std::string cell_label(Method m, int degree);

// Aggregates the trials that pass the gyration filter. Throws InputError with
// fewer than two retained trials.
BatchSummary aggregate(std::span<const TrialOutcome> trials);

}  // namespace bsip
