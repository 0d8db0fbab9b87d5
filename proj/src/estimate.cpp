#include "bsip/estimate.hpp"

#include <cmath>
#include <limits>

#include "bsip/error.hpp"
#include "bsip/lls.hpp"
#include "bsip/numeric.hpp"

namespace bsip {

char method_letter(Method m) {
  switch (m) {
    case Method::A: return 'A';
    case Method::B: return 'B';
    case Method::C: return 'C';
  }
  return '?';
}

Method parse_method(const std::string& s) {
  if (s == "A" || s == "a") return Method::A;
  if (s == "B" || s == "b") return Method::B;
  if (s == "C" || s == "c") return Method::C;
  throw InputError("unknown method '" + s + "' (expected A, B or C)");
}

LinearSystem build_system(const TrialWindow& w, std::span<const SegmentValues> moments, int degree,
                          Method method, const SegmentValues& reference_inertias) {
  if (degree < 0 || degree > 2) throw RangeError("degree must be 0, 1 or 2");
  const std::size_t n = w.size();
  if (n == 0) throw InputError("empty push-off window");
  if (moments.size() != n) throw InputError("moment series does not match the window");

  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = w.torque[i] + moments[i][0] + moments[i][1] + moments[i][2] + moments[i][3];
  }
  if (degree == 1) rhs = cumulative_trapezoid(rhs, w.dt);
  if (degree == 2) rhs = double_cumulative_trapezoid(rhs, w.dt);

  const std::size_t cols = method == Method::B ? 1 : kSegments;
  std::vector<std::array<double, kSegments>> design;
  std::vector<double> target;
  LinearSystem sys;
  sys.method = method;
  sys.degree = degree;
  for (std::size_t i = degree == 0 ? 0 : 1; i < n; ++i) {
    SegmentValues d{};
    for (std::size_t j = 0; j < kSegments; ++j) {
      d[j] = degree == 0 ? w.phi_ddot[i][j] : degree == 1 ? w.phi_dot[i][j] : w.phi[i][j] - w.phi[0][j];
    }
    if (method == Method::B) {
      if (d[3] == 0.0) continue;
      double y = rhs[i];
      for (std::size_t j = 0; j + 1 < kSegments; ++j) y -= reference_inertias[j] * d[j];
      design.push_back({d[3], 0.0, 0.0, 0.0});
      target.push_back(y);
    } else {
      if (d[0] == 0.0 && d[1] == 0.0 && d[2] == 0.0 && d[3] == 0.0) continue;
      design.push_back(d);
      target.push_back(rhs[i]);
    }
    sys.rows.push_back(i);
  }
  if (design.size() < 10 * cols) {
    throw InputError("only " + std::to_string(design.size()) + " usable rows for " +
                     std::to_string(cols) + " unknown(s); need at least " + std::to_string(10 * cols));
  }
  const auto rows = static_cast<Eigen::Index>(design.size());
  sys.a.resize(rows, static_cast<Eigen::Index>(cols));
  sys.b.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(cols); ++c) {
      sys.a(r, c) = design[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    sys.b(r) = target[static_cast<std::size_t>(r)];
  }
  return sys;
}

EstimationContext make_context(const AnthropometricTable& table, double mass,
                               const SegmentValues& lengths) {
  EstimationContext ctx;
  ctx.masses = table.masses(mass);
  ctx.lengths = lengths;
  const auto r = table.gyration_ratios();
  for (std::size_t j = 0; j < kSegments; ++j) {
    ctx.reference_inertias[j] = inertia_from_gyration(ctx.masses[j], lengths[j], r[j]);
  }
  return ctx;
}

double r_squared(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  const double ss_res = (a * x - b).squaredNorm();
  const double ss_tot = (b.array() - b.mean()).matrix().squaredNorm();
  if (ss_tot == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 - ss_res / ss_tot;
}

bool gyration_ratio_valid(double r4_tilde) { return r4_tilde > 0.0 && r4_tilde <= 1.0; }

EstimationResult estimate(Method method, int degree, const TrialWindow& w,
                          std::span<const SegmentValues> moments, const EstimationContext& ctx) {
  EstimationResult res;
  res.method = method;
  res.degree = degree;
  const auto sys = build_system(w, moments, degree, method, ctx.reference_inertias);
  res.rows = sys.rows.size();
  switch (method) {
    case Method::A: {
      const Eigen::VectorXd x = lls_solve(sys.a, sys.b);
      for (std::size_t j = 0; j < kSegments; ++j) res.inertias[j] = x(static_cast<Eigen::Index>(j));
      res.r2 = r_squared(sys.a, sys.b, x);
      break;
    }
    case Method::B: {
      const Eigen::VectorXd x = lls_solve(sys.a, sys.b);
      res.inertias = ctx.reference_inertias;
      res.inertias[3] = x(0);
      res.fixed = {true, true, true, false};
      res.r2 = r_squared(sys.a, sys.b, x);
      break;
    }
    case Method::C: {
      res.inertias = ctx.reference_inertias;
      res.fixed = {true, true, true, true};
      Eigen::VectorXd x(4);
      for (std::size_t j = 0; j < kSegments; ++j) x(static_cast<Eigen::Index>(j)) = res.inertias[j];
      res.r2 = r_squared(sys.a, sys.b, x);
      break;
    }
  }
  for (double i : res.inertias) res.negative_inertia = res.negative_inertia || i < 0.0;
  const auto rt = residual_torque(w, moments, res.inertias, degree);
  res.epsilon = epsilon(rt.experimental, rt.angular);
  res.r4_tilde = gyration_from_inertia(res.inertias[3], ctx.masses[3], ctx.lengths[3]);
  res.valid = gyration_ratio_valid(res.r4_tilde);
  return res;
}

}  // namespace bsip
