#include <cmath>
#include <limits>

#include "bsip/error.hpp"
#include "bsip/estimate.hpp"
#include "bsip/numeric.hpp"

namespace bsip {

const EstimationResult* TrialOutcome::validity_source() const {
  for (const auto& r : results) {
    if (r.method == Method::B && r.degree == 2) return &r;
  }
  return results.empty() ? nullptr : &results.front();
}

bool TrialOutcome::valid() const {
  const auto* r = validity_source();
  return r != nullptr && r->valid;
}

FilterResult gyration_filter(std::span<const TrialOutcome> trials) {
  FilterResult out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].valid()) {
      out.retained.push_back(i);
    } else {
      ++out.removed;
    }
  }
  return out;
}

Statistics describe(std::span<const double> v) {
  Statistics s;
  s.n = v.size();
  if (v.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.sd = s.q025 = s.q25 = s.median = s.q75 = s.q975 = nan;
    return s;
  }
  s.mean = mean(v);
  s.sd = stddev(v);
  s.q025 = quantile(v, 0.025);
  s.q25 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q75 = quantile(v, 0.75);
  s.q975 = quantile(v, 0.975);
  return s;
}

std::string cell_label(Method m, int degree) {
  return std::string(1, method_letter(m)) + std::to_string(degree);
}

BatchSummary aggregate(std::span<const TrialOutcome> trials) {
  const auto filter = gyration_filter(trials);
  if (filter.retained.size() < 2) {
    throw InputError("aggregation needs at least two valid trials, got " +
                     std::to_string(filter.retained.size()));
  }
  BatchSummary out;
  out.trials = trials.size();
  out.retained = filter.retained.size();
  out.removed = filter.removed;

  std::vector<double> alpha, r4;
  for (std::size_t idx : filter.retained) {
    const auto& t = trials[idx];
    alpha.push_back(t.alpha4);
    r4.push_back(t.validity_source()->r4_tilde);
  }
  out.alpha4 = describe(alpha);
  out.r4_tilde = describe(r4);

  for (Method m : {Method::A, Method::B, Method::C}) {
    for (int d = 0; d <= 2; ++d) {
      std::vector<double> eps, lr2;
      for (std::size_t idx : filter.retained) {
        for (const auto& r : trials[idx].results) {
          if (r.method != m || r.degree != d) continue;
          eps.push_back(r.epsilon);
          if (1.0 - r.r2 > 0.0) lr2.push_back(std::log10(1.0 - r.r2));
        }
      }
      if (eps.empty()) continue;
      CellSummary c;
      c.method = m;
      c.degree = d;
      c.n = eps.size();
      c.median_epsilon = median(eps);
      for (double e : eps) c.log_epsilon.push_back(std::log10(e));
      c.mean_log_epsilon = mean(c.log_epsilon);
      c.sd_log_epsilon = stddev(c.log_epsilon);
      c.r2_samples = lr2.size();
      if (lr2.empty()) {
        c.mean_log_one_minus_r2 = c.sd_log_one_minus_r2 = std::numeric_limits<double>::quiet_NaN();
      } else {
        c.mean_log_one_minus_r2 = mean(lr2);
        c.sd_log_one_minus_r2 = stddev(lr2);
      }
      out.cells.push_back(std::move(c));
    }
  }
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    for (std::size_t k = i + 1; k < out.cells.size(); ++k) {
      const auto& x = out.cells[i];
      const auto& y = out.cells[k];
      out.ratios.push_back({cell_label(x.method, x.degree), cell_label(y.method, y.degree),
                            std::pow(10.0, y.mean_log_epsilon - x.mean_log_epsilon)});
    }
  }
  return out;
}

}  // namespace bsip
