#include "bsip/trial.hpp"

#include <cmath>
#include <string>

#include "bsip/error.hpp"

namespace bsip {

namespace {

void check_time_base(const std::vector<double>& t, double rate, double tol, const char* what) {
  if (t.size() < 2) throw InputError(std::string(what) + ": need at least two samples");
  if (!(rate > 0.0)) throw InputError(std::string(what) + ": sampling rate must be positive");
  const double step = 1.0 / rate;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    if (!(std::abs(dt - step) <= tol)) {
      throw InputError(std::string(what) + ": non-uniform sampling at sample " + std::to_string(i));
    }
  }
}

}  // namespace

Landmarks MarkerRecord::frame(std::size_t i) const {
  Landmarks a{};
  for (std::size_t k = 0; k < kLandmarks; ++k) a[k] = {landmarks[k].x[i], landmarks[k].y[i]};
  return a;
}

std::vector<Landmarks> MarkerRecord::frames() const {
  std::vector<Landmarks> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(frame(i));
  return out;
}

void MarkerRecord::validate(double tol) const {
  check_time_base(time, rate, tol, "marker record");
  for (std::size_t k = 0; k < kLandmarks; ++k) {
    const auto& lm = landmarks[k];
    if (lm.x.size() != size() || lm.y.size() != size()) {
      throw InputError("marker record: landmark " + std::to_string(k + 1) + " has a ragged series");
    }
    for (std::size_t i = 0; i < size(); ++i) {
      if (!std::isfinite(lm.x[i]) || !std::isfinite(lm.y[i])) {
        throw InputError("marker record: non-finite coordinate of landmark " +
                         std::to_string(k + 1) + " at sample " + std::to_string(i));
      }
    }
  }
}

void ForceRecord::validate(double tol) const {
  check_time_base(time, rate, tol, "force record");
  if (rx.size() != size() || ry.size() != size() || torque.size() != size()) {
    throw InputError("force record: ragged channels");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(rx[i]) || !std::isfinite(ry[i]) || !std::isfinite(torque[i])) {
      throw InputError("force record: non-finite value at sample " + std::to_string(i));
    }
  }
}

}  // namespace bsip
