#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsip/estimate.hpp"
#include "bsip/invdyn.hpp"
#include "bsip/model.hpp"
#include "bsip/spline.hpp"
#include "bsip/sync.hpp"
#include "bsip/trial.hpp"

namespace bsip {

struct TrialOptions {
  double mass = 0.0;  // kg
  std::vector<Method> methods{Method::A, Method::B, Method::C};
  std::vector<int> degrees{0, 1, 2};
  // Inertias used by Method C instead of the table values.
  std::optional<SegmentValues> method_c_inertias;
  // Skips event detection.
  std::optional<PushOffWindow> window;
  EventDetectionOptions events;
  SyncOptions sync;
  SmoothingSelectionOptions smoothing;
};

// Everything one trial produces.
struct TrialReport {
  std::string name;
  double mass = 0.0;
  AnthropometricTable table;  // input table with the estimated alpha4
  double table_alpha4 = 0.0;  // trunk com ratio of the input table
  PushOffWindow window;
  SegmentLengths lengths;
  SyncResult provisional_sync;
  SyncResult sync;
  Alpha4Estimate alpha4_lsq;
  SmoothingSelection smoothing;
  TrialOutcome outcome;

  // Plot data.
  ComHeightComparison ycom;
  ResidualForce residual_force;
  TrialWindow window_signals;
  JointLoads loads;
  SegmentValues load_inertias{};  // inertias behind the joint torque export
  std::vector<std::string> warnings;
};

// Provisional smoothing, synchronization, smoothing selection,
// re-synchronization, inverse dynamics and estimation. Failures are rethrown
// as StageError tagged with the stage name.
TrialReport run_trial(const std::string& name, const MarkerRecord& markers, const ForceRecord& force,
                      const AnthropometricTable& table, const TrialOptions& options);

// report.json plus eta_curve.csv, ycom.csv, joint_loads.csv,
// method_b_scatter.csv and residual_force.csv in out_dir.
void write_trial_outputs(const TrialReport& report, const std::string& out_dir);

std::string trial_report_json(const TrialReport& report);

struct RunConfig {
  std::string markers_path;
  std::string forces_path;
  std::string anthro_path;  // empty: Winter
  std::string out_dir;
  TrialOptions options;
};

TrialReport run_trial(const RunConfig& config);

struct BatchFailure {
  std::string name;
  std::string error;
};

struct BatchResult {
  std::vector<TrialOutcome> outcomes;  // successful trials, sorted by name
  std::vector<BatchFailure> failures;
  std::optional<BatchSummary> summary;
  std::string summary_error;
};

// Trials are `<name>.markers.csv` + `<name>.forces.csv` pairs in dir; an
// optional `<name>.meta.cfg` may set `mass`. Trials run on `threads` workers.
// Writes <out>/<name>/... per trial, summary.json, alpha4_values.csv,
// r4_tilde_values.csv and log10_metrics.csv. Throws InputError when dir holds
// no trial.
BatchResult run_batch(const std::string& dir, const std::string& anthro_path,
                      const TrialOptions& options, const std::string& out_dir, unsigned threads = 0);

std::string batch_summary_json(const BatchResult& batch);

}  // namespace bsip
