#include "bsip/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "bsip/config.hpp"
#include "bsip/error.hpp"
#include "bsip/io.hpp"

namespace bsip {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

template <class F>
auto in_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

template <std::size_t N>
Json numbers(const std::array<double, N>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json sync_json(const SyncResult& s) { return {{"nu", s.nu}, {"alpha4", number(s.alpha4)}, {"eta", number(s.eta)}}; }

Json result_json(const EstimationResult& r, const TrialOutcome& o) {
  Json fixed = Json::array();
  for (bool f : r.fixed) fixed.push_back(f);
  return {{"method", std::string(1, method_letter(r.method))},
          {"degree", r.degree},
          {"inertias", numbers(r.inertias)},
          {"fixed", fixed},
          {"epsilon", number(r.epsilon)},
          {"r2", number(r.r2)},
          {"r4_tilde", number(r.r4_tilde)},
          {"alpha4", number(o.alpha4)},
          {"nu", o.nu},
          {"valid", r.valid},
          {"negative_inertia", r.negative_inertia},
          {"rows", r.rows}};
}

Json stats_json(const Statistics& s) {
  return {{"n", s.n},         {"mean", number(s.mean)},     {"sd", number(s.sd)},
          {"q025", number(s.q025)}, {"q25", number(s.q25)}, {"median", number(s.median)},
          {"q75", number(s.q75)},   {"q975", number(s.q975)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

TrialReport run_trial(const std::string& name, const MarkerRecord& markers, const ForceRecord& force,
                      const AnthropometricTable& table, const TrialOptions& options) {
  TrialReport r;
  r.name = name;
  r.mass = options.mass;
  r.table_alpha4 = table.segments[3].com_ratio;
  r.outcome.name = name;

  in_stage("model", [&] {
    if (!(options.mass > 0.0) || !std::isfinite(options.mass)) throw InputError("total mass must be positive");
    if (options.methods.empty() || options.degrees.empty()) {
      throw InputError("select at least one method and one degree");
    }
    for (int d : options.degrees) {
      if (d < 0 || d > 2) throw RangeError("degree must be 0, 1 or 2, got " + std::to_string(d));
    }
    table.validate();
    markers.validate();
    force.validate();
    r.lengths = segment_lengths(markers.frames());
    for (const auto& w : r.lengths.warnings) r.warnings.push_back(w);
    return 0;
  });

  r.window = in_stage("sync", [&] { return options.window ? *options.window : detect_push_off(force, options.events); });

  SmoothingParameters provisional{};
  provisional.fill(kProvisionalSmoothing);
  const auto kin0 = in_stage("smoothing", [&] { return SmoothedKinematics::fit(markers, provisional); });
  r.provisional_sync =
      in_stage("sync", [&] { return synchronize(kin0, force, r.window, table, options.mass, options.sync); });

  r.smoothing = in_stage("smoothing", [&] {
    return select_parameters(markers, force, r.window, r.provisional_sync.nu,
                             table.with_trunk_com_ratio(r.provisional_sync.alpha4), options.mass, provisional,
                             options.smoothing);
  });
  const auto kin = in_stage("smoothing", [&] { return SmoothedKinematics::fit(markers, r.smoothing.smoothing); });

  in_stage("sync", [&] {
    const SyncProblem problem(kin, force, r.window, table, options.mass, options.sync);
    r.sync = synchronize(problem, options.sync);
    try {
      r.alpha4_lsq = alpha4_least_squares(problem, r.sync.nu);
      if (r.alpha4_lsq.clamped) r.warnings.push_back("least-squares alpha4 clamped to [0, 1]");
    } catch (const DegenerateError& e) {
      r.alpha4_lsq.alpha4 = r.alpha4_lsq.unclamped = std::numeric_limits<double>::quiet_NaN();
      r.warnings.push_back(e.what());
    }
    r.table = table.with_trunk_com_ratio(r.sync.alpha4);
    r.ycom = ycom_three_ways(kin, force, r.window, r.table, options.mass, r.sync.nu);
    return 0;
  });
  r.outcome.alpha4 = r.sync.alpha4;
  r.outcome.nu = r.sync.nu;

  in_stage("invdyn", [&] {
    r.window_signals = sample_window(kin, force, r.window, r.sync.nu, r.table.com_ratios());
    r.loads = compute_loads(r.window_signals, r.table, options.mass);
    r.residual_force = residual_force(kin, force, r.window, r.sync.nu, r.table, options.mass);
    return 0;
  });

  in_stage("estimate", [&] {
    const auto ctx = make_context(r.table, options.mass, r.lengths.length);
    auto ctx_c = ctx;
    if (options.method_c_inertias) ctx_c.reference_inertias = *options.method_c_inertias;
    for (Method m : options.methods) {
      for (int d : options.degrees) {
        r.outcome.results.push_back(
            estimate(m, d, r.window_signals, r.loads.moments, m == Method::C ? ctx_c : ctx));
      }
    }
    r.load_inertias = r.outcome.validity_source()->inertias;
    return 0;
  });
  return r;
}

std::string trial_report_json(const TrialReport& r) {
  Json table = {{"name", r.table.name}, {"segments", Json::array()}};
  static const char* names[kSegments] = {"foot", "shank", "thigh", "hat"};
  for (std::size_t j = 0; j < kSegments; ++j) {
    const auto& s = r.table.segments[j];
    table["segments"].push_back({{"segment", names[j]},
                                 {"com_ratio", number(s.com_ratio)},
                                 {"mass_fraction", number(s.mass_fraction)},
                                 {"gyration_ratio", number(s.gyration_ratio)}});
  }
  Json results = Json::array();
  for (const auto& res : r.outcome.results) results.push_back(result_json(res, r.outcome));
  Json sync = sync_json(r.sync);
  sync["provisional"] = sync_json(r.provisional_sync);
  sync["alpha4_least_squares"] = number(r.alpha4_lsq.unclamped);
  sync["alpha4_least_squares_clamped"] = r.alpha4_lsq.clamped;
  sync["alpha4_table"] = number(r.table_alpha4);
  const double t0 = r.ycom.time.empty() ? std::numeric_limits<double>::quiet_NaN() : r.ycom.time.front();
  const double tf = r.ycom.time.empty() ? std::numeric_limits<double>::quiet_NaN() : r.ycom.time.back();
  Json j = {{"schema", 1},
            {"trial", r.name},
            {"mass", number(r.mass)},
            {"table", table},
            {"window", {{"first", r.window.first}, {"last", r.window.last}, {"t0", number(t0)}, {"tf", number(tf)}}},
            {"segment_lengths", numbers(r.lengths.length)},
            {"segment_length_max_relative_deviation", numbers(r.lengths.max_relative_deviation)},
            {"smoothing", numbers(r.smoothing.smoothing)},
            {"smoothing_objective", number(r.smoothing.objective)},
            {"sync", sync},
            {"results", results},
            {"valid", r.outcome.valid()},
            {"warnings", r.warnings}};
  return dump(j);
}

void write_trial_outputs(const TrialReport& r, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_text_file((dir / "report.json").string(), trial_report_json(r));

  std::vector<double> a, e, nu;
  for (const auto& p : r.sync.curve) {
    a.push_back(p.alpha4);
    e.push_back(p.eta);
    nu.push_back(static_cast<double>(p.nu));
  }
  write_text_file((dir / "eta_curve.csv").string(), format_csv({"alpha4", "eta", "nu"}, {a, e, nu}));
  write_text_file((dir / "ycom.csv").string(),
                  format_csv({"t", "from_force", "synchronized", "unsynchronized"},
                             {r.ycom.time, r.ycom.from_force, r.ycom.synchronized, r.ycom.unsynchronized}));
  const auto& rf = r.residual_force;
  write_text_file((dir / "residual_force.csv").string(),
                  format_csv({"t", "Rx_measured", "Ry_measured", "Rx_kinematic", "Ry_kinematic", "Rx_residual",
                              "Ry_residual"},
                             {rf.time, rf.rx_measured, rf.ry_measured, rf.rx_kinematic, rf.ry_kinematic, rf.rx, rf.ry}));

  const auto& w = r.window_signals;
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{w.time};
  for (const char* comp : {"x", "y"}) {
    for (std::size_t k = 0; k < kLandmarks; ++k) {
      header.push_back(std::string("R_") + comp + std::to_string(k + 1));
      std::vector<double> c;
      for (const auto& f : r.loads.forces) c.push_back(comp[0] == 'x' ? f[k].x : f[k].y);
      cols.push_back(std::move(c));
    }
  }
  const auto torques = joint_torques(w, r.loads.moments, r.load_inertias);
  for (std::size_t k = 0; k < kLandmarks; ++k) {
    header.push_back("C_" + std::to_string(k + 1));
    std::vector<double> c;
    for (const auto& t : torques) c.push_back(t[k]);
    cols.push_back(std::move(c));
  }
  for (int d = 0; d <= 2; ++d) {
    header.push_back("Ctilde" + std::to_string(d));
    cols.push_back(residual_torque(w, r.loads.moments, r.load_inertias, d).residual);
  }
  write_text_file((dir / "joint_loads.csv").string(), format_csv(header, cols));

  std::vector<double> deg, t, x, y;
  const bool has_b = std::any_of(r.outcome.results.begin(), r.outcome.results.end(),
                                 [](const EstimationResult& e) { return e.method == Method::B; });
  if (has_b) {
    const auto ctx = make_context(r.table, r.mass, r.lengths.length);
    for (const auto& res : r.outcome.results) {
      if (res.method != Method::B) continue;
      const auto sys = build_system(w, r.loads.moments, res.degree, Method::B, ctx.reference_inertias);
      for (Eigen::Index i = 0; i < sys.a.rows(); ++i) {
        deg.push_back(res.degree);
        t.push_back(w.time[sys.rows[static_cast<std::size_t>(i)]]);
        x.push_back(sys.a(i, 0));
        y.push_back(sys.b(i));
      }
    }
  }
  write_text_file((dir / "method_b_scatter.csv").string(), format_csv({"degree", "t", "x", "y"}, {deg, t, x, y}));
}

TrialReport run_trial(const RunConfig& config) {
  const auto table = in_stage("model", [&] {
    return config.anthro_path.empty() ? AnthropometricTable::winter() : load_anthropometric_table(config.anthro_path);
  });
  const auto markers = in_stage("ingest", [&] { return ingest_markers(config.markers_path); });
  const auto force = in_stage("ingest", [&] { return ingest_forces(config.forces_path); });
  auto name = fs::path(config.markers_path).filename().string();
  const std::string suffix = ".markers.csv";
  if (name.size() > suffix.size() && name.ends_with(suffix)) name.resize(name.size() - suffix.size());
  auto report = run_trial(name, markers, force, table, config.options);
  if (!config.out_dir.empty()) write_trial_outputs(report, config.out_dir);
  return report;
}

BatchResult run_batch(const std::string& dir, const std::string& anthro_path, const TrialOptions& options,
                      const std::string& out_dir, unsigned threads) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: '" + dir + "'");
  const std::string suffix = ".markers.csv";
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto file = entry.path().filename().string();
    if (entry.is_regular_file() && file.size() > suffix.size() && file.ends_with(suffix)) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw InputError("no '<name>.markers.csv' trial in '" + dir + "'");
  const auto table = anthro_path.empty() ? AnthropometricTable::winter() : load_anthropometric_table(anthro_path);

  struct Slot {
    std::optional<TrialOutcome> outcome;
    std::string error;
  };
  std::vector<Slot> slots(names.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      const auto base = fs::path(dir) / names[i];
      try {
        RunConfig cfg;
        cfg.markers_path = base.string() + ".markers.csv";
        cfg.forces_path = base.string() + ".forces.csv";
        cfg.options = options;
        const auto meta = base.string() + ".meta.cfg";
        if (fs::exists(meta)) cfg.options.mass = KeyValueConfig::load(meta).number_or("mass", options.mass);
        const auto markers = in_stage("ingest", [&] { return ingest_markers(cfg.markers_path); });
        const auto force = in_stage("ingest", [&] { return ingest_forces(cfg.forces_path); });
        const auto report = run_trial(names[i], markers, force, table, cfg.options);
        if (!out_dir.empty()) write_trial_outputs(report, (fs::path(out_dir) / names[i]).string());
        slots[i].outcome = report.outcome;
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(names.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BatchResult out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (slots[i].outcome) {
      out.outcomes.push_back(std::move(*slots[i].outcome));
    } else {
      out.failures.push_back({names[i], slots[i].error});
    }
  }
  try {
    out.summary = aggregate(out.outcomes);
  } catch (const Error& e) {
    out.summary_error = e.what();
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const fs::path o(out_dir);
    write_text_file((o / "summary.json").string(), batch_summary_json(out));
    const auto filter = gyration_filter(out.outcomes);
    std::string alpha = "trial,alpha4\n", r4 = "trial,r4_tilde\n";
    for (std::size_t idx : filter.retained) {
      const auto& t = out.outcomes[idx];
      alpha += t.name + "," + format_double(t.alpha4) + "\n";
      r4 += t.name + "," + format_double(t.validity_source()->r4_tilde) + "\n";
    }
    write_text_file((o / "alpha4_values.csv").string(), alpha);
    write_text_file((o / "r4_tilde_values.csv").string(), r4);
    std::string raw = "trial,method,degree,log10_epsilon,log10_one_minus_r2,valid\n";
    for (const auto& t : out.outcomes) {
      for (const auto& res : t.results) {
        const double l1r2 = 1.0 - res.r2 > 0.0 ? std::log10(1.0 - res.r2) : std::numeric_limits<double>::quiet_NaN();
        raw += t.name + "," + method_letter(res.method) + "," + std::to_string(res.degree) + "," +
               format_double(std::log10(res.epsilon)) + "," + format_double(l1r2) + "," +
               (t.valid() ? "1" : "0") + "\n";
      }
    }
    write_text_file((o / "log10_metrics.csv").string(), raw);
  }
  return out;
}

std::string batch_summary_json(const BatchResult& batch) {
  Json failures = Json::array();
  for (const auto& f : batch.failures) failures.push_back({{"trial", f.name}, {"error", f.error}});
  Json j = {{"schema", 1}, {"trials", batch.outcomes.size() + batch.failures.size()}, {"failed", failures}};
  if (!batch.summary) {
    j["summary_error"] = batch.summary_error;
    return dump(j);
  }
  const auto& s = *batch.summary;
  j["analyzed"] = s.trials;
  j["retained"] = s.retained;
  j["removed"] = s.removed;
  Json cells = Json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"method", std::string(1, method_letter(c.method))},
                     {"degree", c.degree},
                     {"n", c.n},
                     {"median_epsilon", number(c.median_epsilon)},
                     {"log10_epsilon", {{"mean", number(c.mean_log_epsilon)}, {"sd", number(c.sd_log_epsilon)}}},
                     {"log10_one_minus_r2",
                      {{"n", c.r2_samples},
                       {"mean", number(c.mean_log_one_minus_r2)},
                       {"sd", number(c.sd_log_one_minus_r2)}}}});
  }
  j["cells"] = cells;
  Json ratios = Json::array();
  for (const auto& r : s.ratios) {
    ratios.push_back({{"ratio", r.numerator + "/" + r.denominator}, {"value", number(r.value)}});
  }
  j["error_ratios"] = ratios;
  j["alpha4"] = stats_json(s.alpha4);
  j["r4_tilde"] = stats_json(s.r4_tilde);
  return dump(j);
}

}  // namespace bsip
