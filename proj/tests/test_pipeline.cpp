#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bsip/error.hpp"
#include "bsip/io.hpp"
#include "bsip/numeric.hpp"
#include "bsip/pipeline.hpp"
#include "bsip/synth.hpp"

using namespace bsip;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrialOptions options_for(const Scenario& s) {
  TrialOptions o;
  o.mass = s.mass;
  return o;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("bsip_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_trial(const fs::path& dir, const std::string& name, const SyntheticTrial& t) {
  write_text_file((dir / (name + ".markers.csv")).string(), format_markers(t.markers));
  write_text_file((dir / (name + ".forces.csv")).string(), format_forces(t.force));
}

}  // namespace

TEST_CASE("oracle trial end to end") {
  Scenario s = Scenario::squat_jump();
  s.lag = 137;
  auto trial = generate(s);
  auto rep = run_trial("oracle", trial.markers, trial.force, AnthropometricTable::winter(), options_for(s));
  CHECK(rep.outcome.valid());
  CHECK(rep.outcome.nu == 137);
  CHECK(std::abs(rep.outcome.alpha4 - 0.45) < 0.01);
  CHECK(rep.outcome.results.size() == 9);
  CHECK(rep.table.segments[3].com_ratio == rep.outcome.alpha4);
  CHECK(rep.window.last == trial.truth.window.last);
  for (const auto& r : rep.outcome.results) {
    CHECK(r.epsilon >= 0.0);
    CHECK(r.epsilon <= 1.0);
  }

  const auto out = scratch("oracle");
  write_trial_outputs(rep, out.string());
  for (const char* f : {"report.json", "eta_curve.csv", "ycom.csv", "residual_force.csv", "joint_loads.csv",
                        "method_b_scatter.csv"})
    CHECK(fs::exists(out / f));
  auto j = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(j["schema"] == 1);
  CHECK(j["valid"] == true);
  CHECK(j["sync"]["nu"] == 137);
  CHECK(j["sync"]["alpha4_table"].get<double>() == doctest::Approx(0.6260).epsilon(1e-12));
  CHECK(j["results"].size() == 9);
  CHECK(j["results"][0].contains("inertias"));
  CHECK(j["results"][0].contains("r4_tilde"));
  CHECK(j["results"][0].contains("alpha4"));
  const auto loads = slurp(out / "joint_loads.csv");
  CHECK(loads.rfind("t,R_x1,R_x2,R_x3,R_x4,R_x5,R_y1,", 0) == 0);
  CHECK(loads.find("C_5,Ctilde0,Ctilde1,Ctilde2\n") != std::string::npos);
  CHECK(slurp(out / "eta_curve.csv").rfind("alpha4,eta,nu\n", 0) == 0);
  fs::remove_all(out);

  // same inputs, same bytes
  auto again = run_trial("oracle", trial.markers, trial.force, AnthropometricTable::winter(), options_for(s));
  CHECK(trial_report_json(again) == trial_report_json(rep));
}

TEST_CASE("short force record fails in sync") {
  Scenario s = Scenario::squat_jump();
  auto trial = generate(s);
  auto f = trial.force;
  const std::size_t keep = trial.truth.window.first + 100;
  f.time.resize(keep);
  f.rx.resize(keep);
  f.ry.resize(keep);
  f.torque.resize(keep);
  try {
    run_trial("short", trial.markers, f, AnthropometricTable::winter(), options_for(s));
    FAIL("no error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "sync");
  }

  // a given window beyond the record
  auto opt = options_for(s);
  opt.window = PushOffWindow{900, 5000};
  try {
    run_trial("beyond", trial.markers, trial.force, AnthropometricTable::winter(), opt);
    FAIL("no error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "sync");
  }
}

TEST_CASE("method C only") {
  Scenario s = Scenario::squat_jump();
  auto trial = generate(s);
  auto opt = options_for(s);
  opt.methods = {Method::C};
  auto rep = run_trial("c", trial.markers, trial.force, AnthropometricTable::winter(), opt);
  REQUIRE(rep.outcome.results.size() == 3);
  auto ctx = make_context(rep.table, s.mass, rep.lengths.length);
  for (const auto& r : rep.outcome.results) {
    CHECK(r.method == Method::C);
    CHECK(r.inertias == ctx.reference_inertias);
    CHECK(std::isfinite(r.epsilon));
    CHECK(std::isfinite(r.r2));
  }
}

TEST_CASE("batch") {
  const auto in = scratch("batch_in");
  Scenario s = Scenario::squat_jump();
  s.sigma_marker = 0.001;
  s.sigma_force = 2.0;
  for (int k = 0; k < 3; ++k) {
    s.seed = 300 + k;
    write_trial(in, "t" + std::to_string(k), generate(s));
  }
  write_text_file((in / "t2.meta.cfg").string(), "mass = 70\n");
  write_text_file((in / "notes.txt").string(), "ignored\n");

  auto opt = options_for(s);
  opt.mass = 1.0;  // overridden by meta.cfg for t2 only
  const auto out = scratch("batch_out");
  auto wrong_mass = run_batch(in.string(), "", opt, "", 1);
  CHECK(wrong_mass.outcomes.size() + wrong_mass.failures.size() == 3);

  opt.mass = 70.0;
  auto res = run_batch(in.string(), "", opt, out.string(), 2);
  CHECK(res.failures.empty());
  REQUIRE(res.summary.has_value());
  CHECK(res.summary->cells.size() == 9);
  CHECK(res.outcomes[0].name == "t0");
  auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["schema"] == 1);
  CHECK(j["trials"] == 3);
  for (const char* f : {"alpha4_values.csv", "r4_tilde_values.csv", "log10_metrics.csv", "t1/report.json"})
    CHECK(fs::exists(out / f));

  const auto empty = scratch("batch_empty");
  CHECK_THROWS_AS(run_batch(empty.string(), "", opt, "", 1), InputError);
  fs::remove_all(in);
  fs::remove_all(out);
  fs::remove_all(empty);
}

TEST_CASE("median error grows with marker noise") {
  // 20 seeded trials per level, marker noise only
  const std::vector<double> levels{0.0, 0.0005, 0.001, 0.002};
  std::vector<std::vector<double>> medians;
  for (double sm : levels) {
    std::vector<std::vector<double>> eps(6);
    for (int k = 0; k < 20; ++k) {
      Scenario s = Scenario::squat_jump();
      s.lag = 137;
      s.sigma_marker = sm;
      s.seed = 100 + k;
      auto trial = generate(s);
      auto opt = options_for(s);
      opt.methods = {Method::A, Method::B};
      auto rep = run_trial("n", trial.markers, trial.force, AnthropometricTable::winter(), opt);
      for (std::size_t c = 0; c < 6; ++c) eps[c].push_back(rep.outcome.results[c].epsilon);
    }
    std::vector<double> m;
    for (const auto& e : eps) m.push_back(median(e));
    medians.push_back(m);
  }
  for (std::size_t c = 0; c < 6; ++c) {
    CAPTURE(c);
    for (std::size_t l = 1; l < levels.size(); ++l) CHECK(medians[l][c] >= medians[l - 1][c]);
  }
}
