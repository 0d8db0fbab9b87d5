// bsip: body segment inertial parameters from squat-jump recordings.
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsip/config.hpp"
#include "bsip/error.hpp"
#include "bsip/io.hpp"
#include "bsip/pipeline.hpp"
#include "bsip/synth.hpp"

namespace fs = std::filesystem;
using namespace bsip;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Selection {
  std::string methods = "A,B,C";
  std::string degrees = "0,1,2";
  std::string method_c;
};

void add_selection(CLI::App* cmd, Selection& sel) {
  cmd->add_option("--methods", sel.methods, "Comma-separated methods among A,B,C")->capture_default_str();
  cmd->add_option("--degrees", sel.degrees, "Comma-separated degrees among 0,1,2")->capture_default_str();
  cmd->add_option("--method-c-inertias", sel.method_c, "I1,I2,I3,I4 (kg m^2) used by method C instead of the table");
}

void apply_selection(const Selection& sel, TrialOptions& opt) {
  opt.methods.clear();
  for (const auto& m : split_list(sel.methods)) opt.methods.push_back(parse_method(m));
  opt.degrees.clear();
  for (const auto& d : split_list(sel.degrees)) {
    if (d != "0" && d != "1" && d != "2") throw InputError("degree must be 0, 1 or 2, got '" + d + "'");
    opt.degrees.push_back(d[0] - '0');
  }
  if (!sel.method_c.empty()) {
    const auto v = split_list(sel.method_c);
    if (v.size() != kSegments) throw InputError("--method-c-inertias needs four values");
    SegmentValues in{};
    for (std::size_t j = 0; j < kSegments; ++j) in[j] = parse_double(v[j]);
    opt.method_c_inertias = in;
  }
}

std::string truth_json(const SyntheticTruth& t) {
  nlohmann::ordered_json j;
  const auto& s = t.scenario;
  j["schema"] = 1;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["mass"] = s.mass;
  j["alpha4"] = t.alpha4;
  j["lag"] = t.lag;
  j["inertias"] = std::vector<double>(t.inertias.begin(), t.inertias.end());
  j["lengths"] = std::vector<double>(s.lengths.begin(), s.lengths.end());
  j["window"] = {{"first", t.window.first}, {"last", t.window.last}};
  j["sigma_marker"] = s.sigma_marker;
  j["sigma_force"] = s.sigma_force;
  return j.dump(2) + "\n";
}

void print_report(const TrialReport& r) {
  std::cout << "trial " << r.name << ": nu = " << r.sync.nu << ", alpha4 = " << format_double(r.sync.alpha4)
            << ", eta = " << format_double(r.sync.eta) << "\n";
  for (const auto& res : r.outcome.results) {
    std::cout << "  " << cell_label(res.method, res.degree) << "  I = [";
    for (std::size_t j = 0; j < kSegments; ++j) std::cout << (j ? ", " : "") << res.inertias[j];
    std::cout << "]  eps = " << res.epsilon << "  R2 = " << res.r2 << "  r4~ = " << res.r4_tilde
              << (res.valid ? "" : "  (rejected)") << "\n";
  }
  for (const auto& w : r.warnings) std::cout << "  warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar inverse dynamics: trunk COM ratio and segment inertias from squat jumps"};
  app.require_subcommand(1);

  RunConfig run;
  Selection run_sel;
  auto* run_cmd = app.add_subcommand("run", "Process one trial");
  run_cmd->add_option("--markers", run.markers_path, "Marker CSV (t,x1,y1,...,x5,y5)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--forces", run.forces_path, "Force CSV (t,Rx,Ry,C)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--anthro", run.anthro_path, "Anthropometric table config (default: Winter)")->check(CLI::ExistingFile);
  run_cmd->add_option("--mass", run.options.mass, "Total body mass, kg")->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory")->required();
  add_selection(run_cmd, run_sel);

  std::string batch_dir, batch_anthro, batch_out;
  TrialOptions batch_opt;
  Selection batch_sel;
  unsigned threads = 0;
  auto* batch_cmd = app.add_subcommand("batch", "Process every trial pair in a directory");
  batch_cmd->add_option("--dir", batch_dir, "Directory of <name>.markers.csv / <name>.forces.csv pairs")
      ->required()
      ->check(CLI::ExistingDirectory);
  batch_cmd->add_option("--anthro", batch_anthro, "Anthropometric table config (default: Winter)")->check(CLI::ExistingFile);
  batch_cmd->add_option("--mass", batch_opt.mass, "Total body mass, kg (overridden by <name>.meta.cfg)");
  batch_cmd->add_option("--out", batch_out, "Output directory")->required();
  batch_cmd->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");
  add_selection(batch_cmd, batch_sel);

  std::string scenario_path, synth_out;
  std::optional<std::uint64_t> seed;
  std::size_t count = 1;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic trials with known parameters");
  synth_cmd->add_option("--scenario", scenario_path, "Scenario config (default: built-in squat jump)")->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Noise seed (overrides the scenario)");
  synth_cmd->add_option("--count", count, "Number of trials, seeds seed, seed+1, ...")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      apply_selection(run_sel, run.options);
      const auto report = bsip::run_trial(run);
      print_report(report);
      return 0;
    }
    if (*batch_cmd) {
      apply_selection(batch_sel, batch_opt);
      const auto result = run_batch(batch_dir, batch_anthro, batch_opt, batch_out, threads);
      for (const auto& f : result.failures) std::cerr << "trial " << f.name << " failed: " << f.error << "\n";
      if (result.summary) {
        std::cout << result.outcomes.size() << " trials processed, " << result.summary->retained << " retained, "
                  << result.summary->removed << " removed by the gyration filter\n";
        for (const auto& c : result.summary->cells) {
          std::cout << "  " << cell_label(c.method, c.degree) << "  log10 eps = " << c.mean_log_epsilon << " +- "
                    << c.sd_log_epsilon << "\n";
        }
      } else {
        std::cerr << "no summary: " << result.summary_error << "\n";
      }
      return result.failures.empty() && result.summary ? 0 : 3;
    }
    if (*synth_cmd) {
      auto scenario = scenario_path.empty() ? Scenario::squat_jump() : load_scenario(scenario_path);
      if (seed) scenario.seed = *seed;
      fs::create_directories(synth_out);
      const auto base_seed = scenario.seed;
      const auto base_name = scenario.name;
      for (std::size_t k = 0; k < count; ++k) {
        scenario.seed = base_seed + k;
        scenario.name = count == 1 ? base_name : base_name + "_" + std::to_string(scenario.seed);
        const auto trial = generate(scenario);
        const auto stem = (fs::path(synth_out) / scenario.name).string();
        write_text_file(stem + ".markers.csv", format_markers(trial.markers));
        write_text_file(stem + ".forces.csv", format_forces(trial.force));
        write_text_file(stem + ".meta.cfg", "mass = " + format_double(scenario.mass) + "\n");
        write_text_file(stem + ".truth.json", truth_json(trial.truth));
        std::cout << "wrote " << stem << ".{markers,forces}.csv\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
