#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spmux/analysis.hpp"
#include "spmux/config.hpp"
#include "spmux/dictionary.hpp"
#include "spmux/harness.hpp"
#include "spmux/model.hpp"
#include "spmux/rng.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 1;
constexpr int kIoFailure = 2;

struct RunArgs {
  std::string plan_path;
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 1;
  std::string out_dir;
  bool has_plan = false, has_seed = false, has_trials = false, has_out = false;
};

int cmd_run(const RunArgs& a) {
  spmux::ExperimentPlan plan =
      a.has_plan ? spmux::plan_from_file(a.plan_path) : spmux::default_desk_plan();
  if (a.has_seed) plan.base.seed = a.seed;
  if (a.has_trials) plan.trials = a.trials;
  if (a.has_out) plan.out_dir = a.out_dir;
  plan.validate();

  const spmux::SweepResult res = spmux::run_plan(plan, a.threads);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

  std::printf("%-16s %10s %12s %12s %10s %8s %8s %7s\n", "algorithm",
              spmux::axis_name(plan.axis), "ser", "fer", "thr", "iters", "canc",
              "flagged");
  for (const auto& st : res.stats)
    std::printf("%-16s %10g %12.5g %12.5g %10.5g %8.2f %8.2f %7d\n",
                spmux::algorithm_name(st.algorithm), st.axis_value, st.ser, st.fer,
                st.throughput, st.mean_iterations, st.mean_cancelled, st.flagged);

  for (const auto& path : spmux::emit_outputs(plan, res))
    std::cout << "wrote " << path << "\n";
  return kOk;
}

int cmd_table1(const std::string& rows_path, std::vector<double> esn0) {
  const std::vector<spmux::TableRow> rows =
      rows_path.empty() ? spmux::builtin_table_rows()
                        : spmux::table_rows_from_file(rows_path);
  if (rows.empty()) throw std::invalid_argument("no table rows");
  for (std::size_t i = 1; i < esn0.size(); ++i)
    if (!(esn0[i] > esn0[i - 1]))
      throw std::invalid_argument("esn0 list must be strictly increasing");
  const auto table = spmux::admissible_actives(rows, esn0);
  std::cout << "largest certified active-user count per operating point\n"
            << spmux::render_actives_table(rows, esn0, table);
  return kOk;
}

int cmd_analyze(const std::string& scenario_path, std::uint64_t seed, bool has_seed,
                const std::string& out_dir, double p_e, int subsample) {
  spmux::SystemConfig cfg = spmux::config_from_file(scenario_path);
  if (has_seed) cfg.seed = seed;
  for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << "\n";

  spmux::RngStream ts(cfg.seed);
  spmux::RngStream pr = ts.fork(spmux::kTagPrecoder);
  const auto P = spmux::generate_precoders(cfg, pr);
  spmux::RngStream cr = ts.fork(spmux::kTagChannel);
  const auto H = std::make_shared<spmux::ChannelSet>(spmux::generate_channels(cfg, cr));
  const spmux::BlockDictionary D(P, H);
  const spmux::FrameInstance frame = spmux::synthesize_frame(cfg, *P, *H, ts);

  spmux::ProfileOptions opt;
  const std::size_t pairs = static_cast<std::size_t>(cfg.N) * (cfg.N - 1) / 2;
  if (subsample > 0)
    opt.subsample_pairs = subsample;
  else if (pairs > opt.pair_cap)
    opt.subsample_pairs = 4096;

  const std::string text =
      spmux::render_report(spmux::analyze_realization(D, cfg, frame, p_e, opt));
  if (out_dir.empty()) {
    std::cout << text;
  } else {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + out_dir);
    const std::string path = (fs::path(out_dir) / "guarantee_report.txt").string();
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write: " + path);
    std::cout << "wrote " << path << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Precoded block-sparse uplink: synthesis, detection, guarantees"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a Monte-Carlo sweep plan");
  auto* o_plan = run->add_option("--plan", ra.plan_path, "Plan file (key = value)");
  auto* o_seed = run->add_option("--seed", ra.seed, "Master seed override");
  auto* o_trials =
      run->add_option("--trials", ra.trials, "Trials per point override")
          ->check(CLI::PositiveNumber);
  run->add_option("--threads", ra.threads, "Worker threads (0 = hardware)");
  auto* o_out = run->add_option("--out-dir", ra.out_dir, "Output directory override");

  std::string rows_path;
  std::vector<double> esn0{0.0, 10.0, 15.0};
  auto* table1 = app.add_subcommand(
      "table1", "Closed-form admissible active-user counts per operating point");
  table1->add_option("--rows", rows_path,
                     "Rows file: 'M N d T s_l mu_B tau' per line (default: built-in)");
  table1->add_option("--esn0", esn0, "Es/N0 grid in dB")->delimiter(',');

  std::string scenario_path, an_out;
  std::uint64_t an_seed = 0;
  double p_e = 0.01;
  int subsample = 0;
  auto* analyze =
      app.add_subcommand("analyze", "Evaluate every closed-form guarantee on one "
                                    "synthesized realization");
  analyze->add_option("--scenario", scenario_path, "Scenario file (key = value)")
      ->required();
  auto* o_an_seed = analyze->add_option("--seed", an_seed, "Seed override");
  analyze->add_option("--out-dir", an_out, "Write the report here instead of stdout");
  analyze->add_option("--pe", p_e, "Residual error probability for the rate check");
  analyze->add_option("--subsample-pairs", subsample,
                      "Estimate pair coherence from this many sampled pairs");

  auto* selftest = app.add_subcommand("selftest", "Tiny-instance sanity suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  ra.has_plan = o_plan->count() > 0;
  ra.has_seed = o_seed->count() > 0;
  ra.has_trials = o_trials->count() > 0;
  ra.has_out = o_out->count() > 0;

  try {
    if (run->parsed()) return cmd_run(ra);
    if (table1->parsed()) return cmd_table1(rows_path, esn0);
    if (analyze->parsed())
      return cmd_analyze(scenario_path, an_seed, o_an_seed->count() > 0, an_out, p_e,
                         subsample);
    if (selftest->parsed()) return spmux::selftest(std::cout) == 0 ? kOk : kBadInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
