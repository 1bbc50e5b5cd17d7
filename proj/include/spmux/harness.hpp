#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spmux/analysis.hpp"
#include "spmux/config.hpp"
#include "spmux/model.hpp"
#include "spmux/recovery.hpp"

namespace spmux {

enum class Axis { esn0_db, N_a, M, T, N };

const char* axis_name(Axis a);
Axis parse_axis(const std::string& s);

// One Monte-Carlo sweep: a base scenario, one swept parameter, a set of
// detectors, and a trial budget. Channels, support, payload, and noise are
// redrawn every trial; precoders are fixed per plan (each user owns one)
// unless redraw_precoders is set.
struct ExperimentPlan {
  SystemConfig base;
  Axis axis = Axis::esn0_db;
  std::vector<double> values;  // strictly increasing; may be empty
  std::vector<Algorithm> algorithms{Algorithm::bomp, Algorithm::icbomp};
  int trials = 100;
  bool redraw_precoders = false;
  bool with_analysis = false;
  std::string out_dir = ".";
  std::string name = "sweep";

  // Throws std::invalid_argument on a malformed plan; returns the base
  // config's soft warnings (evaluated at every sweep value).
  std::vector<std::string> validate() const;
};

// Key-value plan text: every SystemConfig key plus axis, values, algorithms,
// trials, redraw_precoders, with_analysis, out_dir, name. Unknown keys throw.
ExperimentPlan plan_from_keys(const std::map<std::string, std::string>& kv);
ExperimentPlan plan_from_file(const std::string& path);

// The swept parameter folded into a concrete per-point config.
SystemConfig apply_axis(const SystemConfig& base, Axis axis, double value);

// Substream seed for one trial; doubling the trial count or reordering the
// sweep never changes an existing trial's draw.
std::uint64_t trial_seed(std::uint64_t master, double axis_value, Algorithm algo,
                         int trial);

struct ErrorCounts {
  long long symbol_errors = 0;  // out of N_a * d
  long long bit_errors = 0;
  int frame_errors = 0;  // out of N_a
};

// Counting rules: an active user absent from the identified set contributes
// d symbol errors and one frame error; an identified user's message is
// demodulated and a frame error is claimed iff its bit errors exceed what
// the outer code corrects (t_c; "never" sentinels apply).
ErrorCounts count_errors(const RecoveryResult& result, const FrameInstance& truth,
                         const SystemConfig& cfg);

struct PointStats {
  Algorithm algorithm = Algorithm::bomp;
  double axis_value = 0.0;
  double ser = 0.0;
  double fer = 0.0;
  double throughput = 0.0;  // always the closed-form formula at the fer column
  double mean_iterations = 0.0;
  double mean_cancelled = 0.0;
  int trials = 0;
  int flagged = 0;  // trials whose solver raised a numerical flag
  double ser_ci_half_width = 0.0;  // 95% normal approximation
  double fer_ci_half_width = 0.0;
};

// All algorithms at one sweep value. threads <= 0 picks the hardware count.
std::vector<PointStats> run_point(const ExperimentPlan& plan, double axis_value,
                                  int threads = 1);

struct SweepResult {
  std::vector<PointStats> stats;          // algorithm-major, values inner
  std::vector<std::string> reports;       // one rendered report per value when
                                          // analysis is enabled
  std::vector<std::string> warnings;
};

SweepResult run_plan(const ExperimentPlan& plan, int threads = 1);

// One row per (algorithm, axis value), every PointStats field, doubles at
// full round-trip precision. Reading back reproduces the numeric fields.
void write_csv(std::ostream& os, const ExperimentPlan& plan,
               std::span<const PointStats> stats);
std::vector<PointStats> read_csv(std::istream& is);

// Python script that plots SER and FER curves (log y) from the CSV.
void write_plot_script(std::ostream& os, const std::string& csv_name,
                       const std::string& axis_label);

// Writes <name>.csv, <name>_plot.py, and per-value report files into
// plan.out_dir. Returns the paths written. Throws std::runtime_error on I/O
// failure.
std::vector<std::string> emit_outputs(const ExperimentPlan& plan,
                                      const SweepResult& result);

// Admissible-load table: closed-form profile rows (measured or quoted) and
// the largest active count whose ranking guarantee still holds.
struct TableRow {
  int M = 0, N = 0, d = 0, T = 0;
  double s_l = 0.0;
  double mu_B = 0.0;
  double tau = 0.0;
};

std::vector<TableRow> builtin_table_rows();

// result[r][c] = largest admissible N_a for rows[r] at esn0_db[c].
std::vector<std::vector<int>> admissible_actives(std::span<const TableRow> rows,
                                                 std::span<const double> esn0_db);
std::string render_actives_table(std::span<const TableRow> rows,
                                 std::span<const double> esn0_db,
                                 const std::vector<std::vector<int>>& table);

// Parses whitespace-separated "M N d T s_l mu_B tau" lines; '#' comments.
std::vector<TableRow> table_rows_from_file(const std::string& path);

// Deterministic in-process sanity suite over tiny seeded instances (greedy
// detector vs exhaustive search, block solver vs dense orthogonal solver,
// exact noiseless reconstruction). Prints one line per check; returns the
// number of failures.
int selftest(std::ostream& os);

// The checked-in default sweep: desk-scale dimensions, four detectors,
// Es/N0 0..12 dB.
ExperimentPlan default_desk_plan();

}  // namespace spmux
