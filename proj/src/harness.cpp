#include "spmux/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spmux/densela.hpp"
#include "spmux/dictionary.hpp"
#include "spmux/kernels.hpp"
#include "spmux/lsq.hpp"
#include "spmux/rng.hpp"

namespace spmux {

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::esn0_db: return "esn0_db";
    case Axis::N_a: return "N_a";
    case Axis::M: return "M";
    case Axis::T: return "T";
    case Axis::N: return "N";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "esn0_db") return Axis::esn0_db;
  if (s == "N_a") return Axis::N_a;
  if (s == "M") return Axis::M;
  if (s == "T") return Axis::T;
  if (s == "N") return Axis::N;
  throw std::invalid_argument("unknown sweep axis: " + s);
}

namespace {

double parse_double(const std::string& what, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
    throw std::invalid_argument(what + ": bad number '" + v + "'");
  return x;
}

long long parse_int(const std::string& what, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument(what + ": bad integer '" + v + "'");
  return x;
}

bool parse_bool(const std::string& what, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(what + ": bad boolean '" + v + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
  }
  return out;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<std::string> ExperimentPlan::validate() const {
  if (trials < 1) throw std::invalid_argument("plan: trials must be >= 1");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw std::invalid_argument("plan: sweep values must be strictly increasing");
  if (algorithms.empty()) throw std::invalid_argument("plan: no algorithms");
  for (std::size_t i = 0; i < algorithms.size(); ++i)
    for (std::size_t j = i + 1; j < algorithms.size(); ++j)
      if (algorithms[i] == algorithms[j])
        throw std::invalid_argument("plan: duplicate algorithm");
  if (name.empty() || name.find('/') != std::string::npos)
    throw std::invalid_argument("plan: name must be a bare file stem");

  std::vector<std::string> warnings;
  if (values.empty()) warnings.push_back("plan: empty sweep, outputs will be header-only");
  for (double v : values) {
    const SystemConfig cfg = apply_axis(base, axis, v);
    for (auto& w : cfg.validate())
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end())
        warnings.push_back(w);
  }
  if (values.empty())
    for (auto& w : base.validate()) warnings.push_back(w);
  return warnings;
}

SystemConfig apply_axis(const SystemConfig& base, Axis axis, double value) {
  SystemConfig cfg = base;
  if (axis == Axis::esn0_db) {
    cfg.rho0 = esn0_db_to_rho0(value);
    return cfg;
  }
  const double r = std::nearbyint(value);
  if (std::fabs(value - r) > 1e-9 || r < 1 || r > 1e9)
    throw std::invalid_argument(std::string("plan: axis ") + axis_name(axis) +
                                " needs positive integer values");
  const int iv = static_cast<int>(r);
  switch (axis) {
    case Axis::N_a: cfg.N_a = iv; break;
    case Axis::M: cfg.M = iv; break;
    case Axis::T: cfg.T = iv; break;
    case Axis::N: cfg.N = iv; break;
    case Axis::esn0_db: break;
  }
  return cfg;
}

ExperimentPlan plan_from_keys(const std::map<std::string, std::string>& kv) {
  static const std::set<std::string> known = {
      // scenario keys
      "M", "N", "N_a", "d", "T", "K", "msg_len_min", "msg_len_max", "rho0",
      "esn0_db", "precoding_orthogonal", "modulation", "t_c", "seed",
      "epsilon_stop",
      // sweep keys
      "axis", "values", "algorithms", "trials", "redraw_precoders",
      "with_analysis", "out_dir", "name"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw std::invalid_argument("plan: unknown key '" + k + "'");

  ExperimentPlan p;
  apply_config_keys(p.base, kv);
  if (auto it = kv.find("axis"); it != kv.end()) p.axis = parse_axis(it->second);
  if (auto it = kv.find("values"); it != kv.end()) {
    p.values.clear();
    for (const auto& tok : split_list(it->second))
      p.values.push_back(parse_double("values", tok));
  }
  if (auto it = kv.find("algorithms"); it != kv.end()) {
    p.algorithms.clear();
    for (const auto& tok : split_list(it->second))
      p.algorithms.push_back(parse_algorithm(tok));
  }
  if (auto it = kv.find("trials"); it != kv.end())
    p.trials = static_cast<int>(parse_int("trials", it->second));
  if (auto it = kv.find("redraw_precoders"); it != kv.end())
    p.redraw_precoders = parse_bool("redraw_precoders", it->second);
  if (auto it = kv.find("with_analysis"); it != kv.end())
    p.with_analysis = parse_bool("with_analysis", it->second);
  if (auto it = kv.find("out_dir"); it != kv.end()) p.out_dir = it->second;
  if (auto it = kv.find("name"); it != kv.end()) p.name = it->second;
  p.validate();
  return p;
}

ExperimentPlan plan_from_file(const std::string& path) {
  return plan_from_keys(load_kv_file(path));
}

std::uint64_t trial_seed(std::uint64_t master, double axis_value, Algorithm algo,
                         int trial) {
  return RngStream::substream(master, {std::bit_cast<std::uint64_t>(axis_value),
                                       static_cast<std::uint64_t>(static_cast<int>(algo)),
                                       static_cast<std::uint64_t>(trial)})
      .seed();
}

ErrorCounts count_errors(const RecoveryResult& result, const FrameInstance& truth,
                         const SystemConfig& cfg) {
  ErrorCounts out;
  const int bps = bits_per_symbol(cfg.modulation);
  // Frame rule: errors beyond what the outer code corrects. t_c = -1 (no
  // code) makes any bit error fatal; the always-certify sentinel is larger
  // than any message, so it never claims a frame error.
  const long long correctable = std::max(cfg.t_c, 0);
  const std::vector<int> ident = result.identified();

  for (std::size_t i = 0; i < truth.support.size(); ++i) {
    const int user = truth.support[i];
    const int len = truth.msg_len[i];
    if (!std::binary_search(ident.begin(), ident.end(), user)) {
      out.symbol_errors += cfg.d;
      out.bit_errors += static_cast<long long>(truth.bits[i].size());
      out.frame_errors += 1;
      continue;
    }
    const std::span<const cplx> est(result.estimates.data() +
                                        static_cast<std::size_t>(user) * cfg.d,
                                    static_cast<std::size_t>(len));
    const auto bits_hat = demodulate(est, cfg.modulation);
    long long user_bits = 0;
    for (int s = 0; s < len; ++s) {
      int mism = 0;
      for (int b = 0; b < bps; ++b)
        if (bits_hat[static_cast<std::size_t>(s) * bps + b] !=
            truth.bits[i][static_cast<std::size_t>(s) * bps + b])
          ++mism;
      user_bits += mism;
      if (mism) out.symbol_errors += 1;
    }
    out.bit_errors += user_bits;
    if (user_bits > correctable) out.frame_errors += 1;
  }
  return out;
}

namespace {

// Deterministic regardless of how the values were produced: fixed-shape
// reduction tree over the trial-index order.
double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = x.size() / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

struct TrialOutcome {
  double ser = 0.0, fer = 0.0, iters = 0.0, cancelled = 0.0;
  bool flagged = false;
};

struct Realization {
  std::shared_ptr<const PrecoderSet> P;
  std::shared_ptr<const ChannelSet> H;
  FrameInstance frame;
};

Realization make_realization(const SystemConfig& cfg,
                             const std::shared_ptr<const PrecoderSet>& plan_P,
                             bool redraw, std::uint64_t seed) {
  Realization r;
  RngStream ts(seed);
  r.P = plan_P;
  if (redraw || !r.P) {
    RngStream pr = ts.fork(kTagPrecoder);
    r.P = generate_precoders(cfg, pr);
  }
  RngStream cr = ts.fork(kTagChannel);
  r.H = std::make_shared<ChannelSet>(generate_channels(cfg, cr));
  r.frame = synthesize_frame(cfg, *r.P, *r.H, ts);
  return r;
}

TrialOutcome run_trial(const SystemConfig& point_cfg,
                       const std::shared_ptr<const PrecoderSet>& plan_P, bool redraw,
                       Algorithm algo, std::uint64_t seed) {
  SystemConfig cfg = point_cfg;
  cfg.seed = seed;
  Realization r = make_realization(cfg, plan_P, redraw, seed);
  BlockDictionary D(r.P, r.H);
  const RecoveryResult res = run_algorithm(algo, D, cfg, r.frame);
  const ErrorCounts ec = count_errors(res, r.frame, cfg);

  TrialOutcome o;
  const double n_act = static_cast<double>(r.frame.support.size());
  o.ser = n_act > 0 ? static_cast<double>(ec.symbol_errors) / (n_act * cfg.d) : 0.0;
  o.fer = n_act > 0 ? static_cast<double>(ec.frame_errors) / n_act : 0.0;
  o.iters = res.iterations;
  o.cancelled = static_cast<double>(res.cancelled.size());
  o.flagged = res.used_fallback || res.rank_deficient || res.factor_failed;
  return o;
}

std::shared_ptr<const PrecoderSet> plan_precoders(const ExperimentPlan& plan,
                                                  const SystemConfig& point_cfg) {
  if (plan.redraw_precoders) return nullptr;
  RngStream pr = RngStream(plan.base.seed).fork(kTagPrecoder);
  return generate_precoders(point_cfg, pr);
}

PointStats aggregate(std::span<const TrialOutcome> t, Algorithm algo, double value,
                     const SystemConfig& cfg) {
  const int n = static_cast<int>(t.size());
  std::vector<double> ser(n), fer(n), it(n), ca(n);
  int flagged = 0;
  for (int i = 0; i < n; ++i) {
    ser[i] = t[i].ser;
    fer[i] = t[i].fer;
    it[i] = t[i].iters;
    ca[i] = t[i].cancelled;
    flagged += t[i].flagged ? 1 : 0;
  }
  PointStats st;
  st.algorithm = algo;
  st.axis_value = value;
  st.trials = n;
  st.flagged = flagged;
  st.ser = pairwise_sum(ser) / n;
  st.fer = pairwise_sum(fer) / n;
  st.mean_iterations = pairwise_sum(it) / n;
  st.mean_cancelled = pairwise_sum(ca) / n;
  st.throughput = throughput(st.fer, cfg);

  constexpr double kZ95 = 1.959963984540054;
  auto half_width = [&](std::span<const double> x, double mean) {
    if (n < 2) return 0.0;
    std::vector<double> dev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      dev[i] = (x[i] - mean) * (x[i] - mean);
    const double var = pairwise_sum(dev) / (n - 1);
    return kZ95 * std::sqrt(var / n);
  };
  st.ser_ci_half_width = half_width(ser, st.ser);
  st.fer_ci_half_width = half_width(fer, st.fer);
  return st;
}

}  // namespace

std::vector<PointStats> run_point(const ExperimentPlan& plan, double axis_value,
                                  int threads) {
  const SystemConfig cfg = apply_axis(plan.base, plan.axis, axis_value);
  const std::shared_ptr<const PrecoderSet> P = plan_precoders(plan, cfg);

  const int n_alg = static_cast<int>(plan.algorithms.size());
  const int jobs = n_alg * plan.trials;
  int workers = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency())
                             : threads;
  workers = std::clamp(workers, 1, jobs);

  std::vector<TrialOutcome> out(static_cast<std::size_t>(jobs));
  auto job = [&](int idx) {
    const Algorithm algo = plan.algorithms[idx / plan.trials];
    const int trial = idx % plan.trials;
    out[idx] = run_trial(cfg, P, plan.redraw_precoders, algo,
                         trial_seed(plan.base.seed, axis_value, algo, trial));
  };

  if (workers == 1) {
    for (int idx = 0; idx < jobs; ++idx) job(idx);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int idx = next.fetch_add(1); idx < jobs; idx = next.fetch_add(1)) job(idx);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<PointStats> stats;
  stats.reserve(n_alg);
  for (int a = 0; a < n_alg; ++a)
    stats.push_back(aggregate({out.data() + static_cast<std::size_t>(a) * plan.trials,
                               static_cast<std::size_t>(plan.trials)},
                              plan.algorithms[a], axis_value, cfg));
  return stats;
}

SweepResult run_plan(const ExperimentPlan& plan, int threads) {
  SweepResult res;
  res.warnings = plan.validate();

  // value-major collection, algorithm-major presentation
  std::vector<std::vector<PointStats>> by_value;
  by_value.reserve(plan.values.size());
  for (double v : plan.values) by_value.push_back(run_point(plan, v, threads));
  for (std::size_t a = 0; a < plan.algorithms.size(); ++a)
    for (auto& pts : by_value) res.stats.push_back(pts[a]);

  if (plan.with_analysis) {
    for (double v : plan.values) {
      SystemConfig cfg = apply_axis(plan.base, plan.axis, v);
      const auto P = plan_precoders(plan, cfg);
      const std::uint64_t seed = trial_seed(plan.base.seed, v, plan.algorithms[0], 0);
      cfg.seed = seed;
      const Realization r = make_realization(cfg, P, plan.redraw_precoders, seed);
      BlockDictionary D(r.P, r.H);
      ProfileOptions opt;
      const std::size_t pairs =
          static_cast<std::size_t>(cfg.N) * (cfg.N - 1) / 2;
      if (pairs > opt.pair_cap) opt.subsample_pairs = 4096;
      res.reports.push_back(render_report(analyze_realization(D, cfg, r.frame, 0.01, opt)));
    }
  }
  return res;
}

void write_csv(std::ostream& os, const ExperimentPlan& plan,
               std::span<const PointStats> stats) {
  os << "algorithm,axis,value,trials,flagged,ser,ser_ci,fer,fer_ci,"
        "throughput,mean_iterations,mean_cancelled\n";
  for (const auto& st : stats) {
    os << algorithm_name(st.algorithm) << ',' << axis_name(plan.axis) << ','
       << fmt17(st.axis_value) << ',' << st.trials << ',' << st.flagged << ','
       << fmt17(st.ser) << ',' << fmt17(st.ser_ci_half_width) << ','
       << fmt17(st.fer) << ',' << fmt17(st.fer_ci_half_width) << ','
       << fmt17(st.throughput) << ',' << fmt17(st.mean_iterations) << ','
       << fmt17(st.mean_cancelled) << '\n';
  }
}

std::vector<PointStats> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("csv: empty input");
  const std::vector<std::string> header = split_list(line);
  auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::invalid_argument(std::string("csv: missing column ") + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_alg = col("algorithm"), c_val = col("value"),
                    c_tr = col("trials"), c_fl = col("flagged"), c_ser = col("ser"),
                    c_serci = col("ser_ci"), c_fer = col("fer"),
                    c_ferci = col("fer_ci"), c_tp = col("throughput"),
                    c_it = col("mean_iterations"), c_ca = col("mean_cancelled");

  std::vector<PointStats> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_list(line);
    if (f.size() != header.size()) throw std::invalid_argument("csv: ragged row");
    PointStats st;
    st.algorithm = parse_algorithm(f[c_alg]);
    st.axis_value = parse_double("value", f[c_val]);
    st.trials = static_cast<int>(parse_int("trials", f[c_tr]));
    st.flagged = static_cast<int>(parse_int("flagged", f[c_fl]));
    st.ser = parse_double("ser", f[c_ser]);
    st.ser_ci_half_width = parse_double("ser_ci", f[c_serci]);
    st.fer = parse_double("fer", f[c_fer]);
    st.fer_ci_half_width = parse_double("fer_ci", f[c_ferci]);
    st.throughput = parse_double("throughput", f[c_tp]);
    st.mean_iterations = parse_double("mean_iterations", f[c_it]);
    st.mean_cancelled = parse_double("mean_cancelled", f[c_ca]);
    out.push_back(st);
  }
  return out;
}

void write_plot_script(std::ostream& os, const std::string& csv_name,
                       const std::string& axis_label) {
  os << "#!/usr/bin/env python3\n"
        "\"\"\"Plot SER and FER curves from the companion CSV.\"\"\"\n"
        "import csv\n"
        "import os\n"
        "\n"
        "import matplotlib\n"
        "matplotlib.use(\"Agg\")\n"
        "import matplotlib.pyplot as plt\n"
        "\n"
        "here = os.path.dirname(os.path.abspath(__file__))\n"
        "csv_path = os.path.join(here, \""
     << csv_name
     << "\")\n"
        "with open(csv_path, newline=\"\") as f:\n"
        "    rows = list(csv.DictReader(f))\n"
        "\n"
        "algos = []\n"
        "for r in rows:\n"
        "    if r[\"algorithm\"] not in algos:\n"
        "        algos.append(r[\"algorithm\"])\n"
        "\n"
        "fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))\n"
        "for metric, ax in zip((\"ser\", \"fer\"), axes):\n"
        "    for a in algos:\n"
        "        xs = [float(r[\"value\"]) for r in rows if r[\"algorithm\"] == a]\n"
        "        ys = [max(float(r[metric]), 1e-12) for r in rows if r[\"algorithm\"] == a]\n"
        "        ax.semilogy(xs, ys, marker=\"o\", label=a)\n"
        "    ax.set_xlabel(\""
     << axis_label
     << "\")\n"
        "    ax.set_ylabel(metric.upper())\n"
        "    ax.grid(True, which=\"both\", alpha=0.3)\n"
        "    ax.legend()\n"
        "fig.tight_layout()\n"
        "out = os.path.join(here, \""
     << csv_name.substr(0, csv_name.rfind('.'))
     << ".png\")\n"
        "fig.savefig(out, dpi=150)\n"
        "print(\"wrote\", out)\n";
}

std::vector<std::string> emit_outputs(const ExperimentPlan& plan,
                                      const SweepResult& result) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(plan.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output dir: " + plan.out_dir);

  std::vector<std::string> written;
  auto open = [&](const std::string& leaf) {
    const std::string path = (fs::path(plan.out_dir) / leaf).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write: " + path);
    written.push_back(path);
    return f;
  };

  {
    auto f = open(plan.name + ".csv");
    write_csv(f, plan, result.stats);
    if (!f) throw std::runtime_error("write failed: " + written.back());
  }
  {
    auto f = open(plan.name + "_plot.py");
    const std::string label = plan.axis == Axis::esn0_db
                                  ? std::string("Es/N0 [dB]")
                                  : std::string(axis_name(plan.axis));
    write_plot_script(f, plan.name + ".csv", label);
    if (!f) throw std::runtime_error("write failed: " + written.back());
  }
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    auto f = open(plan.name + "_report_" + fmt_short(plan.values[i]) + ".txt");
    f << result.reports[i];
    if (!f) throw std::runtime_error("write failed: " + written.back());
  }
  return written;
}

std::vector<TableRow> builtin_table_rows() {
  // Rows 7-9 quote the same decision threshold as rows 1-6; rescaled here to
  // the shorter frame so the threshold tracks sqrt(d) like the energies do.
  return {
      {8, 80, 200, 1000, 14.14, 0.0035, 15.00},
      {50, 500, 200, 1000, 14.14, 0.0019, 15.00},
      {100, 1000, 200, 1000, 14.14, 0.0014, 15.00},
      {8, 80, 200, 1000, 14.14, 0.0035, 14.20},
      {50, 500, 200, 1000, 14.14, 0.0019, 14.20},
      {100, 1000, 200, 1000, 14.14, 0.0014, 14.20},
      {8, 80, 100, 500, 10.00, 0.0066, 10.6066},
      {50, 500, 100, 500, 10.00, 0.0037, 10.6066},
      {100, 1000, 100, 500, 10.00, 0.0030, 10.6066},
  };
}

std::vector<std::vector<int>> admissible_actives(std::span<const TableRow> rows,
                                                 std::span<const double> esn0_db) {
  std::vector<std::vector<int>> table;
  table.reserve(rows.size());
  for (const auto& row : rows) {
    CoherenceProfile p;
    p.mu_B = row.mu_B;
    p.nu = 0.0;
    p.s_l = p.s_u = row.s_l;
    p.tau = row.tau;
    std::vector<int> line;
    for (double db : esn0_db) {
      SystemConfig cfg;
      cfg.M = row.M;
      cfg.N = row.N;
      cfg.d = row.d;
      cfg.T = row.T;
      cfg.rho0 = esn0_db_to_rho0(db);
      int best = 0;
      // The bound's right side grows with the load, so the first failure is
      // final. The fit depth matches the load being certified.
      for (int na = 1; na <= row.N; ++na) {
        cfg.N_a = na;
        cfg.K = na;
        if (!support_condition(p, cfg, na).holds) break;
        best = na;
      }
      line.push_back(best);
    }
    table.push_back(std::move(line));
  }
  return table;
}

std::string render_actives_table(std::span<const TableRow> rows,
                                 std::span<const double> esn0_db,
                                 const std::vector<std::vector<int>>& table) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%5s %6s %5s %6s %7s %8s %9s |", "M", "N", "d", "T",
                "s_l", "mu_B", "tau");
  os << buf;
  for (double db : esn0_db) {
    std::snprintf(buf, sizeof buf, " %6s", (fmt_short(db) + "dB").c_str());
    os << buf;
  }
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::snprintf(buf, sizeof buf, "%5d %6d %5d %6d %7.2f %8.4f %9.4f |", row.M, row.N,
                  row.d, row.T, row.s_l, row.mu_B, row.tau);
    os << buf;
    for (std::size_t c = 0; c < esn0_db.size(); ++c) {
      std::snprintf(buf, sizeof buf, " %6d", table[r][c]);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<TableRow> table_rows_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read rows file: " + path);
  std::vector<TableRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ss(line);
    TableRow r;
    if (!(ss >> r.M)) continue;  // blank line
    if (!(ss >> r.N >> r.d >> r.T >> r.s_l >> r.mu_B >> r.tau))
      throw std::invalid_argument("rows file line " + std::to_string(lineno) +
                                  ": expected M N d T s_l mu_B tau");
    std::string extra;
    if (ss >> extra)
      throw std::invalid_argument("rows file line " + std::to_string(lineno) +
                                  ": trailing junk");
    rows.push_back(r);
  }
  return rows;
}

int selftest(std::ostream& os) {
  os << "kernel backend: " << kernels::active().name << "\n";
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    os << (ok ? "ok   - " : "FAIL - ") << what << "\n";
    if (!ok) ++failures;
  };

  SystemConfig cfg;
  cfg.M = 2;
  cfg.N = 6;
  cfg.N_a = 2;
  cfg.d = 2;
  cfg.T = 8;
  cfg.K = 2;
  cfg.rho0 = 1.0;
  cfg.t_c = -1;

  const double gain = std::sqrt(cfg.rho0 * cfg.M);
  int support_mismatch = 0, ls_mismatch = 0, exact_fail = 0, exhaustive_off = 0;
  constexpr int kInstances = 100;

  for (int inst = 0; inst < kInstances; ++inst) {
    cfg.seed = 0xA11CE + static_cast<std::uint64_t>(inst);
    // Unit-norm channels: the ranking analysis assumes unit dictionary
    // columns, and this suite exercises the algorithms, not fading.
    Realization r = make_realization(cfg, nullptr, true, cfg.seed);
    {
      ChannelSet H2 = *r.H;
      for (int n = 0; n < cfg.N; ++n) {
        const double s = std::sqrt(cfg.M / H2.norm2(n));
        for (int m = 0; m < cfg.M; ++m)
          H2.h[static_cast<std::size_t>(n) * cfg.M + m] *= s;
      }
      r.H = std::make_shared<const ChannelSet>(std::move(H2));
      RngStream ts(cfg.seed);
      r.frame = synthesize_frame(cfg, *r.P, *r.H, ts);
    }
    BlockDictionary D(r.P, r.H);

    // noiseless receive
    std::vector<cplx> y(r.frame.received.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = r.frame.received[i] - r.frame.noise[i];

    const RecoveryResult res = bomp(D, cfg, y);
    std::vector<int> got = res.support;
    std::sort(got.begin(), got.end());

    // exhaustive search over all supports of the true size
    std::vector<int> best_support;
    double best_res = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.N; ++i)
      for (int j = i + 1; j < cfg.N; ++j) {
        const int blocks[2] = {i, j};
        const RestrictedLs fit = restricted_ls(D, blocks, y);
        std::vector<cplx> resid(y.begin(), y.end());
        for (int b = 0; b < 2; ++b)
          D.apply_block_acc(blocks[b],
                            {fit.coeff.data() + static_cast<std::size_t>(b) * cfg.d,
                             static_cast<std::size_t>(cfg.d)},
                            cplx{-1.0, 0.0}, resid);
        const double rn = std::sqrt(kernels::active().norm2sq(resid.data(), resid.size()));
        if (rn < best_res) {
          best_res = rn;
          best_support = {i, j};
        }
      }
    if (got != best_support) ++support_mismatch;
    if (best_support != r.frame.support) ++exhaustive_off;

    // block solver against the dense orthogonal-factorization solver
    const RestrictedLs fit = restricted_ls(D, r.frame.support, y);
    const std::vector<cplx> A = D.materialize(r.frame.support);
    const la::CodSolution dense = la::cod_least_squares(
        A, static_cast<int>(D.rows()), static_cast<int>(r.frame.support.size()) * cfg.d,
        y);
    double diff = 0.0;
    for (std::size_t i = 0; i < fit.coeff.size(); ++i)
      diff = std::max(diff, std::abs(fit.coeff[i] - dense.x[i]));
    if (diff > 1e-10) ++ls_mismatch;

    // noiseless recovery is exact on the true support
    double err = 0.0;
    for (std::size_t i = 0; i < r.frame.support.size(); ++i) {
      const int user = r.frame.support[i];
      for (int s = 0; s < cfg.d; ++s) {
        const cplx est = fit.coeff[i * static_cast<std::size_t>(cfg.d) + s] / gain;
        err = std::max(err, std::abs(est - r.frame.symbols[static_cast<std::size_t>(user) * cfg.d + s]));
      }
    }
    if (err > 1e-8) ++exact_fail;
  }

  check(support_mismatch <= 1,
        "greedy support matches exhaustive search (mismatches: " +
            std::to_string(support_mismatch) + "/" + std::to_string(kInstances) + ")");
  check(exhaustive_off == 0, "exhaustive search lands on the true support");
  check(ls_mismatch == 0, "block solver matches dense solver to 1e-10");
  check(exact_fail == 0, "noiseless restricted fit is exact");
  return failures;
}

ExperimentPlan default_desk_plan() {
  ExperimentPlan p;
  p.base = SystemConfig{};
  p.axis = Axis::esn0_db;
  p.values = {0.0, 4.0, 8.0, 12.0};
  p.algorithms = {Algorithm::bomp, Algorithm::icbomp, Algorithm::oracle_ls,
                  Algorithm::oracle_ic_mmse};
  p.trials = 200;
  p.name = "desk";
  return p;
}

}  // namespace spmux
