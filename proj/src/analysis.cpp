#include "spmux/analysis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spmux/codec.hpp"
#include "spmux/densela.hpp"
#include "spmux/kernels.hpp"
#include "spmux/recovery.hpp"
#include "spmux/rng.hpp"

namespace spmux {

CoherenceProfile profile_over(const BlockDictionary& D, std::span<const int> J,
                              std::span<const int> active, std::span<const cplx> s,
                              std::span<const cplx> perturb, const ProfileOptions& opt) {
  const auto& k = kernels::active();
  const int d = D.d();
  const int M = D.M();
  CoherenceProfile out;

  if (opt.with_nu) {
    for (int j : J) {
      const double coupling = D.channels().norm2(j) / M * D.precoders().column_coherence(j);
      out.nu = std::max(out.nu, coupling);
    }
  }

  const std::size_t nJ = J.size();
  const std::size_t total_pairs = nJ * (nJ - 1) / 2;
  double worst = 0.0;
  if (opt.subsample_pairs > 0 && total_pairs > 0) {
    RngStream rs(opt.sample_seed);
    for (int t = 0; t < opt.subsample_pairs; ++t) {
      const std::size_t a = rs.next_below(nJ);
      std::size_t b = rs.next_below(nJ - 1);
      if (b >= a) ++b;
      worst = std::max(worst, D.block_gram_norm(J[a], J[b]));
    }
    out.pairs_scanned = static_cast<std::size_t>(opt.subsample_pairs);
    out.subsampled = true;
  } else {
    if (total_pairs > opt.pair_cap)
      throw std::invalid_argument(
          "profile_over: pair scan over budget; set subsample_pairs");
    for (std::size_t b = 1; b < nJ; ++b)
      for (std::size_t a = 0; a < b; ++a)
        worst = std::max(worst, D.block_gram_norm(J[a], J[b]));
    out.pairs_scanned = total_pairs;
  }
  out.mu_B = worst / d;

  bool first = true;
  for (int i : active) {
    const double en = std::sqrt(k.norm2sq(s.data() + static_cast<std::size_t>(i) * d, d));
    if (first) {
      out.s_l = out.s_u = en;
      first = false;
    } else {
      out.s_l = std::min(out.s_l, en);
      out.s_u = std::max(out.s_u, en);
    }
  }

  std::vector<cplx> buf(d);
  for (int j : J) {
    D.correlate(perturb, j, buf);
    out.tau = std::max(out.tau, std::sqrt(k.norm2sq(buf.data(), d)));
  }
  return out;
}

CoherenceProfile coherence_profile(const BlockDictionary& D, std::span<const cplx> s,
                                   std::span<const cplx> z, std::span<const int> I,
                                   const ProfileOptions& opt) {
  std::vector<int> all(D.N());
  for (int j = 0; j < D.N(); ++j) all[j] = j;
  return profile_over(D, all, I, s, z, opt);
}

CoherenceProfile iteration_profile(const BlockDictionary& D, const SystemConfig& cfg,
                                   std::span<const cplx> s, std::span<const cplx> z,
                                   std::span<const int> cancelled,
                                   std::span<const int> in_ls,
                                   std::span<const int> unidentified,
                                   const ProfileOptions& opt) {
  std::vector<bool> excluded(D.N(), false);
  for (int j : cancelled) excluded[j] = true;
  for (int j : unidentified) excluded[j] = true;
  std::vector<int> J;
  J.reserve(D.N());
  for (int j = 0; j < D.N(); ++j)
    if (!excluded[j]) J.push_back(j);

  std::vector<cplx> perturb(z.begin(), z.end());
  const double gain = std::sqrt(cfg.rho0 * cfg.M);
  D.apply_blocks_acc(unidentified, s, cplx{gain, 0.0}, perturb);
  return profile_over(D, J, in_ls, s, perturb, opt);
}

namespace {

// Two sides of the ranking inequality at block count n: active blocks beat
// inactive ones in correlation magnitude when lhs > rhs.
void separation_sides(const CoherenceProfile& p, double rho0, int M, int d, int n,
                      double* lhs, double* rhs) {
  const double rM = rho0 * M;
  const double dm = d * p.mu_B;
  const double om = 1.0 + (d - 1) * p.nu;   // upper column-energy factor
  const double um = 1.0 - (d - 1) * p.nu;   // lower column-energy factor
  *lhs = rM * um * um * p.s_l * p.s_l;
  *rhs = p.tau * p.tau +
         rM * dm * (2.0 * (n - 1) * om + static_cast<double>(n) * n * dm) * p.s_l * p.s_l +
         2.0 * std::sqrt(rM) * p.tau * ((2.0 * n - 1) * dm + om) * p.s_l;
}

}  // namespace

SupportCondition support_condition(const CoherenceProfile& p, const SystemConfig& cfg,
                                   int N_a) {
  SupportCondition out;
  separation_sides(p, cfg.rho0, cfg.M, cfg.d, N_a, &out.lhs, &out.rhs);
  out.inequality = out.lhs > out.rhs;
  out.denom = 1.0 - (cfg.d - 1) * p.nu - (cfg.K - 1) * cfg.d * p.mu_B;
  out.side_ok = out.denom > 0.0;
  out.holds = out.inequality && out.side_ok;
  return out;
}

MarginCondition correlation_margin_condition(const CoherenceProfile& p,
                                             const SystemConfig& cfg, int N_a) {
  MarginCondition out;
  const double rM = cfg.rho0 * cfg.M;
  const int d = cfg.d;
  const double dm = d * p.mu_B;
  const double om = 1.0 + (d - 1) * p.nu;
  const double um = 1.0 - (d - 1) * p.nu;
  const double srm = std::sqrt(rM);
  out.lhs = rM * um * um * p.s_u * p.s_u;
  out.rhs = p.tau * p.tau + rM * dm * dm * static_cast<double>(N_a) * N_a * p.s_u * p.s_u +
            2.0 * rM * dm * ((N_a - 1) * om) * p.s_l * p.s_l +
            2.0 * srm * p.tau * ((N_a - 1) * dm + om) * p.s_l +
            2.0 * srm * N_a * dm * p.tau * p.s_u;
  out.holds = out.lhs > out.rhs;
  return out;
}

ErrorBounds error_bounds(const CoherenceProfile& p, const SystemConfig& cfg, int K,
                         int N_a) {
  ErrorBounds out;
  const double denom = 1.0 - (cfg.d - 1) * p.nu - (K - 1) * cfg.d * p.mu_B;
  out.available = denom > 0.0;
  if (!out.available) {
    out.err_bound = std::numeric_limits<double>::infinity();
    out.ser_bound = std::numeric_limits<double>::infinity();
    out.N_e = -1;
    return out;
  }
  out.err_bound = K * p.tau * p.tau / (denom * denom * cfg.rho0 * cfg.M);
  const double half_min = min_symbol_distance(cfg.modulation) / 2.0;
  const double q = out.err_bound / (half_min * half_min);
  out.N_e = q >= 9.0e18 ? std::numeric_limits<long long>::max()
                        : static_cast<long long>(std::floor(q));
  out.ser_bound = std::min(1.0, static_cast<double>(out.N_e) /
                                    (static_cast<double>(N_a) * cfg.d));
  return out;
}

IcStepCondition ic_step_conditions(const CoherenceProfile& p, const SystemConfig& cfg,
                                   int N_i, int t_c) {
  IcStepCondition out;
  separation_sides(p, cfg.rho0, cfg.M, cfg.d, N_i, &out.lhs_sep, &out.rhs_sep);
  out.separation = out.lhs_sep > out.rhs_sep;
  const double denom = 1.0 - (cfg.d - 1) * p.nu - (N_i - 1) * cfg.d * p.mu_B;
  const double lmin = min_symbol_distance(cfg.modulation);
  out.lhs_corr = denom * denom * cfg.rho0 * cfg.M * static_cast<double>(t_c) * lmin * lmin;
  out.rhs_corr = 4.0 * p.tau * p.tau;
  out.correction = out.lhs_corr >= out.rhs_corr;
  out.holds = out.separation && out.correction;
  return out;
}

double noise_tail_prob(double tau_tilde, int d, double nu) {
  if (tau_tilde < 0.0) throw std::invalid_argument("noise_tail_prob: negative bound");
  if (d < 1) throw std::invalid_argument("noise_tail_prob: d < 1");
  const double x = tau_tilde * tau_tilde / (1.0 + (d - 1) * nu);
  double sum;
  if (x < 30.0) {
    // Premultiplied recurrence: every partial term stays below 1.
    double term = std::exp(-x);
    sum = term;
    for (int q = 1; q < d; ++q) {
      term *= x / q;
      sum += term;
    }
  } else {
    // Large argument: e^{-x} underflows before the recurrence reaches the
    // dominant terms near q ~ x, so take each term in log space.
    sum = 0.0;
    const double lx = std::log(x);
    for (int q = 0; q < d; ++q) {
      const double lt = -x + q * lx - std::lgamma(q + 1.0);
      if (lt > -745.0) sum += std::exp(lt);
    }
  }
  return std::clamp(1.0 - sum, 0.0, 1.0);
}

double log2_binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) throw std::invalid_argument("log2_binomial: bad arguments");
  constexpr double kLn2 = 0.6931471805599453094;
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / kLn2;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

CapacityReport capacity_report(const BlockDictionary& D, const SystemConfig& cfg,
                               std::span<const int> I, std::span<const int> payload_bits,
                               double p_e) {
  if (!(p_e >= 0.0 && p_e < 1.0))
    throw std::invalid_argument("capacity_report: p_e outside [0,1)");
  if (I.size() != payload_bits.size())
    throw std::invalid_argument("capacity_report: payload list size mismatch");
  const std::size_t n = I.size() * static_cast<std::size_t>(D.d());
  constexpr std::size_t kDetCap = 4096;
  if (n > kDetCap)
    throw std::runtime_error(
        "capacity_report: determinant dimension over cap; shrink the active set or d");

  CapacityReport out;
  out.p_e = p_e;
  std::vector<cplx> A = D.block_gram_dense(I);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i + j * n] *= cfg.rho0;
    A[i + i * n] += 1.0;
  }
  constexpr double kLn2 = 0.6931471805599453094;
  out.capacity_bits = n == 0 ? 0.0 : la::logdet_hermitian(std::move(A), static_cast<int>(n)) / kLn2;

  double payload = 0.0;
  for (int b : payload_bits) payload += b;
  out.payload_bits_lower = log2_binomial(cfg.N, static_cast<int>(I.size())) + payload;
  out.rhs_bits = (binary_entropy(p_e) + out.capacity_bits) / (1.0 - p_e);
  out.satisfiable = out.payload_bits_lower <= out.rhs_bits;
  return out;
}

double throughput(double fer, const SystemConfig& cfg) {
  if (!(fer >= 0.0 && fer <= 1.0)) throw std::invalid_argument("throughput: fer outside [0,1]");
  return (1.0 - fer) * static_cast<double>(cfg.N_a) * cfg.d /
         (static_cast<double>(cfg.M) * cfg.T);
}

GuaranteeReport analyze_realization(const BlockDictionary& D, const SystemConfig& cfg,
                                    const FrameInstance& frame, double p_e,
                                    const ProfileOptions& opt) {
  GuaranteeReport rep;
  rep.N_a = static_cast<int>(frame.support.size());
  rep.profile = coherence_profile(D, frame.symbols, frame.noise, frame.support, opt);
  rep.support = support_condition(rep.profile, cfg, rep.N_a);
  rep.margin = correlation_margin_condition(rep.profile, cfg, rep.N_a);
  rep.bounds = error_bounds(rep.profile, cfg, cfg.K, rep.N_a);
  rep.noise_tail = noise_tail_prob(rep.profile.tau, cfg.d, rep.profile.nu);

  GenieCodec codec(cfg, frame);
  const RecoveryResult run = icbomp(D, cfg, frame.received, codec);

  // Replay the detector's rounds to evaluate the per-round certification
  // conditions under the realized sets.
  std::vector<int> ls_set, cancelled_set;
  for (const auto& rec : run.trace) {
    if (rec.selected >= 0) ls_set.push_back(rec.selected);
    IcStepReport step;
    step.iter = rec.iter;
    step.n_in_ls = static_cast<int>(ls_set.size());
    step.certified = static_cast<int>(rec.cancelled.size());
    step.all_active = std::all_of(ls_set.begin(), ls_set.end(),
                                  [&](int j) { return frame.is_active(j); });
    if (step.all_active) {
      std::vector<bool> seen(D.N(), false);
      for (int j : ls_set) seen[j] = true;
      for (int j : cancelled_set) seen[j] = true;
      std::vector<int> unidentified;
      for (int j : frame.support)
        if (!seen[j]) unidentified.push_back(j);
      const auto prof = iteration_profile(D, cfg, frame.symbols, frame.noise,
                                          cancelled_set, ls_set, unidentified, opt);
      step.cond = ic_step_conditions(prof, cfg, step.n_in_ls, cfg.t_c);
    }
    rep.ic_steps.push_back(std::move(step));
    for (int u : rec.cancelled) {
      ls_set.erase(std::find(ls_set.begin(), ls_set.end(), u));
      cancelled_set.push_back(u);
    }
  }

  std::vector<int> bits(frame.support.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = static_cast<int>(frame.bits[i].size());
  rep.capacity = capacity_report(D, cfg, frame.support, bits, p_e);
  return rep;
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const char* fmt_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string render_report(const GuaranteeReport& r) {
  std::ostringstream os;
  os << "active_users = " << r.N_a << "\n";
  os << "block_coherence = " << fmt_double(r.profile.mu_B) << "\n";
  os << "sub_coherence = " << fmt_double(r.profile.nu) << "\n";
  os << "block_energy_min = " << fmt_double(r.profile.s_l) << "\n";
  os << "block_energy_max = " << fmt_double(r.profile.s_u) << "\n";
  os << "noise_corr_max = " << fmt_double(r.profile.tau) << "\n";
  os << "pairs_scanned = " << r.profile.pairs_scanned << "\n";
  os << "pairs_subsampled = " << fmt_bool(r.profile.subsampled) << "\n";
  os << "support_condition_holds = " << fmt_bool(r.support.holds) << "\n";
  os << "support_condition_lhs = " << fmt_double(r.support.lhs) << "\n";
  os << "support_condition_rhs = " << fmt_double(r.support.rhs) << "\n";
  os << "support_side_condition_ok = " << fmt_bool(r.support.side_ok) << "\n";
  os << "support_side_denominator = " << fmt_double(r.support.denom) << "\n";
  os << "margin_condition_holds = " << fmt_bool(r.margin.holds) << "\n";
  os << "error_bound_available = " << fmt_bool(r.bounds.available) << "\n";
  os << "error_bound = " << fmt_double(r.bounds.err_bound) << "\n";
  os << "symbol_error_cap = " << r.bounds.N_e << "\n";
  os << "ser_bound = " << fmt_double(r.bounds.ser_bound) << "\n";
  os << "noise_tail_prob = " << fmt_double(r.noise_tail) << "\n";
  os << "ic_steps = " << r.ic_steps.size() << "\n";
  for (std::size_t i = 0; i < r.ic_steps.size(); ++i) {
    const auto& s = r.ic_steps[i];
    const std::string p = "ic_step_" + std::to_string(i + 1) + "_";
    os << p << "blocks_in_fit = " << s.n_in_ls << "\n";
    os << p << "all_active = " << fmt_bool(s.all_active) << "\n";
    os << p << "condition_holds = " << fmt_bool(s.cond.holds) << "\n";
    os << p << "certified = " << s.certified << "\n";
  }
  os << "payload_bits_lower = " << fmt_double(r.capacity.payload_bits_lower) << "\n";
  os << "capacity_bits = " << fmt_double(r.capacity.capacity_bits) << "\n";
  os << "capacity_rhs_bits = " << fmt_double(r.capacity.rhs_bits) << "\n";
  os << "capacity_satisfiable = " << fmt_bool(r.capacity.satisfiable) << "\n";
  os << "p_e = " << fmt_double(r.capacity.p_e) << "\n";
  return os.str();
}

}  // namespace spmux
