#pragma once

#include <span>
#include <string>
#include <vector>

#include "spmux/config.hpp"
#include "spmux/dictionary.hpp"
#include "spmux/model.hpp"

namespace spmux {

struct ProfileOptions {
  // Exact pair scans are allowed up to this many block pairs; beyond it the
  // caller must opt into subsampling.
  std::size_t pair_cap = 20'000;
  // > 0: estimate the pairwise coherence from this many sampled pairs
  // instead of the full scan (a lower bound on the true maximum).
  int subsample_pairs = 0;
  std::uint64_t sample_seed = 0x5eed;
  // The within-block column scan is O(N d^2 T); callers that only need the
  // cross-block statistics can turn it off (nu reports 0).
  bool with_nu = true;
};

// Realized coupling measurements of a dictionary-plus-realization: how
// strongly distinct blocks interfere (mu_B), how correlated the columns
// inside one block are (nu), the spread of active block energies (s_l, s_u),
// and the worst correlation of any block with a perturbation vector (tau).
struct CoherenceProfile {
  double mu_B = 0.0;
  double nu = 0.0;
  double s_l = 0.0;
  double s_u = 0.0;
  double tau = 0.0;
  std::size_t pairs_scanned = 0;
  bool subsampled = false;
};

// Profile over the blocks in J: mu_B from pairs within J, nu from blocks in
// J, s_l/s_u over the blocks listed in `active` (energies read from the
// block vector s), tau maximized over J against `perturb`.
CoherenceProfile profile_over(const BlockDictionary& D, std::span<const int> J,
                              std::span<const int> active, std::span<const cplx> s,
                              std::span<const cplx> perturb,
                              const ProfileOptions& opt = {});

// Whole-dictionary profile with the noise as the perturbation.
CoherenceProfile coherence_profile(const BlockDictionary& D, std::span<const cplx> s,
                                   std::span<const cplx> z, std::span<const int> I,
                                   const ProfileOptions& opt = {});

// Profile for one cancellation round: candidate blocks are everything not
// yet cancelled and not among the unidentified actives; the perturbation is
// the unidentified signal plus noise; block energies come from the blocks
// currently in the LS fit.
CoherenceProfile iteration_profile(const BlockDictionary& D, const SystemConfig& cfg,
                                   std::span<const cplx> s, std::span<const cplx> z,
                                   std::span<const int> cancelled,
                                   std::span<const int> in_ls,
                                   std::span<const int> unidentified,
                                   const ProfileOptions& opt = {});

// Sufficient condition for the greedy detector to rank every active block
// above every inactive one and keep its fit error bounded.
struct SupportCondition {
  bool holds = false;       // inequality and side condition together
  bool inequality = false;  // the main inequality exactly as printed
  bool side_ok = false;     // denom > 0
  double lhs = 0.0;
  double rhs = 0.0;
  double denom = 0.0;  // 1 - (d-1)nu - (K-1) d mu_B
};
SupportCondition support_condition(const CoherenceProfile& p, const SystemConfig& cfg,
                                   int N_a);

// The correlation-separation inequality the support condition is derived
// from; it mixes the min and max active energies. Exposed separately so the
// implication (support condition => this) is testable as printed.
struct MarginCondition {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};
MarginCondition correlation_margin_condition(const CoherenceProfile& p,
                                             const SystemConfig& cfg, int N_a);

struct ErrorBounds {
  bool available = false;  // side condition; the bound is vacuous otherwise
  double err_bound = 0.0;  // squared fit error cap
  long long N_e = 0;       // demodulated-symbol error cap
  double ser_bound = 0.0;
};
ErrorBounds error_bounds(const CoherenceProfile& p, const SystemConfig& cfg, int K,
                         int N_a);

// Conditions for the cancelling detector to certify at least one block in a
// round, evaluated on the round's restricted profile: `separation` is the
// support condition shape at N_i blocks; `correction` asks the fit error to
// sit within what t_c bit corrections absorb.
struct IcStepCondition {
  bool holds = false;
  bool separation = false;
  bool correction = false;
  double lhs_sep = 0.0, rhs_sep = 0.0;
  double lhs_corr = 0.0, rhs_corr = 0.0;
};
IcStepCondition ic_step_conditions(const CoherenceProfile& p, const SystemConfig& cfg,
                                   int N_i, int t_c);

// P(||u||_2 <= tau_tilde) for u a d-dim standard circular Gaussian, scaled by
// the within-block coupling: the regularized lower incomplete gamma at
// (d, tau_tilde^2/(1+(d-1)nu)). Monotone in tau_tilde, in [0,1].
double noise_tail_prob(double tau_tilde, int d, double nu);

// log2 of the binomial coefficient via log-gamma; exact to 1e-12 relative.
double log2_binomial(int n, int k);

// Binary entropy in bits; H(0) = H(1) = 0.
double binary_entropy(double p);

// Information accounting for one realization: the bits needed to name the
// active set and carry the payloads, against what the realized channel can
// deliver in a frame at residual error probability p_e.
struct CapacityReport {
  double payload_bits_lower = 0.0;  // log2 C(N, N_a) + sum of payload bits
  double capacity_bits = 0.0;       // log2 det(I + rho0 * Gram)
  double rhs_bits = 0.0;            // (H(p_e) + capacity) / (1 - p_e)
  bool satisfiable = false;
  double p_e = 0.0;
};
CapacityReport capacity_report(const BlockDictionary& D, const SystemConfig& cfg,
                               std::span<const int> I, std::span<const int> payload_bits,
                               double p_e);

double throughput(double fer, const SystemConfig& cfg);

// One cancellation-round entry of the full report. The conditions are only
// meaningful when every block in the fit is active (the premise the
// guarantee is stated under); `certified` records what the detector did.
struct IcStepReport {
  int iter = 0;
  int n_in_ls = 0;
  bool all_active = false;
  IcStepCondition cond;
  int certified = 0;
};

struct GuaranteeReport {
  int N_a = 0;
  CoherenceProfile profile;
  SupportCondition support;
  MarginCondition margin;
  ErrorBounds bounds;
  double noise_tail = 0.0;  // noise_tail_prob at the realized tau
  std::vector<IcStepReport> ic_steps;
  CapacityReport capacity;
};

// Runs the cancelling detector on the frame, measures the realized profile,
// and evaluates every guarantee on it.
GuaranteeReport analyze_realization(const BlockDictionary& D, const SystemConfig& cfg,
                                    const FrameInstance& frame, double p_e = 0.01,
                                    const ProfileOptions& opt = {});

// Flat "key = value" text block, one key per line (format shared with
// scenario files). Keys are documented in the README.
std::string render_report(const GuaranteeReport& r);

}  // namespace spmux
