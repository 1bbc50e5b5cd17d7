#pragma once

#include <span>
#include <string>
#include <vector>

#include "spmux/codec.hpp"
#include "spmux/dictionary.hpp"
#include "spmux/lsq.hpp"

namespace spmux {

enum class Algorithm : int {
  bomp = 1,           // greedy block pursuit, no cancellation
  icbomp = 2,         // greedy pursuit with certify-and-cancel
  oracle_ls = 3,      // LS on the true support
  oracle_ic_mmse = 4  // MMSE on the true support, cancelling until fixpoint
};

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct IterationRecord {
  int iter = 0;
  int selected = -1;           // block picked this round
  double residual_norm = 0.0;  // ||y_w - B_Lambda z|| at the end of the round
  std::vector<int> cancelled;  // users certified away this round
};

// Output of one detector run. Estimates live in the symbol domain (the
// sqrt(rho0*M) transmit gain divided out): certified users carry their exact
// payload symbols, everyone else the LS/MMSE fit.
struct RecoveryResult {
  std::vector<int> support;    // uncertified detected blocks, selection order
  std::vector<int> cancelled;  // certified blocks, cancellation order
  std::vector<int> identified() const;  // union of the two, sorted
  std::vector<cplx> estimates;  // N*d, zero outside detected blocks
  int iterations = 0;
  bool used_fallback = false;   // dense QR stepped in for a solve
  bool rank_deficient = false;  // that solve was rank deficient (min-norm)
  bool factor_failed = false;   // the incremental factor lost positivity
  std::vector<IterationRecord> trace;
};

RecoveryResult bomp(const BlockDictionary& D, const SystemConfig& cfg,
                    std::span<const cplx> y);

RecoveryResult icbomp(const BlockDictionary& D, const SystemConfig& cfg,
                      std::span<const cplx> y, const GenieCodec& codec);

RecoveryResult oracle_ls(const BlockDictionary& D, const SystemConfig& cfg,
                         std::span<const cplx> y, std::span<const int> support);

RecoveryResult oracle_ic_mmse(const BlockDictionary& D, const SystemConfig& cfg,
                              std::span<const cplx> y, const GenieCodec& codec);

// Dispatch on the algorithm tag; oracles read the support from the frame.
RecoveryResult run_algorithm(Algorithm a, const BlockDictionary& D, const SystemConfig& cfg,
                             const FrameInstance& frame);

}  // namespace spmux
