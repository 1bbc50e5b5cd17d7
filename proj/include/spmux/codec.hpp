#pragma once

#include <span>

#include "spmux/config.hpp"
#include "spmux/model.hpp"

namespace spmux {

struct DecodeOutcome {
  bool certified = false;
  int bit_errors = -1;  // -1: the user never transmitted, nothing to compare
};

// Error-free certification stand-in for an outer code: a detected block
// certifies when its demodulated payload lands within t_c bit flips of the
// transmitted one, and a certified block's payload is returned exactly (the
// code corrects what the threshold admits). Users outside the true support
// never certify, so cancellation cannot inject phantom signal.
class GenieCodec {
 public:
  GenieCodec(const SystemConfig& cfg, const FrameInstance& truth)
      : cfg_(&cfg), truth_(&truth) {}

  // estimate holds the block's d symbol estimates; only the first msg_len
  // are payload, the rest is padding and ignored.
  DecodeOutcome decode(int user, std::span<const cplx> estimate) const;

  const FrameInstance& truth() const { return *truth_; }
  const SystemConfig& config() const { return *cfg_; }

 private:
  const SystemConfig* cfg_;
  const FrameInstance* truth_;
};

}  // namespace spmux
