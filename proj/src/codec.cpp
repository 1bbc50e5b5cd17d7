#include "spmux/codec.hpp"

#include <cassert>

#include "spmux/modulation.hpp"

namespace spmux {

DecodeOutcome GenieCodec::decode(int user, std::span<const cplx> estimate) const {
  assert(estimate.size() == static_cast<std::size_t>(cfg_->d));
  DecodeOutcome out;
  const int idx = truth_->active_index(user);
  if (idx < 0) return out;

  const int len = truth_->msg_len[idx];
  const auto& sent = truth_->bits[idx];
  const auto got = demodulate(estimate.first(len), cfg_->modulation);
  assert(got.size() == sent.size());

  int errs = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) errs += got[i] != sent[i];
  out.bit_errors = errs;
  out.certified = cfg_->t_c == kAlwaysCertify || (cfg_->t_c >= 0 && errs <= cfg_->t_c);
  return out;
}

}  // namespace spmux
