#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spmux/modulation.hpp"

namespace spmux {

// Sentinel accepted for t_c: a decoder that certifies any block regardless of
// bit errors. t_c = -1 is the opposite sentinel (never certifies), which turns
// the cancelling detector into the plain one.
inline constexpr int kAlwaysCertify = 1 << 30;

// Dimensions and knobs for one synthetic uplink scenario.
//
//   M   receive antennas        N    online users (dictionary blocks)
//   N_a active users            d    symbols per user frame
//   T   time slots per frame    K    detector iteration cap
//   rho0 transmit SNR (linear); es/n0 in dB maps as rho0 = 10^(dB/10)
//
// Messages are d symbols by default; msg_len_min/max (in symbols) < d model
// shorter payloads, zero-padded before precoding.
struct SystemConfig {
  int M = 8;
  int N = 40;
  int N_a = 12;
  int d = 50;
  int T = 250;
  int K = 20;
  double rho0 = 1.0;
  bool precoding_orthogonal = true;
  Modulation modulation = Modulation::qpsk;
  int t_c = 2;
  std::uint64_t seed = 1;
  int msg_len_min = 0;  // 0 means "d"
  int msg_len_max = 0;
  double epsilon_stop = 0.0;  // relative residual early stop; 0 disables

  int msg_min() const { return msg_len_min > 0 ? msg_len_min : d; }
  int msg_max() const { return msg_len_max > 0 ? msg_len_max : d; }

  // Hard violations (nonpositive dims, N_a > N, K*d > M*T, bad lengths) throw
  // std::invalid_argument. Soft conditions come back as warnings; the scheme
  // targets M*T < N*d, so an overdetermined setup is flagged, not rejected.
  std::vector<std::string> validate() const;
};

double esn0_db_to_rho0(double db);
double rho0_to_esn0_db(double rho0);

// One "key = value" pair per line; '#' starts a comment; keys are
// case-sensitive. Used for scenario files, plan files, and report output.
std::map<std::string, std::string> parse_kv_text(const std::string& text);
std::map<std::string, std::string> load_kv_file(const std::string& path);

// Reads the SystemConfig keys present in kv (unknown keys are left to the
// caller). Throws std::invalid_argument on malformed values.
void apply_config_keys(SystemConfig& cfg, const std::map<std::string, std::string>& kv);

SystemConfig config_from_file(const std::string& path);

Modulation parse_modulation(const std::string& s);
const char* modulation_name(Modulation m);

}  // namespace spmux
