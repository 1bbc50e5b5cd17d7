#include "spmux/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spmux {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (...) {
    throw std::invalid_argument("bad integer for '" + key + "': " + v);
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (...) {
    throw std::invalid_argument("bad number for '" + key + "': " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("bad boolean for '" + key + "': " + v);
}

}  // namespace

std::vector<std::string> SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (M <= 0 || N <= 0 || d <= 0 || T <= 0 || K <= 0) fail("dimensions must be positive");
  if (N_a < 0) fail("N_a must be nonnegative");
  if (N_a > N) fail("N_a exceeds N");
  if (rho0 <= 0.0) fail("rho0 must be positive");
  if (static_cast<long long>(K) * d > static_cast<long long>(M) * T)
    fail("K*d exceeds M*T; the restricted solve would be underdetermined");
  if (msg_len_min < 0 || msg_len_max < 0) fail("message lengths must be nonnegative");
  if (msg_min() > msg_max()) fail("msg_len_min exceeds msg_len_max");
  if (msg_max() > d) fail("msg_len_max exceeds d");
  if (t_c < -1) fail("t_c must be >= -1");
  if (epsilon_stop < 0.0) fail("epsilon_stop must be nonnegative");

  std::vector<std::string> warnings;
  if (static_cast<long long>(M) * T >= static_cast<long long>(N) * d)
    warnings.push_back("M*T >= N*d: system is not underdetermined");
  if (K < N_a)
    warnings.push_back("K < N_a: detector cannot select every active user");
  return warnings;
}

double esn0_db_to_rho0(double db) { return std::pow(10.0, db / 10.0); }
double rho0_to_esn0_db(double rho0) { return 10.0 * std::log10(rho0); }

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("line " + std::to_string(lineno) + ": empty key");
    kv[key] = val;
  }
  return kv;
}

std::map<std::string, std::string> load_kv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_kv_text(ss.str());
}

Modulation parse_modulation(const std::string& s) {
  if (s == "qpsk") return Modulation::qpsk;
  if (s == "bpsk") return Modulation::bpsk;
  throw std::invalid_argument("unknown modulation: " + s);
}

const char* modulation_name(Modulation m) {
  return m == Modulation::qpsk ? "qpsk" : "bpsk";
}

void apply_config_keys(SystemConfig& cfg, const std::map<std::string, std::string>& kv) {
  auto geti = [&](const char* k, int& dst) {
    auto it = kv.find(k);
    if (it != kv.end()) dst = static_cast<int>(to_int(k, it->second));
  };
  geti("M", cfg.M);
  geti("N", cfg.N);
  geti("N_a", cfg.N_a);
  geti("d", cfg.d);
  geti("T", cfg.T);
  geti("K", cfg.K);
  geti("msg_len_min", cfg.msg_len_min);
  geti("msg_len_max", cfg.msg_len_max);
  if (auto it = kv.find("rho0"); it != kv.end()) cfg.rho0 = to_double("rho0", it->second);
  if (auto it = kv.find("esn0_db"); it != kv.end())
    cfg.rho0 = esn0_db_to_rho0(to_double("esn0_db", it->second));
  if (auto it = kv.find("precoding_orthogonal"); it != kv.end())
    cfg.precoding_orthogonal = to_bool("precoding_orthogonal", it->second);
  if (auto it = kv.find("modulation"); it != kv.end())
    cfg.modulation = parse_modulation(it->second);
  if (auto it = kv.find("t_c"); it != kv.end()) {
    if (it->second == "inf")
      cfg.t_c = kAlwaysCertify;
    else
      cfg.t_c = static_cast<int>(to_int("t_c", it->second));
  }
  if (auto it = kv.find("seed"); it != kv.end())
    cfg.seed = static_cast<std::uint64_t>(to_int("seed", it->second));
  if (auto it = kv.find("epsilon_stop"); it != kv.end())
    cfg.epsilon_stop = to_double("epsilon_stop", it->second);
}

SystemConfig config_from_file(const std::string& path) {
  SystemConfig cfg;
  apply_config_keys(cfg, load_kv_file(path));
  cfg.validate();
  return cfg;
}

}  // namespace spmux
