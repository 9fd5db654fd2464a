#include "kdvb/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "kdvb/error.hpp"
#include "kdvb/io.hpp"

namespace kdvb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(std::string("config: '") + key + "' " + what);
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (value.empty()) throw ConfigError("config: '" + key + "' has no value");
  if (key == "r") cfg.r = to_double(key, value);
  else if (key == "alpha") cfg.alpha = to_double(key, value);
  else if (key == "n") cfg.n = to_int<int>(key, value);
  else if (key == "L") cfg.L = to_double(key, value);
  else if (key == "dt") cfg.solver.dt = to_double(key, value);
  else if (key == "t_end") cfg.solver.t_end = to_double(key, value);
  else if (key == "scheme") {
    if (value == "etdrk4") cfg.solver.scheme = Scheme::etdrk4;
    else if (value == "picard") cfg.solver.scheme = Scheme::picard;
    else throw ConfigError("config: 'scheme' must be etdrk4 or picard, got '" + value + "'");
  }
  else if (key == "picard_tol") cfg.solver.picard_tol = to_double(key, value);
  else if (key == "picard_max_iter") cfg.solver.picard_max_iter = to_int<int>(key, value);
  else if (key == "record_every") cfg.solver.record_every = to_int<int>(key, value);
  else if (key == "blowup_ceiling") cfg.solver.blowup_ceiling = to_double(key, value);
  else if (key == "N") cfg.N = to_int<int>(key, value);
  else if (key == "n_theta") cfg.n_theta = to_int<int>(key, value);
  else if (key == "eps") cfg.eps = to_double(key, value);
  else if (key == "delta0") cfg.delta0 = to_double(key, value);
  else if (key == "T") cfg.T = to_double(key, value);
  else if (key == "fit_lo") cfg.fit_lo = to_double(key, value);
  else if (key == "fit_hi") cfg.fit_hi = to_double(key, value);
  else if (key == "seed") cfg.seed = to_int<std::uint64_t>(key, value);
  else if (key == "output_dir") cfg.output_dir = value;
  else throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
  require(r > 0, "r", "must be positive");
  require(alpha > 0, "alpha", "must be positive");
  require(n >= 8 && (n & (n - 1)) == 0, "n", "must be a power of two >= 8");
  require(L >= 0, "L", "must be non-negative (0 = from initial data)");
  require(N >= 0, "N", "must be non-negative");
  require(n_theta >= 2, "n_theta", "must be >= 2");
  require(eps > 0 && eps <= 0.25, "eps", "must lie in (0, 0.25]");
  require(delta0 >= 0, "delta0", "must be non-negative");
  require(T >= 0, "T", "must be non-negative (0 = automatic)");
  require(fit_lo > 0 && fit_hi > fit_lo, "fit_hi", "must exceed fit_lo > 0");
  solver.validate();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": '" + key + "' set twice");
    }
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_file(path));
}

std::string config_to_text(const RunConfig& cfg) {
  std::string s;
  auto put = [&](const char* k, const std::string& v) { s += std::string(k) + " = " + v + "\n"; };
  put("r", num(cfg.r));
  put("alpha", num(cfg.alpha));
  put("n", std::to_string(cfg.n));
  put("L", num(cfg.L));
  put("dt", num(cfg.solver.dt));
  put("t_end", num(cfg.solver.t_end));
  put("scheme", to_string(cfg.solver.scheme));
  put("picard_tol", num(cfg.solver.picard_tol));
  put("picard_max_iter", std::to_string(cfg.solver.picard_max_iter));
  put("record_every", std::to_string(cfg.solver.record_every));
  put("blowup_ceiling", num(cfg.solver.blowup_ceiling));
  put("N", std::to_string(cfg.N));
  put("n_theta", std::to_string(cfg.n_theta));
  put("eps", num(cfg.eps));
  put("delta0", num(cfg.delta0));
  put("T", num(cfg.T));
  put("fit_lo", num(cfg.fit_lo));
  put("fit_hi", num(cfg.fit_hi));
  put("seed", std::to_string(cfg.seed));
  put("output_dir", cfg.output_dir.string());
  return s;
}

}  // namespace kdvb
