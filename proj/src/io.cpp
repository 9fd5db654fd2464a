#include "kdvb/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kdvb/error.hpp"

namespace kdvb::io {

namespace {

using nlohmann::json;

std::string num(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string pair(cplx z) { return "[" + num(z.real()) + "," + num(z.imag()) + "]"; }

std::string coeff_array(const CoeffVector& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += pair(c[i]);
  }
  return s + "]";
}

std::string num_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += num(v[i]);
  }
  return s + "]";
}

std::string quote(const std::string& s) { return json(s).dump(); }

double get_number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

CoeffVector read_coeffs(const json& arr, const char* key) {
  if (!arr.is_array()) throw ConfigError(std::string("field '") + key + "' must be an array");
  CoeffVector c;
  c.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ConfigError(std::string("field '") + key + "' entries must be [re, im] pairs");
    }
    c.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return c;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw ConfigError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string profile_to_json(const WaveProfile& w) {
  std::string s = "{";
  s += "\"r\":" + num(w.r);
  s += ",\"alpha\":" + num(w.alpha);
  s += ",\"eps\":" + num(w.eps);
  s += ",\"c\":" + num(w.c);
  s += ",\"L\":" + num(w.L());
  s += ",\"n\":" + std::to_string(w.n());
  s += ",\"coeffs\":" + coeff_array(w.phi.coeffs());
  s += ",\"residual\":" + num(w.residual);
  return s + "}\n";
}

WaveProfile profile_from_json(const std::string& text) {
  const auto j = parse(text);
  if (!j.is_object()) throw ConfigError("profile JSON must be an object");
  const double L = get_number(j, "L");
  if (!j.contains("n") || !j.at("n").is_number_integer()) {
    throw ConfigError("field 'n' must be an integer");
  }
  const int n = j.at("n").get<int>();
  if (!j.contains("coeffs")) throw ConfigError("missing field 'coeffs'");
  auto c = read_coeffs(j.at("coeffs"), "coeffs");
  if (static_cast<int>(c.size()) != n) throw ConfigError("field 'coeffs' must have n entries");
  try {
    WaveProfile w{SpectralField(PeriodicGrid(n, L), std::move(c), true), get_number(j, "c"),
                  get_number(j, "eps"), get_number(j, "residual")};
    w.r = get_number(j, "r");
    w.alpha = get_number(j, "alpha");
    return w;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid profile: ") + e.what());
  }
}

void save_profile(const std::filesystem::path& path, const WaveProfile& w) {
  write_atomic(path, profile_to_json(w));
}

WaveProfile load_profile(const std::filesystem::path& path) {
  return profile_from_json(read_file(path));
}

std::string trace_to_jsonl(const EvolutionTrace& trace) {
  std::string s;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    s += "{\"t\":" + num(trace.times[i]);
    s += ",\"norms\":{\"s3\":" + num(trace.norms_s[i]) + "}";
    s += ",\"coeffs\":" + coeff_array(trace.fields[i].coeffs()) + "}\n";
  }
  return s;
}

std::string trace_meta_json(const EvolutionTrace& trace) {
  const auto& c = trace.config;
  std::string s = "{";
  s += "\"model\":" + quote(trace.model_name);
  s += ",\"scheme\":" + quote(to_string(c.scheme));
  s += ",\"dt\":" + num(c.dt);
  s += ",\"t_end\":" + num(c.t_end);
  s += ",\"record_every\":" + std::to_string(c.record_every);
  if (!trace.fields.empty()) {
    s += ",\"n\":" + std::to_string(trace.fields.front().n());
    s += ",\"L\":" + num(trace.fields.front().L());
  }
  s += ",\"records\":" + std::to_string(trace.times.size());
  s += ",\"blew_up\":" + std::string(trace.blew_up ? "true" : "false");
  s += ",\"blow_up_time\":" + num(trace.blew_up ? trace.blow_up_time : std::nan(""));
  s += ",\"message\":" + quote(trace.message);
  return s + "}\n";
}

void save_trace(const std::filesystem::path& path, const EvolutionTrace& trace) {
  write_atomic(path, trace_to_jsonl(trace));
  auto meta = path;
  meta += ".meta.json";
  write_atomic(meta, trace_meta_json(trace));
}

std::string spectrum_to_csv(const BlochSpectrum& s) {
  std::string out = "theta,re_lambda,im_lambda,rank\n";
  for (std::size_t j = 0; j < s.thetas.size(); ++j) {
    for (std::size_t r = 0; r < s.eigenvalues[j].size(); ++r) {
      const auto lam = s.eigenvalues[j][r];
      out += num(s.thetas[j]) + "," + num(lam.real()) + "," + num(lam.imag()) + "," +
             std::to_string(r) + "\n";
    }
  }
  return out;
}

std::string spectrum_summary_json(const BlochSpectrum& s) {
  std::string out = "{";
  out += "\"max_real\":" + num(s.max_real);
  out += ",\"argmax_theta\":" + num(s.argmax_theta);
  out += ",\"N\":" + std::to_string(s.N);
  out += ",\"n_theta\":" + std::to_string(s.thetas.size());
  out += ",\"failed\":[";
  for (std::size_t i = 0; i < s.failed.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.failed[i]);
  }
  return out + "]}\n";
}

std::string report_to_json(const InstabilityReport& rep) {
  std::string s = "{";
  s += "\"eps\":" + num(rep.profile.eps);
  s += ",\"c\":" + num(rep.profile.c);
  s += ",\"L\":" + num(rep.profile.L());
  s += ",\"lambda\":" + pair(rep.lambda);
  s += ",\"delta0\":" + num(rep.delta0);
  s += ",\"fitted_rate\":" + num(rep.fitted_rate);
  s += ",\"verdict\":" + quote(to_string(rep.verdict));
  s += ",\"times\":" + num_array(rep.times);
  s += ",\"distances\":" + num_array(rep.orbital_distances);
  s += ",\"fit_window\":[" + num(rep.fit_window.first) + "," + num(rep.fit_window.second) + "]";
  s += ",\"message\":" + quote(rep.message);
  s += ",\"escape\":{\"period\":" + num(rep.escape.period);
  s += ",\"escaped_at\":" + std::to_string(rep.escape.escaped_at);
  s += ",\"distances\":" + num_array(rep.escape.distances) + "}";
  return s + "}\n";
}

SpectralField initial_data_from_json(const std::string& text) {
  const auto j = parse(text);
  if (!j.is_object()) throw ConfigError("initial data must be a JSON object");
  const double L = get_number(j, "L");
  try {
    if (j.contains("coeffs")) {
      auto c = read_coeffs(j.at("coeffs"), "coeffs");
      const PeriodicGrid grid(static_cast<int>(c.size()), L);
      return SpectralField(grid, std::move(c), true);
    }
    if (j.contains("samples")) {
      const auto& a = j.at("samples");
      if (!a.is_array()) throw ConfigError("field 'samples' must be an array");
      std::vector<double> v;
      for (const auto& e : a) {
        if (!e.is_number()) throw ConfigError("field 'samples' must hold numbers");
        v.push_back(e.get<double>());
      }
      const PeriodicGrid grid(static_cast<int>(v.size()), L);
      return forward_transform(v, grid);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid initial data: ") + e.what());
  }
  throw ConfigError("initial data needs 'coeffs' or 'samples'");
}

}  // namespace kdvb::io
