#include "fdcancel/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fdcancel/errors.hpp"
#include "fdcancel/version.hpp"

namespace fdcancel::config {

namespace {

using experiments::CancellerKind;
using experiments::CurveSpec;
using experiments::RefDelayPolicy;
using experiments::ScenarioPreset;
using experiments::SweepVariable;
using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: bad flag for '" + key + "': " + v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// Comma list or start:stop:step range.
std::vector<double> to_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3)
      throw ConfigError("config: range for '" + key + "' needs start:stop:step");
    const double a = to_double(key, parts[0]);
    const double b = to_double(key, parts[1]);
    const double st = to_double(key, parts[2]);
    if (st <= 0.0) throw ConfigError("config: range step for '" + key + "' must be > 0");
    for (int i = 0;; ++i) {
      const double x = a + st * i;
      if (x > b + 1e-9) break;
      out.push_back(x);
    }
    return out;
  }
  for (const std::string& item : split(v, ','))
    if (!item.empty()) out.push_back(to_double(key, item));
  return out;
}

// One parsed INI section with consumed-key tracking.
struct Section {
  std::map<std::string, std::string> kv;
  mutable std::map<std::string, bool> used;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  std::string get(const std::string& key) const {
    used[key] = true;
    return kv.at(key);
  }
  void finish(const std::string& name) const {
    for (const auto& entry : kv)
      if (!used.count(entry.first))
        throw ConfigError("config: unknown key '" + entry.first + "' in [" +
                          name + "]");
  }
};

SweepVariable sweep_from_string(const std::string& s) {
  if (s == "si_path_delay") return SweepVariable::SiPathDelay;
  if (s == "path_spread") return SweepVariable::PathSpread;
  if (s == "none") return SweepVariable::None;
  throw ConfigError("config: unknown sweep variable: " + s);
}
std::string sweep_to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::SiPathDelay: return "si_path_delay";
    case SweepVariable::PathSpread: return "path_spread";
    case SweepVariable::None: return "none";
  }
  return "none";
}

CancellerKind kind_from_string(const std::string& s) {
  if (s == "single_tap") return CancellerKind::SingleTap;
  if (s == "multi_tap") return CancellerKind::MultiTap;
  throw ConfigError("config: unknown canceller kind: " + s);
}
std::string kind_to_string(CancellerKind k) {
  return k == CancellerKind::SingleTap ? "single_tap" : "multi_tap";
}

RefDelayPolicy policy_from_string(const std::string& s) {
  if (s == "fixed") return RefDelayPolicy::FixedDelays;
  if (s == "half_sweep") return RefDelayPolicy::HalfSweepValue;
  if (s == "sweep") return RefDelayPolicy::SweepValue;
  throw ConfigError("config: unknown ref_policy: " + s);
}
std::string policy_to_string(RefDelayPolicy p) {
  switch (p) {
    case RefDelayPolicy::FixedDelays: return "fixed";
    case RefDelayPolicy::HalfSweepValue: return "half_sweep";
    case RefDelayPolicy::SweepValue: return "sweep";
  }
  return "fixed";
}

signal::Constellation constellation_from_string(const std::string& s) {
  if (s == "qpsk") return signal::Constellation::Qpsk;
  if (s == "qam16") return signal::Constellation::Qam16;
  throw ConfigError("config: unknown constellation: " + s);
}
std::string constellation_to_string(signal::Constellation c) {
  return c == signal::Constellation::Qpsk ? "qpsk" : "qam16";
}

impairments::PhaseNoiseKind pn_kind_from_string(const std::string& s) {
  if (s == "wiener") return impairments::PhaseNoiseKind::Wiener;
  if (s == "none") return impairments::PhaseNoiseKind::None;
  throw ConfigError("config: unknown phase noise kind: " + s);
}
std::string pn_kind_to_string(impairments::PhaseNoiseKind k) {
  return k == impairments::PhaseNoiseKind::Wiener ? "wiener" : "none";
}

ScenarioPreset parse_ini(const std::string& text) {
  std::map<std::string, Section> sections;
  std::vector<std::string> order;
  std::string current;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: bad section header at line " +
                          std::to_string(lineno));
      current = lower(trim(line.substr(1, line.size() - 2)));
      if (current.empty())
        throw ConfigError("config: empty section name at line " +
                          std::to_string(lineno));
      if (!sections.count(current)) order.push_back(current);
      sections[current];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos || current.empty())
      throw ConfigError("config: expected 'key = value' at line " +
                        std::to_string(lineno));
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    if (sections[current].kv.count(key))
      throw ConfigError("config: duplicate key '" + key + "' in [" + current + "]");
    sections[current].kv[key] = value;
  }

  ScenarioPreset p;
  p.curves.clear();
  p.si_channel.paths.clear();

  auto section = [&](const std::string& name) -> const Section& {
    auto it = sections.find(name);
    if (it == sections.end())
      throw ConfigError("config: missing [" + name + "] section");
    return it->second;
  };

  {
    const Section& s = section("scenario");
    p.name = s.has("name") ? s.get("name") : "custom";
    if (s.has("sweep")) p.sweep = sweep_from_string(lower(s.get("sweep")));
    if (s.has("sweep_values_ns"))
      p.sweep_values_ns = to_double_list("sweep_values_ns", s.get("sweep_values_ns"));
    else
      p.sweep_values_ns = {0.0};
    if (s.has("seeds")) {
      p.seeds.clear();
      for (const std::string& item : split(s.get("seeds"), ','))
        if (!item.empty())
          p.seeds.push_back(static_cast<uint64_t>(to_int("seeds", item)));
    }
    if (s.has("taps_per_branch"))
      p.taps_per_branch = static_cast<int>(to_int("taps_per_branch", s.get("taps_per_branch")));
    if (s.has("step_size")) p.step_size = to_double("step_size", s.get("step_size"));
    if (s.has("digital_delay_ns")) {
      const std::string v = lower(s.get("digital_delay_ns"));
      if (v != "auto") p.digital_delay_ns = to_double("digital_delay_ns", v);
    }
    if (s.has("jobs")) p.jobs = static_cast<int>(to_int("jobs", s.get("jobs")));
    s.finish("scenario");
  }

  if (sections.count("ofdm")) {
    const Section& s = sections["ofdm"];
    if (s.has("fft_size")) p.ofdm.fft_size = static_cast<int>(to_int("fft_size", s.get("fft_size")));
    if (s.has("cp_len")) p.ofdm.cp_len = static_cast<int>(to_int("cp_len", s.get("cp_len")));
    if (s.has("occupied_subcarriers"))
      p.ofdm.occupied_subcarriers =
          static_cast<int>(to_int("occupied_subcarriers", s.get("occupied_subcarriers")));
    if (s.has("num_symbols"))
      p.ofdm.num_symbols = static_cast<int>(to_int("num_symbols", s.get("num_symbols")));
    if (s.has("upsample_factor"))
      p.ofdm.upsample_factor =
          static_cast<int>(to_int("upsample_factor", s.get("upsample_factor")));
    if (s.has("constellation"))
      p.ofdm.constellation = constellation_from_string(lower(s.get("constellation")));
    s.finish("ofdm");
  }

  if (sections.count("phase_noise")) {
    const Section& s = sections["phase_noise"];
    if (s.has("kind")) p.phase_noise.kind = pn_kind_from_string(lower(s.get("kind")));
    if (s.has("sigma_eps_sq"))
      p.phase_noise.sigma_eps_sq = to_double("sigma_eps_sq", s.get("sigma_eps_sq"));
    if (s.has("model_rate_hz"))
      p.phase_noise.model_rate_hz = to_double("model_rate_hz", s.get("model_rate_hz"));
    if (s.has("tx")) p.tx_phase_noise = to_bool("tx", s.get("tx"));
    if (s.has("rx")) p.rx_phase_noise = to_bool("rx", s.get("rx"));
    s.finish("phase_noise");
  }

  if (sections.count("noise")) {
    const Section& s = sections["noise"];
    if (s.has("floor_dbm")) p.noise.floor_dbm = to_double("floor_dbm", s.get("floor_dbm"));
    s.finish("noise");
  }

  for (const std::string& name : order) {
    if (name.rfind("path.", 0) != 0) continue;
    const Section& s = sections[name];
    channel::PathSpec path;
    if (s.has("gain_db")) path.gain_db = to_double("gain_db", s.get("gain_db"));
    if (s.has("phase_rad")) path.phase_rad = to_double("phase_rad", s.get("phase_rad"));
    if (s.has("delay_ns")) path.delay_ns = to_double("delay_ns", s.get("delay_ns"));
    s.finish(name);
    p.si_channel.paths.push_back(path);
  }
  if (p.si_channel.paths.empty())
    throw ConfigError("config: needs at least one [path.N] section");

  for (const std::string& name : order) {
    if (name.rfind("curve.", 0) != 0) continue;
    const Section& s = sections[name];
    CurveSpec c;
    c.label = s.has("label") ? s.get("label") : name.substr(6);
    if (s.has("kind")) c.kind = kind_from_string(lower(s.get("kind")));
    if (s.has("ref_policy")) c.ref_policy = policy_from_string(lower(s.get("ref_policy")));
    if (s.has("ref_delays_ns"))
      c.ref_delays_ns = to_double_list("ref_delays_ns", s.get("ref_delays_ns"));
    if (s.has("tx_power_dbm")) c.tx_power_dbm = to_double("tx_power_dbm", s.get("tx_power_dbm"));
    if (s.has("phase_noise")) c.phase_noise = to_bool("phase_noise", s.get("phase_noise"));
    s.finish(name);
    p.curves.push_back(c);
  }
  if (p.curves.empty())
    throw ConfigError("config: needs at least one [curve.N] section");

  for (const auto& entry : sections) {
    const std::string& name = entry.first;
    if (name == "scenario" || name == "ofdm" || name == "phase_noise" ||
        name == "noise" || name.rfind("path.", 0) == 0 ||
        name.rfind("curve.", 0) == 0)
      continue;
    throw ConfigError("config: unknown section [" + name + "]");
  }

  experiments::validate(p);
  return p;
}

json preset_to_json(const ScenarioPreset& p) {
  json j;
  j["name"] = p.name;
  j["ofdm"] = {{"fft_size", p.ofdm.fft_size},
               {"num_symbols", p.ofdm.num_symbols},
               {"cp_len", p.ofdm.cp_len},
               {"occupied_subcarriers", p.ofdm.occupied_subcarriers},
               {"upsample_factor", p.ofdm.upsample_factor},
               {"constellation", constellation_to_string(p.ofdm.constellation)},
               {"tx_power_dbm", p.ofdm.tx_power_dbm}};
  j["phase_noise"] = {{"kind", pn_kind_to_string(p.phase_noise.kind)},
                      {"sigma_eps_sq", p.phase_noise.sigma_eps_sq},
                      {"model_rate_hz", p.phase_noise.model_rate_hz},
                      {"tx", p.tx_phase_noise},
                      {"rx", p.rx_phase_noise}};
  j["noise"] = {{"floor_dbm", p.noise.floor_dbm}};
  j["paths"] = json::array();
  for (const channel::PathSpec& path : p.si_channel.paths)
    j["paths"].push_back({{"gain_db", path.gain_db},
                          {"phase_rad", path.phase_rad},
                          {"delay_ns", path.delay_ns}});
  j["sweep"] = sweep_to_string(p.sweep);
  j["sweep_values_ns"] = p.sweep_values_ns;
  j["seeds"] = p.seeds;
  j["taps_per_branch"] = p.taps_per_branch;
  j["step_size"] = p.step_size;
  if (p.digital_delay_ns)
    j["digital_delay_ns"] = *p.digital_delay_ns;
  else
    j["digital_delay_ns"] = nullptr;
  j["curves"] = json::array();
  for (const CurveSpec& c : p.curves)
    j["curves"].push_back({{"label", c.label},
                           {"kind", kind_to_string(c.kind)},
                           {"ref_policy", policy_to_string(c.ref_policy)},
                           {"ref_delays_ns", c.ref_delays_ns},
                           {"tx_power_dbm", c.tx_power_dbm},
                           {"phase_noise", c.phase_noise}});
  j["jobs"] = p.jobs;
  return j;
}

ScenarioPreset preset_from_json(const json& j) {
  ScenarioPreset p;
  p.curves.clear();
  p.si_channel.paths.clear();
  try {
    p.name = j.at("name").get<std::string>();
    const json& o = j.at("ofdm");
    p.ofdm.fft_size = o.at("fft_size").get<int>();
    p.ofdm.num_symbols = o.at("num_symbols").get<int>();
    p.ofdm.cp_len = o.at("cp_len").get<int>();
    p.ofdm.occupied_subcarriers = o.at("occupied_subcarriers").get<int>();
    p.ofdm.upsample_factor = o.at("upsample_factor").get<int>();
    p.ofdm.constellation =
        constellation_from_string(o.at("constellation").get<std::string>());
    p.ofdm.tx_power_dbm = o.at("tx_power_dbm").get<double>();
    const json& pn = j.at("phase_noise");
    p.phase_noise.kind = pn_kind_from_string(pn.at("kind").get<std::string>());
    p.phase_noise.sigma_eps_sq = pn.at("sigma_eps_sq").get<double>();
    p.phase_noise.model_rate_hz = pn.at("model_rate_hz").get<double>();
    p.tx_phase_noise = pn.at("tx").get<bool>();
    p.rx_phase_noise = pn.at("rx").get<bool>();
    p.noise.floor_dbm = j.at("noise").at("floor_dbm").get<double>();
    for (const json& jp : j.at("paths")) {
      channel::PathSpec path;
      path.gain_db = jp.at("gain_db").get<double>();
      path.phase_rad = jp.at("phase_rad").get<double>();
      path.delay_ns = jp.at("delay_ns").get<double>();
      p.si_channel.paths.push_back(path);
    }
    p.sweep = sweep_from_string(j.at("sweep").get<std::string>());
    p.sweep_values_ns = j.at("sweep_values_ns").get<std::vector<double>>();
    p.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    p.taps_per_branch = j.at("taps_per_branch").get<int>();
    p.step_size = j.at("step_size").get<double>();
    if (!j.at("digital_delay_ns").is_null())
      p.digital_delay_ns = j.at("digital_delay_ns").get<double>();
    for (const json& jc : j.at("curves")) {
      CurveSpec c;
      c.label = jc.at("label").get<std::string>();
      c.kind = kind_from_string(jc.at("kind").get<std::string>());
      c.ref_policy = policy_from_string(jc.at("ref_policy").get<std::string>());
      c.ref_delays_ns = jc.at("ref_delays_ns").get<std::vector<double>>();
      c.tx_power_dbm = jc.at("tx_power_dbm").get<double>();
      c.phase_noise = jc.at("phase_noise").get<bool>();
      p.curves.push_back(c);
    }
    p.jobs = j.at("jobs").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  experiments::validate(p);
  return p;
}

}  // namespace

experiments::ScenarioPreset parse_text(const std::string& text) {
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("manifest: ") + e.what());
    }
    if (j.contains("preset")) return preset_from_json(j.at("preset"));
    return preset_from_json(j);
  }
  return parse_ini(text);
}

experiments::ScenarioPreset load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

std::string manifest_text(const experiments::SweepResult& result,
                          const std::string& csv_name) {
  json j;
  j["format"] = "fdcancel-manifest";
  j["tool_version"] = kVersion;
  j["preset"] = preset_to_json(result.preset);
  j["csv"] = csv_name;
  j["wall_seconds"] = result.wall_seconds;
  j["rows"] = result.rows.size();
  j["row_converged"] = json::array();
  for (const experiments::SweepRow& row : result.rows)
    j["row_converged"].push_back(row.converged);
  return j.dump(2) + "\n";
}

}  // namespace fdcancel::config
