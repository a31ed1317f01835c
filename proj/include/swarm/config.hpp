#pragma once

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "swarm/control.hpp"
#include "swarm/core.hpp"
#include "swarm/mc.hpp"
#include "swarm/sim.hpp"

namespace swarm {

/// A fully resolved experiment: model parameters plus tube, cost, and protocol settings.
struct Scenario {
  SimParams params = default_params();
  TubeSpec tube;
  CostWeights weights;
  double formation_spacing = 0.7;
  std::string policy = "sparse";
  std::size_t M = 60;
  std::uint64_t seed = 1;
  std::string sweep_axis = "T";
  std::vector<double> sweep_values{5, 6, 7, 8, 9, 10};

  Policy resolved_policy() const { return parse_policy(policy, params.leaders.threshold()); }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  return x;
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += fmt(xs[i]);
  }
  return s;
}

struct Field {
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

#define SWARM_FIELD_D(key, member) \
  {key, {[](Scenario& s, const std::string& v) { s.member = to_double(key, v); }, [](const Scenario& s) { return fmt(s.member); }}}
#define SWARM_FIELD_U(key, member)                                                                         \
  {key,                                                                                                    \
   {[](Scenario& s, const std::string& v) { s.member = static_cast<decltype(s.member)>(to_uint(key, v)); }, \
    [](const Scenario& s) { return std::to_string(s.member); }}}

// Keys in canonical order.
inline const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      SWARM_FIELD_U("N", params.N),
      SWARM_FIELD_U("d", params.d),
      SWARM_FIELD_U("K", params.K),
      SWARM_FIELD_D("eps", params.eps),
      SWARM_FIELD_D("delta", params.delta),
      SWARM_FIELD_D("tau_max", params.tau_max),
      SWARM_FIELD_D("dt", params.dt),
      SWARM_FIELD_D("T", params.T),
      SWARM_FIELD_D("phi_beta", params.phi_beta),
      {"availability",
       {[](Scenario& s, const std::string& v) { s.params.availability = parse_availability_mode(v); },
        [](const Scenario& s) { return std::string(to_string(s.params.availability)); }}},
      SWARM_FIELD_D("comm_range", params.comm_range),
      SWARM_FIELD_D("rep_strength", params.rep_strength),
      SWARM_FIELD_D("rep_power", params.rep_power),
      SWARM_FIELD_D("form_strength", params.form_strength),
      SWARM_FIELD_D("obs_strength", params.obs_strength),
      {"obs_center",
       {[](Scenario& s, const std::string& v) { s.params.obs_center = to_list("obs_center", v); },
        [](const Scenario& s) { return fmt_list(s.params.obs_center); }}},
      {"v_star",
       {[](Scenario& s, const std::string& v) { s.params.v_star = to_list("v_star", v); },
        [](const Scenario& s) { return fmt_list(s.params.v_star); }}},
      SWARM_FIELD_D("noise_idio", params.noise_idio),
      SWARM_FIELD_D("noise_common", params.noise_common),
      {"leaders.count",
       {[](Scenario& s, const std::string& v) { s.params.leaders.leader_ids = first_leaders(to_uint("leaders.count", v)); },
        [](const Scenario& s) { return std::to_string(s.params.leaders.leader_ids.size()); }}},
      {"leaders.ids",
       {[](Scenario& s, const std::string& v) {
          std::vector<std::size_t> ids;
          if (trim(v) != "none") {
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) ids.push_back(to_uint("leaders.ids", trim(item)));
          }
          s.params.leaders.leader_ids = ids;
        },
        [](const Scenario& s) {
          const auto& ids = s.params.leaders.leader_ids;
          if (ids.empty()) return std::string("none");
          std::string out;
          for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + std::to_string(ids[i]);
          return out;
        }}},
      SWARM_FIELD_D("leaders.b", params.leaders.b),
      {"leaders.B",
       {[](Scenario& s, const std::string& v) {
          s.params.leaders.B = trim(v) == "identity" ? std::vector<double>{} : to_list("leaders.B", v);
        },
        [](const Scenario& s) {
          return s.params.leaders.B.empty() ? std::string("identity") : fmt_list(s.params.leaders.B);
        }}},
      SWARM_FIELD_D("leaders.M", params.leaders.M),
      SWARM_FIELD_D("leaders.gain_p", params.leaders.gain_p),
      SWARM_FIELD_D("leaders.gain_d", params.leaders.gain_d),
      {"leaders.theta",
       {[](Scenario& s, const std::string& v) { s.params.leaders.theta = to_double("leaders.theta", v); },
        [](const Scenario& s) { return fmt(s.params.leaders.threshold()); }}},
      SWARM_FIELD_D("init.box", params.init.box),
      SWARM_FIELD_D("init.min_sep", params.init.min_sep),
      SWARM_FIELD_D("init.vel_spread", params.init.vel_spread),
      SWARM_FIELD_D("tube.eps_v", tube.eps_v),
      SWARM_FIELD_D("tube.delta_f", tube.delta_f),
      SWARM_FIELD_D("tube.rho", tube.rho),
      SWARM_FIELD_D("tube.alpha", tube.alpha),
      SWARM_FIELD_D("tube.psi_power", tube.psi_power),
      SWARM_FIELD_D("formation.spacing", formation_spacing),
      SWARM_FIELD_D("cost.lambda1", weights.lambda1),
      SWARM_FIELD_D("cost.lambda2", weights.lambda2),
      SWARM_FIELD_D("cost.lambda3", weights.lambda3),
      SWARM_FIELD_D("cost.lambda4", weights.lambda4),
      {"policy",
       {[](Scenario& s, const std::string& v) {
          parse_policy(v, 0.0);
          s.policy = v;
        },
        [](const Scenario& s) { return s.policy; }}},
      SWARM_FIELD_U("mc.M", M),
      SWARM_FIELD_U("seed", seed),
      {"sweep.axis",
       {[](Scenario& s, const std::string& v) {
          parse_sweep_axis(v);
          s.sweep_axis = v;
        },
        [](const Scenario& s) { return s.sweep_axis; }}},
      {"sweep.values",
       {[](Scenario& s, const std::string& v) { s.sweep_values = to_list("sweep.values", v); },
        [](const Scenario& s) { return fmt_list(s.sweep_values); }}},
  };
  return table;
}

#undef SWARM_FIELD_D
#undef SWARM_FIELD_U

inline const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : fields())
    if (k == key) return &f;
  return nullptr;
}

}  // namespace config_detail

/// Collects key/value assignments and resolves them onto the defaults.
class ConfigBuilder {
 public:
  /// Parses `key = value` lines; '#' starts a comment. Duplicate keys within one source are errors.
  void add_text(const std::string& text, const std::string& source = "<config>") {
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const std::string t = config_detail::trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
      const std::string key = config_detail::trim(t.substr(0, eq));
      const std::string value = config_detail::trim(t.substr(eq + 1));
      if (!seen.insert(key).second)
        throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      set(key, value, source + ":" + std::to_string(lineno));
    }
  }

  void add_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    add_text(ss.str(), path);
  }

  /// Single `key=value` override, applied after any file.
  void add_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
    set(config_detail::trim(kv.substr(0, eq)), config_detail::trim(kv.substr(eq + 1)), "override");
  }

  Scenario build() const {
    Scenario s;
    for (const auto& [key, entry] : entries_) config_detail::find_field(key)->set(s, entry.value);
    // leaders.ids takes precedence over leaders.count when both are given
    if (auto it = entries_.find("leaders.ids"); it != entries_.end())
      config_detail::find_field("leaders.ids")->set(s, it->second.value);
    const std::size_t d = s.params.d;
    if (!entries_.count("obs_center")) s.params.obs_center.assign(d, 0.0);
    if (!entries_.count("v_star")) {
      Vec vs(d, 0.0);
      vs[0] = 1.0;
      s.params.v_star = vs;
    }
    return s;
  }

 private:
  struct Entry {
    std::string value;
    std::string origin;
  };

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    const auto* f = config_detail::find_field(key);
    if (!f) throw ConfigError(origin + ": unknown key '" + key + "'");
    Scenario probe;
    f->set(probe, value);  // reject malformed values at their source line
    entries_[key] = {value, origin};
  }

  std::map<std::string, Entry> entries_;
};

inline Scenario load_scenario(const std::string& text) {
  ConfigBuilder b;
  b.add_text(text);
  return b.build();
}

/// Canonical `key = value` listing of every field, in schema order.
inline std::string to_config_text(const Scenario& s) {
  std::string out;
  for (const auto& [key, f] : config_detail::fields()) {
    if (key == "leaders.count") continue;  // implied by leaders.ids
    out += key + " = " + f.get(s) + "\n";
  }
  return out;
}

inline std::vector<std::string> config_keys() {
  std::vector<std::string> k;
  for (const auto& [key, f] : config_detail::fields()) k.push_back(key);
  return k;
}

/// FNV-1a 64-bit hash.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const Scenario& s) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_config_text(s))));
  return buf;
}

inline ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r = validate_params(s.params);
  for (auto& m : validate_tube(s.tube)) r.push_back(std::move(m));
  if (!(s.formation_spacing > 0.0)) r.emplace_back("formation.spacing must be positive");
  if (s.M < 1) r.emplace_back("mc.M must be at least 1");
  const auto& w = s.weights;
  if (w.lambda1 < 0 || w.lambda2 < 0 || w.lambda3 < 0 || w.lambda4 < 0) r.emplace_back("cost weights must be nonnegative");
  if (s.sweep_values.empty()) r.emplace_back("sweep.values must not be empty");
  return r;
}

inline RunSetup make_setup(const Scenario& s, const Policy& policy) {
  return {s.params, policy, s.tube, build_formation_spec(s.params.N, s.formation_spacing), s.seed};
}

}  // namespace swarm
