#include "ratiometric/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "ratiometric/csv.hpp"
#include "ratiometric/errors.hpp"

namespace ratiometric {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return csv::parse_double(v);
  } catch (const ConfigError&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v +
                      "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Binding {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename Member>
Binding real(std::string key, Member member) {
  return {key,
          [member](const ExperimentConfig& c) {
            ExperimentConfig copy = c;
            return csv::num(member(copy));
          },
          [member, key](ExperimentConfig& c, const std::string& v) {
            member(c) = to_double(key, v);
          }};
}

template <typename Member>
Binding count(std::string key, Member member) {
  return {key,
          [member](const ExperimentConfig& c) {
            ExperimentConfig copy = c;
            return std::to_string(member(copy));
          },
          [member, key](ExperimentConfig& c, const std::string& v) {
            member(c) = to_count(key, v);
          }};
}

template <typename Member>
Binding flag(std::string key, Member member) {
  return {key,
          [member](const ExperimentConfig& c) {
            ExperimentConfig copy = c;
            return from_bool(member(copy));
          },
          [member, key](ExperimentConfig& c, const std::string& v) {
            member(c) = to_bool(key, v);
          }};
}

#define RATIO_PARAM(name) \
  real(#name, [](ExperimentConfig& c) -> double& { return c.params.name; })

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = [] {
    std::vector<Binding> b = {
        RATIO_PARAM(kappa_L_m0), RATIO_PARAM(kappa_T_m0), RATIO_PARAM(kappa_L_m),
        RATIO_PARAM(kappa_T_m),  RATIO_PARAM(kappa_L_p),  RATIO_PARAM(kappa_T_p),
        RATIO_PARAM(gamma_L_m),  RATIO_PARAM(gamma_T_m),  RATIO_PARAM(gamma_L_p),
        RATIO_PARAM(gamma_T_p),  RATIO_PARAM(k_aTc),      RATIO_PARAM(k_IPTG),
        RATIO_PARAM(theta_LacI), RATIO_PARAM(theta_TetR), RATIO_PARAM(theta_aTc),
        RATIO_PARAM(theta_IPTG), RATIO_PARAM(eta_LacI),   RATIO_PARAM(eta_TetR),
        RATIO_PARAM(eta_aTc),    RATIO_PARAM(eta_IPTG),
    };
    auto add = [&](Binding x) { b.push_back(std::move(x)); };
    add({"mode", [](const ExperimentConfig& c) { return to_string(c.mode); },
         [](ExperimentConfig& c, const std::string& v) { c.mode = parse_population_mode(v); }});
    add({"controller", [](const ExperimentConfig& c) { return to_string(c.controller.kind); },
         [](ExperimentConfig& c, const std::string& v) {
           c.controller.kind = parse_controller_kind(v);
         }});
    add(count("initial_cells", [](ExperimentConfig& c) -> std::size_t& { return c.initial_cells; }));
    add(real("target_ratio", [](ExperimentConfig& c) -> double& { return c.target_ratio; }));
    add(real("settling_threshold",
             [](ExperimentConfig& c) -> double& { return c.settling_threshold; }));
    add(real("duration", [](ExperimentConfig& c) -> double& { return c.duration; }));
    add(flag("actuation_delay", [](ExperimentConfig& c) -> bool& { return c.actuation_delay; }));
    add(flag("record_states", [](ExperimentConfig& c) -> bool& { return c.record_states; }));
    add(count("threads", [](ExperimentConfig& c) -> std::size_t& { return c.threads; }));

    add(real("noise_scale", [](ExperimentConfig& c) -> double& { return c.noise.noise_scale; }));
    add(real("sde_step", [](ExperimentConfig& c) -> double& { return c.noise.sde_step; }));
    add(flag("deterministic_inducer_exchange", [](ExperimentConfig& c) -> bool& {
      return c.noise.deterministic_inducer_exchange;
    }));

    add(real("sampling_period",
             [](ExperimentConfig& c) -> double& { return c.timing.sampling_period; }));
    add(real("actuation_period",
             [](ExperimentConfig& c) -> double& { return c.timing.actuation_period; }));
    add(real("delay_min", [](ExperimentConfig& c) -> double& { return c.timing.delay_min; }));
    add(real("delay_max", [](ExperimentConfig& c) -> double& { return c.timing.delay_max; }));
    add(real("max_experiment",
             [](ExperimentConfig& c) -> double& { return c.timing.max_experiment; }));

    add(count("capacity", [](ExperimentConfig& c) -> std::size_t& { return c.chamber.capacity; }));
    add(real("mean_division_time",
             [](ExperimentConfig& c) -> double& { return c.chamber.mean_division_time; }));
    add(real("division_time_cv",
             [](ExperimentConfig& c) -> double& { return c.chamber.division_time_cv; }));
    add(flag("partition_noise",
             [](ExperimentConfig& c) -> bool& { return c.chamber.partition_noise; }));
    add(flag("growth_enabled",
             [](ExperimentConfig& c) -> bool& { return c.chamber.growth_enabled; }));
    add(flag("flush_enabled", [](ExperimentConfig& c) -> bool& { return c.chamber.flush_enabled; }));

    add(real("init_mrna_lacI_min",
             [](ExperimentConfig& c) -> double& { return c.initial.mrna_lacI.first; }));
    add(real("init_mrna_lacI_max",
             [](ExperimentConfig& c) -> double& { return c.initial.mrna_lacI.second; }));
    add(real("init_mrna_tetR_min",
             [](ExperimentConfig& c) -> double& { return c.initial.mrna_tetR.first; }));
    add(real("init_mrna_tetR_max",
             [](ExperimentConfig& c) -> double& { return c.initial.mrna_tetR.second; }));
    add(real("init_lacI_min", [](ExperimentConfig& c) -> double& { return c.initial.lacI.first; }));
    add(real("init_lacI_max",
             [](ExperimentConfig& c) -> double& { return c.initial.lacI.second; }));
    add(real("init_tetR_min", [](ExperimentConfig& c) -> double& { return c.initial.tetR.first; }));
    add(real("init_tetR_max",
             [](ExperimentConfig& c) -> double& { return c.initial.tetR.second; }));

    add(real("bangbang_U_a",
             [](ExperimentConfig& c) -> double& { return c.controller.bangbang.U_a; }));
    add(real("bangbang_U_p",
             [](ExperimentConfig& c) -> double& { return c.controller.bangbang.U_p; }));
    add(real("pi_U_a", [](ExperimentConfig& c) -> double& { return c.controller.pi_actuator.U_a; }));
    add(real("pi_U_p", [](ExperimentConfig& c) -> double& { return c.controller.pi_actuator.U_p; }));
    add(real("k_P_a", [](ExperimentConfig& c) -> double& { return c.controller.pi.k_P_a; }));
    add(real("k_I_a", [](ExperimentConfig& c) -> double& { return c.controller.pi.k_I_a; }));
    add(real("k_P_p", [](ExperimentConfig& c) -> double& { return c.controller.pi.k_P_p; }));
    add(real("k_I_p", [](ExperimentConfig& c) -> double& { return c.controller.pi.k_I_p; }));
    add(real("mpc_U_a",
             [](ExperimentConfig& c) -> double& { return c.controller.mpc_actuator.U_a; }));
    add(real("mpc_U_p",
             [](ExperimentConfig& c) -> double& { return c.controller.mpc_actuator.U_p; }));
    add(real("prediction_horizon",
             [](ExperimentConfig& c) -> double& { return c.controller.mpc.prediction_horizon; }));
    add(real("alpha", [](ExperimentConfig& c) -> double& { return c.controller.mpc.alpha; }));
    add(count("subset_size",
              [](ExperimentConfig& c) -> std::size_t& { return c.controller.mpc.subset_size; }));
    add(count("ga_sequence_len",
              [](ExperimentConfig& c) -> std::size_t& { return c.controller.mpc.ga_sequence_len; }));
    add(count("ga_generations",
              [](ExperimentConfig& c) -> std::size_t& { return c.controller.mpc.ga_generations; }));
    add(count("ga_population_size", [](ExperimentConfig& c) -> std::size_t& {
      return c.controller.mpc.ga_population_size;
    }));
    add(count("ga_levels",
              [](ExperimentConfig& c) -> std::size_t& { return c.controller.mpc.ga_levels; }));
    add(real("ga_elite_fraction",
             [](ExperimentConfig& c) -> double& { return c.controller.mpc.ga_elite_fraction; }));
    add(real("prediction_step",
             [](ExperimentConfig& c) -> double& { return c.controller.mpc.prediction_step; }));
    add(real("constant_u_a",
             [](ExperimentConfig& c) -> double& { return c.controller.constant.u_a; }));
    add(real("constant_u_p",
             [](ExperimentConfig& c) -> double& { return c.controller.constant.u_p; }));
    return b;
  }();
  return table;
}

#undef RATIO_PARAM

const Binding* find_binding(const std::string& key) {
  const auto& b = bindings();
  auto it = std::find_if(b.begin(), b.end(), [&](const Binding& x) { return x.key == key; });
  return it == b.end() ? nullptr : &*it;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is, const std::string& origin) {
  KeyValueConfig kv;
  kv.origin_ = origin;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.values_.contains(key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

const std::string& KeyValueConfig::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

double KeyValueConfig::number(const std::string& key) const { return to_double(key, at(key)); }

const std::vector<std::string>& param_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (std::size_t i = 0; i < 20; ++i) k.push_back(bindings()[i].key);
    return k;
  }();
  return keys;
}

ToggleSwitchParams load_params(const KeyValueConfig& kv, ToggleSwitchParams base) {
  ExperimentConfig holder;
  holder.params = base;
  const auto& keys = param_keys();
  for (const auto& [key, value] : kv.values()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown parameter key '" + key + "'");
    }
    find_binding(key)->set(holder, value);
  }
  holder.params.validate();
  return holder.params;
}

ExperimentConfig load_experiment_config(const KeyValueConfig& kv, PopulationMode base_mode) {
  const PopulationMode mode = kv.contains("mode") ? parse_population_mode(kv.at("mode")) : base_mode;
  ExperimentConfig cfg = ExperimentConfig::defaults(mode);
  for (const auto& [key, value] : kv.values()) {
    const Binding* b = find_binding(key);
    if (b == nullptr) throw ConfigError("unknown config key '" + key + "'");
    b->set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& b : bindings()) out.emplace_back(b.key, b.get(cfg));
  return out;
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  for (const auto& [k, v] : config_entries(cfg)) os << k << " = " << v << '\n';
}

}  // namespace ratiometric
