#include "ratiometric/record_io.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>

#include "ratiometric/config.hpp"
#include "ratiometric/csv.hpp"
#include "ratiometric/errors.hpp"

#ifndef RATIOMETRIC_VERSION
#define RATIOMETRIC_VERSION "0.0.0"
#endif

namespace ratiometric {

using csv::num;

std::string version_string() { return RATIOMETRIC_VERSION; }

void write_trial_csv(std::ostream& os, const TrialRecord& record) {
  os << "time_min,e_A,e_B,u_a,u_p,N,n_A,n_B\n";
  for (const auto& s : record.samples) {
    os << num(s.time) << ',' << num(s.e_A) << ',' << num(s.e_B) << ',' << num(s.u_a) << ','
       << num(s.u_p) << ',' << s.N << ',' << s.n_A << ',' << s.n_B << '\n';
  }
}

TrialRecord read_trial_csv(std::istream& is) {
  TrialRecord rec;
  std::string line;
  if (!std::getline(is, line) || line.rfind("time_min,e_A,e_B", 0) != 0) {
    throw ConfigError("read_trial_csv: missing header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 8) throw ConfigError("read_trial_csv: expected 8 columns");
    TrialSample s;
    s.time = csv::parse_double(f[0]);
    s.e_A = csv::parse_double(f[1]);
    s.e_B = csv::parse_double(f[2]);
    s.u_a = csv::parse_double(f[3]);
    s.u_p = csv::parse_double(f[4]);
    s.N = static_cast<std::size_t>(csv::parse_double(f[5]));
    s.n_A = static_cast<std::size_t>(csv::parse_double(f[6]));
    s.n_B = static_cast<std::size_t>(csv::parse_double(f[7]));
    rec.samples.push_back(s);
  }
  rec.completed = !rec.samples.empty();
  if (!rec.samples.empty()) rec.duration = rec.samples.back().time;
  return rec;
}

void write_inputs_csv(std::ostream& os, const TrialRecord& record) {
  os << "time_min,u_a,u_p\n";
  for (const auto& in : record.inputs) {
    os << num(in.time) << ',' << num(in.u_a) << ',' << num(in.u_p) << '\n';
  }
}

void write_controls_csv(std::ostream& os, const TrialRecord& record) {
  os << "time_min,controller,e_A,e_B,u_a,u_p,cost_if_mpc\n";
  for (const auto& c : record.controls) {
    os << num(c.time) << ',' << c.controller << ',' << num(c.e_A) << ',' << num(c.e_B) << ','
       << num(c.u_a) << ',' << num(c.u_p) << ',' << (c.cost ? num(*c.cost) : std::string())
       << '\n';
  }
}

void write_events_csv(std::ostream& os, const TrialRecord& record) {
  os << "time_min,event,id,daughter1,daughter2\n";
  for (const auto& e : record.events) {
    os << num(e.time) << ',' << (e.kind == LifeEventKind::kDivision ? "division" : "flush") << ','
       << e.id << ',' << e.daughter1 << ',' << e.daughter2 << '\n';
  }
}

void write_states_csv(std::ostream& os, const TrialRecord& record) {
  os << "time_min,cell_id,mrna_lacI,mrna_tetR,lacI,tetR,atc,iptg\n";
  for (const auto& row : record.states) {
    os << num(row.time) << ',' << row.id;
    for (double v : row.state.to_array()) os << ',' << num(v);
    os << '\n';
  }
}

void write_lineage_csv(std::ostream& os, const TrialRecord& record) {
  os << "cell_id,parent_id,birth_time_min\n";
  for (const auto& l : record.lineage) {
    os << l.id << ',' << l.parent << ',' << num(l.birth_time) << '\n';
  }
}

void write_table3_csv(std::ostream& os, const std::vector<PerformanceReport>& reports) {
  os << "controller,e_bar,e_bar_f,t_s_mean\n";
  for (const auto& r : reports) {
    os << r.controller << ',' << num(r.e_bar) << ',' << num(r.e_bar_f) << ',' << num(r.t_bar_s)
       << '\n';
  }
}

std::string report_json(const std::vector<PerformanceReport>& reports, const std::string& mode,
                        std::uint64_t campaign_seed, const std::vector<std::uint64_t>& seeds) {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["mode"] = mode;
  j["campaign_seed"] = campaign_seed;
  j["trial_seeds"] = seeds;
  j["note"] = "every controller runs on the same trial seed set";
  auto& arr = j["controllers"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json c;
    c["controller"] = r.controller;
    c["M"] = r.M;
    c["failed"] = r.failed;
    c["unsettled"] = r.unsettled;
    c["settled_fraction"] = r.settled_fraction();
    c["e_bar"] = r.e_bar;
    c["e_bar_f"] = r.e_bar_f;
    c["t_s_mean"] = r.t_bar_s;
    c["t_sim"] = r.t_sim;
    auto& trials = c["trials"] = nlohmann::ordered_json::array();
    for (const auto& t : r.trials) {
      nlohmann::ordered_json tj;
      tj["seed"] = t.seed;
      tj["completed"] = t.completed;
      if (!t.failure.empty()) tj["failure"] = t.failure;
      tj["e_bar"] = t.e_bar;
      tj["e_bar_f"] = t.e_bar_f;
      tj["t_s"] = t.t_s ? nlohmann::ordered_json(*t.t_s) : nlohmann::ordered_json(nullptr);
      trials.push_back(std::move(tj));
    }
    arr.push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

std::string manifest_json(const ExperimentConfig& cfg, std::uint64_t seed,
                          const std::string& command) {
  nlohmann::ordered_json j;
  j["tool"] = "ratioctl";
  j["version"] = version_string();
  j["command"] = command;
  j["seed"] = seed;
  auto& c = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_entries(cfg)) c[k] = v;
  return j.dump(2) + "\n";
}

void write_trial_bundle(const std::filesystem::path& dir, const std::string& tag,
                        const TrialRecord& record) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& stem) {
    std::ofstream out(dir / (stem + "_" + tag + ".csv"));
    if (!out) throw Error("cannot write " + (dir / (stem + "_" + tag + ".csv")).string());
    return out;
  };
  {
    auto out = open("trial");
    write_trial_csv(out, record);
  }
  {
    auto out = open("inputs");
    write_inputs_csv(out, record);
  }
  {
    auto out = open("controls");
    write_controls_csv(out, record);
  }
  {
    auto out = open("events");
    write_events_csv(out, record);
  }
  {
    auto out = open("lineage");
    write_lineage_csv(out, record);
  }
  if (!record.states.empty()) {
    auto out = open("states");
    write_states_csv(out, record);
  }
}

}  // namespace ratiometric
