// ratioctl: single trials, campaigns and equilibrium analysis from the shell.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ratiometric/campaign.hpp"
#include "ratiometric/config.hpp"
#include "ratiometric/errors.hpp"
#include "ratiometric/metrics.hpp"
#include "ratiometric/model.hpp"
#include "ratiometric/record_io.hpp"

namespace fs = std::filesystem;
using namespace ratiometric;

namespace {

struct CommonFlags {
  std::optional<std::string> mode;
  std::string config;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::optional<double> duration;
  std::size_t threads = 1;
  bool no_delay = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--mode", f.mode, "population mode")
      ->check(CLI::IsMember({"fixed", "agent"}));
  app->add_option("--config", f.config, "key = value configuration file")
      ->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--duration", f.duration, "experiment length, min");
  app->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--no-delay", f.no_delay, "apply commands without the actuation delay");
}

ExperimentConfig build_config(const CommonFlags& f) {
  const PopulationMode mode = parse_population_mode(f.mode.value_or("fixed"));
  ExperimentConfig cfg = f.config.empty()
                             ? ExperimentConfig::defaults(mode)
                             : load_experiment_config(KeyValueConfig::load(f.config), mode);
  if (f.mode && cfg.mode != mode) {
    throw ConfigError("--mode " + *f.mode + " conflicts with the mode in " + f.config);
  }
  if (f.duration) cfg.duration = *f.duration;
  if (f.no_delay) cfg.actuation_delay = false;
  cfg.threads = f.threads;
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  os << s;
}

std::string describe(const std::optional<double>& t_s) {
  if (!t_s) return "unsettled";
  std::ostringstream os;
  os << *t_s << " min";
  return os.str();
}

int run_simulate(const CommonFlags& f, const std::string& controller, const std::string& cmdline) {
  ExperimentConfig cfg = build_config(f);
  cfg.controller.kind = parse_controller_kind(controller);
  const fs::path dir(f.out);
  fs::create_directories(dir);

  const TrialRecord rec = cfg.mode == PopulationMode::kAgent ? run_agent_experiment(cfg, f.seed)
                                                             : run_fixed_experiment(cfg, f.seed);
  write_trial_bundle(dir, controller, rec);
  write_text(dir / "manifest.json", manifest_json(cfg, f.seed, cmdline));

  if (!rec.completed) {
    std::cerr << "trial failed: " << rec.failure << '\n';
    return 2;
  }
  const TrialIndices ix = compute_indices(rec, cfg.duration, cfg.settling_threshold);
  std::cout << std::setprecision(4) << controller << ": e_bar " << ix.e_bar;
  if (cfg.duration >= kFinalWindow) std::cout << ", e_bar_f " << ix.e_bar_f;
  std::cout << ", t_s " << describe(ix.t_s) << '\n';
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

int run_campaign_cmd(const CommonFlags& f, const std::vector<std::string>& controllers,
                     std::size_t trials, bool keep, const std::string& cmdline) {
  CampaignOptions o;
  o.base = build_config(f);
  o.controllers.clear();
  for (const auto& c : controllers) o.controllers.push_back(parse_controller_kind(c));
  o.trials = trials;
  o.seed = f.seed;
  // trials are the parallel unit here; each trial stays single-threaded
  o.threads = f.threads;
  o.base.threads = 1;
  o.keep_records = keep;

  const CampaignResult res = run_campaign(o);
  const fs::path dir(f.out);
  fs::create_directories(dir);
  write_text(dir / "report.json", report_json(res.reports, to_string(o.base.mode), f.seed, res.seeds));
  {
    std::ofstream t3(dir / "table3.csv", std::ios::binary);
    write_table3_csv(t3, res.reports);
  }
  write_text(dir / "manifest.json", manifest_json(o.base, f.seed, cmdline));
  if (keep) {
    for (std::size_t c = 0; c < res.records.size(); ++c) {
      for (std::size_t k = 0; k < res.records[c].size(); ++k) {
        write_trial_bundle(dir, res.reports[c].controller + "_" + std::to_string(k),
                           res.records[c][k]);
      }
    }
  }

  std::cout << std::left << std::setw(12) << "controller" << std::setw(10) << "e_bar"
            << std::setw(10) << "e_bar_f" << std::setw(10) << "t_s" << "settled\n";
  std::cout << std::setprecision(4);
  for (const auto& r : res.reports) {
    std::cout << std::setw(12) << r.controller << std::setw(10) << r.e_bar << std::setw(10)
              << r.e_bar_f << std::setw(10) << r.t_bar_s << (r.M - r.failed - r.unsettled) << '/'
              << r.M;
    if (r.failed > 0) std::cout << " (" << r.failed << " failed)";
    std::cout << '\n';
  }
  return 0;
}

int run_equilibria(double u_a, double u_p, const std::string& config) {
  ToggleSwitchParams p;
  if (!config.empty()) p = load_experiment_config(KeyValueConfig::load(config)).params;
  p.validate();
  const EquilibriumSearchResult res = find_equilibria({u_a, u_p}, p);
  if (res.equilibria.empty()) {
    std::cerr << "no equilibrium found: " << res.diagnostic << '\n';
    return 2;
  }
  std::cout << "lacI,tetR,mrna_lacI,mrna_tetR,atc,iptg,stability,residual\n";
  std::cout << std::setprecision(8);
  for (const auto& e : res.equilibria) {
    const CellState& s = e.state;
    std::cout << s.lacI << ',' << s.tetR << ',' << s.mrna_lacI << ',' << s.mrna_tetR << ','
              << s.atc << ',' << s.iptg << ',' << to_string(e.stability) << ',' << e.residual
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ratiometric control of toggle-switch populations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  std::string cmdline;
  for (int i = 0; i < argc; ++i) cmdline += (i ? " " : "") + std::string(argv[i]);

  CommonFlags sim_flags;
  std::string sim_controller = "mpc";
  auto* sim = app.add_subcommand("simulate", "run one trial and write its CSV bundle");
  add_common(sim, sim_flags);
  sim->add_option("--controller", sim_controller, "bangbang, pi, mpc or constant");

  CommonFlags camp_flags;
  std::vector<std::string> camp_controllers{"bangbang", "pi", "mpc"};
  std::size_t trials = 30;
  bool keep = false;
  auto* camp = app.add_subcommand("campaign", "run M trials per controller");
  add_common(camp, camp_flags);
  camp->add_option("--controller", camp_controllers, "controllers to compare")->delimiter(',');
  camp->add_option("--trials", trials, "trials per controller")->check(CLI::PositiveNumber);
  camp->add_flag("--keep-trials", keep, "also write every trial bundle");

  double u_a = 0.0, u_p = 0.0;
  std::string eq_config;
  auto* eq = app.add_subcommand("equilibria", "equilibria of the toggle switch at fixed input");
  eq->add_option("--u-a", u_a, "aTc, ng/mL")->check(CLI::NonNegativeNumber);
  eq->add_option("--u-p", u_p, "IPTG, mM")->check(CLI::NonNegativeNumber);
  eq->add_option("--config", eq_config, "configuration with parameter overrides")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return run_simulate(sim_flags, sim_controller, cmdline);
    if (*camp) return run_campaign_cmd(camp_flags, camp_controllers, trials, keep, cmdline);
    return run_equilibria(u_a, u_p, eq_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
