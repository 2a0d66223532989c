// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ratiometric/actuation.hpp"
#include "ratiometric/campaign.hpp"
#include "ratiometric/metrics.hpp"
#include "ratiometric/model.hpp"
#include "ratiometric/parallel.hpp"
#include "ratiometric/record_io.hpp"
#include "ratiometric/stochastic.hpp"

using namespace ratiometric;

namespace {

// Tolerances
constexpr double kSettlingBand = 0.40;  // relative, around the reference means
constexpr std::array<double, 3> kReferenceSettling = {1077.0, 563.0, 329.0};  // bb, pi, mpc
constexpr std::array<double, 3> kFinalErrorLimit = {0.10, 0.06, 0.06};
constexpr double kSettledFraction = 0.80;
constexpr std::size_t kTrials = 30;
constexpr std::uint64_t kCampaignSeed = 1;
constexpr double kSaturationFraction = 0.95;
constexpr double kSaturationTime = 500.0;
constexpr std::size_t kSaturationTrials = 5;
constexpr double kResidualLimit = 1e-8;
constexpr double kBasinRelTol = 1e-4;  // endpoint distance relative to the equilibrium
constexpr int kEnsemble = 2000;
constexpr double kEnsembleRelTol = 0.10;
constexpr double kGaRatio = 1.05;
constexpr std::uint64_t kGaSeeds = 50;
constexpr double kAgentFinalErrorLimit = 0.15;

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t hw_threads() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

struct CampaignOutcome {
  CampaignResult result;
  bool delay = true;
};

CampaignOutcome fixed_campaign(bool delay) {
  CampaignOptions o;
  o.trials = kTrials;
  o.seed = kCampaignSeed;
  o.base = ExperimentConfig::defaults(PopulationMode::kFixed);
  o.base.actuation_delay = delay;
  o.threads = hw_threads();
  o.keep_records = true;
  return {run_campaign(o), delay};
}

void criteria_1_to_3(const std::vector<CampaignOutcome>& runs) {
  bool ok1 = true, ok2 = true, ok3 = true;
  std::string d1, d2, d3;
  for (const auto& run : runs) {
    const auto& reps = run.result.reports;
    const char* tag = run.delay ? "delay" : "no delay";
    d1 += fmt("[%s]", tag);
    d2 += fmt("[%s]", tag);
    d3 += fmt("[%s]", tag);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& r = reps[c];
      const double ref = kReferenceSettling[c];
      const bool in_band = std::abs(r.t_bar_s - ref) <= kSettlingBand * ref && r.failed == 0;
      ok1 = ok1 && in_band;
      d1 += fmt(" %s t_s=%.0f (band %.0f..%.0f%s)", r.controller.c_str(), r.t_bar_s,
                ref * (1 - kSettlingBand), ref * (1 + kSettlingBand), in_band ? "" : ", out");

      const bool ef = r.e_bar_f <= kFinalErrorLimit[c] && r.failed == 0;
      ok2 = ok2 && ef;
      d2 += fmt(" %s e_f=%.3f (<=%.2f)", r.controller.c_str(), r.e_bar_f, kFinalErrorLimit[c]);

      const double frac = r.settled_fraction();
      ok3 = ok3 && frac >= kSettledFraction && r.failed == 0;
      d3 += fmt(" %s %.0f%%", r.controller.c_str(), 100.0 * frac);
    }
    const bool ordered = reps[2].t_bar_s < reps[1].t_bar_s && reps[1].t_bar_s < reps[0].t_bar_s;
    ok1 = ok1 && ordered;
    d1 += ordered ? " ordered;" : " NOT ordered;";
    d2 += ";";
    d3 += fmt(" (>=%.0f%%);", 100.0 * kSettledFraction);
  }
  report(1, ok1, d1);
  report(2, ok2, d2);
  report(3, ok3, d3);
}

// ---------------------------------------------------------------------------

void criterion_4() {
  bool ok = true;
  std::string detail;
  for (const InducerInput u : {InducerInput{100.0, 0.0}, InducerInput{0.0, 1.0}}) {
    const bool to_b = u.u_a > 0.0;
    double worst = 1.0;
    for (std::uint64_t seed = 1; seed <= kSaturationTrials; ++seed) {
      ExperimentConfig cfg = ExperimentConfig::defaults(PopulationMode::kFixed);
      cfg.controller.kind = ControllerKind::kConstant;
      cfg.controller.constant = u;
      cfg.duration = kSaturationTime;
      const TrialRecord rec = run_fixed_experiment(cfg, seed);
      if (!rec.completed) {
        worst = 0.0;
        continue;
      }
      const TrialSample& s = rec.samples.back();
      const double frac =
          static_cast<double>(to_b ? s.n_B : s.n_A) / static_cast<double>(s.N);
      worst = std::min(worst, frac);
    }
    ok = ok && worst >= kSaturationFraction;
    detail += fmt("(%g,%g) -> %s: min fraction %.3f over %zu trials; ", u.u_a, u.u_p,
                  to_b ? "B" : "A", worst, kSaturationTrials);
  }
  report(4, ok, detail + fmt("need >= %.2f at %.0f min", kSaturationFraction, kSaturationTime));
}

// ---------------------------------------------------------------------------

double max_abs(const StateVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void criterion_5() {
  const ToggleSwitchParams p;
  const auto res = find_equilibria({}, p);
  int stable = 0, saddle = 0;
  double worst_residual = 0.0;
  for (const auto& e : res.equilibria) {
    stable += e.stability == Stability::kStable;
    saddle += e.stability == Stability::kSaddle;
    worst_residual = std::max(worst_residual, max_abs(ode_rhs(e.state, {}, p)));
  }
  bool ok = res.equilibria.size() == 3 && stable == 2 && saddle == 1 &&
            worst_residual < kResidualLimit;

  const CellState a0{1.0, 20.0, 20.0, 1500.0, 0.0, 0.0};
  const CellState b0{60.0, 1.0, 2500.0, 20.0, 0.0, 0.0};
  const CellState a_end = integrate_ode(a0, {}, 3000.0, 0.1, p);
  const CellState b_end = integrate_ode(b0, {}, 3000.0, 0.1, p);
  auto nearest = [&](const CellState& x) {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.equilibria.size(); ++i) {
      const auto& s = res.equilibria[i].state;
      const double d =
          std::hypot(s.lacI - x.lacI, s.tetR - x.tetR) / std::hypot(s.lacI, s.tetR);
      if (d < dist) dist = d, best = i;
    }
    return std::pair{best, dist};
  };
  const auto [ia, da] = nearest(a_end);
  const auto [ib, db] = nearest(b_end);
  const bool distinct = !res.equilibria.empty() && ia != ib && da <= kBasinRelTol &&
                        db <= kBasinRelTol &&
                        res.equilibria[ia].stability == Stability::kStable &&
                        res.equilibria[ib].stability == Stability::kStable;
  ok = ok && distinct;
  report(5, ok,
         fmt("%zu equilibria (%d stable, %d saddle), max residual %.1e; basin runs end at "
             "equilibria %zu and %zu (rel dist %.1e, %.1e)",
             res.equilibria.size(), stable, saddle, worst_residual, ia, ib, da, db));
}

// ---------------------------------------------------------------------------

void criterion_6() {
  const ToggleSwitchParams p;
  const ReactionNetwork net(p);
  const InducerInput u{0.0, 1.0};
  const CellState x0{4.0, 5.0, 200.0, 300.0, 0.0, 0.0};
  const double horizon = 60.0;
  const NoiseConfig cfg;  // full chemical Langevin noise
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / cfg.sde_step));

  std::vector<CellState> ends(kEnsemble);
  parallel_for(ends.size(), hw_threads(), [&](std::size_t k) {
    RngStream rng = derive_stream(606, StreamTag::kCell, k);
    CellState x = x0;
    for (std::size_t i = 0; i < steps; ++i) x = em_step(x, u, net, cfg, rng);
    ends[k] = x;
  });
  double lacI = 0.0, tetR = 0.0;
  for (const auto& x : ends) lacI += x.lacI, tetR += x.tetR;
  lacI /= kEnsemble;
  tetR /= kEnsemble;
  const CellState ode = integrate_ode(x0, u, horizon, 0.01, p);
  const double rel_l = std::abs(lacI - ode.lacI) / ode.lacI;
  const double rel_t = std::abs(tetR - ode.tetR) / ode.tetR;

  // Zero noise against a hand-written explicit Euler loop.
  NoiseConfig quiet = cfg;
  quiet.noise_scale = 0.0;
  RngStream rng = derive_stream(1, StreamTag::kCell);
  CellState x = x0, euler = x0;
  bool identical = true;
  for (std::size_t i = 0; i < steps; ++i) {
    x = em_step(x, u, net, quiet, rng);
    const StateVector f = ode_rhs(euler, u, p);
    StateVector v = euler.to_array();
    for (std::size_t j = 0; j < kStateDim; ++j) v[j] = std::max(0.0, v[j] + quiet.sde_step * f[j]);
    euler = CellState::from_array(v);
    identical = identical && x == euler;
  }

  report(6, rel_l <= kEnsembleRelTol && rel_t <= kEnsembleRelTol && identical,
         fmt("ensemble of %d vs ODE at %g min: lacI %.1f/%.1f (%.2f%%), tetR %.1f/%.1f (%.2f%%); "
             "noise 0 %s explicit Euler",
             kEnsemble, horizon, lacI, ode.lacI, 100 * rel_l, tetR, ode.tetR, 100 * rel_t,
             identical ? "==" : "!="));
}

// ---------------------------------------------------------------------------

void criterion_7() {
  MpcConfig cfg;
  cfg.prediction_horizon = 45.0;
  cfg.ga_levels = 2;
  const ToggleSwitchParams p;
  const double U_a = 60.0, U_p = 0.5;

  // A subset drawn from a real founder population.
  ExperimentConfig ecfg = ExperimentConfig::defaults(PopulationMode::kFixed);
  std::vector<CellState> sub;
  for (const auto& a : make_founders(ecfg, 77)) {
    if (sub.size() == cfg.subset_size) break;
    sub.push_back(a.state);
  }
  const SequenceCost cost = [&](std::span<const std::size_t> genes) {
    std::vector<InducerInput> seq;
    for (std::size_t g : genes) seq.push_back(daw_constrain(g ? U_a : 0.0, U_a, U_p));
    return mpc_cost(sub, seq, cfg, 0.6, p);
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < 8; ++mask) {
    const std::array<std::size_t, 3> genes = {mask & 1, (mask >> 1) & 1, (mask >> 2) & 1};
    best = std::min(best, cost(genes));
  }
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= kGaSeeds; ++seed) {
    RngStream rng = derive_stream(seed, StreamTag::kController);
    worst = std::max(worst, run_genetic_algorithm(cost, cfg.active_genes(), cfg, rng).best_cost);
  }
  report(7, cfg.active_genes() == 3 && worst <= kGaRatio * best,
         fmt("worst GA cost %.4f vs exhaustive minimum %.4f (ratio %.4f, limit %.2f) over %llu "
             "seeds",
             worst, best, worst / best, kGaRatio, static_cast<unsigned long long>(kGaSeeds)));
}

// ---------------------------------------------------------------------------

std::string csv_bytes(const TrialRecord& rec) {
  std::ostringstream os;
  write_trial_csv(os, rec);
  write_inputs_csv(os, rec);
  write_controls_csv(os, rec);
  write_events_csv(os, rec);
  write_states_csv(os, rec);
  write_lineage_csv(os, rec);
  return os.str();
}

void criterion_8(const std::vector<CampaignOutcome>& runs) {
  std::size_t snapshots = 0, partition_bad = 0, daw_bad = 0, negative = 0;

  // Partition on every snapshot of every campaign trial: n_A + n_B <= N, and
  // the full per-cell recount on trials run with state logging.
  for (const auto& run : runs) {
    for (const auto& per_ctrl : run.result.records) {
      for (const auto& rec : per_ctrl) {
        for (const auto& s : rec.samples) {
          ++snapshots;
          if (s.n_A + s.n_B > s.N || s.N == 0) ++partition_bad;
        }
      }
    }
  }

  const Actuator pi_act = ExperimentConfig::defaults(PopulationMode::kFixed).controller.pi_actuator;
  const Actuator mpc_act =
      ExperimentConfig::defaults(PopulationMode::kFixed).controller.mpc_actuator;
  for (const auto& run : runs) {
    for (std::size_t c = 0; c < run.result.records.size(); ++c) {
      const std::string& name = run.result.reports[c].controller;
      if (name != "pi" && name != "mpc") continue;
      const Actuator& act = name == "pi" ? pi_act : mpc_act;
      for (const auto& rec : run.result.records[c]) {
        for (const auto& ev : rec.controls) {
          if (std::abs(ev.u_a / act.U_a + ev.u_p / act.U_p - 1.0) > 1e-12) ++daw_bad;
        }
      }
    }
  }

  // State-logged trials in both modes for the per-cell checks.
  std::size_t recounted = 0;
  bool deterministic = true;
  for (PopulationMode mode : {PopulationMode::kFixed, PopulationMode::kAgent}) {
    for (ControllerKind kind : {ControllerKind::kBangBang, ControllerKind::kPI,
                                ControllerKind::kMPC}) {
      ExperimentConfig cfg = ExperimentConfig::defaults(mode);
      cfg.controller.kind = kind;
      cfg.duration = 360.0;
      cfg.record_states = true;
      const TrialRecord rec = run_agent_experiment(cfg, 5);
      std::size_t row = 0;
      for (const auto& s : rec.samples) {
        std::size_t a = 0, b = 0, cc = 0, n = 0;
        for (; row < rec.states.size() && rec.states[row].time <= s.time + 1e-9; ++row) {
          const CellState& x = rec.states[row].state;
          ++n;
          switch (classify(x)) {
            case CellClass::kA: ++a; break;
            case CellClass::kB: ++b; break;
            case CellClass::kC: ++cc; break;
          }
          for (double v : x.to_array()) negative += v < 0.0;
        }
        ++recounted;
        if (n != s.N || a != s.n_A || b != s.n_B || a + b + cc != s.N) ++partition_bad;
      }
      deterministic = deterministic && csv_bytes(rec) == csv_bytes(run_agent_experiment(cfg, 5));
    }
  }

  ExperimentConfig agent = ExperimentConfig::defaults(PopulationMode::kAgent);
  agent.controller.kind = ControllerKind::kMPC;
  agent.duration = 240.0;
  agent.record_states = true;
  const std::string one = csv_bytes(run_agent_experiment(agent, 31));
  agent.threads = 4;
  const bool thread_free = one == csv_bytes(run_agent_experiment(agent, 31));

  report(8,
         partition_bad == 0 && daw_bad == 0 && negative == 0 && deterministic && thread_free,
         fmt("partition violations %zu over %zu snapshots (%zu recounted per cell); DAW "
             "violations %zu; negative states %zu; same-seed CSV %s; 1 vs 4 threads %s",
             partition_bad, snapshots + recounted, recounted, daw_bad, negative,
             deterministic ? "identical" : "DIFFERENT", thread_free ? "identical" : "DIFFERENT"));
}

// ---------------------------------------------------------------------------

void criterion_9() {
  ExperimentConfig cfg = ExperimentConfig::defaults(PopulationMode::kAgent);
  cfg.controller.kind = ControllerKind::kMPC;
  cfg.threads = hw_threads();
  const TrialRecord rec = run_agent_experiment(cfg, kCampaignSeed);
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  for (const auto& s : rec.samples) lo = std::min(lo, s.N), hi = std::max(hi, s.N);
  const bool sizes = rec.completed && lo >= 1 && hi <= cfg.chamber.capacity;
  const double ef = rec.completed ? final_error_index(rec) : std::nan("");
  const auto ts = settling_time(rec, cfg.settling_threshold);
  report(9, sizes && ef <= kAgentFinalErrorLimit,
         fmt("agent MPC, M=1: N in [%zu, %zu] (capacity %zu), e_f=%.3f (<=%.2f), t_s=%s",
             lo, hi, cfg.chamber.capacity, ef, kAgentFinalErrorLimit,
             ts ? fmt("%.0f", *ts).c_str() : "unsettled"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<CampaignOutcome> runs;
  runs.push_back(fixed_campaign(true));
  runs.push_back(fixed_campaign(false));
  criteria_1_to_3(runs);
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(runs);
  criterion_9();

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("acceptance: %d failed, %.0f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
