#include "ratiometric/agent_sim.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <random>
#include <sstream>

#include "ratiometric/errors.hpp"
#include "ratiometric/parallel.hpp"

namespace ratiometric {

namespace {

constexpr double kTimeEps = 1e-9;

bool is_multiple(double value, double period) {
  const double ratio = value / period;
  return std::abs(ratio - std::round(ratio)) < 1e-6;
}

// Index (into a shrinking sequence) of each removal needed to reach capacity.
std::vector<std::size_t> draw_removals(std::size_t n, std::size_t capacity, RngStream& rng) {
  std::vector<std::size_t> picks;
  while (n > capacity) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    picks.push_back(dist(rng));
    --n;
  }
  return picks;
}

long division_step(const Agent& a, double dt) {
  if (!std::isfinite(a.next_division_time)) return LONG_MAX;
  return static_cast<long>(std::ceil(a.next_division_time / dt - kTimeEps));
}

}  // namespace

void ChamberConfig::validate() const {
  if (capacity < 2) throw ConfigError("chamber capacity must be >= 2");
  if (!(mean_division_time > 0.0)) throw ConfigError("mean_division_time must be > 0");
  if (!(division_time_cv >= 0.0)) throw ConfigError("division_time_cv must be >= 0");
}

double draw_division_deadline(double t, const ChamberConfig& chamber, RngStream& rng) {
  const double mean = chamber.mean_division_time;
  if (chamber.division_time_cv == 0.0) return t + mean;
  std::normal_distribution<double> dist(mean, chamber.division_time_cv * mean);
  double d = dist(rng);
  while (d < 0.5 * mean) d = dist(rng);
  return t + d;
}

std::pair<Agent, Agent> divide(Agent& agent, double t, std::uint64_t first_id,
                               std::uint64_t master_seed, const ChamberConfig& chamber) {
  auto split = [&](double molecules) -> std::pair<double, double> {
    const auto n = static_cast<long long>(std::llround(std::max(0.0, molecules)));
    long long first = n / 2;
    if (chamber.partition_noise && n > 0) {
      std::binomial_distribution<long long> dist(n, 0.5);
      first = dist(agent.rng);
    }
    return {static_cast<double>(first), static_cast<double>(n - first)};
  };
  const auto [lacI_m1, lacI_m2] = split(agent.state.mrna_lacI);
  const auto [tetR_m1, tetR_m2] = split(agent.state.mrna_tetR);

  auto make = [&](std::uint64_t id, double m_lacI, double m_tetR) {
    Agent d;
    d.id = id;
    d.parent = agent.id;
    d.generation = agent.generation + 1;
    d.state = agent.state;
    d.state.mrna_lacI = m_lacI;
    d.state.mrna_tetR = m_tetR;
    d.next_division_time = draw_division_deadline(t, chamber, agent.rng);
    d.rng = derive_stream(master_seed, StreamTag::kCell, id, d.generation);
    return d;
  };
  Agent first = make(first_id, lacI_m1, tetR_m1);
  Agent second = make(first_id + 1, lacI_m2, tetR_m2);
  return {std::move(first), std::move(second)};
}

std::vector<std::uint64_t> flush_out(std::vector<Agent>& population, std::size_t capacity,
                                     RngStream& rng) {
  std::vector<std::uint64_t> removed;
  for (std::size_t idx : draw_removals(population.size(), capacity, rng)) {
    removed.push_back(population[idx].id);
    population.erase(population.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return removed;
}

std::string to_string(PopulationMode m) { return m == PopulationMode::kFixed ? "fixed" : "agent"; }

PopulationMode parse_population_mode(const std::string& name) {
  if (name == "fixed") return PopulationMode::kFixed;
  if (name == "agent") return PopulationMode::kAgent;
  throw ConfigError("unknown mode '" + name + "' (expected fixed or agent)");
}

ExperimentConfig ExperimentConfig::defaults(PopulationMode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  if (mode == PopulationMode::kFixed) {
    cfg.initial_cells = 30;
    cfg.chamber.growth_enabled = false;
    cfg.chamber.flush_enabled = false;
  } else {
    cfg.initial_cells = 20;
    cfg.chamber.growth_enabled = true;
    cfg.chamber.flush_enabled = true;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  params.validate();
  noise.validate();
  timing.validate();
  chamber.validate();
  controller.pi.validate();
  controller.mpc.validate();
  controller.bangbang.validate();
  controller.pi_actuator.validate();
  controller.mpc_actuator.validate();
  if (initial_cells < 1) throw ConfigError("initial_cells must be >= 1");
  if (!(target_ratio >= 0.0 && target_ratio <= 1.0)) {
    throw ConfigError("target_ratio must be in [0, 1]");
  }
  if (!(settling_threshold > 0.0)) throw ConfigError("settling_threshold must be > 0");
  if (!(duration > 0.0) || duration > timing.max_experiment + kTimeEps) {
    throw ConfigError("duration must be in (0, max_experiment]");
  }
  if (!is_multiple(duration, timing.sampling_period)) {
    throw ConfigError("duration must be a multiple of sampling_period");
  }
  if (!is_multiple(timing.sampling_period, noise.sde_step)) {
    throw ConfigError("sampling_period must be a multiple of sde_step");
  }
  if (!(controller.constant.within_bounds())) throw ConfigError("constant input out of bounds");
}

std::vector<Agent> make_founders(const ExperimentConfig& cfg, std::uint64_t seed) {
  RngStream ic = derive_stream(seed, StreamTag::kInitialConditions);
  auto uniform = [&](std::pair<double, double> range) {
    std::uniform_real_distribution<double> dist(range.first, range.second);
    return dist(ic);
  };
  std::vector<Agent> founders;
  founders.reserve(cfg.initial_cells);
  for (std::size_t i = 0; i < cfg.initial_cells; ++i) {
    Agent a;
    a.id = i + 1;
    a.state.mrna_lacI = uniform(cfg.initial.mrna_lacI);
    a.state.mrna_tetR = uniform(cfg.initial.mrna_tetR);
    a.state.lacI = uniform(cfg.initial.lacI);
    a.state.tetR = uniform(cfg.initial.tetR);
    a.rng = derive_stream(seed, StreamTag::kCell, a.id, 0);
    if (cfg.chamber.growth_enabled) {
      // Founders start at a random phase of their cycle.
      std::uniform_real_distribution<double> phase(0.0, 1.0);
      a.next_division_time = (1.0 - phase(a.rng)) * cfg.chamber.mean_division_time;
    }
    founders.push_back(std::move(a));
  }
  return founders;
}

std::unique_ptr<Controller> make_controller(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& c = cfg.controller;
  switch (c.kind) {
    case ControllerKind::kBangBang:
      return std::make_unique<BangBangController>(c.bangbang);
    case ControllerKind::kPI:
      return std::make_unique<PiController>(c.pi, c.pi_actuator, cfg.timing.actuation_period);
    case ControllerKind::kMPC: {
      MpcConfig mpc = c.mpc;
      mpc.control_interval = cfg.timing.actuation_period;
      return std::make_unique<MpcController>(mpc, c.mpc_actuator, cfg.params, cfg.target_ratio,
                                             derive_stream(seed, StreamTag::kController));
    }
    case ControllerKind::kConstant:
      return std::make_unique<ConstantController>(c.constant);
  }
  throw ConfigError("unknown controller kind");
}

TrialRecord run_agent_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  auto controller = make_controller(cfg, seed);
  return run_agent_experiment(cfg, *controller, seed);
}

TrialRecord run_fixed_experiment(ExperimentConfig cfg, std::uint64_t seed) {
  cfg.mode = PopulationMode::kFixed;
  cfg.chamber.growth_enabled = false;
  cfg.chamber.flush_enabled = false;
  return run_agent_experiment(cfg, seed);
}

TrialRecord run_agent_experiment(const ExperimentConfig& cfg, Controller& controller,
                                 std::uint64_t seed) {
  cfg.validate();
  const ReactionNetwork net(cfg.params);
  const double dt = cfg.noise.sde_step;
  const double ts = cfg.timing.sampling_period;
  const long steps_per_sample = std::lround(ts / dt);
  const long total_samples = std::lround(cfg.duration / ts);
  const long samples_per_control = cfg.timing.samples_per_actuation();

  struct Live {
    Agent agent;
    long pos;  // SDE steps completed
  };

  TrialRecord rec;
  rec.controller = controller.name();
  rec.seed = seed;
  rec.duration = cfg.duration;

  std::vector<Live> live;
  for (auto& a : make_founders(cfg, seed)) {
    rec.lineage.push_back({a.id, 0, 0.0});
    live.push_back({std::move(a), 0});
  }
  std::uint64_t next_id = live.size() + 1;
  RngStream flush_rng = derive_stream(seed, StreamTag::kFlush);
  ActuationScheduler scheduler(cfg.timing, derive_stream(seed, StreamTag::kActuation));
  scheduler.set_bypass_delay(!cfg.actuation_delay);
  rec.inputs.push_back({0.0, scheduler.current().u_a, scheduler.current().u_p});

  std::vector<InducerInput> segment_inputs(static_cast<std::size_t>(steps_per_sample));

  try {
    for (long j = 0;; ++j) {
      const long k0 = j * steps_per_sample;
      const double t = static_cast<double>(j) * ts;

      std::vector<IdentifiedCell> cells;
      cells.reserve(live.size());
      for (const auto& l : live) cells.push_back({l.agent.id, l.agent.state});
      const PopulationSnapshot snap(t, std::move(cells));
      if (snap.empty()) {
        rec.failure = "population extinct";
        break;
      }
      const ErrorSignal e = errors(ratios(snap), cfg.target_ratio, t);

      if (j % samples_per_control == 0 && j < total_samples) {
        const ControlDecision d = controller.decide(snap, e);
        const DelayedCommand ev = scheduler.issue(d.command, t);
        rec.controls.push_back({t, controller.name(), e.e_A, e.e_B, d.command.u_a, d.command.u_p,
                                d.cost, ev.effective_time});
      }
      const double pending = scheduler.next_change();
      const InducerInput held = scheduler.input_at(t + kTimeEps);
      if (pending <= t + kTimeEps) rec.inputs.push_back({pending, held.u_a, held.u_p});
      rec.samples.push_back({t, e.e_A, e.e_B, held.u_a, held.u_p, snap.size(), snap.n_A(),
                             snap.n_B()});
      if (cfg.record_states) {
        for (const auto& c : snap.cells()) rec.states.push_back({t, c.id, c.state});
      }
      if (j == total_samples) {
        rec.completed = true;
        break;
      }

      for (long s = 0; s < steps_per_sample; ++s) {
        const double ts_step = static_cast<double>(k0 + s) * dt;
        const double change = scheduler.next_change();
        segment_inputs[static_cast<std::size_t>(s)] = scheduler.input_at(ts_step + kTimeEps);
        if (change <= ts_step + kTimeEps) {
          const InducerInput& u = scheduler.current();
          rec.inputs.push_back({change, u.u_a, u.u_p});
        }
      }

      const long k1 = k0 + steps_per_sample;
      while (true) {
        parallel_for(live.size(), cfg.threads, [&](std::size_t i) {
          Live& l = live[i];
          const long target = std::min(k1, division_step(l.agent, dt));
          while (l.pos < target) {
            l.agent.state = em_step(l.agent.state, segment_inputs[static_cast<std::size_t>(l.pos - k0)],
                                    net, cfg.noise, l.agent.rng, dt);
            ++l.pos;
          }
        });

        long due = LONG_MAX;
        for (const auto& l : live) {
          const long ds = division_step(l.agent, dt);
          if (ds <= k1 && l.pos == ds) due = std::min(due, ds);
        }
        if (due == LONG_MAX) break;

        const double te = static_cast<double>(due) * dt;
        std::vector<Live> next;
        std::vector<Live> born;
        next.reserve(live.size() + 2);
        for (auto& l : live) {
          if (l.pos == due && division_step(l.agent, dt) == due) {
            auto [d1, d2] = divide(l.agent, te, next_id, seed, cfg.chamber);
            next_id += 2;
            rec.events.push_back({te, LifeEventKind::kDivision, l.agent.id, d1.id, d2.id});
            rec.lineage.push_back({d1.id, l.agent.id, te});
            rec.lineage.push_back({d2.id, l.agent.id, te});
            born.push_back({std::move(d1), due});
            born.push_back({std::move(d2), due});
          } else {
            next.push_back(std::move(l));
          }
        }
        for (auto& b : born) next.push_back(std::move(b));
        live = std::move(next);

        if (cfg.chamber.flush_enabled) {
          for (std::size_t idx : draw_removals(live.size(), cfg.chamber.capacity, flush_rng)) {
            rec.events.push_back({te, LifeEventKind::kFlush, live[idx].agent.id, 0, 0});
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
          }
        }
      }
    }
  } catch (const IntegrationDiverged& ex) {
    rec.completed = false;
    rec.failure = ex.what();
  }
  return rec;
}

}  // namespace ratiometric
