#pragma once

// Population-level experiment engine. Fixed-population mode and agent mode
// (growth, division, flush-out) share one event loop; fixed mode is agent mode
// with growth and flush-out switched off.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ratiometric/actuation.hpp"
#include "ratiometric/controllers.hpp"
#include "ratiometric/model.hpp"
#include "ratiometric/population.hpp"
#include "ratiometric/rng.hpp"
#include "ratiometric/stochastic.hpp"

namespace ratiometric {

struct ChamberConfig {
  std::size_t capacity = 50;
  double mean_division_time = 30.0;  // min
  double division_time_cv = 0.1;
  bool partition_noise = true;  // binomial mRNA partition; false splits evenly
  bool growth_enabled = true;
  bool flush_enabled = true;

  void validate() const;
};

struct Agent {
  std::uint64_t id = 0;
  std::uint64_t parent = 0;  // 0 for founders
  std::uint64_t generation = 0;
  CellState state;
  double next_division_time = std::numeric_limits<double>::infinity();
  RngStream rng;
};

/// Uniform initial-condition box; inducers start at 0.
struct InitialConditionRanges {
  std::pair<double, double> mrna_lacI{3.0, 6.0};
  std::pair<double, double> mrna_tetR{3.0, 6.0};
  std::pair<double, double> lacI{150.0, 300.0};
  std::pair<double, double> tetR{200.0, 400.0};
};

/// Truncated-normal division deadline: t + max-resampled N(mean, cv mean) >= mean/2.
[[nodiscard]] double draw_division_deadline(double t, const ChamberConfig& chamber,
                                            RngStream& rng);

/// Splits `agent` at time t. mRNA counts are rounded and partitioned
/// binomially (p = 0.5); proteins and inducers, being concentrations, are
/// copied. Daughters get ids `first_id` and `first_id + 1`, streams derived
/// from (master_seed, id, generation) and fresh deadlines drawn from the
/// parent's stream.
[[nodiscard]] std::pair<Agent, Agent> divide(Agent& agent, double t, std::uint64_t first_id,
                                             std::uint64_t master_seed,
                                             const ChamberConfig& chamber);

/// Removes uniformly random agents until at most `capacity` remain. Returns
/// the removed ids in removal order.
std::vector<std::uint64_t> flush_out(std::vector<Agent>& population, std::size_t capacity,
                                     RngStream& rng);

enum class PopulationMode { kFixed, kAgent };

[[nodiscard]] std::string to_string(PopulationMode m);
[[nodiscard]] PopulationMode parse_population_mode(const std::string& name);

struct ControllerSettings {
  ControllerKind kind = ControllerKind::kMPC;
  Actuator bangbang{ActuatorKind::kTJunction, 60.0, 0.5};
  Actuator pi_actuator{ActuatorKind::kDialAWave, 100.0, 1.0};
  PIGains pi;
  Actuator mpc_actuator{ActuatorKind::kDialAWave, 60.0, 0.5};
  MpcConfig mpc;
  InducerInput constant;
};

struct ExperimentConfig {
  PopulationMode mode = PopulationMode::kFixed;
  ToggleSwitchParams params;
  // Inducer exchange is noise-free in experiments: IPTG lives on a 0..1 scale,
  // where count-based diffusion noise would exceed the signal itself.
  NoiseConfig noise{.deterministic_inducer_exchange = true};
  TimingConstraints timing;
  ChamberConfig chamber;
  InitialConditionRanges initial;
  ControllerSettings controller;
  std::size_t initial_cells = 30;
  double target_ratio = 0.6;        // desired fraction in B
  double settling_threshold = 0.15;  // epsilon
  double duration = 1440.0;          // T_sim, min; <= timing.max_experiment
  bool actuation_delay = true;
  bool record_states = false;  // log every cell at every sampling instant
  std::size_t threads = 1;

  /// Fixed mode: 30 cells, no growth or flush-out. Agent mode: 20 founders
  /// growing toward a 50-cell chamber.
  [[nodiscard]] static ExperimentConfig defaults(PopulationMode mode);

  void validate() const;
};

struct TrialSample {
  double time = 0.0;
  double e_A = 0.0;
  double e_B = 0.0;
  double u_a = 0.0;  // environment input held at `time`
  double u_p = 0.0;
  std::size_t N = 0;
  std::size_t n_A = 0;
  std::size_t n_B = 0;

  bool operator==(const TrialSample&) const = default;
};

struct ControlEvent {
  double time = 0.0;
  std::string controller;
  double e_A = 0.0;
  double e_B = 0.0;
  double u_a = 0.0;
  double u_p = 0.0;
  std::optional<double> cost;
  double effective_time = 0.0;

  bool operator==(const ControlEvent&) const = default;
};

struct InputChange {
  double time = 0.0;
  double u_a = 0.0;
  double u_p = 0.0;

  bool operator==(const InputChange&) const = default;
};

enum class LifeEventKind { kDivision, kFlush };

struct LifeEvent {
  double time = 0.0;
  LifeEventKind kind = LifeEventKind::kDivision;
  std::uint64_t id = 0;
  std::uint64_t daughter1 = 0;
  std::uint64_t daughter2 = 0;

  bool operator==(const LifeEvent&) const = default;
};

struct StateRow {
  double time = 0.0;
  std::uint64_t id = 0;
  CellState state;

  bool operator==(const StateRow&) const = default;
};

struct LineageEntry {
  std::uint64_t id = 0;
  std::uint64_t parent = 0;
  double birth_time = 0.0;

  bool operator==(const LineageEntry&) const = default;
};

struct TrialRecord {
  std::string controller;
  std::uint64_t seed = 0;
  double duration = 0.0;
  bool completed = false;
  std::string failure;
  std::vector<TrialSample> samples;
  std::vector<ControlEvent> controls;
  std::vector<InputChange> inputs;
  std::vector<LifeEvent> events;
  std::vector<StateRow> states;
  std::vector<LineageEntry> lineage;

  bool operator==(const TrialRecord&) const = default;
};

/// Draws the founder population from the initial-condition box.
[[nodiscard]] std::vector<Agent> make_founders(const ExperimentConfig& cfg, std::uint64_t seed);

/// Builds the controller described by `cfg.controller` with its own stream.
[[nodiscard]] std::unique_ptr<Controller> make_controller(const ExperimentConfig& cfg,
                                                          std::uint64_t seed);

/// Event loop at SDE-step resolution: every agent takes one em_step per tick;
/// due divisions run in id order, then the chamber is flushed to capacity;
/// snapshots at multiples of T_s; controller decisions at multiples of T_c
/// with (optionally delayed) actuation. Extinction ends the trial with
/// completed = false and the partial record.
[[nodiscard]] TrialRecord run_agent_experiment(const ExperimentConfig& cfg,
                                               Controller& controller, std::uint64_t seed);

/// Convenience overload building the controller from the configuration.
[[nodiscard]] TrialRecord run_agent_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

/// Fixed-population harness path (growth and flush-out disabled).
[[nodiscard]] TrialRecord run_fixed_experiment(ExperimentConfig cfg, std::uint64_t seed);

}  // namespace ratiometric
