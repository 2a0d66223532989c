#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratiometric/actuation.hpp"
#include "ratiometric/model.hpp"
#include "ratiometric/population.hpp"
#include "ratiometric/rng.hpp"

namespace ratiometric {

// ---------------------------------------------------------------------------
// Bang-Bang (T-junction)

/// Applies the input that reduces max(|e_A|, |e_B|):
///   |e_B| >= |e_A|: e_B <= 0 -> (0, U_p), else (U_a, 0)
///   |e_B| <  |e_A|: e_A <= 0 -> (U_a, 0), else (0, U_p)
[[nodiscard]] InducerInput bangbang_step(const ErrorSignal& e, double U_a, double U_p);

// ---------------------------------------------------------------------------
// PI with dynamic saturation and conditional-integration anti-windup (DAW)

struct PIGains {
  double k_P_a = 66.67;
  double k_I_a = 1.2;
  double k_P_p = 2.25;
  double k_I_p = 0.006;

  void validate() const;
};

/// Rectangle-rule error integrals (error * min).
struct PIState {
  double integral_e_B = 0.0;
  double integral_e_A = 0.0;
};

struct PIOutput {
  InducerInput command;
  double u_a_raw = 0.0;
  double upper_limit = 0.0;
  bool saturated = false;
  bool integrator_frozen = false;
};

/// u_a_raw = k_P_a e_B + k_I_a I_B - (k_P_p e_A + k_I_p I_A), evaluated with
/// the integrals accumulated before this step. u_a is clamped to [0, 50] when
/// |e_B| < |e_A| and to [0, 100] otherwise (never above U_a); u_p follows the
/// DAW constraint. The integrals then advance by e * dt unless the clamp is
/// active and the increment would push u_a_raw further outside the range.
[[nodiscard]] PIOutput pi_step(const ErrorSignal& e, const PIGains& gains, PIState& state,
                               double dt, double U_a, double U_p);

// ---------------------------------------------------------------------------
// MPC with a mutation-free genetic algorithm

struct MpcConfig {
  double prediction_horizon = 75.0;  // T_p, min
  double control_interval = 15.0;    // T_c, min
  double alpha = 0.6;
  std::size_t subset_size = 10;
  std::size_t ga_sequence_len = 20;  // genes carried per candidate
  std::size_t ga_generations = 10;   // M_max
  std::size_t ga_population_size = 20;
  std::size_t ga_levels = 11;        // u_a levels in [0, U_a], endpoints included
  double ga_elite_fraction = 0.2;
  double prediction_step = 0.5;  // ODE step of the internal model, min

  void validate() const;

  /// ceil(T_p / T_c): genes that influence the cost.
  [[nodiscard]] std::size_t active_genes() const;
};

/// Stratified sample of k cells whose A/B ratios are within 1/k of the
/// population's: round(k r_A) from A, round(k r_B) from B, the rest from C
/// (adjusted by one where the strata need it), each stratum sampled uniformly
/// without replacement. k >= N returns the whole population.
[[nodiscard]] std::vector<IdentifiedCell> select_representative_subset(
    const PopulationSnapshot& snapshot, std::size_t k, RngStream& rng);

/// Integral over [0, T_p] of alpha |e_B| + (1 - alpha) |e_A| for the subset
/// predicted with the deterministic model under the piecewise-constant
/// `sequence` (one input per T_c interval). Left rectangle rule at
/// cfg.prediction_step. Throws ConfigError when the sequence does not span T_p.
[[nodiscard]] double mpc_cost(std::span<const CellState> subset,
                              std::span<const InducerInput> sequence, const MpcConfig& cfg,
                              double r, const ToggleSwitchParams& params);

struct GaResult {
  std::vector<std::size_t> best;  // level indices, ga_sequence_len long
  double best_cost = 0.0;
  double initial_best_cost = 0.0;
  std::size_t evaluations = 0;  // distinct cost evaluations
};

using SequenceCost = std::function<double(std::span<const std::size_t>)>;

/// Mutation-free GA: uniform random initialization, elitism, binary-tournament
/// parents and one-point crossover inside the evaluated prefix. `cost` sees
/// only the first `active` genes; identical prefixes are evaluated once.
[[nodiscard]] GaResult run_genetic_algorithm(const SequenceCost& cost, std::size_t active,
                                             const MpcConfig& cfg, RngStream& rng);

struct MpcOutput {
  InducerInput command;
  double cost = 0.0;
  bool fell_back = false;
};

/// One receding-horizon decision: subset selection, GA over DAW levels, first
/// move of the best sequence.
[[nodiscard]] MpcOutput mpc_step(const PopulationSnapshot& snapshot, const MpcConfig& cfg,
                                 double r, RngStream& rng, double U_a, double U_p,
                                 const ToggleSwitchParams& params);

// ---------------------------------------------------------------------------
// Closed-loop controller objects

enum class ControllerKind { kBangBang, kPI, kMPC, kConstant };

[[nodiscard]] std::string to_string(ControllerKind k);
[[nodiscard]] ControllerKind parse_controller_kind(const std::string& name);

struct ControlDecision {
  InducerInput command;
  std::optional<double> cost;  // set by MPC
};

class Controller {
 public:
  virtual ~Controller() = default;
  [[nodiscard]] virtual ControllerKind kind() const = 0;
  [[nodiscard]] std::string name() const { return to_string(kind()); }
  virtual ControlDecision decide(const PopulationSnapshot& snapshot, const ErrorSignal& e) = 0;
};

class BangBangController final : public Controller {
 public:
  explicit BangBangController(Actuator actuator) : actuator_(actuator) {}
  [[nodiscard]] ControllerKind kind() const override { return ControllerKind::kBangBang; }
  ControlDecision decide(const PopulationSnapshot& snapshot, const ErrorSignal& e) override;

 private:
  Actuator actuator_;
};

class PiController final : public Controller {
 public:
  PiController(PIGains gains, Actuator actuator, double dt)
      : gains_(gains), actuator_(actuator), dt_(dt) {}
  [[nodiscard]] ControllerKind kind() const override { return ControllerKind::kPI; }
  ControlDecision decide(const PopulationSnapshot& snapshot, const ErrorSignal& e) override;
  [[nodiscard]] const PIState& state() const { return state_; }

 private:
  PIGains gains_;
  PIState state_;
  Actuator actuator_;
  double dt_;
};

class MpcController final : public Controller {
 public:
  MpcController(MpcConfig cfg, Actuator actuator, ToggleSwitchParams params, double r,
                RngStream rng)
      : cfg_(cfg), actuator_(actuator), params_(params), r_(r), rng_(std::move(rng)) {}
  [[nodiscard]] ControllerKind kind() const override { return ControllerKind::kMPC; }
  ControlDecision decide(const PopulationSnapshot& snapshot, const ErrorSignal& e) override;

 private:
  MpcConfig cfg_;
  Actuator actuator_;
  ToggleSwitchParams params_;
  double r_;
  RngStream rng_;
};

/// Open-loop input, used for saturation experiments.
class ConstantController final : public Controller {
 public:
  explicit ConstantController(InducerInput u) : u_(u) {}
  [[nodiscard]] ControllerKind kind() const override { return ControllerKind::kConstant; }
  ControlDecision decide(const PopulationSnapshot&, const ErrorSignal&) override {
    return {u_, std::nullopt};
  }

 private:
  InducerInput u_;
};

}  // namespace ratiometric
