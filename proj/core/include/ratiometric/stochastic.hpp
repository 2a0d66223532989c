#pragma once

// Chemical Langevin description of the toggle switch, integrated with
// Euler-Maruyama:
//   x' = x + S a(x) dt + scale * S diag(sqrt(a(x))) sqrt(dt) xi

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ratiometric/model.hpp"
#include "ratiometric/rng.hpp"

namespace ratiometric {

inline constexpr std::size_t kReactionCount = 12;

/// Reaction order: for each of mRNA_LacI, mRNA_TetR, LacI, TetR a production
/// then a degradation reaction; then aTc influx, aTc efflux, IPTG influx,
/// IPTG efflux. Each additive term of the ODE right-hand side is one reaction.
enum Reaction : std::size_t {
  kMrnaLacIProduction = 0,
  kMrnaLacIDegradation,
  kMrnaTetRProduction,
  kMrnaTetRDegradation,
  kLacIProduction,
  kLacIDegradation,
  kTetRProduction,
  kTetRDegradation,
  kAtcInflux,
  kAtcEfflux,
  kIptgInflux,
  kIptgEfflux,
};

using Stoichiometry = std::array<std::array<int, kReactionCount>, kStateDim>;
using PropensityVector = std::array<double, kReactionCount>;

class ReactionNetwork {
 public:
  explicit ReactionNetwork(const ToggleSwitchParams& params);

  [[nodiscard]] const Stoichiometry& stoichiometry() const { return stoichiometry_; }
  [[nodiscard]] const ToggleSwitchParams& params() const { return params_; }

  /// Per-reaction rates (1/min), clamped at zero.
  [[nodiscard]] PropensityVector propensities(const CellState& x, const InducerInput& u) const;

  /// S * a, accumulated in reaction order.
  [[nodiscard]] StateVector drift(const PropensityVector& a) const;
  [[nodiscard]] StateVector drift(const CellState& x, const InducerInput& u) const {
    return drift(propensities(x, u));
  }

 private:
  ToggleSwitchParams params_;
  Stoichiometry stoichiometry_{};
};

[[nodiscard]] ReactionNetwork build_reaction_network(const ToggleSwitchParams& params);

struct NoiseConfig {
  std::uint64_t seed = 1;
  double noise_scale = 1.0;  // 0 recovers explicit Euler on the ODE
  double sde_step = 0.05;    // min
  // Switches off the noise on the four inducer exchange reactions.
  bool deterministic_inducer_exchange = false;

  void validate() const;
};

/// One Euler-Maruyama step of length cfg.sde_step. Consumes 12 standard
/// normal draws from `rng` unless noise_scale is 0. Throws IntegrationDiverged
/// on a non-finite result.
[[nodiscard]] CellState em_step(const CellState& x, const InducerInput& u,
                                const ReactionNetwork& net, const NoiseConfig& cfg, RngStream& rng);

/// Same as em_step with an explicit step length.
[[nodiscard]] CellState em_step(const CellState& x, const InducerInput& u,
                                const ReactionNetwork& net, const NoiseConfig& cfg, RngStream& rng,
                                double dt);

/// Piecewise-constant input over half-open intervals [start, end).
class InputSchedule {
 public:
  struct Segment {
    double start;
    double end;
    InducerInput input;
  };

  InputSchedule() = default;
  static InputSchedule constant(const InducerInput& u, double horizon);

  InputSchedule& add(double start, double end, const InducerInput& u);

  /// Throws ConfigError if the segments leave a gap in [0, horizon] or overlap.
  void validate(double horizon) const;

  /// Input active at time t; the last segment also covers its end point.
  [[nodiscard]] const InducerInput& at(double t) const;

  [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Segment> segments_;
};

struct TimedState {
  double time = 0.0;
  CellState state;

  bool operator==(const TimedState&) const = default;
};

using Trajectory = std::vector<TimedState>;

/// Repeated em_step over [0, horizon]. Logs the initial state, the state at
/// every multiple of `sample_interval` (default: every step) and the final
/// state.
[[nodiscard]] Trajectory simulate_cell(const CellState& x0, const InputSchedule& schedule,
                                       double horizon, const ReactionNetwork& net,
                                       const NoiseConfig& cfg, RngStream& rng,
                                       double sample_interval = 0.0);

/// CSV header: time_min,cell_id,mrna_lacI,mrna_tetR,lacI,tetR,atc,iptg
void write_trajectory_csv_header(std::ostream& os);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::uint64_t cell_id);

}  // namespace ratiometric
