#pragma once

#include <deque>
#include <string>

#include "ratiometric/model.hpp"
#include "ratiometric/rng.hpp"

namespace ratiometric {

/// Sampling and actuation timing of the microfluidic platform.
struct TimingConstraints {
  double sampling_period = 5.0;    // T_s, min
  double actuation_period = 15.0;  // T_c, min
  double delay_min = 20.0;         // s
  double delay_max = 40.0;         // s
  double max_experiment = 1440.0;  // min

  /// T_c must be an integer multiple of T_s, and delay_min <= delay_max < 60 T_s.
  void validate() const;

  /// Number of sampling periods per actuation period.
  [[nodiscard]] long samples_per_actuation() const;
};

enum class ActuatorKind { kTJunction, kDialAWave };

[[nodiscard]] std::string to_string(ActuatorKind k);

struct Actuator {
  ActuatorKind kind = ActuatorKind::kDialAWave;
  double U_a = 100.0;  // reservoir aTc amplitude, <= 100
  double U_p = 1.0;    // reservoir IPTG amplitude, <= 1

  void validate() const;
};

/// Dial-a-Wave mixing: u_p = (1 - u_a / U_a) U_p. An out-of-range u_a is
/// clamped to [0, U_a] and reported through the warning sink.
[[nodiscard]] InducerInput daw_constrain(double u_a, double U_a, double U_p);

enum class Inducer { kAtc, kIptg };

/// T-junction: exactly one inducer at its full amplitude.
[[nodiscard]] InducerInput tjunction_select(Inducer which, double U_a, double U_p);

struct DelayedCommand {
  InducerInput command;
  double issue_time = 0.0;      // min
  double effective_time = 0.0;  // min
};

/// effective_time = issue_time + tau, tau ~ U[delay_min, delay_max] seconds.
/// Throws ConfigError when issue_time is off the T_c grid.
[[nodiscard]] DelayedCommand schedule_actuation(const InducerInput& command, double issue_time,
                                                const TimingConstraints& timing, RngStream& rng);

/// Zero-order hold of the environment input with delayed command application.
/// Single-owner state machine advanced by the simulation clock.
class ActuationScheduler {
 public:
  ActuationScheduler(TimingConstraints timing, RngStream rng, InducerInput initial = {});

  /// Queues `command`; returns the scheduled event. With `bypass_delay` the
  /// command takes effect at issue_time without drawing a delay.
  DelayedCommand issue(const InducerInput& command, double issue_time);

  /// Input held at time t; applies every pending command with effective_time <= t.
  /// Calls must be made with non-decreasing t.
  const InducerInput& input_at(double t);

  /// Earliest pending effective time, or +inf.
  [[nodiscard]] double next_change() const;

  [[nodiscard]] const InducerInput& current() const { return current_; }

  void set_bypass_delay(bool bypass) { bypass_delay_ = bypass; }

 private:
  TimingConstraints timing_;
  RngStream rng_;
  InducerInput current_;
  std::deque<DelayedCommand> pending_;
  bool bypass_delay_ = false;
};

}  // namespace ratiometric
