#include "ratiometric/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ratiometric/errors.hpp"

namespace ratiometric {

namespace {

constexpr double kGridTolerance = 1e-6;

bool on_grid(double t, double period) {
  const double k = std::round(t / period);
  return std::abs(t - k * period) <= kGridTolerance * std::max(1.0, period);
}

}  // namespace

void TimingConstraints::validate() const {
  if (!(sampling_period > 0.0)) throw ConfigError("sampling_period must be > 0");
  if (!(actuation_period > 0.0)) throw ConfigError("actuation_period must be > 0");
  const double ratio = actuation_period / sampling_period;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0) {
    throw ConfigError("actuation_period must be an integer multiple of sampling_period");
  }
  if (delay_min < 0.0 || delay_min > delay_max) {
    throw ConfigError("actuation delay interval must satisfy 0 <= delay_min <= delay_max");
  }
  if (!(delay_max < sampling_period * 60.0)) {
    throw ConfigError("actuation delay must be shorter than one sampling period");
  }
  if (!(max_experiment > 0.0)) throw ConfigError("max_experiment must be > 0");
}

long TimingConstraints::samples_per_actuation() const {
  return std::lround(actuation_period / sampling_period);
}

std::string to_string(ActuatorKind k) {
  return k == ActuatorKind::kTJunction ? "t_junction" : "dial_a_wave";
}

void Actuator::validate() const {
  if (!(U_a > 0.0) || U_a > InducerInput::kMaxAtc) throw ConfigError("U_a must be in (0, 100]");
  if (!(U_p > 0.0) || U_p > InducerInput::kMaxIptg) throw ConfigError("U_p must be in (0, 1]");
}

InducerInput daw_constrain(double u_a, double U_a, double U_p) {
  if (!(u_a >= 0.0 && u_a <= U_a)) {
    std::ostringstream os;
    os << "daw_constrain: u_a = " << u_a << " outside [0, " << U_a << "], clamped";
    warn(os.str());
    u_a = std::isnan(u_a) ? 0.0 : std::clamp(u_a, 0.0, U_a);
  }
  return {u_a, (1.0 - u_a / U_a) * U_p};
}

InducerInput tjunction_select(Inducer which, double U_a, double U_p) {
  return which == Inducer::kAtc ? InducerInput{U_a, 0.0} : InducerInput{0.0, U_p};
}

DelayedCommand schedule_actuation(const InducerInput& command, double issue_time,
                                  const TimingConstraints& timing, RngStream& rng) {
  if (!on_grid(issue_time, timing.actuation_period)) {
    std::ostringstream os;
    os << "schedule_actuation: issue time " << issue_time << " is not a multiple of T_c = "
       << timing.actuation_period;
    throw ConfigError(os.str());
  }
  double delay_s = timing.delay_min;
  if (timing.delay_max > timing.delay_min) {
    std::uniform_real_distribution<double> dist(timing.delay_min, timing.delay_max);
    delay_s = dist(rng);
  }
  return {command, issue_time, issue_time + delay_s / 60.0};
}

ActuationScheduler::ActuationScheduler(TimingConstraints timing, RngStream rng,
                                       InducerInput initial)
    : timing_(timing), rng_(std::move(rng)), current_(initial) {}

DelayedCommand ActuationScheduler::issue(const InducerInput& command, double issue_time) {
  DelayedCommand ev = bypass_delay_ ? DelayedCommand{command, issue_time, issue_time}
                                    : schedule_actuation(command, issue_time, timing_, rng_);
  pending_.push_back(ev);
  return ev;
}

const InducerInput& ActuationScheduler::input_at(double t) {
  while (!pending_.empty() && pending_.front().effective_time <= t) {
    current_ = pending_.front().command;
    pending_.pop_front();
  }
  return current_;
}

double ActuationScheduler::next_change() const {
  return pending_.empty() ? std::numeric_limits<double>::infinity()
                          : pending_.front().effective_time;
}

}  // namespace ratiometric
