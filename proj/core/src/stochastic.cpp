#include "ratiometric/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "ratiometric/csv.hpp"
#include "ratiometric/errors.hpp"

namespace ratiometric {

ReactionNetwork::ReactionNetwork(const ToggleSwitchParams& params) : params_(params) {
  params_.validate();
  // Species rows follow the CellState layout; reactions come in +1/-1 pairs.
  for (std::size_t species = 0; species < kStateDim; ++species) {
    stoichiometry_[species][2 * species] = +1;
    stoichiometry_[species][2 * species + 1] = -1;
  }
}

PropensityVector ReactionNetwork::propensities(const CellState& x, const InducerInput& u) const {
  const ToggleSwitchParams& p = params_;
  const double phi_t = hill_phi_T(x.tetR, x.atc, p);
  const double phi_l = hill_phi_L(x.lacI, x.iptg, p);
  PropensityVector a{
      p.kappa_L_m0 + p.kappa_L_m * phi_t,
      p.gamma_L_m * x.mrna_lacI,
      p.kappa_T_m0 + p.kappa_T_m * phi_l,
      p.gamma_T_m * x.mrna_tetR,
      p.kappa_L_p * x.mrna_lacI,
      p.gamma_L_p * x.lacI,
      p.kappa_T_p * x.mrna_tetR,
      p.gamma_T_p * x.tetR,
      p.k_aTc * u.u_a,
      p.k_aTc * x.atc,
      p.k_IPTG * u.u_p,
      p.k_IPTG * x.iptg,
  };
  for (double& v : a) v = std::max(0.0, v);
  return a;
}

StateVector ReactionNetwork::drift(const PropensityVector& a) const {
  StateVector d{};
  for (std::size_t s = 0; s < kStateDim; ++s) {
    bool first = true;
    for (std::size_t r = 0; r < kReactionCount; ++r) {
      const int nu = stoichiometry_[s][r];
      if (nu == 0) continue;
      const double term = nu == 1 ? a[r] : nu == -1 ? -a[r] : nu * a[r];
      // Start from the first term (not 0.0) so the sum matches ode_rhs bit for bit.
      d[s] = first ? term : d[s] + term;
      first = false;
    }
  }
  return d;
}

ReactionNetwork build_reaction_network(const ToggleSwitchParams& params) {
  return ReactionNetwork(params);
}

void NoiseConfig::validate() const {
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw ConfigError("noise_scale must be >= 0");
  }
  if (!(sde_step > 0.0) || !std::isfinite(sde_step)) throw ConfigError("sde_step must be > 0");
}

CellState em_step(const CellState& x, const InducerInput& u, const ReactionNetwork& net,
                  const NoiseConfig& cfg, RngStream& rng) {
  return em_step(x, u, net, cfg, rng, cfg.sde_step);
}

CellState em_step(const CellState& x, const InducerInput& u, const ReactionNetwork& net,
                  const NoiseConfig& cfg, RngStream& rng, double dt) {
  const PropensityVector a = net.propensities(x, u);
  const StateVector drift = net.drift(a);
  StateVector next = x.to_array();

  if (cfg.noise_scale == 0.0) {
    for (std::size_t s = 0; s < kStateDim; ++s) next[s] = std::max(0.0, next[s] + drift[s] * dt);
  } else {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::array<double, kReactionCount> kicks{};
    const std::size_t noisy =
        cfg.deterministic_inducer_exchange ? static_cast<std::size_t>(kAtcInflux) : kReactionCount;
    // All 12 normals are always drawn so stream consumption does not depend on flags.
    for (std::size_t r = 0; r < kReactionCount; ++r) {
      const double xi = normal(rng);
      kicks[r] = r < noisy ? std::sqrt(a[r]) * xi : 0.0;
    }
    const double amplitude = cfg.noise_scale * std::sqrt(dt);
    const auto& stoich = net.stoichiometry();
    for (std::size_t s = 0; s < kStateDim; ++s) {
      double diffusion = 0.0;
      for (std::size_t r = 0; r < kReactionCount; ++r) {
        if (stoich[s][r] != 0) diffusion += stoich[s][r] * kicks[r];
      }
      next[s] = std::max(0.0, next[s] + drift[s] * dt + amplitude * diffusion);
    }
  }

  const CellState out = CellState::from_array(next);
  if (!out.is_finite()) throw IntegrationDiverged("em_step: non-finite state");
  return out;
}

InputSchedule InputSchedule::constant(const InducerInput& u, double horizon) {
  InputSchedule s;
  s.add(0.0, horizon, u);
  return s;
}

InputSchedule& InputSchedule::add(double start, double end, const InducerInput& u) {
  if (!(end >= start)) throw ConfigError("InputSchedule: segment end before start");
  segments_.push_back({start, end, u});
  std::sort(segments_.begin(), segments_.end(),
            [](const Segment& l, const Segment& r) { return l.start < r.start; });
  return *this;
}

void InputSchedule::validate(double horizon) const {
  constexpr double kTol = 1e-9;
  if (segments_.empty()) {
    if (horizon > kTol) throw ConfigError("InputSchedule: empty schedule");
    return;
  }
  double covered = 0.0;
  if (segments_.front().start > kTol) {
    std::ostringstream os;
    os << "InputSchedule: gap on [0, " << segments_.front().start << ")";
    throw ConfigError(os.str());
  }
  for (const auto& seg : segments_) {
    if (seg.start > covered + kTol) {
      std::ostringstream os;
      os << "InputSchedule: gap on [" << covered << ", " << seg.start << ")";
      throw ConfigError(os.str());
    }
    if (seg.start < covered - kTol) throw ConfigError("InputSchedule: overlapping segments");
    covered = std::max(covered, seg.end);
  }
  if (covered < horizon - kTol) {
    std::ostringstream os;
    os << "InputSchedule: gap on [" << covered << ", " << horizon << "]";
    throw ConfigError(os.str());
  }
}

const InducerInput& InputSchedule::at(double t) const {
  if (segments_.empty()) throw ConfigError("InputSchedule: empty schedule");
  // Last segment whose start is <= t.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.start; });
  if (it == segments_.begin()) return segments_.front().input;
  return std::prev(it)->input;
}

Trajectory simulate_cell(const CellState& x0, const InputSchedule& schedule, double horizon,
                         const ReactionNetwork& net, const NoiseConfig& cfg, RngStream& rng,
                         double sample_interval) {
  cfg.validate();
  if (horizon < 0.0) throw ConfigError("simulate_cell: negative horizon");
  schedule.validate(horizon);

  const double dt = cfg.sde_step;
  const auto full_steps = static_cast<long>(std::floor(horizon / dt + 1e-9));
  const double rest = horizon - static_cast<double>(full_steps) * dt;
  const long stride =
      sample_interval > 0.0 ? std::max(1L, std::lround(sample_interval / dt)) : 1L;

  Trajectory traj;
  traj.push_back({0.0, x0});
  CellState x = x0;
  for (long k = 0; k < full_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    x = em_step(x, schedule.at(t), net, cfg, rng, dt);
    if ((k + 1) % stride == 0 || (k + 1 == full_steps && rest <= 1e-12)) {
      traj.push_back({static_cast<double>(k + 1) * dt, x});
    }
  }
  if (rest > 1e-12) {
    x = em_step(x, schedule.at(static_cast<double>(full_steps) * dt), net, cfg, rng, rest);
    traj.push_back({horizon, x});
  }
  return traj;
}

void write_trajectory_csv_header(std::ostream& os) {
  os << "time_min,cell_id,mrna_lacI,mrna_tetR,lacI,tetR,atc,iptg\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::uint64_t cell_id) {
  for (const auto& [t, x] : traj) {
    os << csv::num(t) << ',' << cell_id;
    for (double v : x.to_array()) os << ',' << csv::num(v);
    os << '\n';
  }
}

}  // namespace ratiometric
