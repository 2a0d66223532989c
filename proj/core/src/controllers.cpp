#include "ratiometric/controllers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "ratiometric/errors.hpp"

namespace ratiometric {

InducerInput bangbang_step(const ErrorSignal& e, double U_a, double U_p) {
  const InducerInput atc{U_a, 0.0};
  const InducerInput iptg{0.0, U_p};
  if (std::abs(e.e_B) >= std::abs(e.e_A)) return e.e_B <= 0.0 ? iptg : atc;
  return e.e_A <= 0.0 ? atc : iptg;
}

void PIGains::validate() const {
  for (double g : {k_P_a, k_I_a, k_P_p, k_I_p}) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("PI gains must be finite and >= 0");
  }
}

PIOutput pi_step(const ErrorSignal& e, const PIGains& gains, PIState& state, double dt,
                 double U_a, double U_p) {
  if (!(dt > 0.0)) throw ConfigError("pi_step: dt must be positive");
  PIOutput out;
  out.u_a_raw = gains.k_P_a * e.e_B + gains.k_I_a * state.integral_e_B -
                (gains.k_P_p * e.e_A + gains.k_I_p * state.integral_e_A);
  out.upper_limit = std::min(std::abs(e.e_B) < std::abs(e.e_A) ? 50.0 : 100.0, U_a);
  const double u_a = std::clamp(out.u_a_raw, 0.0, out.upper_limit);
  out.saturated = u_a != out.u_a_raw;

  const double increment = (gains.k_I_a * e.e_B - gains.k_I_p * e.e_A) * dt;
  out.integrator_frozen = (out.u_a_raw > out.upper_limit && increment > 0.0) ||
                          (out.u_a_raw < 0.0 && increment < 0.0);
  if (!out.integrator_frozen) {
    state.integral_e_B += e.e_B * dt;
    state.integral_e_A += e.e_A * dt;
  }
  out.command = daw_constrain(u_a, U_a, U_p);
  return out;
}

void MpcConfig::validate() const {
  if (!(control_interval > 0.0)) throw ConfigError("mpc: T_c must be > 0");
  if (!(prediction_horizon >= control_interval)) throw ConfigError("mpc: T_c must be <= T_p");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("mpc: alpha must be in (0, 1)");
  if (subset_size < 1) throw ConfigError("mpc: subset_size must be >= 1");
  if (ga_population_size < 1) throw ConfigError("mpc: ga_population_size must be >= 1");
  if (ga_levels < 2) throw ConfigError("mpc: ga_levels must be >= 2");
  if (!(ga_elite_fraction >= 0.0 && ga_elite_fraction <= 1.0)) {
    throw ConfigError("mpc: ga_elite_fraction must be in [0, 1]");
  }
  if (!(prediction_step > 0.0)) throw ConfigError("mpc: prediction_step must be > 0");
}

std::size_t MpcConfig::active_genes() const {
  return static_cast<std::size_t>(std::ceil(prediction_horizon / control_interval - 1e-9));
}

std::vector<IdentifiedCell> select_representative_subset(const PopulationSnapshot& snapshot,
                                                         std::size_t k, RngStream& rng) {
  const std::size_t n = snapshot.size();
  if (k == 0) throw ConfigError("select_representative_subset: k must be >= 1");
  if (k >= n) return snapshot.cells();

  std::array<std::vector<std::size_t>, 3> strata;  // A, B, C
  for (std::size_t i = 0; i < n; ++i) {
    strata[static_cast<std::size_t>(snapshot.classes()[i])].push_back(i);
  }
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const std::array<double, 2> exact = {kd * static_cast<double>(snapshot.n_A()) / nd,
                                       kd * static_cast<double>(snapshot.n_B()) / nd};
  std::array<long, 3> take = {std::lround(exact[0]), std::lround(exact[1]), 0};
  take[2] = static_cast<long>(k) - take[0] - take[1];

  // Too many from A/B: drop one from the stratum rounded up the most.
  while (take[2] < 0) {
    const std::size_t s =
        (static_cast<double>(take[0]) - exact[0]) >= (static_cast<double>(take[1]) - exact[1]) ? 0
                                                                                              : 1;
    --take[s];
    ++take[2];
  }
  // Not enough C cells: add one to the stratum rounded down the most.
  while (take[2] > static_cast<long>(strata[2].size())) {
    const double short_a = exact[0] - static_cast<double>(take[0]);
    const double short_b = exact[1] - static_cast<double>(take[1]);
    const bool a_room = take[0] < static_cast<long>(strata[0].size());
    const bool b_room = take[1] < static_cast<long>(strata[1].size());
    const std::size_t s = (a_room && (!b_room || short_a >= short_b)) ? 0 : 1;
    ++take[s];
    --take[2];
  }

  std::vector<IdentifiedCell> subset;
  subset.reserve(k);
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<std::size_t> picked;
    std::sample(strata[s].begin(), strata[s].end(), std::back_inserter(picked),
                static_cast<std::size_t>(take[s]), rng);
    for (std::size_t i : picked) subset.push_back(snapshot.cells()[i]);
  }
  return subset;
}

double mpc_cost(std::span<const CellState> subset, std::span<const InducerInput> sequence,
                const MpcConfig& cfg, double r, const ToggleSwitchParams& params) {
  const std::size_t needed = cfg.active_genes();
  if (sequence.size() < needed) {
    std::ostringstream os;
    os << "mpc_cost: input sequence has " << sequence.size() << " moves, horizon needs "
       << needed;
    throw ConfigError(os.str());
  }
  if (subset.empty()) throw PopulationExtinct("mpc_cost: empty subset");

  const double h = cfg.prediction_step;
  const auto steps = static_cast<long>(std::llround(cfg.prediction_horizon / h));
  std::vector<CellState> cells(subset.begin(), subset.end());
  double cost = 0.0;
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const ErrorSignal e = errors(ratios(cells), r);
    cost += (cfg.alpha * std::abs(e.e_B) + (1.0 - cfg.alpha) * std::abs(e.e_A)) * h;
    const auto move = std::min(static_cast<std::size_t>(t / cfg.control_interval + 1e-9),
                               sequence.size() - 1);
    for (auto& c : cells) c = rk4_step(c, sequence[move], h, params);
  }
  return cost;
}

GaResult run_genetic_algorithm(const SequenceCost& cost, std::size_t active,
                               const MpcConfig& cfg, RngStream& rng) {
  const std::size_t len = std::max(cfg.ga_sequence_len, active);
  const std::size_t pop_size = cfg.ga_population_size;
  using Genome = std::vector<std::size_t>;

  GaResult result;
  std::map<Genome, double> memo;
  auto evaluate = [&](const Genome& g) {
    Genome prefix(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(active));
    auto it = memo.find(prefix);
    if (it != memo.end()) return it->second;
    const double c = cost(prefix);
    ++result.evaluations;
    memo.emplace(std::move(prefix), c);
    return c;
  };

  std::uniform_int_distribution<std::size_t> level(0, cfg.ga_levels - 1);
  std::vector<Genome> pop(pop_size, Genome(len));
  std::vector<double> costs(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    for (auto& gene : pop[i]) gene = level(rng);
    costs[i] = evaluate(pop[i]);
  }
  result.initial_best_cost = *std::min_element(costs.begin(), costs.end());

  const std::size_t elites = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(cfg.ga_elite_fraction * static_cast<double>(pop_size))),
      1, pop_size);
  std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
  auto tournament = [&]() {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    return costs[b] < costs[a] ? b : a;
  };

  for (std::size_t gen = 0; gen < cfg.ga_generations; ++gen) {
    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return costs[l] < costs[r]; });

    std::vector<Genome> next;
    std::vector<double> next_costs;
    next.reserve(pop_size);
    for (std::size_t i = 0; i < elites; ++i) {
      next.push_back(pop[order[i]]);
      next_costs.push_back(costs[order[i]]);
    }
    while (next.size() < pop_size) {
      const Genome& p1 = pop[tournament()];
      const Genome& p2 = pop[tournament()];
      Genome child = p1;
      if (active >= 2) {
        std::uniform_int_distribution<std::size_t> cut_dist(1, active - 1);
        const std::size_t cut = cut_dist(rng);
        std::copy(p2.begin() + static_cast<std::ptrdiff_t>(cut), p2.end(),
                  child.begin() + static_cast<std::ptrdiff_t>(cut));
      }
      next_costs.push_back(evaluate(child));
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    costs = std::move(next_costs);
  }

  const auto best = static_cast<std::size_t>(
      std::distance(costs.begin(), std::min_element(costs.begin(), costs.end())));
  result.best = pop[best];
  result.best_cost = costs[best];
  return result;
}

MpcOutput mpc_step(const PopulationSnapshot& snapshot, const MpcConfig& cfg, double r,
                   RngStream& rng, double U_a, double U_p, const ToggleSwitchParams& params) {
  cfg.validate();
  if (snapshot.empty()) {
    warn("mpc_step: empty population, falling back to bang-bang");
    const ErrorSignal e = errors(0.0, 0.0, r, snapshot.time());
    return {bangbang_step(e, U_a, U_p), 0.0, true};
  }
  const auto subset_cells =
      select_representative_subset(snapshot, std::min(cfg.subset_size, snapshot.size()), rng);
  std::vector<CellState> subset;
  subset.reserve(subset_cells.size());
  for (const auto& c : subset_cells) subset.push_back(c.state);

  const std::size_t active = cfg.active_genes();
  const double level_step = U_a / static_cast<double>(cfg.ga_levels - 1);
  auto to_input = [&](std::size_t level) {
    return daw_constrain(std::min(U_a, static_cast<double>(level) * level_step), U_a, U_p);
  };
  std::vector<InducerInput> sequence(active);
  const SequenceCost cost = [&](std::span<const std::size_t> genes) {
    for (std::size_t i = 0; i < active; ++i) sequence[i] = to_input(genes[i]);
    return mpc_cost(subset, sequence, cfg, r, params);
  };
  const GaResult ga = run_genetic_algorithm(cost, active, cfg, rng);
  return {to_input(ga.best.front()), ga.best_cost, false};
}

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::kBangBang:
      return "bangbang";
    case ControllerKind::kPI:
      return "pi";
    case ControllerKind::kMPC:
      return "mpc";
    case ControllerKind::kConstant:
      return "constant";
  }
  return "unknown";
}

ControllerKind parse_controller_kind(const std::string& name) {
  if (name == "bangbang") return ControllerKind::kBangBang;
  if (name == "pi") return ControllerKind::kPI;
  if (name == "mpc") return ControllerKind::kMPC;
  if (name == "constant") return ControllerKind::kConstant;
  throw ConfigError("unknown controller '" + name + "'");
}

ControlDecision BangBangController::decide(const PopulationSnapshot&, const ErrorSignal& e) {
  return {bangbang_step(e, actuator_.U_a, actuator_.U_p), std::nullopt};
}

ControlDecision PiController::decide(const PopulationSnapshot&, const ErrorSignal& e) {
  return {pi_step(e, gains_, state_, dt_, actuator_.U_a, actuator_.U_p).command, std::nullopt};
}

ControlDecision MpcController::decide(const PopulationSnapshot& snapshot, const ErrorSignal& e) {
  if (snapshot.empty()) {
    warn("mpc: empty population, falling back to bang-bang");
    return {bangbang_step(e, actuator_.U_a, actuator_.U_p), std::nullopt};
  }
  const MpcOutput out = mpc_step(snapshot, cfg_, r_, rng_, actuator_.U_a, actuator_.U_p, params_);
  return {out.command, out.cost};
}

}  // namespace ratiometric
