#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ratiometric/agent_sim.hpp"
#include "ratiometric/controllers.hpp"

namespace ratiometric {

struct TrialIndices {
  std::uint64_t seed = 0;
  bool completed = false;
  std::string failure;
  double e_bar = 0.0;
  double e_bar_f = 0.0;  // NaN when the run is shorter than the final window
  std::optional<double> t_s;  // nullopt: never settled

  bool operator==(const TrialIndices&) const = default;
};

/// Means over the completed trials of one controller. Unsettled trials enter
/// t_bar_s at T_sim and are counted in `unsettled`.
struct PerformanceReport {
  std::string controller;
  std::size_t M = 0;
  std::size_t failed = 0;
  std::size_t unsettled = 0;
  double e_bar = 0.0;
  double e_bar_f = 0.0;
  double t_bar_s = 0.0;
  double t_sim = 0.0;
  std::vector<TrialIndices> trials;

  [[nodiscard]] double settled_fraction() const;

  bool operator==(const PerformanceReport&) const = default;
};

[[nodiscard]] TrialIndices compute_indices(const TrialRecord& record, double t_sim,
                                           double threshold);

[[nodiscard]] PerformanceReport aggregate(const std::string& controller,
                                          const std::vector<TrialIndices>& trials, double t_sim);

/// Seeds of the M trials; identical for every controller of a campaign.
[[nodiscard]] std::vector<std::uint64_t> campaign_seeds(std::uint64_t campaign_seed,
                                                        std::size_t trials);

struct CampaignOptions {
  std::vector<ControllerKind> controllers = {ControllerKind::kBangBang, ControllerKind::kPI,
                                             ControllerKind::kMPC};
  std::size_t trials = 30;
  std::uint64_t seed = 1;
  ExperimentConfig base = ExperimentConfig::defaults(PopulationMode::kFixed);
  std::size_t threads = 1;  // trials run concurrently
  bool keep_records = false;
};

struct CampaignResult {
  std::vector<std::uint64_t> seeds;
  std::vector<PerformanceReport> reports;  // one per controller, in option order
  std::vector<std::vector<TrialRecord>> records;  // [controller][trial] when kept
};

/// Runs `trials` independent seeded trials per controller and aggregates the
/// indices. Failed trials are excluded from the means and counted.
[[nodiscard]] CampaignResult run_campaign(const CampaignOptions& opts);

}  // namespace ratiometric
