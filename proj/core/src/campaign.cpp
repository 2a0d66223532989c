#include "ratiometric/campaign.hpp"

#include <limits>

#include "ratiometric/errors.hpp"
#include "ratiometric/metrics.hpp"
#include "ratiometric/parallel.hpp"
#include "ratiometric/rng.hpp"

namespace ratiometric {

double PerformanceReport::settled_fraction() const {
  const std::size_t completed = M - failed;
  if (completed == 0) return 0.0;
  return static_cast<double>(completed - unsettled) / static_cast<double>(completed);
}

TrialIndices compute_indices(const TrialRecord& record, double t_sim, double threshold) {
  TrialIndices out;
  out.seed = record.seed;
  out.completed = record.completed;
  out.failure = record.failure;
  if (!record.completed) return out;
  out.e_bar = error_norm_index(record, t_sim).value;
  // runs shorter than the final window have no final-error index
  out.e_bar_f = record.duration >= kFinalWindow ? final_error_index(record)
                                                : std::numeric_limits<double>::quiet_NaN();
  out.t_s = settling_time(record, threshold);
  return out;
}

PerformanceReport aggregate(const std::string& controller, const std::vector<TrialIndices>& trials,
                            double t_sim) {
  PerformanceReport rep;
  rep.controller = controller;
  rep.M = trials.size();
  rep.t_sim = t_sim;
  rep.trials = trials;
  std::size_t used = 0;
  for (const auto& t : trials) {
    if (!t.completed) {
      ++rep.failed;
      continue;
    }
    ++used;
    rep.e_bar += t.e_bar;
    rep.e_bar_f += t.e_bar_f;
    if (t.t_s) {
      rep.t_bar_s += *t.t_s;
    } else {
      ++rep.unsettled;
      rep.t_bar_s += t_sim;
    }
  }
  if (used > 0) {
    rep.e_bar /= static_cast<double>(used);
    rep.e_bar_f /= static_cast<double>(used);
    rep.t_bar_s /= static_cast<double>(used);
  }
  return rep;
}

std::vector<std::uint64_t> campaign_seeds(std::uint64_t campaign_seed, std::size_t trials) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(trials);
  for (std::size_t j = 0; j < trials; ++j) {
    RngStream s = derive_stream(campaign_seed, StreamTag::kTrial, j);
    seeds.push_back(s());
  }
  return seeds;
}

CampaignResult run_campaign(const CampaignOptions& opts) {
  if (opts.trials < 1) throw ConfigError("run_campaign: need at least one trial");
  opts.base.validate();

  CampaignResult result;
  result.seeds = campaign_seeds(opts.seed, opts.trials);
  const std::size_t n_ctrl = opts.controllers.size();
  const std::size_t total = n_ctrl * opts.trials;

  std::vector<TrialIndices> indices(total);
  std::vector<TrialRecord> records(opts.keep_records ? total : 0);
  parallel_for(total, opts.threads, [&](std::size_t item) {
    const std::size_t c = item / opts.trials;
    const std::size_t j = item % opts.trials;
    ExperimentConfig cfg = opts.base;
    cfg.controller.kind = opts.controllers[c];
    TrialRecord rec = run_agent_experiment(cfg, result.seeds[j]);
    indices[item] = compute_indices(rec, cfg.duration, cfg.settling_threshold);
    if (opts.keep_records) records[item] = std::move(rec);
  });

  for (std::size_t c = 0; c < n_ctrl; ++c) {
    const auto first = indices.begin() + static_cast<std::ptrdiff_t>(c * opts.trials);
    std::vector<TrialIndices> mine(first, first + static_cast<std::ptrdiff_t>(opts.trials));
    result.reports.push_back(aggregate(to_string(opts.controllers[c]), mine, opts.base.duration));
    if (opts.keep_records) {
      auto rf = records.begin() + static_cast<std::ptrdiff_t>(c * opts.trials);
      result.records.emplace_back(std::make_move_iterator(rf),
                                  std::make_move_iterator(rf + static_cast<std::ptrdiff_t>(opts.trials)));
    }
  }
  return result;
}

}  // namespace ratiometric
