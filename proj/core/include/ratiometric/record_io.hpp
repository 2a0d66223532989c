#pragma once

// CSV/JSON serialization of trial records and campaign reports.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ratiometric/agent_sim.hpp"
#include "ratiometric/campaign.hpp"

namespace ratiometric {

/// Library version stamped into run manifests.
[[nodiscard]] std::string version_string();

/// time_min,e_A,e_B,u_a,u_p,N,n_A,n_B
void write_trial_csv(std::ostream& os, const TrialRecord& record);
/// Reads the sampled series written by write_trial_csv; other fields stay empty.
[[nodiscard]] TrialRecord read_trial_csv(std::istream& is);

/// time_min,u_a,u_p (environment input changes at their effective times)
void write_inputs_csv(std::ostream& os, const TrialRecord& record);
/// time_min,controller,e_A,e_B,u_a,u_p,cost_if_mpc
void write_controls_csv(std::ostream& os, const TrialRecord& record);
/// time_min,event,id,daughter1,daughter2
void write_events_csv(std::ostream& os, const TrialRecord& record);
/// time_min,cell_id,mrna_lacI,mrna_tetR,lacI,tetR,atc,iptg
void write_states_csv(std::ostream& os, const TrialRecord& record);
/// cell_id,parent_id,birth_time_min
void write_lineage_csv(std::ostream& os, const TrialRecord& record);

/// controller,e_bar,e_bar_f,t_s_mean
void write_table3_csv(std::ostream& os, const std::vector<PerformanceReport>& reports);

/// JSON text of the campaign report (means, counts, per-trial indices).
[[nodiscard]] std::string report_json(const std::vector<PerformanceReport>& reports,
                                      const std::string& mode, std::uint64_t campaign_seed,
                                      const std::vector<std::uint64_t>& seeds);

/// JSON run manifest: configuration echo, seed, version.
[[nodiscard]] std::string manifest_json(const ExperimentConfig& cfg, std::uint64_t seed,
                                        const std::string& command);

/// Writes trial_<tag>.csv, inputs_<tag>.csv, controls_<tag>.csv,
/// events_<tag>.csv, lineage_<tag>.csv and (when recorded) states_<tag>.csv.
void write_trial_bundle(const std::filesystem::path& dir, const std::string& tag,
                        const TrialRecord& record);

}  // namespace ratiometric
