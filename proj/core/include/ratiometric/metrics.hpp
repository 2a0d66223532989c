#pragma once

#include <optional>
#include <span>

#include "ratiometric/agent_sim.hpp"

namespace ratiometric {

struct IndexValue {
  double value = 0.0;
  bool incomplete = false;  // record ended before the requested span
};

/// (1/T) * integral of ||(e_A, e_B)||_2 over [t0, t1], trapezoidal on the
/// sampled series with linear interpolation at the window edges. Throws
/// Error when fewer than two samples overlap the window.
[[nodiscard]] double mean_error_norm(std::span<const TrialSample> samples, double t0, double t1);

/// Index (i): mean error norm over [0, T_sim]. A record shorter than T_sim is
/// averaged over its available span and flagged.
[[nodiscard]] IndexValue error_norm_index(const TrialRecord& record, double t_sim);

inline constexpr double kFinalWindow = 180.0;  // min

/// Index (ii): mean error norm over the last 180 min of the record. Throws
/// Error when the record spans less than the window.
[[nodiscard]] double final_error_index(const TrialRecord& record, double window = kFinalWindow);

/// Index (iii): earliest sample time after which ||e||_inf <= threshold holds
/// at every later sample; nullopt when the last sample is above threshold.
[[nodiscard]] std::optional<double> settling_time(const TrialRecord& record,
                                                  double threshold = 0.15);

}  // namespace ratiometric
