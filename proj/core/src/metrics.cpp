#include "ratiometric/metrics.hpp"

#include <cmath>
#include <vector>

#include "ratiometric/errors.hpp"

namespace ratiometric {

namespace {

double norm2(const TrialSample& s) { return std::hypot(s.e_A, s.e_B); }

}  // namespace

double mean_error_norm(std::span<const TrialSample> samples, double t0, double t1) {
  if (!(t1 > t0)) throw Error("mean_error_norm: empty window");
  // Piecewise-linear interpolation of the norm series, clipped to [t0, t1].
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    pts.emplace_back(samples[i].time, norm2(samples[i]));
  }
  if (pts.size() < 2) throw Error("mean_error_norm: need at least two samples");
  double integral = 0.0;
  double covered = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [ta, ya] = pts[i];
    const auto [tb, yb] = pts[i + 1];
    const double lo = std::max(ta, t0);
    const double hi = std::min(tb, t1);
    if (!(hi > lo) || !(tb > ta)) continue;
    auto interp = [&](double t) { return ya + (yb - ya) * (t - ta) / (tb - ta); };
    integral += 0.5 * (interp(lo) + interp(hi)) * (hi - lo);
    covered += hi - lo;
  }
  if (!(covered > 0.0)) throw Error("mean_error_norm: no samples inside the window");
  return integral / (t1 - t0);
}

IndexValue error_norm_index(const TrialRecord& record, double t_sim) {
  if (record.samples.size() < 2) throw Error("error_norm_index: record has fewer than 2 samples");
  const double end = record.samples.back().time;
  constexpr double kTol = 1e-9;
  if (end + kTol < t_sim) {
    return {mean_error_norm(record.samples, record.samples.front().time, end), true};
  }
  return {mean_error_norm(record.samples, 0.0, t_sim), false};
}

double final_error_index(const TrialRecord& record, double window) {
  if (record.samples.size() < 2) throw Error("final_error_index: record has fewer than 2 samples");
  const double start = record.samples.front().time;
  const double end = record.samples.back().time;
  if (end - start + 1e-9 < window) {
    throw Error("final_error_index: record spans less than the final window");
  }
  return mean_error_norm(record.samples, end - window, end);
}

std::optional<double> settling_time(const TrialRecord& record, double threshold) {
  // Ratio arithmetic like 0.6 - 9/20 lands one ulp above 0.15.
  const double limit = threshold + 1e-12;
  std::optional<double> t_star;
  for (auto it = record.samples.rbegin(); it != record.samples.rend(); ++it) {
    if (std::max(std::abs(it->e_A), std::abs(it->e_B)) > limit) break;
    t_star = it->time;
  }
  return t_star;
}

}  // namespace ratiometric
