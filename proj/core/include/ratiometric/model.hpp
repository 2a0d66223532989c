#pragma once

// Deterministic single-cell model of the inducible LacI/TetR toggle switch.
//
// State layout (also used by the stochastic and agent layers):
//   0 mrna_lacI, 1 mrna_tetR, 2 lacI, 3 tetR, 4 atc, 5 iptg
// Time is in minutes, concentrations in arbitrary units (a.u.).

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace ratiometric {

struct ToggleSwitchParams {
  double kappa_L_m0 = 3.045e-1;  // leakage transcription, mRNA/min
  double kappa_T_m0 = 3.313e-1;
  double kappa_L_m = 13.01;  // transcription, mRNA/min
  double kappa_T_m = 5.055;
  double kappa_L_p = 0.6606;  // translation, a.u./mRNA/min
  double kappa_T_p = 0.5098;
  double gamma_L_m = 1.386e-1;  // mRNA degradation, 1/min
  double gamma_T_m = 1.386e-1;
  double gamma_L_p = 1.65e-2;  // protein degradation, 1/min
  double gamma_T_p = 1.65e-2;
  double k_aTc = 4e-2;  // membrane diffusion, 1/min
  double k_IPTG = 4e-2;
  double theta_LacI = 124.9;
  double theta_TetR = 76.40;
  double theta_aTc = 35.98;
  double theta_IPTG = 2.926e-1;
  double eta_LacI = 2.00;
  double eta_TetR = 2.152;
  double eta_aTc = 2.00;
  double eta_IPTG = 2.00;

  /// Throws ConfigError unless rates/thresholds are > 0 and exponents >= 1.
  void validate() const;

  bool operator==(const ToggleSwitchParams&) const = default;
};

inline constexpr std::size_t kStateDim = 6;
using StateVector = std::array<double, kStateDim>;

struct CellState {
  double mrna_lacI = 0.0;
  double mrna_tetR = 0.0;
  double lacI = 0.0;
  double tetR = 0.0;
  double atc = 0.0;
  double iptg = 0.0;

  [[nodiscard]] StateVector to_array() const {
    return {mrna_lacI, mrna_tetR, lacI, tetR, atc, iptg};
  }
  [[nodiscard]] static CellState from_array(const StateVector& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
  }
  [[nodiscard]] bool is_finite() const;
  [[nodiscard]] bool is_nonnegative() const;

  bool operator==(const CellState&) const = default;
};

/// Reservoir (environment) inducer concentrations shared by every cell.
struct InducerInput {
  static constexpr double kMaxAtc = 100.0;
  static constexpr double kMaxIptg = 1.0;

  double u_a = 0.0;
  double u_p = 0.0;

  [[nodiscard]] bool within_bounds() const {
    return u_a >= 0.0 && u_a <= kMaxAtc && u_p >= 0.0 && u_p <= kMaxIptg;
  }

  bool operator==(const InducerInput&) const = default;
};

/// Promoter activity of the LacI gene under TetR repression relieved by aTc.
[[nodiscard]] double hill_phi_T(double tetR, double atc, const ToggleSwitchParams& p);

/// Promoter activity of the TetR gene under LacI repression relieved by IPTG.
[[nodiscard]] double hill_phi_L(double lacI, double iptg, const ToggleSwitchParams& p);

[[nodiscard]] StateVector ode_rhs(const CellState& x, const InducerInput& u,
                                  const ToggleSwitchParams& p);

using Jacobian = std::array<std::array<double, kStateDim>, kStateDim>;

/// Analytic Jacobian of ode_rhs with respect to the state.
[[nodiscard]] Jacobian ode_jacobian(const CellState& x, const InducerInput& u,
                                    const ToggleSwitchParams& p);

inline constexpr double kDefaultOdeStep = 0.1;  // min

/// Fixed-step RK4 from 0 to `horizon`, clamping every component at 0 after
/// each step. A trailing partial step covers horizons that are not a multiple
/// of `step`. Throws IntegrationDiverged on a non-finite state.
[[nodiscard]] CellState integrate_ode(const CellState& x0, const InducerInput& u, double horizon,
                                      double step, const ToggleSwitchParams& p);

/// One clamped RK4 step of size h.
[[nodiscard]] CellState rk4_step(const CellState& x, const InducerInput& u, double h,
                                 const ToggleSwitchParams& p);

enum class Stability { kStable, kSaddle, kUnstable };

[[nodiscard]] std::string to_string(Stability s);

struct Equilibrium {
  CellState state;
  Stability stability = Stability::kStable;
  std::array<double, kStateDim> eigenvalues_real{};
  double residual = 0.0;  // max-norm of ode_rhs at `state`
};

struct EquilibriumSearchOptions {
  int grid_points = 10;  // per axis, log-spaced
  double grid_min = 1.0;
  double grid_max = 3000.0;
  int max_iterations = 100;
  double residual_tolerance = 1e-10;
  double merge_tolerance = 1e-3;  // Euclidean distance between duplicates
};

struct EquilibriumSearchResult {
  std::vector<Equilibrium> equilibria;  // sorted by ascending lacI
  std::string diagnostic;               // set when nothing converged
};

/// Damped Newton from a log-spaced (lacI, tetR) grid, remaining states at
/// their quasi-steady values; converged points are merged and classified by
/// the signs of the real parts of the Jacobian eigenvalues.
[[nodiscard]] EquilibriumSearchResult find_equilibria(const InducerInput& u,
                                                      const ToggleSwitchParams& p,
                                                      const EquilibriumSearchOptions& opts = {});

}  // namespace ratiometric
