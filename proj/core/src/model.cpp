#include "ratiometric/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ratiometric/errors.hpp"

namespace ratiometric {

namespace {

// (x / theta)^eta with the common integer exponent special-cased.
inline double scaled_power(double x, double theta, double eta) {
  const double s = x / theta;
  if (eta == 2.0) return s * s;
  return std::pow(s, eta);
}

// Phi = 1 / (1 + (repressor/theta_r * 1/(1 + (inducer/theta_i)^eta_i))^eta_r)
struct HillTerm {
  double value;
  double d_repressor;
  double d_inducer;
};

HillTerm hill_with_derivatives(double repressor, double inducer, double theta_r, double eta_r,
                               double theta_i, double eta_i) {
  const double ind_pow = scaled_power(inducer, theta_i, eta_i);
  const double relief = 1.0 / (1.0 + ind_pow);
  const double q = repressor / theta_r * relief;
  const double q_pow = std::pow(q, eta_r);
  const double value = 1.0 / (1.0 + q_pow);

  // dPhi/dq = -eta_r q^(eta_r-1) / (1 + q^eta_r)^2
  const double dphi_dq = q > 0.0 ? -eta_r * q_pow / q * value * value : 0.0;
  const double dq_drep = relief / theta_r;
  // d(relief)/d(inducer) = -eta_i (inducer/theta_i)^(eta_i-1) / theta_i * relief^2
  double drelief = 0.0;
  if (inducer > 0.0) {
    drelief = -eta_i * ind_pow / inducer * relief * relief;
  } else if (eta_i == 1.0) {
    drelief = -1.0 / theta_i;
  }
  const double dq_dind = repressor / theta_r * drelief;
  return {value, dphi_dq * dq_drep, dphi_dq * dq_dind};
}

}  // namespace

void ToggleSwitchParams::validate() const {
  const std::pair<const char*, double> positive[] = {
      {"kappa_L_m0", kappa_L_m0}, {"kappa_T_m0", kappa_T_m0}, {"kappa_L_m", kappa_L_m},
      {"kappa_T_m", kappa_T_m},   {"kappa_L_p", kappa_L_p},   {"kappa_T_p", kappa_T_p},
      {"gamma_L_m", gamma_L_m},   {"gamma_T_m", gamma_T_m},   {"gamma_L_p", gamma_L_p},
      {"gamma_T_p", gamma_T_p},   {"k_aTc", k_aTc},           {"k_IPTG", k_IPTG},
      {"theta_LacI", theta_LacI}, {"theta_TetR", theta_TetR}, {"theta_aTc", theta_aTc},
      {"theta_IPTG", theta_IPTG}};
  for (const auto& [name, v] : positive) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("parameter ") + name + " must be positive and finite");
    }
  }
  const std::pair<const char*, double> exponents[] = {{"eta_LacI", eta_LacI},
                                                      {"eta_TetR", eta_TetR},
                                                      {"eta_aTc", eta_aTc},
                                                      {"eta_IPTG", eta_IPTG}};
  for (const auto& [name, v] : exponents) {
    if (!(v >= 1.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("exponent ") + name + " must be >= 1");
    }
  }
}

bool CellState::is_finite() const {
  const auto v = to_array();
  return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

bool CellState::is_nonnegative() const {
  const auto v = to_array();
  return std::all_of(v.begin(), v.end(), [](double c) { return c >= 0.0; });
}

double hill_phi_T(double tetR, double atc, const ToggleSwitchParams& p) {
  const double relief = 1.0 / (1.0 + scaled_power(atc, p.theta_aTc, p.eta_aTc));
  return 1.0 / (1.0 + std::pow(tetR / p.theta_TetR * relief, p.eta_TetR));
}

double hill_phi_L(double lacI, double iptg, const ToggleSwitchParams& p) {
  const double relief = 1.0 / (1.0 + scaled_power(iptg, p.theta_IPTG, p.eta_IPTG));
  return 1.0 / (1.0 + scaled_power(lacI * relief, p.theta_LacI, p.eta_LacI));
}

StateVector ode_rhs(const CellState& x, const InducerInput& u, const ToggleSwitchParams& p) {
  const double phi_t = hill_phi_T(x.tetR, x.atc, p);
  const double phi_l = hill_phi_L(x.lacI, x.iptg, p);
  return {
      p.kappa_L_m0 + p.kappa_L_m * phi_t - p.gamma_L_m * x.mrna_lacI,
      p.kappa_T_m0 + p.kappa_T_m * phi_l - p.gamma_T_m * x.mrna_tetR,
      p.kappa_L_p * x.mrna_lacI - p.gamma_L_p * x.lacI,
      p.kappa_T_p * x.mrna_tetR - p.gamma_T_p * x.tetR,
      // k (u - x) expanded as influx minus efflux
      p.k_aTc * u.u_a - p.k_aTc * x.atc,
      p.k_IPTG * u.u_p - p.k_IPTG * x.iptg,
  };
}

Jacobian ode_jacobian(const CellState& x, const InducerInput& /*u*/, const ToggleSwitchParams& p) {
  Jacobian j{};
  const auto t = hill_with_derivatives(x.tetR, x.atc, p.theta_TetR, p.eta_TetR, p.theta_aTc,
                                       p.eta_aTc);
  const auto l = hill_with_derivatives(x.lacI, x.iptg, p.theta_LacI, p.eta_LacI, p.theta_IPTG,
                                       p.eta_IPTG);
  j[0][0] = -p.gamma_L_m;
  j[0][3] = p.kappa_L_m * t.d_repressor;
  j[0][4] = p.kappa_L_m * t.d_inducer;
  j[1][1] = -p.gamma_T_m;
  j[1][2] = p.kappa_T_m * l.d_repressor;
  j[1][5] = p.kappa_T_m * l.d_inducer;
  j[2][0] = p.kappa_L_p;
  j[2][2] = -p.gamma_L_p;
  j[3][1] = p.kappa_T_p;
  j[3][3] = -p.gamma_T_p;
  j[4][4] = -p.k_aTc;
  j[5][5] = -p.k_IPTG;
  return j;
}

CellState rk4_step(const CellState& x, const InducerInput& u, double h,
                   const ToggleSwitchParams& p) {
  const StateVector x0 = x.to_array();
  auto shifted = [&](const StateVector& k, double a) {
    StateVector s;
    for (std::size_t i = 0; i < kStateDim; ++i) s[i] = x0[i] + a * k[i];
    return CellState::from_array(s);
  };
  const StateVector k1 = ode_rhs(x, u, p);
  const StateVector k2 = ode_rhs(shifted(k1, 0.5 * h), u, p);
  const StateVector k3 = ode_rhs(shifted(k2, 0.5 * h), u, p);
  const StateVector k4 = ode_rhs(shifted(k3, h), u, p);
  StateVector next;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    next[i] = std::max(0.0, x0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
  }
  return CellState::from_array(next);
}

CellState integrate_ode(const CellState& x0, const InducerInput& u, double horizon, double step,
                        const ToggleSwitchParams& p) {
  if (!(step > 0.0)) throw ConfigError("integrate_ode: step must be positive");
  if (horizon < 0.0) throw ConfigError("integrate_ode: horizon must be non-negative");
  // the nonnegativity clamp would silently turn a NaN into 0
  if (!x0.is_finite()) throw IntegrationDiverged("integrate_ode: non-finite initial state");
  CellState x = x0;
  const auto full_steps = static_cast<long>(std::floor(horizon / step + 1e-9));
  for (long k = 0; k < full_steps; ++k) {
    x = rk4_step(x, u, step, p);
    if (!x.is_finite()) throw IntegrationDiverged("integrate_ode: non-finite state");
  }
  const double rest = horizon - static_cast<double>(full_steps) * step;
  if (rest > 1e-12 * std::max(1.0, horizon)) {
    x = rk4_step(x, u, rest, p);
    if (!x.is_finite()) throw IntegrationDiverged("integrate_ode: non-finite state");
  }
  return x;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::kStable:
      return "stable";
    case Stability::kSaddle:
      return "saddle";
    case Stability::kUnstable:
      return "unstable";
  }
  return "unknown";
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Vec6 as_eigen(const StateVector& v) { return Eigen::Map<const Vec6>(v.data()); }

double max_norm(const StateVector& v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

Mat6 jacobian_matrix(const CellState& x, const InducerInput& u, const ToggleSwitchParams& p) {
  const Jacobian j = ode_jacobian(x, u, p);
  Mat6 m;
  for (std::size_t r = 0; r < kStateDim; ++r)
    for (std::size_t c = 0; c < kStateDim; ++c) m(r, c) = j[r][c];
  return m;
}

CellState quasi_steady_guess(double lacI, double tetR, const InducerInput& u,
                             const ToggleSwitchParams& p) {
  return {lacI * p.gamma_L_p / p.kappa_L_p, tetR * p.gamma_T_p / p.kappa_T_p, lacI, tetR, u.u_a,
          u.u_p};
}

// Damped Newton; returns true when the residual drops below tolerance.
bool newton_solve(CellState& x, const InducerInput& u, const ToggleSwitchParams& p,
                  const EquilibriumSearchOptions& opts) {
  StateVector f = ode_rhs(x, u, p);
  double norm = max_norm(f);
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (norm < opts.residual_tolerance) return true;
    const Mat6 jac = jacobian_matrix(x, u, p);
    const Vec6 dx = jac.fullPivLu().solve(-as_eigen(f));
    if (!dx.allFinite()) return false;
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
      StateVector trial = x.to_array();
      for (std::size_t i = 0; i < kStateDim; ++i) {
        trial[i] = std::max(0.0, trial[i] + lambda * dx(static_cast<Eigen::Index>(i)));
      }
      const CellState candidate = CellState::from_array(trial);
      const StateVector f_new = ode_rhs(candidate, u, p);
      const double n_new = max_norm(f_new);
      if (n_new < norm) {
        x = candidate;
        f = f_new;
        norm = n_new;
        improved = true;
        break;
      }
    }
    if (!improved) return norm < opts.residual_tolerance;
  }
  return norm < opts.residual_tolerance;
}

}  // namespace

EquilibriumSearchResult find_equilibria(const InducerInput& u, const ToggleSwitchParams& p,
                                        const EquilibriumSearchOptions& opts) {
  EquilibriumSearchResult result;
  const int n = std::max(2, opts.grid_points);
  const double log_lo = std::log(opts.grid_min);
  const double log_hi = std::log(opts.grid_max);
  int converged = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double lacI = std::exp(log_lo + (log_hi - log_lo) * a / (n - 1));
      const double tetR = std::exp(log_lo + (log_hi - log_lo) * b / (n - 1));
      CellState x = quasi_steady_guess(lacI, tetR, u, p);
      if (!newton_solve(x, u, p, opts)) continue;
      ++converged;
      const Vec6 xv = as_eigen(x.to_array());
      const bool duplicate =
          std::any_of(result.equilibria.begin(), result.equilibria.end(), [&](const auto& e) {
            return (as_eigen(e.state.to_array()) - xv).norm() < opts.merge_tolerance;
          });
      if (duplicate) continue;

      Equilibrium eq;
      eq.state = x;
      eq.residual = max_norm(ode_rhs(x, u, p));
      const Eigen::EigenSolver<Mat6> solver(jacobian_matrix(x, u, p), false);
      int positive = 0;
      int negative = 0;
      for (Eigen::Index i = 0; i < 6; ++i) {
        const double re = solver.eigenvalues()(i).real();
        eq.eigenvalues_real[static_cast<std::size_t>(i)] = re;
        if (re > 0.0) ++positive;
        if (re < 0.0) ++negative;
      }
      if (positive == 0) {
        eq.stability = Stability::kStable;
      } else if (negative > 0) {
        eq.stability = Stability::kSaddle;
      } else {
        eq.stability = Stability::kUnstable;
      }
      result.equilibria.push_back(eq);
    }
  }
  std::sort(result.equilibria.begin(), result.equilibria.end(),
            [](const auto& l, const auto& r) { return l.state.lacI < r.state.lacI; });
  if (converged == 0) {
    std::ostringstream os;
    os << "Newton did not converge from any of " << n * n << " grid starts for input (" << u.u_a
       << ", " << u.u_p << ")";
    result.diagnostic = os.str();
  }
  return result;
}

}  // namespace ratiometric
