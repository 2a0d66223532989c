#include <doctest.h>

#include <cmath>
#include <random>

#include "ratiometric/errors.hpp"
#include "ratiometric/model.hpp"
#include "ratiometric/population.hpp"

using namespace ratiometric;

namespace {

// Independent evaluation of the repression terms, written out from the formula.
double phi_T_ref(double tetR, double atc) {
  const double relief = 1.0 / (1.0 + std::pow(atc / 35.98, 2.0));
  return 1.0 / (1.0 + std::pow(tetR / 76.40 * relief, 2.152));
}

double phi_L_ref(double lacI, double iptg) {
  const double relief = 1.0 / (1.0 + std::pow(iptg / 0.2926, 2.0));
  return 1.0 / (1.0 + std::pow(lacI / 124.9 * relief, 2.0));
}

CellState random_state(std::mt19937_64& g) {
  std::uniform_real_distribution<double> m(0.0, 100.0), p(0.0, 4000.0), a(0.0, 100.0),
      i(0.0, 1.0);
  return {m(g), m(g), p(g), p(g), a(g), i(g)};
}

double max_abs(const StateVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("default parameters") {
    const ToggleSwitchParams p;
    CHECK(p.kappa_L_m0 == 0.3045);
    CHECK(p.kappa_T_m0 == 0.3313);
    CHECK(p.kappa_L_m == 13.01);
    CHECK(p.kappa_T_m == 5.055);
    CHECK(p.kappa_L_p == 0.6606);
    CHECK(p.kappa_T_p == 0.5098);
    CHECK(p.gamma_L_m == 0.1386);
    CHECK(p.gamma_T_m == 0.1386);
    CHECK(p.gamma_L_p == 0.0165);
    CHECK(p.gamma_T_p == 0.0165);
    CHECK(p.k_aTc == 0.04);
    CHECK(p.k_IPTG == 0.04);
    CHECK(p.theta_LacI == 124.9);
    CHECK(p.theta_TetR == 76.40);
    CHECK(p.theta_aTc == 35.98);
    CHECK(p.theta_IPTG == 0.2926);
    CHECK(p.eta_LacI == 2.0);
    CHECK(p.eta_TetR == 2.152);
    CHECK(p.eta_aTc == 2.0);
    CHECK(p.eta_IPTG == 2.0);
    CHECK_NOTHROW(p.validate());
  }

  TEST_CASE("invalid parameters are rejected") {
    ToggleSwitchParams p;
    p.gamma_L_p = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.eta_TetR = 0.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }

  TEST_CASE("hill terms at fixed points") {
    const ToggleSwitchParams p;
    CHECK(hill_phi_T(0.0, 0.0, p) == 1.0);
    CHECK(hill_phi_T(76.40, 0.0, p) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(hill_phi_T(200.0, 35.98, p) == doctest::Approx(0.35909564083857215).epsilon(1e-13));
    CHECK(hill_phi_L(0.0, 0.0, p) == 1.0);
    CHECK(hill_phi_L(124.9, 0.0, p) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(hill_phi_L(300.0, 0.2926, p) == doctest::Approx(0.4094489738979072).epsilon(1e-13));
  }

  TEST_CASE("hill terms: range and monotonicity over random inputs") {
    const ToggleSwitchParams p;
    std::mt19937_64 g(42);
    std::uniform_real_distribution<double> r(0.0, 3000.0), a(0.0, 100.0), i(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const double t = r(g), at = a(g), l = r(g), ip = i(g);
      const double fT = hill_phi_T(t, at, p), fL = hill_phi_L(l, ip, p);
      CHECK(fT > 0.0);
      CHECK(fT <= 1.0);
      CHECK(fL > 0.0);
      CHECK(fL <= 1.0);
      CHECK(fT == doctest::Approx(phi_T_ref(t, at)).epsilon(1e-12));
      CHECK(fL == doctest::Approx(phi_L_ref(l, ip)).epsilon(1e-12));
      CHECK(hill_phi_T(t + 10.0, at, p) < fT);
      CHECK(hill_phi_T(t, at + 1.0, p) > fT);
      CHECK(hill_phi_L(l + 10.0, ip, p) < fL);
      CHECK(hill_phi_L(l, ip + 0.01, p) > fL);
    }
  }

  TEST_CASE("ode_rhs against scalar evaluation") {
    const ToggleSwitchParams p;
    const auto d0 = ode_rhs(CellState{}, InducerInput{}, p);
    CHECK(d0[0] == doctest::Approx(13.3145).epsilon(1e-14));
    CHECK(d0[1] == doctest::Approx(0.3313 + 5.055).epsilon(1e-14));

    std::mt19937_64 g(7);
    for (int k = 0; k < 200; ++k) {
      const CellState x = random_state(g);
      const InducerInput u{x.atc * 0.5, x.iptg * 0.5};
      const auto d = ode_rhs(x, u, p);
      CHECK(d[0] == doctest::Approx(0.3045 + 13.01 * phi_T_ref(x.tetR, x.atc) -
                                    0.1386 * x.mrna_lacI));
      CHECK(d[1] == doctest::Approx(0.3313 + 5.055 * phi_L_ref(x.lacI, x.iptg) -
                                    0.1386 * x.mrna_tetR));
      CHECK(d[2] == doctest::Approx(0.6606 * x.mrna_lacI - 0.0165 * x.lacI));
      CHECK(d[3] == doctest::Approx(0.5098 * x.mrna_tetR - 0.0165 * x.tetR));
      CHECK(d[4] == doctest::Approx(0.04 * (u.u_a - x.atc)));
      CHECK(d[5] == doctest::Approx(0.04 * (u.u_p - x.iptg)));
    }

    CellState x;
    x.atc = 42.0;
    CHECK(ode_rhs(x, {42.0, 0.0}, p)[4] == 0.0);
  }

  TEST_CASE("analytic jacobian matches central differences") {
    const ToggleSwitchParams p;
    std::mt19937_64 g(3);
    for (int k = 0; k < 50; ++k) {
      CellState x = random_state(g);
      x.lacI += 10.0;
      x.tetR += 10.0;
      x.atc += 1.0;
      x.iptg += 0.05;
      const InducerInput u{30.0, 0.3};
      const Jacobian J = ode_jacobian(x, u, p);
      for (std::size_t j = 0; j < kStateDim; ++j) {
        auto xp = x.to_array(), xm = x.to_array();
        const double h = 1e-6 * std::max(1.0, xp[j]);
        xp[j] += h;
        xm[j] -= h;
        const auto fp = ode_rhs(CellState::from_array(xp), u, p);
        const auto fm = ode_rhs(CellState::from_array(xm), u, p);
        for (std::size_t i = 0; i < kStateDim; ++i) {
          const double fd = (fp[i] - fm[i]) / (2.0 * h);
          CHECK(J[i][j] == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
        }
      }
    }
  }

  TEST_CASE("integrate_ode") {
    const ToggleSwitchParams p;
    const CellState x0{4.0, 5.0, 200.0, 300.0, 0.0, 0.0};

    SUBCASE("zero horizon returns the input") { CHECK(integrate_ode(x0, {}, 0.0, 0.1, p) == x0); }

    SUBCASE("partial last step") {
      const CellState a = integrate_ode(x0, {}, 0.25, 0.1, p);
      CellState b = rk4_step(x0, {}, 0.1, p);
      b = rk4_step(b, {}, 0.1, p);
      b = rk4_step(b, {}, 0.05, p);
      CHECK(max_abs(ode_rhs(a, {}, p)) == doctest::Approx(max_abs(ode_rhs(b, {}, p))));
      CHECK(a.lacI == doctest::Approx(b.lacI).epsilon(1e-12));
    }

    SUBCASE("full aTc drives the cell LacI-dominant") {
      const CellState end = integrate_ode(x0, {100.0, 0.0}, 2000.0, 0.1, p);
      CHECK(classify(end) == CellClass::kB);
      CHECK(end.is_nonnegative());
    }

    SUBCASE("full IPTG drives the cell TetR-dominant") {
      const CellState end = integrate_ode(x0, {0.0, 1.0}, 2000.0, 0.1, p);
      CHECK(classify(end) == CellClass::kA);
    }

    SUBCASE("RK4 self-convergence") {
      const InducerInput u{20.0, 0.2};
      auto endpoint = [&](double h) { return integrate_ode(x0, u, 60.0, h, p).to_array(); };
      const auto e1 = endpoint(0.8), e2 = endpoint(0.4), e3 = endpoint(0.2);
      double d12 = 0.0, d23 = 0.0;
      for (std::size_t i = 0; i < kStateDim; ++i) {
        d12 = std::max(d12, std::abs(e1[i] - e2[i]));
        d23 = std::max(d23, std::abs(e2[i] - e3[i]));
      }
      CHECK(d23 > 0.0);
      CHECK(d12 / d23 >= 8.0);
    }

    SUBCASE("invalid arguments") {
      CHECK_THROWS_AS((void)integrate_ode(x0, {}, 1.0, 0.0, p), ConfigError);
      CellState bad = x0;
      bad.lacI = std::nan("");
      CHECK_THROWS_AS((void)integrate_ode(bad, {}, 1.0, 0.1, p), IntegrationDiverged);
    }
  }

  TEST_CASE("equilibria without inducer: two stable points and a saddle") {
    const ToggleSwitchParams p;
    const auto res = find_equilibria({0.0, 0.0}, p);
    REQUIRE(res.equilibria.size() == 3);
    int stable = 0, saddle = 0;
    for (const auto& e : res.equilibria) {
      CHECK(max_abs(ode_rhs(e.state, {}, p)) < 1e-8);
      CHECK(e.state.is_nonnegative());
      stable += e.stability == Stability::kStable;
      saddle += e.stability == Stability::kSaddle;
    }
    CHECK(stable == 2);
    CHECK(saddle == 1);
    CHECK(res.equilibria[1].stability == Stability::kSaddle);
    CHECK(classify(res.equilibria.front().state) == CellClass::kA);
    CHECK(classify(res.equilibria.back().state) == CellClass::kB);

    // Basin representatives far from the separatrix.
    const CellState a0{1.0, 20.0, 20.0, 1500.0, 0.0, 0.0};
    const CellState b0{60.0, 1.0, 2500.0, 20.0, 0.0, 0.0};
    const CellState a_end = integrate_ode(a0, {}, 3000.0, 0.1, p);
    const CellState b_end = integrate_ode(b0, {}, 3000.0, 0.1, p);
    CHECK(a_end.lacI == doctest::Approx(res.equilibria.front().state.lacI).epsilon(1e-4));
    CHECK(b_end.lacI == doctest::Approx(res.equilibria.back().state.lacI).epsilon(1e-4));
  }

  TEST_CASE("saturating inputs leave one stable equilibrium") {
    const ToggleSwitchParams p;
    const auto hi_atc = find_equilibria({100.0, 0.0}, p);
    REQUIRE(hi_atc.equilibria.size() == 1);
    CHECK(hi_atc.equilibria[0].stability == Stability::kStable);
    CHECK(classify(hi_atc.equilibria[0].state) == CellClass::kB);

    const auto hi_iptg = find_equilibria({0.0, 1.0}, p);
    REQUIRE(hi_iptg.equilibria.size() == 1);
    CHECK(classify(hi_iptg.equilibria[0].state) == CellClass::kA);
  }

  TEST_CASE("no convergence yields an empty list with a diagnostic") {
    EquilibriumSearchOptions opts;
    opts.max_iterations = 0;
    const auto res = find_equilibria({0.0, 0.0}, ToggleSwitchParams{}, opts);
    CHECK(res.equilibria.empty());
    CHECK_FALSE(res.diagnostic.empty());
  }
}
