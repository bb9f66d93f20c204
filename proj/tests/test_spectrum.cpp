#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaincap/circuit.hpp"
#include "gaincap/spectrum.hpp"

using namespace gaincap;
using circuit::CircuitParams;
using circuit::FrequencyGrid;
using circuit::GainProfile;
using circuit::Termination;

namespace {

constexpr double kLn2 = std::numbers::ln2;

GainProfile profile_of(double g_d, const Termination& t, double omega_max,
                       std::size_t n) {
  CircuitParams p;
  p.g_d = g_d;
  return circuit::gain_profile(p, t, FrequencyGrid::symmetric(omega_max, n));
}

GainProfile constant_profile(double value, double omega_max, std::size_t n) {
  GainProfile prof;
  prof.grid = FrequencyGrid::symmetric(omega_max, n);
  prof.values.assign(prof.grid.size(), value);
  return prof;
}

// classic waterfilling: single multiplier found by bisection on the power
// budget, written independently of the production solver
double classic_level(double P, double nf, const FrequencyGrid& grid) {
  double lo = 1e-12, hi = 1.0 / (kLn2 * nf);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    double power = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      power += grid.weights[k] * std::max(0.0, 1.0 / (kLn2 * mid) - nf);
    (power > P ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("budget validation") {
  spectrum::BudgetSpec b;
  b.P = 0.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = {};
  b.eta = -1.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = {};
  b.nf_n0 = 0.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("unconstrained allocation over flat noise is flat") {
  const auto prof = constant_profile(2.0, 25.0, 512);
  spectrum::BudgetSpec budget;
  budget.P = 0.1;
  budget.eta = 0.0;
  budget.nf_n0 = 1.25;
  const auto sol = spectrum::solve_constrained(budget, prof);
  CHECK(sol.status == spectrum::SolveStatus::ConstraintInactive);
  CHECK(sol.mu == 0.0);
  const double flat = budget.P / 50.0;
  for (double v : sol.psd) CHECK(v == doctest::Approx(flat).epsilon(1e-10));
  CHECK(sol.lambda ==
        doctest::Approx(1.0 / (kLn2 * (flat + budget.nf_n0))).epsilon(1e-10));
  CHECK(sol.capacity ==
        doctest::Approx(50.0 * std::log2(1.0 + flat / budget.nf_n0))
            .epsilon(1e-10));
  CHECK(sol.boundary_warning);  // flat support reaches the grid edge
  CHECK(sol.support_measure == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("zero transfer requirement reduces to classic waterfilling") {
  const auto prof = profile_of(0.1, {0.7, 1.3, std::nullopt}, 50.0, 1024);
  spectrum::BudgetSpec budget;
  budget.P = 0.1;
  budget.eta = 0.0;
  budget.nf_n0 = 1.0 + 0.1 / 0.7;
  const auto sol = spectrum::solve_constrained(budget, prof);
  const double level = classic_level(budget.P, budget.nf_n0, prof.grid);
  CHECK(sol.lambda == doctest::Approx(level).epsilon(1e-10));
  const double flat = 1.0 / (kLn2 * level) - budget.nf_n0;
  for (double v : sol.psd) CHECK(v == doctest::Approx(flat).epsilon(1e-10));
}

TEST_CASE("capacity falls and transferred power rises with the requirement") {
  const auto prof = profile_of(0.1, {0.7, 1.3, std::nullopt}, 20.0, 512);
  const double gmax =
      *std::max_element(prof.values.begin(), prof.values.end());
  spectrum::BudgetSpec budget;
  budget.P = 0.1;
  budget.nf_n0 = 1.1;
  double prev_cap = 1e300, prev_pout = -1.0;
  for (double frac : {0.0, 0.2, 0.5, 0.8, 0.95}) {
    budget.eta = frac * gmax;
    const auto sol = spectrum::solve_constrained(budget, prof);
    REQUIRE(sol.status != spectrum::SolveStatus::Infeasible);
    CHECK(sol.capacity <= prev_cap * (1.0 + 1e-12));
    CHECK(sol.p_out >= prev_pout - 1e-12);
    if (frac == 0.0) {
      CHECK(sol.status == spectrum::SolveStatus::ConstraintInactive);
    } else {
      CHECK(sol.mu > 0.0);
      // an active constraint is met with equality
      CHECK(sol.p_out ==
            doctest::Approx(budget.eta * budget.P).epsilon(1e-9));
    }
    prev_cap = sol.capacity;
    prev_pout = sol.p_out;
  }
}

TEST_CASE("requirement above the peak gain is infeasible") {
  const auto prof = profile_of(0.1, {0.7, 1.3, std::nullopt}, 20.0, 256);
  const double gmax =
      *std::max_element(prof.values.begin(), prof.values.end());
  spectrum::BudgetSpec budget;
  budget.P = 0.1;
  budget.eta = 1.2 * gmax;
  budget.nf_n0 = 1.1;
  const auto sol = spectrum::solve_constrained(budget, prof);
  CHECK(sol.status == spectrum::SolveStatus::Infeasible);
}

TEST_CASE("solution is reproducible from its own multipliers") {
  const auto prof = profile_of(0.05, {1.1, 0.6, std::nullopt}, 30.0, 512);
  spectrum::BudgetSpec budget;
  budget.P = 0.2;
  budget.nf_n0 = 1.05;
  budget.eta = 0.6 * *std::max_element(prof.values.begin(), prof.values.end());
  const auto sol = spectrum::solve_constrained(budget, prof);
  REQUIRE(sol.status == spectrum::SolveStatus::ConstraintActive);
  const auto psd =
      spectrum::psd_from_duals(sol.lambda, sol.mu, prof, budget.nf_n0);
  REQUIRE(psd.size() == sol.psd.size());
  for (std::size_t i = 0; i < psd.size(); ++i)
    CHECK(psd[i] == doctest::Approx(sol.psd[i]).epsilon(1e-12));
}

TEST_CASE("lambda bisection meets the power budget") {
  const auto prof = profile_of(0.1, {0.9, 0.9, std::nullopt}, 20.0, 512);
  for (double mu : {0.0, 0.01, 0.1}) {
    const double lam = spectrum::lambda_for_power(mu, 0.15, prof, 1.2);
    const auto psd = spectrum::psd_from_duals(lam, mu, prof, 1.2);
    double total = 0.0;
    for (std::size_t i = 0; i < psd.size(); ++i)
      total += prof.grid.weights[i] * psd[i];
    CHECK(total == doctest::Approx(0.15).epsilon(1e-10));
  }
}

TEST_CASE("quadrature helpers on a tiny axis") {
  const auto grid = FrequencyGrid::symmetric(1.0, 4);
  const std::vector<double> psd{0.3, 0.1, 0.2, 0.4};
  const double h = 2.0 / 3.0;
  const double nf = 1.5;
  double cap = 0.0, pw = 0.0;
  const double w[] = {h / 2, h, h, h / 2};
  GainProfile prof;
  prof.grid = grid;
  prof.values = {1.0, 2.0, 3.0, 4.0};
  for (int i = 0; i < 4; ++i) {
    cap += w[i] * std::log2(1.0 + psd[i] / nf);
    pw += w[i] * psd[i] * prof.values[i];
  }
  CHECK(spectrum::capacity_of(psd, nf, grid) ==
        doctest::Approx(cap).epsilon(1e-14));
  CHECK(spectrum::transferred_power(psd, prof, grid) ==
        doctest::Approx(pw).epsilon(1e-14));
}

TEST_CASE("narrow high gain region concentrates the allocation") {
  // low-pass profile with a strong requirement: support shrinks inside the
  // grid and the boundary flag clears
  const auto prof = profile_of(0.1, {0.2, 0.15, std::nullopt}, 50.0, 1024);
  const double gmax =
      *std::max_element(prof.values.begin(), prof.values.end());
  spectrum::BudgetSpec budget;
  budget.P = 0.1;
  budget.nf_n0 = 1.3;
  budget.eta = 0.97 * gmax;
  const auto sol = spectrum::solve_constrained(budget, prof);
  REQUIRE(sol.status == spectrum::SolveStatus::ConstraintActive);
  CHECK_FALSE(sol.boundary_warning);
  CHECK(sol.support_measure < 100.0 / 3.0);
  const double peak = *std::max_element(sol.psd.begin(), sol.psd.end());
  CHECK(peak > budget.P / 100.0);
}
