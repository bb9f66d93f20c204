#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gaincap/oracle.hpp"
#include "gaincap/pareto.hpp"

using namespace gaincap;
using circuit::CircuitParams;
using circuit::FrequencyGrid;
using circuit::Matching;
using circuit::MatchingPlacement;
using circuit::Termination;

namespace {

CircuitParams test_params() {
  CircuitParams p;
  p.g_d = 0.1;
  p.g_o = 0.1;
  return p;
}

spectrum::BudgetSpec budget_for(const CircuitParams& p, const Termination& t,
                                double eta) {
  spectrum::BudgetSpec b;
  b.P = 0.1;
  b.eta = eta;
  b.nf_n0 = circuit::noise_figure(p, t) * p.N0;
  return b;
}

}  // namespace

TEST_CASE("nodal solver reproduces a hand-built divider") {
  // two conductances in series from a unit current injection
  oracle::Netlist net;
  net.nodes = 3;
  net.branches = {{oracle::BranchKind::Conductance, 1, 2, 2.0, 0, 0},
                  {oracle::BranchKind::Conductance, 2, 0, 3.0, 0, 0}};
  const std::vector<std::complex<double>> inj{{0.0, 0.0}, {1.0, 0.0},
                                              {0.0, 0.0}};
  const auto u = oracle::nodal_solve(net, 0.0, inj);
  // series conductance 6/5, node 1 voltage = 1/(6/5); the full ampere
  // continues through the 3 S branch
  CHECK(std::abs(u[1] - std::complex<double>(5.0 / 6.0, 0.0)) < 1e-14);
  CHECK(std::abs(u[2] - std::complex<double>(1.0 / 3.0, 0.0)) < 1e-14);
}

TEST_CASE("nodal solver flags singular systems") {
  oracle::Netlist net;
  net.nodes = 2;
  net.branches = {{oracle::BranchKind::Inductor, 1, 0, 1.0, 0, 0}};
  // an inductor at dc shorts the only node: no finite nodal solution
  const std::vector<std::complex<double>> inj{{0.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(oracle::nodal_solve(net, 0.0, inj), oracle::SingularNetlist);
  oracle::Netlist floating;
  floating.nodes = 2;  // node without any branch
  CHECK_THROWS_AS(oracle::nodal_solve(floating, 1.0, inj),
                  oracle::SingularNetlist);
}

TEST_CASE("randomized closed form versus nodal analysis") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MatchingPlacement placements[] = {MatchingPlacement::ParallelToCgd,
                                          MatchingPlacement::ShuntInput,
                                          MatchingPlacement::ShuntOutput};
  for (int i = 0; i < 25; ++i) {
    CircuitParams p;
    p.g_d = 0.3 * std::exp(u(rng));
    p.g_o = 0.2 * std::exp(u(rng));
    Termination t{std::exp(2.0 * u(rng)), std::exp(2.0 * u(rng)),
                  std::nullopt};
    if (i % 2) t.matching = Matching{std::exp(2.0 * u(rng)), placements[i % 3]};
    for (int k = 0; k < 4; ++k) {
      const double w = std::exp(3.0 * u(rng));
      const auto ref = oracle::nodal_transfer(p, t, w);
      CHECK(std::abs(circuit::transfer_function(p, t, w) - ref) /
                std::abs(ref) <
            1e-12);
      CHECK(circuit::power_gain(p, t, w) ==
            doctest::Approx(oracle::nodal_power_gain(p, t, w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("brute force dual scan agrees with the solver") {
  const CircuitParams p = test_params();
  const Termination t{0.7, 1.3, std::nullopt};
  const auto prof =
      circuit::gain_profile(p, t, FrequencyGrid::symmetric(20.0, 512));
  const double gmax =
      *std::max_element(prof.values.begin(), prof.values.end());
  for (double frac : {0.0, 0.7}) {
    const auto budget = budget_for(p, t, frac * gmax);
    const auto sol = spectrum::solve_constrained(budget, prof);
    const auto ref = oracle::brute_force_duals(budget, prof, {800, 100});
    CHECK(sol.status == ref.status);
    CHECK(sol.capacity == doctest::Approx(ref.capacity).epsilon(1e-8));
    CHECK(sol.p_out == doctest::Approx(ref.p_out).epsilon(1e-8));
  }
}

TEST_CASE("projected ascent reaches the dual optimum") {
  const CircuitParams p = test_params();
  const Termination t{0.5, 0.8, std::nullopt};
  const auto prof =
      circuit::gain_profile(p, t, FrequencyGrid::symmetric(20.0, 256));
  const double gmax =
      *std::max_element(prof.values.begin(), prof.values.end());
  const auto budget = budget_for(p, t, 0.75 * gmax);
  const auto sol = spectrum::solve_constrained(budget, prof);
  REQUIRE(sol.status == spectrum::SolveStatus::ConstraintActive);
  const auto ascent = oracle::direct_psd_maximizer(budget, prof);
  CHECK(ascent.objective == doctest::Approx(sol.capacity).epsilon(1e-6));
  // the iterate is primal feasible
  double power = 0.0, transfer = 0.0;
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    CHECK(ascent.psd[i] >= 0.0);
    power += prof.grid.weights[i] * ascent.psd[i];
    transfer += prof.grid.weights[i] * ascent.psd[i] * prof.values[i];
  }
  CHECK(power == doctest::Approx(budget.P).epsilon(1e-9));
  CHECK(transfer >= budget.eta * budget.P * (1.0 - 1e-9));
}

TEST_CASE("dual function bounds the capacity") {
  const CircuitParams p = test_params();
  const Termination t{0.7, 1.3, std::nullopt};
  const auto prof =
      circuit::gain_profile(p, t, FrequencyGrid::symmetric(20.0, 256));
  const double gmax =
      *std::max_element(prof.values.begin(), prof.values.end());
  const auto budget = budget_for(p, t, 0.5 * gmax);
  const auto sol = spectrum::solve_constrained(budget, prof);
  const double at_opt = oracle::dual_value(budget, prof, sol.lambda, sol.mu);
  CHECK(at_opt >= sol.capacity - 1e-10);
  CHECK(at_opt == doctest::Approx(sol.capacity).epsilon(1e-8));
  // any other admissible multiplier pair is an upper bound too
  CHECK(oracle::dual_value(budget, prof, sol.lambda * 1.3, sol.mu) >=
        sol.capacity - 1e-10);
  CHECK_THROWS_AS(oracle::dual_value(budget, prof, sol.lambda, -0.1),
                  std::domain_error);
  // lambda below mu*gain makes the per-frequency supremum unbounded
  CHECK_THROWS_AS(oracle::dual_value(budget, prof, 1e-12, 1.0),
                  std::domain_error);
}

TEST_CASE("inner optimality residuals") {
  const CircuitParams p = test_params();
  const Termination t{0.7, 1.3, std::nullopt};
  const auto prof =
      circuit::gain_profile(p, t, FrequencyGrid::symmetric(20.0, 512));
  const double gmax =
      *std::max_element(prof.values.begin(), prof.values.end());
  const auto budget = budget_for(p, t, 0.6 * gmax);
  const auto sol = spectrum::solve_constrained(budget, prof);
  const auto rep = oracle::kkt_residuals(budget, prof, sol);
  CHECK(rep.stationarity_residual < 1e-9);
  CHECK(rep.primal_power_residual < 1e-9);
  CHECK(rep.transfer_residual < 1e-9);
  CHECK(rep.slackness_residual < 1e-9);

  auto bad = sol;
  bad.status = spectrum::SolveStatus::Infeasible;
  CHECK_THROWS_AS(oracle::kkt_residuals(budget, prof, bad),
                  std::invalid_argument);
  bad = sol;
  bad.psd.pop_back();
  CHECK_THROWS_AS(oracle::kkt_residuals(budget, prof, bad),
                  std::invalid_argument);
}

TEST_CASE("full point report accepts the optimum and rejects an offset") {
  const CircuitParams p = test_params();
  pareto::TraceConfig cfg;
  cfg.scenario = pareto::Scenario::PsdAndTerminations;
  cfg.eta_grid = {0.0};
  cfg.grid_samples = 512;
  cfg.multistart = 3;
  const auto grid =
      FrequencyGrid::symmetric(cfg.grid_omega_max, cfg.grid_samples);
  const double eta = 5.0;
  const auto pt = pareto::optimize_terminations_A(eta, p, cfg.P, grid, cfg);
  REQUIRE(pt.status == spectrum::SolveStatus::ConstraintActive);
  const oracle::KktContext ctx{cfg.scenario, p, cfg};
  const auto good = oracle::kkt_residuals(pt, ctx);
  CHECK(good.pass());

  // same machinery at displaced terminations: inner system still consistent,
  // outer stationarity violated.  Shrinking g_s raises the gain peak, so the
  // displaced problem stays feasible.
  pareto::ParetoPoint off = pt;
  off.g_s = pt.g_s * 0.5;
  const Termination t_off{off.g_s, off.g_l, std::nullopt};
  const auto prof = circuit::gain_profile(p, t_off, grid);
  spectrum::BudgetSpec budget;
  budget.P = cfg.P;
  budget.eta = eta;
  budget.nf_n0 = circuit::noise_figure(p, t_off) * p.N0;
  const auto sol = spectrum::solve_constrained(budget, prof);
  REQUIRE(sol.status != spectrum::SolveStatus::Infeasible);
  off.capacity = sol.capacity;
  off.lambda = sol.lambda;
  off.mu = sol.mu;
  off.p_out = sol.p_out;
  off.status = sol.status;
  off.spectral = sol;
  const auto bad = oracle::kkt_residuals(off, ctx);
  CHECK(bad.outer_gradient_residual > bad.tol_outer);
  CHECK_FALSE(bad.pass());

  pareto::ParetoPoint stripped = pt;
  stripped.spectral.reset();
  CHECK_THROWS_AS(oracle::kkt_residuals(stripped, ctx), std::invalid_argument);
}

TEST_CASE("band integral closed form versus refined quadrature") {
  const CircuitParams p = test_params();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Termination t{std::exp(1.5 * u(rng)), std::exp(1.5 * u(rng)),
                        std::nullopt};
    const double W = std::exp(2.0 * u(rng));
    const double analytic = oracle::analytic_band_gain_integral(p, t, W);
    const double quad =
        oracle::band_average_gain_quadrature(p, t, 2.0 * W, 131073) * 2.0 * W;
    CHECK(analytic == doctest::Approx(quad).epsilon(1e-9));
  }
  Termination matched{1.0, 1.0, std::nullopt};
  matched.matching = Matching{1.0, MatchingPlacement::ParallelToCgd};
  CHECK_THROWS_AS(oracle::analytic_band_gain_integral(p, matched, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      oracle::band_average_gain_quadrature(p, {1.0, 1.0, std::nullopt}, 1.0,
                                           128),
      std::invalid_argument);
}
