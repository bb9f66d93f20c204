#include "gaincap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gaincap/oracle.hpp"
#include "gaincap/spectrum.hpp"

namespace gaincap::shell {

namespace {

using circuit::CircuitParams;
using circuit::Matching;
using circuit::MatchingPlacement;
using circuit::Termination;

double rel_err(double a, double ref) {
  return std::abs(a - ref) / std::max(std::abs(ref), 1e-300);
}

struct Draw {
  std::mt19937_64 rng{20240817u};
  double log_uniform(double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  }
  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
  }
};

Termination random_termination(Draw& d, bool matched, MatchingPlacement pl) {
  Termination t;
  t.g_s = d.log_uniform(0.05, 20.0);
  t.g_l = d.log_uniform(0.05, 20.0);
  if (matched) t.matching = Matching{d.log_uniform(0.1, 50.0), pl};
  return t;
}

}  // namespace

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck& c) { return c.pass; });
}

VerifyReport run_verify(const RunConfig& cfg, bool quick,
                        const VerifyHooks& hooks) {
  cfg.params.validate();
  const auto transfer_of = hooks.transfer
                               ? hooks.transfer
                               : [](const CircuitParams& p,
                                    const Termination& t, double w) {
                                   return circuit::transfer_function(p, t, w);
                                 };
  const auto gain_of =
      hooks.gain ? hooks.gain
                 : [](const CircuitParams& p, const Termination& t, double w) {
                     return circuit::power_gain(p, t, w);
                   };

  VerifyReport report;
  Draw draw;
  const CircuitParams& cp = cfg.params;
  const int n_nodal = quick ? 8 : 32;
  const int n_solver = quick ? 2 : 6;
  const int n_primal = quick ? 1 : 3;
  const std::size_t grid_n = quick ? 512 : 1024;

  // closed forms vs nodal analysis, all inductor placements included
  {
    VerifyCheck h{"transfer vs nodal", 0.0, 1e-12, false};
    VerifyCheck g{"gain vs nodal", 0.0, 1e-12, false};
    const MatchingPlacement placements[] = {MatchingPlacement::ParallelToCgd,
                                            MatchingPlacement::ShuntInput,
                                            MatchingPlacement::ShuntOutput};
    for (int i = 0; i < n_nodal; ++i) {
      const bool matched = i % 2 == 1;
      const auto pl = placements[i % 3];
      const auto term = random_termination(draw, matched, pl);
      for (int k = 0; k < 5; ++k) {
        // inductive branches make the nodal matrix singular at omega = 0
        const double w = matched ? draw.log_uniform(1e-3, 20.0)
                                 : draw.uniform(0.0, 20.0);
        const auto ref_h = oracle::nodal_transfer(cp, term, w);
        const auto ref_g = oracle::nodal_power_gain(cp, term, w);
        h.worst = std::max(h.worst, std::abs(transfer_of(cp, term, w) - ref_h) /
                                        std::max(std::abs(ref_h), 1e-300));
        g.worst = std::max(g.worst, rel_err(gain_of(cp, term, w), ref_g));
      }
      if (matched && pl == MatchingPlacement::ParallelToCgd) {
        const double w0 =
            1.0 / std::sqrt(term.matching->L * cp.C_gd);
        const double gl2 = term.g_l + cp.g_d;
        const double ident =
            4.0 * term.g_l * cp.g_m * cp.g_m / (term.g_s * gl2 * gl2);
        g.worst = std::max(g.worst, rel_err(gain_of(cp, term, w0), ident));
      }
    }
    h.pass = h.worst <= h.tol;
    g.pass = g.worst <= g.tol;
    report.checks.push_back(h);
    report.checks.push_back(g);
  }

  // dual solver vs brute-force scan, primal ascent, and the duality gap
  {
    VerifyCheck sc{"dual solver vs scan", 0.0, 1e-8, false};
    VerifyCheck pa{"primal ascent vs dual", 0.0, 1e-6, false};
    VerifyCheck dg{"duality gap", 0.0, 1e-8, false};
    const auto grid =
        circuit::FrequencyGrid::symmetric(cfg.trace.grid_omega_max, grid_n);
    const oracle::BruteForceOptions bf_opts{quick ? 600 : 2000,
                                            quick ? 80 : 120};
    const double frac[] = {0.0, 0.35, 0.8};
    for (int i = 0; i < n_solver; ++i) {
      const auto term = random_termination(draw, false,
                                           MatchingPlacement::ParallelToCgd);
      const auto prof = circuit::gain_profile(cp, term, grid);
      const double gmax =
          *std::max_element(prof.values.begin(), prof.values.end());
      spectrum::BudgetSpec budget;
      budget.P = cfg.trace.P;
      budget.eta = frac[i % 3] * gmax;
      budget.nf_n0 = circuit::noise_figure(cp, term) * cp.N0;
      const auto sol = spectrum::solve_constrained(budget, prof);
      const auto ref = oracle::brute_force_duals(budget, prof, bf_opts);
      sc.worst = std::max(sc.worst, rel_err(sol.capacity, ref.capacity));
      sc.worst = std::max(sc.worst, rel_err(sol.p_out, ref.p_out));
      if (sol.status != spectrum::SolveStatus::Infeasible) {
        const double dual = oracle::dual_value(budget, prof, sol.lambda,
                                               sol.mu);
        dg.worst = std::max(dg.worst, rel_err(dual, sol.capacity));
        if (i < n_primal) {
          const auto ascent = oracle::direct_psd_maximizer(budget, prof);
          pa.worst = std::max(pa.worst,
                              rel_err(ascent.objective, sol.capacity));
        }
      }
    }
    sc.pass = sc.worst <= sc.tol;
    pa.pass = pa.worst <= pa.tol;
    dg.pass = dg.worst <= dg.tol;
    report.checks.push_back(sc);
    report.checks.push_back(pa);
    report.checks.push_back(dg);
  }

  // KKT residuals over a short trace of the configured scenario
  {
    VerifyCheck core{"kkt core residuals", 0.0, 1e-6, false};
    VerifyCheck outer{"kkt outer stationarity", 0.0, 1e-4, false};
    pareto::TraceConfig tc = cfg.trace;
    tc.grid_samples = grid_n;
    tc.multistart = std::min(cfg.trace.multistart, 3);
    double ceiling = pareto::eta_max(tc.scenario, cp, tc);
    if (tc.scenario == pareto::Scenario::PsdAndTerminations)
      ceiling = std::min(ceiling, pareto::eta_max_on_grid(cp, tc));
    tc.eta_grid = quick ? std::vector<double>{0.0, 0.3 * ceiling}
                        : std::vector<double>{0.0, 0.25 * ceiling,
                                              0.6 * ceiling};
    const auto points = pareto::trace_pareto(tc, cp);
    const oracle::KktContext ctx{tc.scenario, cp, tc};
    for (const auto& pt : points) {
      if (pt.status == spectrum::SolveStatus::Infeasible) continue;
      const auto rep = oracle::kkt_residuals(pt, ctx);
      core.worst = std::max({core.worst, rep.stationarity_residual,
                             rep.primal_power_residual, rep.transfer_residual,
                             rep.slackness_residual});
      outer.worst = std::max(outer.worst, rep.outer_gradient_residual);
    }
    core.pass = core.worst <= core.tol;
    outer.pass = outer.worst <= outer.tol;
    report.checks.push_back(core);
    report.checks.push_back(outer);
  }

  // quadrature identities
  {
    VerifyCheck bg{"band gain quadrature", 0.0, 1e-9, false};
    VerifyCheck uc{"uniform capacity closed form", 0.0, 1e-10, false};
    const int n_q = quick ? 5 : 20;
    for (int i = 0; i < n_q; ++i) {
      const auto term = random_termination(draw, false,
                                           MatchingPlacement::ParallelToCgd);
      const double omega_b = draw.log_uniform(0.02, 2.0);
      const double analytic =
          oracle::analytic_band_gain_integral(cp, term, omega_b / 2.0) /
          omega_b;
      const double quad = oracle::band_average_gain_quadrature(
          cp, term, omega_b, quick ? 32769 : 131073);
      bg.worst = std::max(bg.worst, rel_err(quad, analytic));

      const double closed =
          pareto::capacity_uniform(cp, term, cfg.trace.P, omega_b);
      const auto band =
          circuit::FrequencyGrid::symmetric(omega_b / 2.0, 4096);
      const std::vector<double> flat(band.size(), cfg.trace.P / omega_b);
      const double nf = circuit::noise_figure(cp, term) * cp.N0;
      const double viaGrid = spectrum::capacity_of(flat, nf, band);
      uc.worst = std::max(uc.worst, rel_err(viaGrid, closed));
    }
    bg.pass = bg.worst <= bg.tol;
    uc.pass = uc.worst <= uc.tol;
    report.checks.push_back(bg);
    report.checks.push_back(uc);
  }

  return report;
}

}  // namespace gaincap::shell
