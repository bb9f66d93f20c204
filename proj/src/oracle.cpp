#include "gaincap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gaincap::oracle {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

// ---------------------------------------------------------------------------
// Nodal analysis

void stamp_admittance(std::vector<std::vector<std::complex<double>>>& Y, int a,
                      int b, std::complex<double> y) {
  // Rows and columns are the non-ground nodes, shifted down by one.
  if (a > 0) Y[a - 1][a - 1] += y;
  if (b > 0) Y[b - 1][b - 1] += y;
  if (a > 0 && b > 0) {
    Y[a - 1][b - 1] -= y;
    Y[b - 1][a - 1] -= y;
  }
}

void stamp_vccs(std::vector<std::vector<std::complex<double>>>& Y, int a, int b,
                int cp, int cn, double g) {
  // Current g*(v(cp) - v(cn)) leaves node a and enters node b.
  if (a > 0 && cp > 0) Y[a - 1][cp - 1] += g;
  if (a > 0 && cn > 0) Y[a - 1][cn - 1] -= g;
  if (b > 0 && cp > 0) Y[b - 1][cp - 1] -= g;
  if (b > 0 && cn > 0) Y[b - 1][cn - 1] += g;
}

}  // namespace

std::vector<std::complex<double>> nodal_solve(
    const Netlist& net, double omega,
    std::span<const std::complex<double>> injections) {
  if (net.nodes < 2) throw std::invalid_argument("nodal_solve: need two nodes");
  if (injections.size() != static_cast<std::size_t>(net.nodes))
    throw std::invalid_argument("nodal_solve: one injection per node expected");
  const int n = net.nodes - 1;
  std::vector<std::vector<std::complex<double>>> Y(
      n, std::vector<std::complex<double>>(n, 0.0));
  for (const Branch& br : net.branches) {
    if (br.a < 0 || br.a >= net.nodes || br.b < 0 || br.b >= net.nodes)
      throw std::invalid_argument("nodal_solve: branch node out of range");
    switch (br.kind) {
      case BranchKind::Conductance:
        stamp_admittance(Y, br.a, br.b, br.value);
        break;
      case BranchKind::Capacitor:
        stamp_admittance(Y, br.a, br.b, std::complex<double>(0.0, omega * br.value));
        break;
      case BranchKind::Inductor:
        if (omega == 0.0)
          throw SingularNetlist("nodal_solve: inductive branch at omega = 0");
        stamp_admittance(Y, br.a, br.b,
                         std::complex<double>(0.0, -1.0 / (omega * br.value)));
        break;
      case BranchKind::Vccs:
        if (br.ctrl_p < 0 || br.ctrl_p >= net.nodes || br.ctrl_n < 0 ||
            br.ctrl_n >= net.nodes)
          throw std::invalid_argument("nodal_solve: control node out of range");
        stamp_vccs(Y, br.a, br.b, br.ctrl_p, br.ctrl_n, br.value);
        break;
    }
  }

  std::vector<std::complex<double>> rhs(n);
  for (int k = 0; k < n; ++k) rhs[k] = injections[k + 1];

  double scale = 0.0;
  for (const auto& row : Y)
    for (const auto& y : row) scale = std::max(scale, std::abs(y));
  const double tiny = scale * 1e-14;

  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(Y[r][col]) > std::abs(Y[piv][col])) piv = r;
    if (std::abs(Y[piv][col]) <= tiny)
      throw SingularNetlist("nodal_solve: admittance matrix is singular at omega = " +
                            std::to_string(omega));
    std::swap(Y[piv], Y[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = col + 1; r < n; ++r) {
      const std::complex<double> f = Y[r][col] / Y[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) Y[r][c] -= f * Y[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<std::complex<double>> u(net.nodes, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    std::complex<double> s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= Y[r][c] * u[c + 1];
    u[r + 1] = s / Y[r][r];
  }
  return u;
}

Netlist amplifier_netlist(const circuit::CircuitParams& cp,
                          const circuit::Termination& term) {
  cp.validate();
  term.validate();
  constexpr int kGate = 1, kDrain = 2;
  Netlist net;
  net.nodes = 3;
  net.branches.push_back({BranchKind::Conductance, kGate, 0, term.g_s, 0, 0});
  net.branches.push_back({BranchKind::Capacitor, kGate, kDrain, cp.C_gd, 0, 0});
  net.branches.push_back({BranchKind::Vccs, kDrain, 0, cp.g_m, kGate, 0});
  if (cp.g_d > 0.0)
    net.branches.push_back({BranchKind::Conductance, kDrain, 0, cp.g_d, 0, 0});
  net.branches.push_back({BranchKind::Conductance, kDrain, 0, term.g_l, 0, 0});
  if (term.matching) {
    int a = kGate, b = kDrain;
    switch (term.matching->placement) {
      case circuit::MatchingPlacement::ParallelToCgd:
        break;
      case circuit::MatchingPlacement::ShuntInput:
        b = 0;
        break;
      case circuit::MatchingPlacement::ShuntOutput:
        a = kDrain;
        b = 0;
        break;
    }
    net.branches.push_back({BranchKind::Inductor, a, b, term.matching->L, 0, 0});
  }
  return net;
}

std::complex<double> nodal_transfer(const circuit::CircuitParams& cp,
                                    const circuit::Termination& term,
                                    double omega) {
  const Netlist net = amplifier_netlist(cp, term);
  const std::vector<std::complex<double>> inj{0.0, 1.0, 0.0};
  const auto u = nodal_solve(net, omega, inj);
  return term.g_s * u[2];
}

double nodal_power_gain(const circuit::CircuitParams& cp,
                        const circuit::Termination& term, double omega) {
  const Netlist net = amplifier_netlist(cp, term);
  const std::vector<std::complex<double>> inj{0.0, 1.0, 0.0};
  const auto u = nodal_solve(net, omega, inj);
  return 4.0 * term.g_s * term.g_l * std::norm(u[2]);
}

// ---------------------------------------------------------------------------
// Constrained-spectrum cross checks

namespace {

void check_instance(const spectrum::BudgetSpec& budget,
                    const circuit::GainProfile& gain) {
  budget.validate();
  if (gain.values.size() != gain.grid.size() || gain.values.empty())
    throw std::invalid_argument("oracle: gain profile and grid sizes differ");
  for (double g : gain.values)
    if (!std::isfinite(g) || g < 0.0)
      throw std::invalid_argument("oracle: gain profile must be finite and nonnegative");
}

double bf_psd_at(double lambda, double mu, double g, double nf) {
  return std::max(0.0, kInvLn2 / (lambda - mu * g) - nf);
}

double bf_power(double lambda, double mu, const circuit::GainProfile& gain,
                double nf) {
  double p = 0.0;
  for (std::size_t k = 0; k < gain.values.size(); ++k)
    p += gain.grid.weights[k] * bf_psd_at(lambda, mu, gain.values[k], nf);
  return p;
}

double bf_transfer(double lambda, double mu, const circuit::GainProfile& gain,
                   double nf) {
  double t = 0.0;
  for (std::size_t k = 0; k < gain.values.size(); ++k)
    t += gain.grid.weights[k] * gain.values[k] *
         bf_psd_at(lambda, mu, gain.values[k], nf);
  return t;
}

double bf_lambda(double mu, double P, const circuit::GainProfile& gain,
                 double nf, double gmax) {
  double lo = mu * gmax;
  double hi = mu * gmax + kInvLn2 / nf;  // PSD identically zero here
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (bf_power(mid, mu, gain, nf) > P ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

spectrum::SpectralSolution bf_assemble(double lambda, double mu,
                                       const circuit::GainProfile& gain,
                                       double nf,
                                       spectrum::SolveStatus status) {
  spectrum::SpectralSolution sol;
  sol.lambda = lambda;
  sol.mu = mu;
  sol.status = status;
  const std::size_t n = gain.values.size();
  sol.psd.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = bf_psd_at(lambda, mu, gain.values[k], nf);
    sol.psd[k] = phi;
    sol.capacity += gain.grid.weights[k] * std::log1p(phi / nf) * kInvLn2;
    sol.p_out += gain.grid.weights[k] * gain.values[k] * phi;
    if (phi > 0.0) sol.support_measure += gain.grid.weights[k];
  }
  sol.boundary_warning = sol.psd.front() > 0.0 || sol.psd.back() > 0.0;
  return sol;
}

}  // namespace

spectrum::SpectralSolution brute_force_duals(const spectrum::BudgetSpec& budget,
                                             const circuit::GainProfile& gain,
                                             const BruteForceOptions& opts) {
  check_instance(budget, gain);
  if (opts.mu_points < 2 || opts.refine_iters < 1)
    throw std::invalid_argument("brute_force_duals: bad options");
  const double nf = budget.nf_n0;
  const double gmax = *std::max_element(gain.values.begin(), gain.values.end());
  const double target = budget.eta * budget.P;

  const double lambda0 = bf_lambda(0.0, budget.P, gain, nf, gmax);
  if (bf_transfer(lambda0, 0.0, gain, nf) >= target)
    return bf_assemble(lambda0, 0.0, gain, nf,
                       spectrum::SolveStatus::ConstraintInactive);

  // All power on the best sample bounds the reachable transfer by P*gmax.
  if (target >= budget.P * gmax * (1.0 - 1e-9)) {
    spectrum::SpectralSolution sol;
    sol.psd.assign(gain.values.size(), 0.0);
    sol.status = spectrum::SolveStatus::Infeasible;
    return sol;
  }

  auto transfer_at = [&](double mu) {
    return bf_transfer(bf_lambda(mu, budget.P, gain, nf, gmax), mu, gain, nf);
  };

  const double mu_start = 1e-9 * lambda0 / gmax;
  double mu_hi = 1e-3 * lambda0 / gmax;
  int doublings = 0;
  while (transfer_at(mu_hi) < target) {
    mu_hi *= 2.0;
    if (++doublings > 600)
      throw std::runtime_error("brute_force_duals: transfer bracket failed");
  }

  // Dense geometric scan, then bisection inside the first crossing cell.
  double mu_lo = mu_start;
  const double ratio = std::pow(mu_hi / mu_start, 1.0 / (opts.mu_points - 1));
  double prev = mu_start;
  for (int j = 1; j < opts.mu_points; ++j) {
    const double mu_j = mu_start * std::pow(ratio, j);
    if (transfer_at(mu_j) >= target) {
      mu_lo = prev;
      mu_hi = mu_j;
      break;
    }
    prev = mu_j;
  }
  for (int it = 0; it < opts.refine_iters; ++it) {
    const double mid = std::sqrt(mu_lo * mu_hi);
    if (mid == mu_lo || mid == mu_hi) break;
    (transfer_at(mid) < target ? mu_lo : mu_hi) = mid;
  }
  const double mu = 0.5 * (mu_lo + mu_hi);
  const double lambda = bf_lambda(mu, budget.P, gain, nf, gmax);
  return bf_assemble(lambda, mu, gain, nf,
                     spectrum::SolveStatus::ConstraintActive);
}

AscentResult direct_psd_maximizer(const spectrum::BudgetSpec& budget,
                                  const circuit::GainProfile& gain,
                                  const AscentOptions& opts) {
  check_instance(budget, gain);
  if (opts.max_iters < 1)
    throw std::invalid_argument("direct_psd_maximizer: bad options");
  const std::size_t n = gain.values.size();
  const auto& w = gain.grid.weights;
  const auto& g = gain.values;
  const double nf = budget.nf_n0;
  const double P = budget.P;
  const double target = budget.eta * P;
  const double gmax = *std::max_element(g.begin(), g.end());
  if (target > P * gmax * (1.0 - 1e-12))
    throw std::invalid_argument("direct_psd_maximizer: transfer target unreachable");

  double w_total = 0.0, wg_total = 0.0, wg2_total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    w_total += w[k];
    wg_total += w[k] * g[k];
    wg2_total += w[k] * g[k] * g[k];
  }

  std::vector<double> buf(n);

  auto power_of = [&](const std::vector<double>& phi) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * phi[k];
    return s;
  };
  auto transfer_of = [&](const std::vector<double>& phi) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * g[k] * phi[k];
    return s;
  };
  auto objective_of = [&](const std::vector<double>& phi) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      s += w[k] * std::log1p(phi[k] / nf);
    return s * kInvLn2;
  };

  // Exact weighted-metric projection onto the feasible set
  // {phi >= 0, sum w phi = P, sum w g phi >= target}.  The projection has
  // the form max(0, psi + nu*g - tau); tau restores the power for given nu
  // (inner bisection), nu >= 0 lifts the transfer when needed (outer
  // bisection).  Alternating projections stall here because near the
  // optimum the support sees almost constant gain, so this is done exactly.
  std::vector<double> shifted(n);
  std::vector<double> lifted(n);
  double nu_warm = 0.0;
  auto tau_solve = [&](const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    lo -= P / w_total;
    for (int it = 0; it < 120; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += w[k] * std::max(0.0, v[k] - mid);
      (s > P ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto project = [&](std::vector<double>& phi) {
    const double tau0 = tau_solve(phi);
    for (std::size_t k = 0; k < n; ++k)
      shifted[k] = std::max(0.0, phi[k] - tau0);
    if (transfer_of(shifted) >= target) {
      phi.swap(shifted);
      nu_warm = 0.0;
      return;
    }
    auto transfer_at = [&](double nu) {
      for (std::size_t k = 0; k < n; ++k) lifted[k] = phi[k] + nu * g[k];
      const double tau = tau_solve(lifted);
      for (std::size_t k = 0; k < n; ++k)
        shifted[k] = std::max(0.0, lifted[k] - tau);
      return transfer_of(shifted);
    };
    double nu_hi = nu_warm > 0.0 ? nu_warm : P / wg2_total;
    int grow = 0;
    while (transfer_at(nu_hi) < target) {
      nu_hi *= 2.0;
      if (++grow > 400)
        throw std::runtime_error("direct_psd_maximizer: projection bracket failed");
    }
    double nu_lo = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (nu_lo + nu_hi);
      if (mid == nu_lo || mid == nu_hi || nu_hi - nu_lo <= 1e-13 * nu_hi) break;
      (transfer_at(mid) < target ? nu_lo : nu_hi) = mid;
    }
    transfer_at(nu_hi);  // leaves the feasible-side iterate in `shifted`
    phi.swap(shifted);
    nu_warm = nu_hi;
  };

  // Feasible start: blend the flat PSD toward a spike at the gain maximum.
  std::vector<double> phi(n, P / w_total);
  const double t_flat = P * wg_total / w_total;
  if (t_flat < target) {
    const std::size_t kstar = static_cast<std::size_t>(
        std::max_element(g.begin(), g.end()) - g.begin());
    double t = (target - t_flat) / (P * gmax - t_flat);
    t = std::min(1.0, t + 0.02 * (1.0 - t) + 1e-9);
    for (std::size_t k = 0; k < n; ++k) phi[k] *= 1.0 - t;
    phi[kstar] += t * P / w[kstar];
  }
  project(phi);

  // Ascend along the gradient projected onto the tangent of the power
  // hyperplane (and of the transfer boundary while sitting on it), so each
  // step needs only a small feasibility cleanup.
  const double alpha = 0.95 * std::numbers::ln2 * nf * nf;  // 0.95 / L
  const double g_mean = wg_total / w_total;
  const double gg_var = wg2_total - wg_total * g_mean;
  std::vector<double> dir(n);
  double J = objective_of(phi);
  std::vector<double> psd_best = phi;
  double J_best = J;
  double J_checkpoint = J;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    double grad_mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dir[k] = kInvLn2 / (nf + phi[k]);
      grad_mean += w[k] * dir[k];
    }
    grad_mean /= w_total;
    for (std::size_t k = 0; k < n; ++k) dir[k] -= grad_mean;
    if (gg_var > 0.0 &&
        transfer_of(phi) <= target + 1e-12 * std::max(P, target)) {
      double dg = 0.0;
      for (std::size_t k = 0; k < n; ++k) dg += w[k] * dir[k] * g[k];
      if (dg < 0.0) {
        const double c = dg / gg_var;
        for (std::size_t k = 0; k < n; ++k) dir[k] -= c * (g[k] - g_mean);
      }
    }
    for (std::size_t k = 0; k < n; ++k) buf[k] = phi[k] + alpha * dir[k];
    project(buf);
    phi.swap(buf);
    J = objective_of(phi);
    if (J > J_best) {
      J_best = J;
      psd_best = phi;
    }
    if (iter % 200 == 199) {
      if (J_best - J_checkpoint <=
          opts.plateau_rel * std::max(1.0, std::abs(J_best)))
        break;
      J_checkpoint = J_best;
    }
  }
  phi = std::move(psd_best);
  project(phi);
  if (std::abs(power_of(phi) - P) > 1e-9 * P ||
      transfer_of(phi) < target - 1e-9 * std::max(P, target))
    throw std::runtime_error("direct_psd_maximizer: projection failed to converge");
  const double J_final = objective_of(phi);
  return {std::move(phi), J_final, iter};
}

double dual_value(const spectrum::BudgetSpec& budget,
                  const circuit::GainProfile& gain, double lambda, double mu) {
  check_instance(budget, gain);
  if (mu < 0.0) throw std::domain_error("dual_value: mu must be nonnegative");
  const double nf = budget.nf_n0;
  double acc = 0.0;
  for (std::size_t k = 0; k < gain.values.size(); ++k) {
    const double c = lambda - mu * gain.values[k];
    if (c <= 0.0) throw std::domain_error("dual_value: lambda below mu * max gain");
    const double phi = std::max(0.0, kInvLn2 / c - nf);
    if (phi > 0.0)
      acc += gain.grid.weights[k] *
             (std::log1p(phi / nf) * kInvLn2 - c * phi);
  }
  return acc + lambda * budget.P - mu * budget.eta * budget.P;
}

// ---------------------------------------------------------------------------
// Optimality residuals

KktReport kkt_residuals(const spectrum::BudgetSpec& budget,
                        const circuit::GainProfile& gain,
                        const spectrum::SpectralSolution& sol) {
  check_instance(budget, gain);
  if (sol.status == spectrum::SolveStatus::Infeasible)
    throw std::invalid_argument("kkt_residuals: infeasible solution has no certificate");
  if (sol.psd.size() != gain.values.size())
    throw std::invalid_argument("kkt_residuals: PSD and gain profile sizes differ");
  const double nf = budget.nf_n0;
  const double lambda = sol.lambda;
  const double mu = sol.mu;
  KktReport rep;
  double power = 0.0, transfer = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < gain.values.size(); ++k) {
    const double phi = sol.psd[k];
    const double c = lambda - mu * gain.values[k];
    const double r = phi > 0.0 ? std::abs(kInvLn2 / (nf + phi) - c)
                               : std::max(0.0, kInvLn2 / nf - c);
    worst = std::max(worst, r);
    power += gain.grid.weights[k] * phi;
    transfer += gain.grid.weights[k] * gain.values[k] * phi;
  }
  rep.stationarity_residual = worst / lambda;
  rep.primal_power_residual = std::abs(power - budget.P) / budget.P;
  rep.transfer_residual =
      std::max(0.0, budget.eta * budget.P - transfer) / budget.P;
  rep.slackness_residual =
      mu * std::abs(transfer - budget.eta * budget.P) / (lambda * budget.P);
  return rep;
}

namespace {

// One-sided feasible-ascent rates of a boxed value function, in relative
// units per unit log step.  Directions whose probe is infeasible (quiet NaN
// from the callback) are skipped.
template <typename Value>
double best_ascent_rate(const std::vector<double>& x,
                        const std::vector<double>& lo,
                        const std::vector<double>& hi, double v0, double step,
                        const Value& value) {
  double best = 0.0;
  const double norm = std::max(std::abs(v0), 1e-9);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double sgn : {1.0, -1.0}) {
      const double xi = std::clamp(x[i] + sgn * step, lo[i], hi[i]);
      if (std::abs(xi - x[i]) < 0.1 * step) continue;
      std::vector<double> probe = x;
      probe[i] = xi;
      const double v = value(probe);
      if (!std::isfinite(v)) continue;
      best = std::max(best, (v - v0) / std::abs(xi - x[i]) / norm);
    }
  }
  return best;
}

}  // namespace

KktReport kkt_residuals(const pareto::ParetoPoint& pt, const KktContext& ctx) {
  if (pt.status == spectrum::SolveStatus::Infeasible)
    throw std::invalid_argument("kkt_residuals: infeasible point has no certificate");
  ctx.params.validate();
  const auto& cfg = ctx.cfg;

  if (ctx.scenario == pareto::Scenario::PsdAndTerminations) {
    if (!pt.spectral)
      throw std::invalid_argument("kkt_residuals: point carries no spectral solution");
    const auto grid =
        circuit::FrequencyGrid::symmetric(cfg.grid_omega_max, cfg.grid_samples);
    const circuit::Termination term{pt.g_s, pt.g_l, std::nullopt};
    const auto prof = circuit::gain_profile(ctx.params, term, grid);
    const double nf = circuit::noise_figure(ctx.params, term) * ctx.params.N0;
    const spectrum::BudgetSpec budget{cfg.P, pt.eta, nf};
    KktReport rep = kkt_residuals(budget, prof, *pt.spectral);

    const std::vector<double> x{std::log(pt.g_s), std::log(pt.g_l)};
    const std::vector<double> lo{std::log(cfg.g_s_bounds.lo), std::log(cfg.g_l_bounds.lo)};
    const std::vector<double> hi{std::log(cfg.g_s_bounds.hi), std::log(cfg.g_l_bounds.hi)};
    auto value = [&](const std::vector<double>& z) {
      const circuit::Termination t{std::exp(z[0]), std::exp(z[1]), std::nullopt};
      const auto p = circuit::gain_profile(ctx.params, t, grid);
      const double nfz = circuit::noise_figure(ctx.params, t) * ctx.params.N0;
      const auto s = spectrum::solve_constrained({cfg.P, pt.eta, nfz}, p);
      if (s.status == spectrum::SolveStatus::Infeasible)
        return std::numeric_limits<double>::quiet_NaN();
      return s.capacity;
    };
    rep.outer_gradient_residual =
        best_ascent_rate(x, lo, hi, pt.capacity, 1e-6, value);
    return rep;
  }

  // Uniform-PSD scenarios: the certificate concerns the termination search.
  const bool matched = pt.L.has_value();
  circuit::Termination term{pt.g_s, pt.g_l, std::nullopt};
  if (matched) term.matching = circuit::Matching{*pt.L, cfg.placement};
  constexpr std::size_t kQuadSamples = 131073;
  auto gbar_of = [&](const circuit::Termination& t) {
    return band_average_gain_quadrature(ctx.params, t, cfg.omega_B, kQuadSamples);
  };
  const double gbar = gbar_of(term);
  KktReport rep;
  rep.primal_power_residual = 0.0;
  const double eta_norm = std::max(1.0, pt.eta);
  rep.transfer_residual = std::max(0.0, pt.eta - gbar) / eta_norm;
  rep.slackness_residual = pt.status == spectrum::SolveStatus::ConstraintActive
                               ? std::abs(gbar - pt.eta) / eta_norm
                               : 0.0;

  // Inner variables maximize the band gain; outer g_s trades capacity
  // against feasibility.  All gradients are box-projected.
  std::vector<double> x{std::log(pt.g_s), std::log(pt.g_l)};
  std::vector<double> lo{std::log(cfg.g_s_bounds.lo), std::log(cfg.g_l_bounds.lo)};
  std::vector<double> hi{std::log(cfg.g_s_bounds.hi), std::log(cfg.g_l_bounds.hi)};
  if (matched) {
    x.push_back(std::log(*pt.L));
    lo.push_back(std::log(cfg.L_bounds.lo));
    hi.push_back(std::log(cfg.L_bounds.hi));
  }
  auto term_at = [&](const std::vector<double>& z) {
    circuit::Termination t{std::exp(z[0]), std::exp(z[1]), std::nullopt};
    if (matched) t.matching = circuit::Matching{std::exp(z[2]), cfg.placement};
    return t;
  };
  const double step = 1e-5;

  // Gain gradient over (g_l[, L]) at fixed g_s: both signs matter at an
  // interior maximum, so measure ascent of the gain itself.
  std::vector<double> x_inner(x.begin() + 1, x.end());
  std::vector<double> lo_inner(lo.begin() + 1, lo.end());
  std::vector<double> hi_inner(hi.begin() + 1, hi.end());
  auto gain_value = [&](const std::vector<double>& zi) {
    std::vector<double> z{x[0]};
    z.insert(z.end(), zi.begin(), zi.end());
    return gbar_of(term_at(z));
  };
  const double inner_rate =
      best_ascent_rate(x_inner, lo_inner, hi_inner, gbar, step, gain_value);

  // Capacity ascent over g_s among probes that stay feasible.
  auto cap_value = [&](const std::vector<double>& z) {
    const auto t = term_at(z);
    if (gbar_of(t) < pt.eta) return std::numeric_limits<double>::quiet_NaN();
    return pareto::capacity_uniform(ctx.params, t, cfg.P, cfg.omega_B);
  };
  const std::vector<double> x_gs{x[0]};
  const std::vector<double> lo_gs{lo[0]};
  const std::vector<double> hi_gs{hi[0]};
  auto cap_gs = [&](const std::vector<double>& zg) {
    std::vector<double> z = x;
    z[0] = zg[0];
    return cap_value(z);
  };
  const double outer_rate =
      best_ascent_rate(x_gs, lo_gs, hi_gs, pt.capacity, step, cap_gs);

  rep.outer_gradient_residual = std::max(inner_rate, outer_rate);
  return rep;
}

// ---------------------------------------------------------------------------
// Band integrals

double analytic_band_gain_integral(const circuit::CircuitParams& cp,
                                   const circuit::Termination& term, double W) {
  cp.validate();
  term.validate();
  if (term.matching)
    throw std::invalid_argument(
        "analytic_band_gain_integral: closed form covers the unmatched two-port only");
  if (!(W > 0.0) || !std::isfinite(W))
    throw std::invalid_argument("analytic_band_gain_integral: W must be positive");
  // G(w) = 4 gs gl (gm^2 + w^2 C^2) / (a^2 + w^2 C^2 b^2) with a = gs*(gl+gd)
  // and b = gs+gl+gd+gm splits into a constant plus a Lorentzian.
  const double a = term.g_s * (term.g_l + cp.g_d);
  const double b = term.g_s + term.g_l + cp.g_d + cp.g_m;
  const double C = cp.C_gd;
  const double k1 = 4.0 * term.g_s * term.g_l / (b * b);
  const double k2 = 4.0 * term.g_s * term.g_l *
                    (cp.g_m * cp.g_m * b * b - a * a) / (a * C * b * b * b);
  return 2.0 * (k1 * W + k2 * std::atan(C * b * W / a));
}

double band_average_gain_quadrature(const circuit::CircuitParams& cp,
                                    const circuit::Termination& term,
                                    double omega_B, std::size_t n) {
  cp.validate();
  term.validate();
  if (!(omega_B > 0.0) || !std::isfinite(omega_B))
    throw std::invalid_argument("band_average_gain_quadrature: omega_B must be positive");
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("band_average_gain_quadrature: n must be odd and >= 3");
  const double h = omega_B / static_cast<double>(n - 1);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double omega = -0.5 * omega_B + static_cast<double>(j) * h;
    const double gj = circuit::power_gain(cp, term, omega);
    acc += (j == 0 || j + 1 == n) ? 0.5 * gj : gj;
  }
  return acc * h / omega_B;
}

}  // namespace gaincap::oracle
