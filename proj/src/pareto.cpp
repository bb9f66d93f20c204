#include "gaincap/pareto.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "gaincap/optim.hpp"

namespace gaincap::pareto {

namespace {

constexpr double kTieRel = 1e-9;      // capacity window treated as a tie
constexpr double kSlackRel = 1e-9;    // transfer slack separating Active from Inactive
constexpr double kInfeasiblePenalty = -2.0;

void check_bounds(const Bounds& b, const char* name) {
  if (!(b.lo > 0.0) || !(b.hi > b.lo) || !std::isfinite(b.hi))
    throw std::invalid_argument(std::string("TraceConfig: bad bounds for ") + name);
}

double penalty_gain_shortfall(double eta, double achievable) {
  // Below kInfeasiblePenalty for any infeasible point, increasing in the
  // achievable gain so the search climbs toward feasibility.
  return kInfeasiblePenalty - (eta - achievable) / (eta + 1.0);
}

using Key2 = std::pair<std::uint64_t, std::uint64_t>;

Key2 key_of(double a, double b) {
  return {std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b)};
}

// ---------------------------------------------------------------------------
// Scenario with per-frequency PSD shaping

class SpectralObjective {
 public:
  SpectralObjective(const circuit::CircuitParams& cp, double P, double eta,
                    const circuit::FrequencyGrid& grid)
      : cp_(cp), P_(P), eta_(eta), grid_(grid) {}

  // Capacity at (g_s, g_l), or a negative penalty when eta is out of reach.
  double operator()(double g_s, double g_l) const {
    const Key2 k = key_of(g_s, g_l);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    const circuit::Termination term{g_s, g_l, std::nullopt};
    const auto prof = circuit::gain_profile(cp_, term, grid_);
    const double nf = circuit::noise_figure(cp_, term) * cp_.N0;
    const auto sol = spectrum::solve_constrained({P_, eta_, nf}, prof);
    double value;
    if (sol.status == spectrum::SolveStatus::Infeasible) {
      const double gmax = *std::max_element(prof.values.begin(), prof.values.end());
      value = penalty_gain_shortfall(eta_, gmax);
    } else {
      value = sol.capacity;
    }
    memo_.emplace(k, value);
    return value;
  }

 private:
  const circuit::CircuitParams& cp_;
  double P_;
  double eta_;
  const circuit::FrequencyGrid& grid_;
  mutable std::map<Key2, double> memo_;
};

struct BoxSearchResult {
  std::vector<double> x;  // log coordinates
  double f = -std::numeric_limits<double>::infinity();
};

// Multistart Nelder-Mead in log coordinates over a box, coarse passes from a
// log-spaced lattice followed by one polish run from the winner.  Ties within
// a relative window go to the lexicographically smallest point.
BoxSearchResult maximize_on_box(const optim::Objective& f_log,
                                std::span<const double> lo_lin,
                                std::span<const double> hi_lin, int starts_per_axis,
                                double polish_ftol) {
  const std::size_t dim = lo_lin.size();
  std::vector<double> lo(dim), hi(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    lo[i] = std::log(lo_lin[i]);
    hi[i] = std::log(hi_lin[i]);
  }
  std::vector<std::vector<double>> axis_nodes(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    auto nodes = optim::log_grid(lo_lin[i], hi_lin[i], starts_per_axis);
    for (double& v : nodes) v = std::log(v);
    axis_nodes[i] = std::move(nodes);
  }

  double step = 1.0;
  if (starts_per_axis > 1)
    step = std::clamp(0.45 * (hi[0] - lo[0]) / (starts_per_axis - 1), 0.3, 1.5);
  optim::SimplexOptions coarse{1e-6, 1e-4, 60, step};

  BoxSearchResult best;
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    std::vector<double> x0(dim);
    for (std::size_t i = 0; i < dim; ++i) x0[i] = axis_nodes[i][idx[i]];
    auto r = optim::simplex_max(f_log, x0, lo, hi, coarse);
    if (best.x.empty()) {
      best.f = r.f;
      best.x = r.x;
    } else {
      const double scale = std::max({1.0, std::abs(r.f), std::abs(best.f)});
      if (r.f > best.f + kTieRel * scale) {
        best.f = r.f;
        best.x = r.x;
      } else if (r.f > best.f - kTieRel * scale &&
                 std::lexicographical_compare(r.x.begin(), r.x.end(),
                                              best.x.begin(), best.x.end())) {
        best.x = r.x;
      }
    }
    std::size_t d = 0;
    while (d < dim && ++idx[d] == axis_nodes[d].size()) idx[d++] = 0;
    if (d == dim) break;
  }

  optim::SimplexOptions fine{polish_ftol, 1e-10, 400, 0.05};
  auto polished = optim::simplex_max(f_log, best.x, lo, hi, fine);
  if (polished.f >= best.f) {
    best.f = polished.f;
    best.x = polished.x;
  }
  return best;
}

// Assembles the full frontier point for fixed terminations.
ParetoPoint spectral_point(double eta, const circuit::CircuitParams& cp, double P,
                           const circuit::FrequencyGrid& grid, double g_s,
                           double g_l) {
  const circuit::Termination term{g_s, g_l, std::nullopt};
  const auto prof = circuit::gain_profile(cp, term, grid);
  const double nf = circuit::noise_figure(cp, term) * cp.N0;
  auto sol = spectrum::solve_constrained({P, eta, nf}, prof);
  ParetoPoint pt;
  pt.eta = eta;
  pt.g_s = g_s;
  pt.g_l = g_l;
  pt.status = sol.status;
  if (sol.status != spectrum::SolveStatus::Infeasible) {
    pt.capacity = sol.capacity;
    pt.p_out = sol.p_out;
    pt.lambda = sol.lambda;
    pt.mu = sol.mu;
    pt.spectral = std::move(sol);
  }
  return pt;
}

// ---------------------------------------------------------------------------
// Uniform-PSD scenarios

struct BandBest {
  double gain = -1.0;
  double g_l = 0.0;
  std::optional<double> L;
};

class BandGainMax {
 public:
  BandGainMax(const circuit::CircuitParams& cp, double omega_B,
              const circuit::FrequencyGrid& grid, const TraceConfig& cfg,
              bool matched)
      : cp_(cp), omega_B_(omega_B), grid_(grid), cfg_(cfg), matched_(matched) {}

  double eval(double g_s, double g_l, std::optional<double> L) const {
    circuit::Termination term{g_s, g_l, std::nullopt};
    if (L) term.matching = circuit::Matching{*L, cfg_.placement};
    return band_average_gain(cp_, term, omega_B_, grid_);
  }

  BandBest run_full(double g_s) const { return run_multi(g_s, cfg_.multistart, 1e-11); }
  BandBest run_mini(double g_s) const { return run_multi(g_s, 3, 1e-9); }

  BandBest run_warm(double g_s, const BandBest& warm) const {
    std::vector<double> x0{std::log(std::clamp(warm.g_l, cfg_.g_l_bounds.lo,
                                               cfg_.g_l_bounds.hi))};
    std::vector<double> lo{std::log(cfg_.g_l_bounds.lo)};
    std::vector<double> hi{std::log(cfg_.g_l_bounds.hi)};
    if (matched_) {
      const double L0 = warm.L ? *warm.L : std::sqrt(cfg_.L_bounds.lo * cfg_.L_bounds.hi);
      x0.push_back(std::log(std::clamp(L0, cfg_.L_bounds.lo, cfg_.L_bounds.hi)));
      lo.push_back(std::log(cfg_.L_bounds.lo));
      hi.push_back(std::log(cfg_.L_bounds.hi));
    }
    optim::SimplexOptions opts{1e-10, 1e-9, 120, 0.25};
    auto r = optim::simplex_max(objective(g_s), x0, lo, hi, opts);
    return unpack(r.x, r.f);
  }

 private:
  optim::Objective objective(double g_s) const {
    return [this, g_s](std::span<const double> z) {
      const double g_l = std::exp(z[0]);
      std::optional<double> L;
      if (matched_) L = std::exp(z[1]);
      return eval(g_s, g_l, L);
    };
  }

  BandBest unpack(const std::vector<double>& z, double f) const {
    BandBest b;
    b.gain = f;
    b.g_l = std::exp(z[0]);
    if (matched_) b.L = std::exp(z[1]);
    return b;
  }

  BandBest run_multi(double g_s, int starts, double polish_ftol) const {
    std::vector<double> lo{cfg_.g_l_bounds.lo}, hi{cfg_.g_l_bounds.hi};
    if (matched_) {
      lo.push_back(cfg_.L_bounds.lo);
      hi.push_back(cfg_.L_bounds.hi);
    }
    auto best = maximize_on_box(objective(g_s), lo, hi, starts, polish_ftol);
    return unpack(best.x, best.f);
  }

  const circuit::CircuitParams& cp_;
  double omega_B_;
  const circuit::FrequencyGrid& grid_;
  const TraceConfig& cfg_;
  bool matched_;
};

bool point_better(const ParetoPoint& a, const ParetoPoint& b) {
  const bool fa = a.status != spectrum::SolveStatus::Infeasible;
  const bool fb = b.status != spectrum::SolveStatus::Infeasible;
  if (fa != fb) return fa;
  const double scale = std::max({1.0, std::abs(a.capacity), std::abs(b.capacity)});
  if (a.capacity > b.capacity + kTieRel * scale) return true;
  if (a.capacity < b.capacity - kTieRel * scale) return false;
  const double aL = a.L.value_or(std::numeric_limits<double>::infinity());
  const double bL = b.L.value_or(std::numeric_limits<double>::infinity());
  return std::tie(a.g_s, a.g_l, aL) < std::tie(b.g_s, b.g_l, bL);
}

ParetoPoint uniform_point(double eta, const circuit::CircuitParams& cp, double P,
                          double omega_B, double g_s, const BandBest& inner,
                          circuit::MatchingPlacement placement,
                          spectrum::SolveStatus status) {
  ParetoPoint pt;
  pt.eta = eta;
  pt.g_s = g_s;
  pt.g_l = inner.g_l;
  pt.L = inner.L;
  circuit::Termination term{g_s, inner.g_l, std::nullopt};
  if (inner.L) term.matching = circuit::Matching{*inner.L, placement};
  pt.capacity = capacity_uniform(cp, term, P, omega_B);
  pt.p_out = P * inner.gain;
  pt.status = status;
  return pt;
}

// Joint search over (g_s, g_l[, L]) used when the band gain is not monotone
// in g_s or the band edge cases defeat the bisection.
ParetoPoint solve_B_joint(double eta, const circuit::CircuitParams& cp, double P,
                          double omega_B, bool matched, const TraceConfig& cfg,
                          const circuit::FrequencyGrid& grid) {
  const BandGainMax inner(cp, omega_B, grid, cfg, matched);
  auto value_of = [&](double g_s, double g_l, std::optional<double> L) {
    const double gain = inner.eval(g_s, g_l, L);
    if (gain < eta) return penalty_gain_shortfall(eta, gain);
    circuit::Termination term{g_s, g_l, std::nullopt};
    if (L) term.matching = circuit::Matching{*L, cfg.placement};
    return capacity_uniform(cp, term, P, omega_B);
  };
  optim::Objective obj = [&](std::span<const double> z) {
    std::optional<double> L;
    if (matched) L = std::exp(z[2]);
    return value_of(std::exp(z[0]), std::exp(z[1]), L);
  };
  std::vector<double> lo{cfg.g_s_bounds.lo, cfg.g_l_bounds.lo};
  std::vector<double> hi{cfg.g_s_bounds.hi, cfg.g_l_bounds.hi};
  if (matched) {
    lo.push_back(cfg.L_bounds.lo);
    hi.push_back(cfg.L_bounds.hi);
  }
  auto best = maximize_on_box(obj, lo, hi, cfg.multistart, 1e-11);
  const double g_s = std::exp(best.x[0]);
  BandBest bb;
  bb.g_l = std::exp(best.x[1]);
  if (matched) bb.L = std::exp(best.x[2]);
  bb.gain = inner.eval(g_s, bb.g_l, bb.L);
  if (best.f <= kInfeasiblePenalty + 1.0 || bb.gain < eta) {
    ParetoPoint pt;
    pt.eta = eta;
    pt.g_s = g_s;
    pt.g_l = bb.g_l;
    pt.L = bb.L;
    pt.status = spectrum::SolveStatus::Infeasible;
    return pt;
  }
  const auto status = bb.gain > eta * (1.0 + kSlackRel) + kSlackRel
                          ? spectrum::SolveStatus::ConstraintInactive
                          : spectrum::SolveStatus::ConstraintActive;
  return uniform_point(eta, cp, P, omega_B, g_s, bb, cfg.placement, status);
}

ParetoPoint solve_B_domain(double eta, const circuit::CircuitParams& cp, double P,
                           double omega_B, bool matched, const TraceConfig& cfg,
                           const circuit::FrequencyGrid& grid) {
  const BandGainMax inner(cp, omega_B, grid, cfg, matched);
  const double g_lo = cfg.g_s_bounds.lo;
  const double g_hi = cfg.g_s_bounds.hi;

  // Capacity grows with g_s, so first try the box edge.
  BandBest at_hi = inner.run_full(g_hi);
  if (at_hi.gain >= eta) {
    const auto status = at_hi.gain > eta * (1.0 + kSlackRel) + kSlackRel
                            ? spectrum::SolveStatus::ConstraintInactive
                            : spectrum::SolveStatus::ConstraintActive;
    return uniform_point(eta, cp, P, omega_B, g_hi, at_hi, cfg.placement, status);
  }

  BandBest at_lo = inner.run_full(g_lo);
  if (at_lo.gain < eta)  // interior maxima are still possible
    return solve_B_joint(eta, cp, P, omega_B, matched, cfg, grid);

  // Probe the best-gain map on a log lattice; bisection needs it monotone.
  constexpr int kProbes = 7;
  const auto nodes = optim::log_grid(g_lo, g_hi, kProbes);
  std::vector<BandBest> probe(kProbes);
  probe.front() = at_lo;
  probe.back() = at_hi;
  for (int i = 1; i + 1 < kProbes; ++i) {
    probe[i] = inner.run_warm(nodes[i], probe[i - 1]);
    if (const auto fresh = inner.run_mini(nodes[i]); fresh.gain > probe[i].gain)
      probe[i] = fresh;
  }
  for (int i = 0; i + 1 < kProbes; ++i) {
    if (probe[i + 1].gain > probe[i].gain * (1.0 + 1e-6) + 1e-12)
      return solve_B_joint(eta, cp, P, omega_B, matched, cfg, grid);
  }

  // Tighten the bracket with the probe nodes, then bisect.
  double lo = g_lo, hi = g_hi;
  BandBest best_lo = at_lo;
  BandBest last = at_lo;
  for (int i = 0; i < kProbes; ++i) {
    if (probe[i].gain >= eta) {
      lo = nodes[i];
      best_lo = probe[i];
      last = probe[i];
    } else {
      hi = nodes[i];
      break;
    }
  }
  for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    BandBest v = inner.run_warm(mid, last);
    if (it % 12 == 11) {
      if (const auto fresh = inner.run_mini(mid); fresh.gain > v.gain) v = fresh;
    }
    last = v;
    if (v.gain >= eta) {
      lo = mid;
      best_lo = v;
    } else {
      hi = mid;
    }
  }
  return uniform_point(eta, cp, P, omega_B, lo, best_lo, cfg.placement,
                       spectrum::SolveStatus::ConstraintActive);
}

}  // namespace

void TraceConfig::validate() const {
  if (eta_grid.empty())
    throw std::invalid_argument("TraceConfig: eta_grid must be non-empty");
  double prev = -1.0;
  for (double e : eta_grid) {
    if (!std::isfinite(e) || e < 0.0 || e <= prev)
      throw std::invalid_argument(
          "TraceConfig: eta_grid must be nonnegative and strictly increasing");
    prev = e;
  }
  if (!(P > 0.0) || !std::isfinite(P))
    throw std::invalid_argument("TraceConfig: P must be positive");
  if (!(omega_B > 0.0) || !std::isfinite(omega_B))
    throw std::invalid_argument("TraceConfig: omega_B must be positive");
  check_bounds(g_s_bounds, "g_s");
  check_bounds(g_l_bounds, "g_l");
  check_bounds(L_bounds, "L");
  if (multistart < 1 || multistart > 20)
    throw std::invalid_argument("TraceConfig: multistart must be in [1, 20]");
  if (!(tol > 0.0))
    throw std::invalid_argument("TraceConfig: tol must be positive");
  if (!(grid_omega_max > 0.0) || !std::isfinite(grid_omega_max))
    throw std::invalid_argument("TraceConfig: grid_omega_max must be positive");
  if (grid_samples < 16 || grid_samples > (1u << 22))
    throw std::invalid_argument("TraceConfig: grid_samples out of range");
  if (scenario != Scenario::PsdAndTerminations &&
      omega_B / 2.0 > grid_omega_max)
    throw std::invalid_argument("TraceConfig: band exceeds the frequency grid");
}

ParetoPoint optimize_terminations_A(double eta, const circuit::CircuitParams& cp,
                                    double P, const circuit::FrequencyGrid& grid,
                                    const TraceConfig& cfg) {
  cp.validate();
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("optimize_terminations_A: eta must be nonnegative");
  if (!(P > 0.0) || !std::isfinite(P))
    throw std::invalid_argument("optimize_terminations_A: P must be positive");

  const SpectralObjective obj(cp, P, eta, grid);
  optim::Objective obj_log = [&](std::span<const double> z) {
    return obj(std::exp(z[0]), std::exp(z[1]));
  };
  const std::vector<double> lo{cfg.g_s_bounds.lo, cfg.g_l_bounds.lo};
  const std::vector<double> hi{cfg.g_s_bounds.hi, cfg.g_l_bounds.hi};
  auto best = maximize_on_box(obj_log, lo, hi, cfg.multistart,
                              std::min(cfg.tol, 1e-11));
  const double g_s = std::exp(best.x[0]);
  const double g_l = std::exp(best.x[1]);
  if (best.f <= kInfeasiblePenalty + 1.0) {
    ParetoPoint pt;
    pt.eta = eta;
    pt.g_s = g_s;
    pt.g_l = g_l;
    pt.status = spectrum::SolveStatus::Infeasible;
    return pt;
  }
  return spectral_point(eta, cp, P, grid, g_s, g_l);
}

double capacity_uniform(const circuit::CircuitParams& cp,
                        const circuit::Termination& term, double P,
                        double omega_B) {
  cp.validate();
  term.validate();
  if (!(P >= 0.0) || !std::isfinite(P))
    throw std::invalid_argument("capacity_uniform: P must be nonnegative");
  if (!(omega_B > 0.0) || !std::isfinite(omega_B))
    throw std::invalid_argument("capacity_uniform: omega_B must be positive");
  const double nf = circuit::noise_figure(cp, term) * cp.N0;
  return omega_B * std::log1p(P / (omega_B * nf)) / std::numbers::ln2;
}

double band_average_gain(const circuit::CircuitParams& cp,
                         const circuit::Termination& term, double omega_B,
                         const circuit::FrequencyGrid& grid) {
  cp.validate();
  term.validate();
  if (!(omega_B > 0.0) || !std::isfinite(omega_B))
    throw std::invalid_argument("band_average_gain: omega_B must be positive");
  if (omega_B / 2.0 > grid.omega_max * (1.0 + 1e-12))
    throw std::invalid_argument(
        "band_average_gain: band extends beyond the frequency grid");

  // Resolve the narrowest spectral feature: the gain knee (and any matching
  // resonance) has width of order g_s*(g_l+g_d)/(C_gd*(g_s+g_l+g_d+g_m)).
  const double gl2 = term.g_l + cp.g_d;
  const double bsum = term.g_s + gl2 + cp.g_m;
  const double w_feature = term.g_s * gl2 / (cp.C_gd * bsum);
  const double h = std::min(omega_B, w_feature) / 2048.0;
  double n_real = std::ceil(omega_B / h) + 1.0;
  std::size_t n = static_cast<std::size_t>(std::min(n_real, 70000.0));
  n = std::clamp<std::size_t>(n | 1u, 2049, 65537);
  const auto band = circuit::FrequencyGrid::symmetric(omega_B / 2.0, n);
  const auto prof = circuit::gain_profile(cp, term, band);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += band.weights[k] * prof.values[k];
  return acc / omega_B;
}

ParetoPoint optimize_terminations_B(double eta, const circuit::CircuitParams& cp,
                                    double P, double omega_B, bool with_matching,
                                    const TraceConfig& cfg) {
  cp.validate();
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("optimize_terminations_B: eta must be nonnegative");
  if (!(P > 0.0) || !std::isfinite(P))
    throw std::invalid_argument("optimize_terminations_B: P must be positive");
  const auto grid =
      circuit::FrequencyGrid::symmetric(cfg.grid_omega_max, cfg.grid_samples);
  ParetoPoint plain = solve_B_domain(eta, cp, P, omega_B, false, cfg, grid);
  if (!with_matching) return plain;
  ParetoPoint matched = solve_B_domain(eta, cp, P, omega_B, true, cfg, grid);
  return point_better(matched, plain) ? matched : plain;
}

std::vector<ParetoPoint> trace_pareto(const TraceConfig& cfg,
                                      const circuit::CircuitParams& cp) {
  cfg.validate();
  cp.validate();
  std::vector<ParetoPoint> points;
  points.reserve(cfg.eta_grid.size());

  if (cfg.scenario == Scenario::PsdAndTerminations) {
    const auto grid =
        circuit::FrequencyGrid::symmetric(cfg.grid_omega_max, cfg.grid_samples);
    for (double eta : cfg.eta_grid)
      points.push_back(optimize_terminations_A(eta, cp, cfg.P, grid, cfg));
    for (std::size_t i = points.size(); i-- > 1;) {
      const ParetoPoint& nxt = points[i];
      ParetoPoint& cur = points[i - 1];
      if (nxt.status == spectrum::SolveStatus::Infeasible) continue;
      auto cand = spectral_point(cur.eta, cp, cfg.P, grid, nxt.g_s, nxt.g_l);
      if (cand.status == spectrum::SolveStatus::Infeasible) continue;
      if (cur.status == spectrum::SolveStatus::Infeasible ||
          cand.capacity > cur.capacity)
        cur = std::move(cand);
    }
    return points;
  }

  const bool matched = cfg.scenario == Scenario::UniformPsdMatched;
  for (double eta : cfg.eta_grid)
    points.push_back(optimize_terminations_B(eta, cp, cfg.P, cfg.omega_B, matched, cfg));
  for (std::size_t i = points.size(); i-- > 1;) {
    const ParetoPoint& nxt = points[i];
    ParetoPoint& cur = points[i - 1];
    if (nxt.status == spectrum::SolveStatus::Infeasible) continue;
    if (cur.status != spectrum::SolveStatus::Infeasible &&
        nxt.capacity <= cur.capacity)
      continue;
    ParetoPoint cand;  // same terminations as nxt, re-labelled for cur.eta
    cand.eta = cur.eta;
    cand.capacity = nxt.capacity;
    cand.g_s = nxt.g_s;
    cand.g_l = nxt.g_l;
    cand.L = nxt.L;
    cand.p_out = nxt.p_out;
    cand.status = cand.p_out > cur.eta * cfg.P * (1.0 + kSlackRel) + kSlackRel
                      ? spectrum::SolveStatus::ConstraintInactive
                      : spectrum::SolveStatus::ConstraintActive;
    cur = std::move(cand);
  }
  return points;
}

double eta_max(Scenario sc, const circuit::CircuitParams& cp,
               const TraceConfig& cfg) {
  cp.validate();
  if (sc == Scenario::PsdAndTerminations) {
    // Closed forms: G(0) = 4*g_l*g_m^2 / (g_s*(g_l+g_d)^2) and
    // G(inf) = 4*g_s*g_l / (g_s+g_l+g_d+g_m)^2; the gain is monotone in
    // omega^2, so the supremum over frequency is their maximum.
    optim::Objective obj = [&](std::span<const double> z) {
      const double g_s = std::exp(z[0]);
      const double g_l = std::exp(z[1]);
      const double gl2 = g_l + cp.g_d;
      const double b = g_s + gl2 + cp.g_m;
      const double g0 = 4.0 * g_l * cp.g_m * cp.g_m / (g_s * gl2 * gl2);
      const double gi = 4.0 * g_s * g_l / (b * b);
      return std::max(g0, gi);
    };
    const std::vector<double> lo{cfg.g_s_bounds.lo, cfg.g_l_bounds.lo};
    const std::vector<double> hi{cfg.g_s_bounds.hi, cfg.g_l_bounds.hi};
    auto best = maximize_on_box(obj, lo, hi, std::max(cfg.multistart, 5), 1e-12);
    // The inner maximum over g_l of G(0) sits at g_l = g_d; seed a polish
    // there in case the lattice missed that ridge.
    const double gl_star =
        std::clamp(cp.g_d, cfg.g_l_bounds.lo, cfg.g_l_bounds.hi);
    std::vector<double> seed{std::log(cfg.g_s_bounds.lo), std::log(gl_star)};
    std::vector<double> llo{std::log(lo[0]), std::log(lo[1])};
    std::vector<double> lhi{std::log(hi[0]), std::log(hi[1])};
    auto r = optim::simplex_max(obj, seed, llo, lhi,
                                optim::SimplexOptions{1e-12, 1e-10, 300, 0.05});
    return std::max(best.f, r.f);
  }
  const bool matched = sc == Scenario::UniformPsdMatched;
  const auto grid =
      circuit::FrequencyGrid::symmetric(cfg.grid_omega_max, cfg.grid_samples);
  optim::Objective obj = [&](std::span<const double> z) {
    circuit::Termination term{std::exp(z[0]), std::exp(z[1]), std::nullopt};
    if (matched) term.matching = circuit::Matching{std::exp(z[2]), cfg.placement};
    return band_average_gain(cp, term, cfg.omega_B, grid);
  };
  std::vector<double> lo{cfg.g_s_bounds.lo, cfg.g_l_bounds.lo};
  std::vector<double> hi{cfg.g_s_bounds.hi, cfg.g_l_bounds.hi};
  if (matched) {
    lo.push_back(cfg.L_bounds.lo);
    hi.push_back(cfg.L_bounds.hi);
  }
  return maximize_on_box(obj, lo, hi, cfg.multistart, 1e-11).f;
}

double eta_max_on_grid(const circuit::CircuitParams& cp, const TraceConfig& cfg) {
  cp.validate();
  const auto grid =
      circuit::FrequencyGrid::symmetric(cfg.grid_omega_max, cfg.grid_samples);
  optim::Objective obj = [&](std::span<const double> z) {
    const circuit::Termination term{std::exp(z[0]), std::exp(z[1]), std::nullopt};
    const auto prof = circuit::gain_profile(cp, term, grid);
    return *std::max_element(prof.values.begin(), prof.values.end());
  };
  const std::vector<double> lo{cfg.g_s_bounds.lo, cfg.g_l_bounds.lo};
  const std::vector<double> hi{cfg.g_s_bounds.hi, cfg.g_l_bounds.hi};
  return maximize_on_box(obj, lo, hi, cfg.multistart, 1e-10).f;
}

}  // namespace gaincap::pareto
