#include "gaincap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gaincap::spectrum {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
constexpr double kLambdaTolRel = 1e-12;  // power residual, relative to P
constexpr double kMuTolRel = 1e-10;      // transfer residual, relative to eta*P
constexpr int kMaxBisect = 200;
constexpr double kFeasibilityGuard = 1e-6;

void validate_gain(const circuit::GainProfile& gain) {
  if (gain.grid.size() < 2 || gain.values.size() != gain.grid.size())
    throw std::invalid_argument("gain profile does not match its grid");
  for (double v : gain.values)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("gain profile has a negative or non-finite sample");
}

// The integrands are even, so all quadratures run over the w >= 0 samples
// with doubled weights (an exact zero sample keeps its single weight).
struct HalfAxis {
  std::vector<double> w;   // quadrature weights
  std::vector<double> g;   // gain samples
  double gmax = 0.0;
  std::vector<double> buf; // scratch for the unclamped psd
};

HalfAxis make_half(const circuit::GainProfile& gain) {
  HalfAxis h;
  const std::size_t n = gain.grid.size();
  h.w.reserve((n + 1) / 2);
  h.g.reserve((n + 1) / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const double omega = gain.grid.samples[k];
    if (omega < 0.0) continue;
    h.w.push_back(gain.grid.weights[k] * (omega > 0.0 ? 2.0 : 1.0));
    h.g.push_back(gain.values[k]);
  }
  h.gmax = *std::max_element(gain.values.begin(), gain.values.end());
  h.buf.resize(h.w.size());
  return h;
}

struct PowerTransfer {
  double power = 0.0;
  double transfer = 0.0;
};

PowerTransfer eval_duals(HalfAxis& h, double lambda, double mu, double nf) {
  const std::size_t n = h.w.size();
  double* buf = h.buf.data();
  const double* g = h.g.data();
  const double* w = h.w.data();
  for (std::size_t k = 0; k < n; ++k)
    buf[k] = kInvLn2 / (lambda - mu * g[k]) - nf;
  PowerTransfer pt;
  for (std::size_t k = 0; k < n; ++k) {
    if (buf[k] > 0.0) {
      const double c = w[k] * buf[k];
      pt.power += c;
      pt.transfer += c * g[k];
    }
  }
  return pt;
}

// Bisection for lambda at fixed mu.  Optional hints narrow the initial
// bracket; they are verified before use so a stale hint cannot corrupt the
// result.
double bisect_lambda(HalfAxis& h, double mu, double P, double nf,
                     double hint_lo = -1.0, double hint_hi = -1.0) {
  const double floor_l = mu * h.gmax;
  double lo = floor_l;
  double hi = floor_l + kInvLn2 / nf;  // power(hi) == 0 < P
  if (hint_lo > lo && hint_lo < hi &&
      eval_duals(h, hint_lo, mu, nf).power >= P)
    lo = hint_lo;
  if (hint_hi > lo && hint_hi < hi &&
      eval_duals(h, hint_hi, mu, nf).power <= P)
    hi = hint_hi;

  double best = hi;
  double best_resid = P;
  for (int it = 0; it < kMaxBisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // bracket exhausted in fp
    const double resid = eval_duals(h, mid, mu, nf).power - P;
    if (std::abs(resid) < best_resid) {
      best = mid;
      best_resid = std::abs(resid);
    }
    if (std::abs(resid) <= kLambdaTolRel * P) return mid;
    if (resid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

SpectralSolution assemble(const circuit::GainProfile& gain, HalfAxis& h,
                          const BudgetSpec& b, double lambda, double mu,
                          SolveStatus status) {
  SpectralSolution s;
  s.lambda = lambda;
  s.mu = mu;
  s.status = status;
  const std::size_t n = gain.grid.size();
  s.psd.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = kInvLn2 / (lambda - mu * gain.values[k]) - b.nf_n0;
    s.psd[k] = phi > 0.0 ? phi : 0.0;
  }
  const std::size_t m = h.w.size();
  for (std::size_t k = 0; k < m; ++k)
    h.buf[k] = kInvLn2 / (lambda - mu * h.g[k]) - b.nf_n0;
  for (std::size_t k = 0; k < m; ++k) {
    if (h.buf[k] > 0.0) {
      const double c = h.w[k] * h.buf[k];
      s.capacity += h.w[k] * std::log1p(h.buf[k] / b.nf_n0) * kInvLn2;
      s.p_out += c * h.g[k];
      s.support_measure += h.w[k];
    }
  }
  s.boundary_warning = h.buf[m - 1] > 0.0;
  return s;
}

}  // namespace

void BudgetSpec::validate() const {
  if (!std::isfinite(P) || P <= 0.0)
    throw std::invalid_argument("P must be positive");
  if (!std::isfinite(eta) || eta < 0.0)
    throw std::invalid_argument("eta must be nonnegative");
  if (!std::isfinite(nf_n0) || nf_n0 <= 0.0)
    throw std::invalid_argument("nf_n0 must be positive");
}

std::vector<double> psd_from_duals(double lambda, double mu,
                                   const circuit::GainProfile& gain,
                                   double nf_n0) {
  validate_gain(gain);
  if (!std::isfinite(lambda) || !std::isfinite(mu) || mu < 0.0)
    throw std::invalid_argument("invalid duals");
  if (!std::isfinite(nf_n0) || nf_n0 <= 0.0)
    throw std::invalid_argument("nf_n0 must be positive");
  const double gmax =
      *std::max_element(gain.values.begin(), gain.values.end());
  if (!(lambda > mu * gmax))
    throw std::domain_error("psd_from_duals: lambda must exceed mu*max(G)");

  std::vector<double> psd(gain.values.size());
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const double phi = kInvLn2 / (lambda - mu * gain.values[k]) - nf_n0;
    psd[k] = phi > 0.0 ? phi : 0.0;
  }
  return psd;
}

double lambda_for_power(double mu, double P, const circuit::GainProfile& gain,
                        double nf_n0) {
  validate_gain(gain);
  if (!std::isfinite(mu) || mu < 0.0)
    throw std::invalid_argument("mu must be nonnegative");
  if (!std::isfinite(P) || P <= 0.0)
    throw std::invalid_argument("P must be positive");
  if (!std::isfinite(nf_n0) || nf_n0 <= 0.0)
    throw std::invalid_argument("nf_n0 must be positive");
  HalfAxis h = make_half(gain);
  return bisect_lambda(h, mu, P, nf_n0);
}

SpectralSolution solve_constrained(const BudgetSpec& budget,
                                   const circuit::GainProfile& gain) {
  budget.validate();
  validate_gain(gain);
  HalfAxis h = make_half(gain);
  const double P = budget.P;
  const double nf = budget.nf_n0;
  const double target = budget.eta * P;

  const double lambda_wf = bisect_lambda(h, 0.0, P, nf);
  const PowerTransfer wf = eval_duals(h, lambda_wf, 0.0, nf);
  if (wf.transfer >= target)
    return assemble(gain, h, budget, lambda_wf, 0.0,
                    SolveStatus::ConstraintInactive);

  // A Dirac line at the gain maximum transfers at most max(G) per unit
  // power, so targets at or beyond that (minus a guard) cannot be met.
  if (budget.eta >= (1.0 - kFeasibilityGuard) * h.gmax) {
    SpectralSolution s;
    s.psd.assign(gain.grid.size(), 0.0);
    s.status = SolveStatus::Infeasible;
    return s;
  }

  // Grow a mu bracket geometrically, then bisect.  lambda(mu) is increasing,
  // so the endpoints of the mu bracket always bracket the inner lambda root.
  double mu_lo = 0.0, lambda_lo = lambda_wf;
  double mu_hi = lambda_wf / (2.0 * h.gmax);
  double lambda_hi = 0.0;
  bool bracketed = false;
  for (int it = 0; it < 400; ++it) {
    lambda_hi = bisect_lambda(h, mu_hi, P, nf, lambda_lo);
    const PowerTransfer pt = eval_duals(h, lambda_hi, mu_hi, nf);
    if (pt.transfer >= target) {
      bracketed = true;
      break;
    }
    mu_lo = mu_hi;
    lambda_lo = lambda_hi;
    mu_hi *= 2.0;
  }
  if (!bracketed)
    throw std::runtime_error(
        "solve_constrained: transfer bracket did not close");

  double best_mu = mu_hi, best_lambda = lambda_hi;
  double best_resid =
      std::abs(eval_duals(h, lambda_hi, mu_hi, nf).transfer - target);
  for (int it = 0; it < kMaxBisect; ++it) {
    const double mu_mid = 0.5 * (mu_lo + mu_hi);
    if (!(mu_mid > mu_lo && mu_mid < mu_hi)) break;
    const double lambda_mid =
        bisect_lambda(h, mu_mid, P, nf, lambda_lo, lambda_hi);
    const double resid =
        eval_duals(h, lambda_mid, mu_mid, nf).transfer - target;
    if (std::abs(resid) < best_resid) {
      best_mu = mu_mid;
      best_lambda = lambda_mid;
      best_resid = std::abs(resid);
    }
    if (std::abs(resid) <= kMuTolRel * target) break;
    if (resid < 0.0) {
      mu_lo = mu_mid;
      lambda_lo = lambda_mid;
    } else {
      mu_hi = mu_mid;
      lambda_hi = lambda_mid;
    }
  }
  return assemble(gain, h, budget, best_lambda, best_mu,
                  SolveStatus::ConstraintActive);
}

double capacity_of(std::span<const double> psd, double nf_n0,
                   const circuit::FrequencyGrid& grid) {
  if (psd.size() != grid.size())
    throw std::invalid_argument("capacity_of: psd does not match grid");
  if (!std::isfinite(nf_n0) || nf_n0 <= 0.0)
    throw std::invalid_argument("nf_n0 must be positive");
  double acc = 0.0;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    if (!std::isfinite(psd[k]) || psd[k] < 0.0)
      throw std::invalid_argument("capacity_of: psd must be nonnegative");
    acc += grid.weights[k] * std::log1p(psd[k] / nf_n0);
  }
  return acc * kInvLn2;
}

double transferred_power(std::span<const double> psd,
                         const circuit::GainProfile& gain,
                         const circuit::FrequencyGrid& grid) {
  validate_gain(gain);
  if (psd.size() != grid.size() || !gain.grid.same_axis(grid))
    throw std::invalid_argument("transferred_power: grid mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < psd.size(); ++k)
    acc += grid.weights[k] * psd[k] * gain.values[k];
  return acc;
}

}  // namespace gaincap::spectrum
