#pragma once

// Power-transfer-constrained waterfilling.
//
// Maximizes the integral of log2(1 + phi(w)/nf_n0) over the grid subject to
//   integral phi          == P        (total source power)
//   integral phi * G(w)   >= eta * P  (delivered output power)
//   phi >= 0,
// where G is a sampled power-gain profile and nf_n0 the flat effective noise
// floor (noise figure times N0).  The optimum has the closed dual form
//   phi(w) = max(0, 1/(ln2 * (lambda - mu * G(w))) - nf_n0)
// and the solver locates (lambda, mu) by nested bisection.
//
// All functions are pure and re-entrant.

#include <span>
#include <vector>

#include "gaincap/circuit.hpp"

namespace gaincap::spectrum {

enum class SolveStatus { ConstraintInactive, ConstraintActive, Infeasible };

/// Total power, transfer factor, and effective noise floor of one instance.
struct BudgetSpec {
  double P = 0.1;
  double eta = 0.0;
  double nf_n0 = 1.0;

  void validate() const;  // throws std::invalid_argument
};

struct SpectralSolution {
  std::vector<double> psd;  // phi(w_k) on the gain profile's grid
  double lambda = 0.0;
  double mu = 0.0;
  double capacity = 0.0;         // bits * normalized rad/s
  double p_out = 0.0;            // delivered power, integral of phi*G
  double support_measure = 0.0;  // total weight of samples with phi > 0
  bool boundary_warning = false; // support touches the grid boundary
  SolveStatus status = SolveStatus::ConstraintInactive;
};

/// Evaluates the dual closed form for given multipliers.
/// Requires lambda > mu * max(G); throws std::domain_error otherwise.
std::vector<double> psd_from_duals(double lambda, double mu,
                                   const circuit::GainProfile& gain,
                                   double nf_n0);

/// The unique lambda in (mu*max(G), inf) at which the PSD integrates to P,
/// found by bisection on the strictly decreasing power-versus-lambda map.
double lambda_for_power(double mu, double P, const circuit::GainProfile& gain,
                        double nf_n0);

/// Full constrained solve.  Tries the unconstrained waterfilling solution
/// first; if it misses the transfer target, bisects mu along the
/// lambda(mu) path.  Reports Infeasible when eta is at or beyond the
/// grid-representable gain maximum.
SpectralSolution solve_constrained(const BudgetSpec&,
                                   const circuit::GainProfile& gain);

/// Trapezoidal quadrature of log2(1 + psd/nf_n0).
double capacity_of(std::span<const double> psd, double nf_n0,
                   const circuit::FrequencyGrid& grid);

/// Trapezoidal quadrature of psd * G.
double transferred_power(std::span<const double> psd,
                         const circuit::GainProfile& gain,
                         const circuit::FrequencyGrid& grid);

}  // namespace gaincap::spectrum
