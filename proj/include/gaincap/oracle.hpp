#pragma once

// Independent verification routes for the solver and the circuit model.
//
// Everything here recomputes its target quantity by a different method than
// the production path: the amplifier responses come from a generic nodal
// netlist solve instead of the closed forms, the constrained spectra from a
// dense scan over the transfer multiplier and from projected gradient ascent
// on the primal, and the band integrals from a closed antiderivative.  Tests
// compare the two routes; agreement is the evidence.

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaincap/circuit.hpp"
#include "gaincap/pareto.hpp"
#include "gaincap/spectrum.hpp"

namespace gaincap::oracle {

// ---------------------------------------------------------------------------
// Nodal analysis

enum class BranchKind { Conductance, Capacitor, Inductor, Vccs };

struct Branch {
  BranchKind kind = BranchKind::Conductance;
  int a = 0;  // terminal nodes; 0 is ground
  int b = 0;
  double value = 0.0;  // conductance, capacitance, inductance, or gm
  int ctrl_p = 0;      // Vccs only: controlling voltage is v(ctrl_p)-v(ctrl_n)
  int ctrl_n = 0;
};

struct Netlist {
  int nodes = 0;  // total node count including ground
  std::vector<Branch> branches;
};

struct SingularNetlist : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Node voltages under the given nodal current injections (one entry per
/// node, ground entry ignored), by dense Gaussian elimination with partial
/// pivoting on the reduced admittance matrix.  Returns one voltage per node
/// with the ground entry fixed at zero.  Throws SingularNetlist when the
/// matrix does not factor, and for any inductive branch at omega = 0.
std::vector<std::complex<double>> nodal_solve(
    const Netlist&, double omega,
    std::span<const std::complex<double>> injections);

/// Three-node netlist of the amplifier (ground, gate, drain) with the
/// source and load attached, honouring the optional matching inductor.
Netlist amplifier_netlist(const circuit::CircuitParams&,
                          const circuit::Termination&);

/// Voltage transfer u_drain * g_s for a unit current injected into the gate,
/// computed through nodal_solve.
std::complex<double> nodal_transfer(const circuit::CircuitParams&,
                                    const circuit::Termination&, double omega);

/// Transducer gain 4 * g_s * g_l * |u_drain|^2 for a unit gate injection.
double nodal_power_gain(const circuit::CircuitParams&,
                        const circuit::Termination&, double omega);

// ---------------------------------------------------------------------------
// Constrained-spectrum cross checks

struct BruteForceOptions {
  int mu_points = 2000;   // dense geometric scan resolution
  int refine_iters = 120; // bisection steps inside the bracketing cell
};

/// Reference solve of the transfer-constrained waterfilling problem: lambda
/// by plain bisection on the full grid for each mu, mu by a dense geometric
/// scan followed by bisection in the bracketing cell.  No shared code with
/// the production solver.
spectrum::SpectralSolution brute_force_duals(const spectrum::BudgetSpec&,
                                             const circuit::GainProfile&,
                                             const BruteForceOptions& = {});

struct AscentOptions {
  int max_iters = 20000;
  double plateau_rel = 1e-12;  // stop when 200 iterations move J less than this
};

struct AscentResult {
  std::vector<double> psd;
  double objective = 0.0;  // bits * normalized rad/s
  int iterations = 0;
};

/// Primal route: projected gradient ascent of the capacity integral over the
/// intersection of the power simplex and the transfer halfspace, with exact
/// per-set projections and a fixed curvature-safe step.  Throws
/// std::runtime_error if the final iterate is not feasible to 1e-9.
AscentResult direct_psd_maximizer(const spectrum::BudgetSpec&,
                                  const circuit::GainProfile&,
                                  const AscentOptions& = {});

/// Lagrangian dual value at multipliers (lambda, mu >= 0): an upper bound on
/// the capacity of every feasible PSD (weak duality).  Requires
/// lambda > mu * max(G); throws std::domain_error otherwise.
double dual_value(const spectrum::BudgetSpec&, const circuit::GainProfile&,
                  double lambda, double mu);

// ---------------------------------------------------------------------------
// Optimality residuals

struct KktReport {
  double stationarity_residual = 0.0;   // sup over the grid, in lambda units
  double primal_power_residual = 0.0;   // |integral phi - P| / P
  double transfer_residual = 0.0;       // constraint violation / P
  double slackness_residual = 0.0;      // complementary slackness, normalized
  double outer_gradient_residual = 0.0; // best feasible ascent rate, relative
  double tol_core = 1e-6;
  double tol_outer = 1e-4;

  bool pass() const {
    return stationarity_residual <= tol_core &&
           primal_power_residual <= tol_core && transfer_residual <= tol_core &&
           slackness_residual <= tol_core &&
           outer_gradient_residual <= tol_outer;
  }
};

/// Inner residuals of one constrained solve (outer_gradient_residual = 0).
/// Quadratures here run over the full grid rather than the solver's folded
/// half axis.
KktReport kkt_residuals(const spectrum::BudgetSpec&,
                        const circuit::GainProfile&,
                        const spectrum::SpectralSolution&);

/// Links a frontier point back to the search problem that produced it.
struct KktContext {
  pareto::Scenario scenario = pareto::Scenario::PsdAndTerminations;
  circuit::CircuitParams params;
  pareto::TraceConfig cfg;
};

/// Full residuals for a frontier point: the inner report plus a first-order
/// test that no box-feasible termination change raises the objective.  For
/// uniform-PSD points there is no per-frequency stationarity condition; the
/// projected gradients of the band gain over the inner variables join the
/// outer residual instead, and the power residual is zero by construction.
KktReport kkt_residuals(const pareto::ParetoPoint&, const KktContext&);

// ---------------------------------------------------------------------------
// Band integrals

/// Closed-form integral of the power gain over [-W, W] for the unmatched
/// two-port (partial fractions in omega^2).  Throws std::invalid_argument if
/// a matching inductor is present.
double analytic_band_gain_integral(const circuit::CircuitParams&,
                                   const circuit::Termination&, double W);

/// Plain trapezoidal band average of the power gain on n uniform samples,
/// used as an independent quadrature route.  n must be odd and at least 3.
double band_average_gain_quadrature(const circuit::CircuitParams&,
                                    const circuit::Termination&, double omega_B,
                                    std::size_t n);

}  // namespace gaincap::oracle
