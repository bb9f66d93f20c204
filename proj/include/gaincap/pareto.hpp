#pragma once

// Pareto frontier between channel capacity and delivered power.
//
// Scenario PsdAndTerminations: for each transfer factor eta, the PSD is
// waterfilled under the transfer constraint while the source and load
// conductances are tuned by a deterministic multistart simplex search in
// log coordinates.
//
// Scenario UniformPsd / UniformPsdMatched: the PSD is flat over a band of
// width omega_B; capacity then depends on g_s alone and the transfer
// constraint caps how large g_s may grow.  The optimizer bisects g_s against
// the best achievable band-average gain, falling back to a joint search if
// that map is not monotone.  The matched variant adds an inductor whose
// placement comes from the trace configuration.

#include <optional>
#include <vector>

#include "gaincap/circuit.hpp"
#include "gaincap/spectrum.hpp"

namespace gaincap::pareto {

enum class Scenario { PsdAndTerminations, UniformPsd, UniformPsdMatched };

struct Bounds {
  double lo = 1e-3;
  double hi = 1e2;
};

struct TraceConfig {
  Scenario scenario = Scenario::PsdAndTerminations;
  std::vector<double> eta_grid;  // strictly increasing, nonnegative
  double P = 0.1;
  double omega_B = 0.1;  // uniform scenarios only
  Bounds g_s_bounds{};
  Bounds g_l_bounds{};
  Bounds L_bounds{};
  int multistart = 5;  // starts per axis
  double tol = 1e-8;   // relative objective tolerance of the outer search
  double grid_omega_max = 50.0;
  std::size_t grid_samples = 4096;
  circuit::MatchingPlacement placement = circuit::MatchingPlacement::ParallelToCgd;

  void validate() const;  // throws std::invalid_argument
};

struct ParetoPoint {
  double eta = 0.0;
  double capacity = 0.0;
  double g_s = 0.0;
  double g_l = 0.0;
  std::optional<double> L;       // matched uniform scenario only
  std::optional<double> lambda;  // spectral scenario only
  std::optional<double> mu;
  double p_out = 0.0;
  spectrum::SolveStatus status = spectrum::SolveStatus::ConstraintInactive;
  std::optional<spectrum::SpectralSolution> spectral;
};

/// Best terminations for one eta under waterfilled PSDs.  Ties between
/// equal-capacity optima go to the smallest (g_s, g_l).
ParetoPoint optimize_terminations_A(double eta, const circuit::CircuitParams&,
                                    double P, const circuit::FrequencyGrid&,
                                    const TraceConfig&);

/// Capacity of the flat PSD P/omega_B over |w| <= omega_B/2:
/// omega_B * log2(1 + P/(omega_B*N_F*N0)).
double capacity_uniform(const circuit::CircuitParams&,
                        const circuit::Termination&, double P, double omega_B);

/// Average power gain over the band |w| <= omega_B/2 by trapezoidal
/// quadrature on a band grid refined until the integrand's narrowest
/// feature is resolved.  The grid argument bounds the admissible band.
double band_average_gain(const circuit::CircuitParams&,
                         const circuit::Termination&, double omega_B,
                         const circuit::FrequencyGrid&);

/// Best terminations for one eta under the uniform PSD.
ParetoPoint optimize_terminations_B(double eta, const circuit::CircuitParams&,
                                    double P, double omega_B,
                                    bool with_matching, const TraceConfig&);

/// Full frontier over cfg.eta_grid.  After the per-point optimizations a
/// descending repair sweep re-checks each point against its right
/// neighbour's terminations (feasible for the smaller eta), which keeps the
/// frontier monotone under optimizer jitter.
std::vector<ParetoPoint> trace_pareto(const TraceConfig&,
                                      const circuit::CircuitParams&);

/// Largest meaningful transfer factor: the supremum over the termination
/// box of max_w G(w) (spectral scenario, continuum limit) or of the band
/// average gain (uniform scenarios).
double eta_max(Scenario, const circuit::CircuitParams&, const TraceConfig&);

/// Supremum over the termination box of the grid-sampled gain maximum: the
/// largest transfer factor the spectral solver can represent on the
/// configured grid.  Used to cap default eta grids.
double eta_max_on_grid(const circuit::CircuitParams&, const TraceConfig&);

}  // namespace gaincap::pareto
