#pragma once

// Small-signal amplifier model: two-port transfer function, transducer power
// gain, noise figure, and sampled gain profiles on a symmetric frequency grid.
//
// All quantities are expressed in normalized units: conductances in units of
// g_m, frequencies in units of g_m/C_gd, inductances in units of C_gd/g_m^2,
// power spectral densities in units of N0.  Callers working in physical units
// normalize on ingestion (the shell does this for config files).

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace gaincap::circuit {

/// Where the optional matching inductor sits in the two-port.
enum class MatchingPlacement {
  ParallelToCgd,  // bridges gate and drain, in parallel with C_gd
  ShuntOutput,    // drain node to ground
  ShuntInput,     // gate node to ground
};

struct Matching {
  double L = 1.0;
  MatchingPlacement placement = MatchingPlacement::ParallelToCgd;
};

/// Device and noise parameters.  g_d is the drain conductance (appears in
/// parallel with the load), g_o the equivalent output noise conductance.
struct CircuitParams {
  double g_m = 1.0;
  double C_gd = 1.0;
  double g_d = 0.0;
  double g_o = 0.0;
  double N0 = 1.0;

  void validate() const;  // throws std::invalid_argument
};

/// Source/load termination conductances plus the optional matching inductor.
struct Termination {
  double g_s = 1.0;
  double g_l = 1.0;
  std::optional<Matching> matching;

  void validate() const;  // throws std::invalid_argument
};

/// Symmetric frequency axis with trapezoidal quadrature weights.
/// Samples are strictly increasing, closed under negation, and the weights
/// sum to 2*omega_max.
struct FrequencyGrid {
  double omega_max = 0.0;
  std::vector<double> samples;
  std::vector<double> weights;

  static FrequencyGrid symmetric(double omega_max, std::size_t n_samples);

  std::size_t size() const { return samples.size(); }
  double spacing() const;
  bool same_axis(const FrequencyGrid& other) const;
};

/// Power gain sampled on a frequency grid.
struct GainProfile {
  FrequencyGrid grid;
  std::vector<double> values;
};

/// Voltage transfer function H(jw) = u_L * g_s / i_s of the amplifier,
/// including the matching inductor when present.  Evaluated in a form that
/// stays finite for every real omega (the w = 0 limit of an inductive branch
/// is taken analytically).
std::complex<double> transfer_function(const CircuitParams&, const Termination&,
                                       double omega);

/// Transducer power gain: power delivered to g_l over the power available
/// from the source, equal to 4*(g_l/g_s)*|H(jw)|^2.
double power_gain(const CircuitParams&, const Termination&, double omega);

/// Noise figure N_F = 1 + g_o/g_s (frequency independent).
double noise_figure(const CircuitParams&, const Termination&);

/// PSD of the amplifier noise referred to the output: N_F * N0 * |H(jw)|^2.
double output_noise_psd(const CircuitParams&, const Termination&, double omega);

/// Samples power_gain over the grid.  Values are even in omega for every
/// placement of the matching inductor.
GainProfile gain_profile(const CircuitParams&, const Termination&,
                         const FrequencyGrid&);

}  // namespace gaincap::circuit
