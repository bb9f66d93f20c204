#include "gaincap/circuit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gaincap::circuit {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (v <= 0.0)
    throw std::invalid_argument(std::string(name) + " must be positive");
}

void require_nonnegative(double v, const char* name) {
  require_finite(v, name);
  if (v < 0.0)
    throw std::invalid_argument(std::string(name) + " must be nonnegative");
}

// H(jw) for each topology, written with the inductor admittance multiplied
// through so that no 1/w term remains; every branch is finite for all real w.
std::complex<double> transfer_impl(const CircuitParams& p, const Termination& t,
                                   double omega) {
  const double gs = t.g_s;
  const double gl2 = t.g_l + p.g_d;              // load plus drain conductance
  const double b = gs + gl2 + p.g_m;
  const double C = p.C_gd;

  if (!t.matching) {
    const std::complex<double> num(-p.g_m * gs, omega * C * gs);
    const std::complex<double> den(gs * gl2, omega * C * b);
    return num / den;
  }

  const double L = t.matching->L;
  switch (t.matching->placement) {
    case MatchingPlacement::ParallelToCgd: {
      // branch admittance jwC + 1/(jwL); q = 1 - w^2 L C vanishes at resonance
      const double q = 1.0 - omega * omega * L * C;
      const std::complex<double> num(gs * q, -gs * omega * L * p.g_m);
      const std::complex<double> den(q * b, omega * L * gs * gl2);
      return num / den;
    }
    case MatchingPlacement::ShuntInput: {
      const double w2LC = omega * omega * L * C;
      const std::complex<double> num(-gs * w2LC, -gs * omega * L * p.g_m);
      const std::complex<double> den(gl2 - w2LC * b,
                                     omega * (C + L * gs * gl2));
      return num / den;
    }
    case MatchingPlacement::ShuntOutput: {
      const double w2LC = omega * omega * L * C;
      const std::complex<double> num(-gs * w2LC, -gs * omega * L * p.g_m);
      const std::complex<double> den(gs - w2LC * b,
                                     omega * (L * gs * gl2 + C));
      return num / den;
    }
  }
  throw std::logic_error("unknown matching placement");
}

}  // namespace

void CircuitParams::validate() const {
  require_positive(g_m, "g_m");
  require_positive(C_gd, "C_gd");
  require_nonnegative(g_d, "g_d");
  require_nonnegative(g_o, "g_o");
  require_positive(N0, "N0");
}

void Termination::validate() const {
  require_positive(g_s, "g_s");
  require_positive(g_l, "g_l");
  if (matching) require_positive(matching->L, "L");
}

double FrequencyGrid::spacing() const {
  if (samples.size() < 2)
    throw std::logic_error("grid has fewer than two samples");
  return 2.0 * omega_max / double(samples.size() - 1);
}

bool FrequencyGrid::same_axis(const FrequencyGrid& other) const {
  return omega_max == other.omega_max && samples == other.samples;
}

FrequencyGrid FrequencyGrid::symmetric(double omega_max,
                                       std::size_t n_samples) {
  require_positive(omega_max, "omega_max");
  if (n_samples < 2)
    throw std::invalid_argument("grid needs at least two samples");

  FrequencyGrid g;
  g.omega_max = omega_max;
  g.samples.resize(n_samples);
  g.weights.assign(n_samples, 2.0 * omega_max / double(n_samples - 1));
  g.weights.front() *= 0.5;
  g.weights.back() *= 0.5;

  const double h = 2.0 * omega_max / double(n_samples - 1);
  // Fill the lower half and mirror it so the axis is exactly closed under
  // negation sample-for-sample.
  for (std::size_t k = 0; k < n_samples / 2; ++k) {
    const double w = -omega_max + double(k) * h;
    g.samples[k] = w;
    g.samples[n_samples - 1 - k] = -w;
  }
  if (n_samples % 2 == 1) g.samples[n_samples / 2] = 0.0;
  return g;
}

std::complex<double> transfer_function(const CircuitParams& p,
                                       const Termination& t, double omega) {
  p.validate();
  t.validate();
  require_finite(omega, "omega");
  return transfer_impl(p, t, omega);
}

double power_gain(const CircuitParams& p, const Termination& t, double omega) {
  p.validate();
  t.validate();
  require_finite(omega, "omega");
  return 4.0 * (t.g_l / t.g_s) * std::norm(transfer_impl(p, t, omega));
}

double noise_figure(const CircuitParams& p, const Termination& t) {
  p.validate();
  t.validate();
  return 1.0 + p.g_o / t.g_s;
}

double output_noise_psd(const CircuitParams& p, const Termination& t,
                        double omega) {
  p.validate();
  t.validate();
  require_finite(omega, "omega");
  return (1.0 + p.g_o / t.g_s) * p.N0 * std::norm(transfer_impl(p, t, omega));
}

GainProfile gain_profile(const CircuitParams& p, const Termination& t,
                         const FrequencyGrid& grid) {
  p.validate();
  t.validate();
  if (grid.size() < 2)
    throw std::invalid_argument("gain_profile: empty frequency grid");

  GainProfile out;
  out.grid = grid;
  out.values.resize(grid.size());
  const double scale = 4.0 * (t.g_l / t.g_s);
  for (std::size_t k = 0; k < grid.size(); ++k)
    out.values[k] = scale * std::norm(transfer_impl(p, t, grid.samples[k]));
  return out;
}

}  // namespace gaincap::circuit
