#pragma once

// Deterministic derivative-free maximization on a box: Nelder-Mead with
// fixed coefficients, vertices clamped into the box.  No randomness; the
// result depends only on the inputs.

#include <functional>
#include <span>
#include <vector>

namespace gaincap::optim {

struct SimplexOptions {
  double ftol = 1e-8;   // relative objective spread at convergence
  double xtol = 1e-9;   // simplex diameter at convergence
  int max_iters = 200;
  double init_step = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int iters = 0;
};

using Objective = std::function<double(std::span<const double>)>;

SimplexResult simplex_max(const Objective& f, std::span<const double> x0,
                          std::span<const double> lo,
                          std::span<const double> hi, const SimplexOptions&);

/// Log-spaced grid of n points covering [lo, hi] inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace gaincap::optim
