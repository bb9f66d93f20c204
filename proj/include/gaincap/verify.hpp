#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gaincap/config.hpp"

namespace gaincap::shell {

struct VerifyCheck {
  std::string name;
  double worst = 0.0;  // largest relative residual seen
  double tol = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

// Replacement evaluators for the closed-form circuit formulas, used by tests
// to confirm the cross-checks actually catch a wrong formula. Empty means
// "use the real implementation".
struct VerifyHooks {
  std::function<std::complex<double>(const circuit::CircuitParams&,
                                     const circuit::Termination&, double)>
      transfer;
  std::function<double(const circuit::CircuitParams&,
                       const circuit::Termination&, double)>
      gain;
};

// Cross-validates the independent computation routes on the configured
// circuit: closed forms vs nodal analysis, the dual solver vs a brute-force
// dual scan and a direct primal maximizer, duality gap, KKT residuals of a
// short trace, and the quadrature identities. `quick` shrinks instance
// counts and grid resolutions.
VerifyReport run_verify(const RunConfig& cfg, bool quick,
                        const VerifyHooks& hooks = {});

}  // namespace gaincap::shell
