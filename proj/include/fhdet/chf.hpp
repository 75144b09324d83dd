#pragma once

#include <string>
#include <vector>

#include "fhdet/core.hpp"

namespace fhdet {

// Improper integrals of tau and phi with known closed forms. The tails
// oscillate like e^{+-it} t^{+-2 delta - 1}, so the integrals converge only
// conditionally; they are taken as limits of [-T, 0] or [-T, T] truncations,
// each averaged over one period in T and extrapolated in 1/T.
struct ChfIdentity {
  std::string name;
  std::string statement;
  cplx computed = 0.0;
  cplx closed_form = 0.0;
  double abs_error = 0.0;
  // change of the extrapolated value between the last two T
  double tail_estimate = 0.0;
  bool converged = false;
};

struct ChfOptions {
  double t_start = 256.0;  // first truncation; doubled until converged
  double t_max = 8192.0;
  double tail_tol = 2e-6;
  int panels_per_period = 8;
  int nodes = 16;
};

// The six identities at (gamma, delta); the two logarithmic ones are stated
// at delta = 0 and only included then. Needs |Re delta| < 1/2, Re gamma < 1/2.
std::vector<ChfIdentity> verify_chf_integrals(cplx gamma_exp, cplx delta, const ChfOptions& opts = {});

}  // namespace fhdet
