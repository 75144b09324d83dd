#pragma once

#include <string>
#include <vector>

#include "fhdet/core.hpp"
#include "fhdet/expr.hpp"

namespace fhdet {

enum class Geometry { line, circle };

struct FHSingularity {
  cplx location;
  cplx nu;
  cplx nubar;
  cplx delta;      // (nubar - nu) / 2
  cplx gamma_exp;  // (nu + nubar) / 2
};

FHSingularity make_singularity(cplx location, cplx nu, cplx nubar);
// Same singularity given through (gamma, delta): nu = gamma - delta, nubar = gamma + delta.
FHSingularity make_singularity_gd(cplx location, cplx gamma_exp, cplx delta);

// The smooth factor: F on the line (argument xi, possibly complex), b on the
// circle (argument z, possibly off the circle).
struct RegularPart {
  enum class Kind { analytic_closed_form, fourier_series };
  Kind kind = Kind::analytic_closed_form;
  Expression expr = Expression::constant(1.0);
  // Laurent coefficients b_k, k = -K..K, stored at index k + K
  std::vector<cplx> laurent;
  // line case: F - 1 = O(|xi|^{-(1+kappa)/2})
  double decay_kappa = 3.0;
  bool identity = true;

  static RegularPart one();
  static RegularPart from_expression(const std::string& text, double decay_kappa = 3.0);
  static RegularPart from_laurent(std::vector<cplx> coeffs);

  cplx operator()(cplx z) const;
  std::string describe() const;
};

struct SymbolSpec {
  Geometry geometry = Geometry::circle;
  RegularPart regular = RegularPart::one();
  std::vector<FHSingularity> singularities;

  double rho() const;
  double max_re_gamma() const;
};

struct ConstraintCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ConstraintCheck> checks;
  std::string failures() const;
};

// Checks exponent bounds, distinct and geometry-consistent locations,
// non-vanishing of the regular part, winding (circle) and decay (line).
ValidationReport validate_symbol(const SymbolSpec& spec);

enum class Side { above, below, principal };

// sigma_{nu,nubar}(s) = (1 + i/s)^nu (1 - i/s)^nubar for real s != 0.
cplx line_fh_factor(cplx nu, cplx nubar, double s);

// sigma(xi) on the line. At a singular point with gamma = 0, `above` and
// `below` return the one-sided limits from xi > a and xi < a respectively.
cplx eval_line_symbol(const SymbolSpec& spec, double xi, Side side = Side::principal);

// log sigma(xi), continuous on each interval between singular points and
// vanishing at infinity.
cplx log_line_symbol(const SymbolSpec& spec, double xi);

// sigma(e^{i theta}) = b * prod (1 - z/a)^{-nu} (1 - a/z)^{-nubar}.
cplx eval_circle_symbol(const SymbolSpec& spec, double theta);

// Winding number of the regular part around the unit circle.
int winding_number(const RegularPart& regular);

}  // namespace fhdet
