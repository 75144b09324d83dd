#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fhdet/quadrature.hpp"
#include "fhdet/symbols.hpp"

namespace fhdet {

enum class DetMethod { toeplitz_lu, nystrom_xi, nystrom_t };
std::string to_string(DetMethod m);

struct DeterminantResult {
  cplx value = 1.0;
  cplx log_value = 0.0;
  DetMethod method = DetMethod::toeplitz_lu;
  int size = 0;
  double error_estimate = 0.0;
  bool singular = false;
};

// log det of a dense complex matrix by LU with partial pivoting, imaginary
// part reduced to [-pi, pi]. Pivot arguments carry no continuous branch, so
// compare results through exp of the difference.
DeterminantResult lu_log_det(const std::vector<cplx>& row_major, int n);

// ---------------------------------------------------------------------------
// Toeplitz

// c_k = int dtheta/2pi e^{ik theta} sigma(theta).
cplx fourier_coeff(const SymbolSpec& spec, int k);
// c_{-kmax..kmax}, stored at index k + kmax.
std::vector<cplx> fourier_coeffs(const SymbolSpec& spec, int kmax, int n = 24);

// c_k of (1 - z/a)^{-nu} (1 - a/z)^{-nubar} in closed form (Gauss sum of the
// binomial convolution).
cplx fh_coeff_closed_form(cplx nu, cplx nubar, cplx a, int k);

// Toeplitz determinants of one symbol for all sizes up to max_m, sharing the
// coefficient table.
class ToeplitzEngine {
 public:
  ToeplitzEngine(const SymbolSpec& spec, int max_m);
  DeterminantResult det(int m) const;
  const std::vector<cplx>& coeffs() const { return c_; }
  int max_m() const { return max_m_; }
  // max difference between two quadrature orders over the table
  double coeff_error() const { return coeff_err_; }

 private:
  int max_m_;
  std::vector<cplx> c_;  // index k + max_m - 1
  double coeff_err_ = 0.0;
};

DeterminantResult toeplitz_det(const SymbolSpec& spec, int m);

// ---------------------------------------------------------------------------
// Truncated Wiener-Hopf operators on the line

// V(xi, eta) = (sigma(xi) - 1) sin(x (xi - eta)/2) / (pi (xi - eta)).
cplx gsk_kernel_line(const SymbolSpec& spec, double x, double xi, double eta);

struct Panel {
  double a;
  double b;
  int nodes;
};

struct QuadratureScheme {
  std::vector<Panel> panels;  // tiling of [-L, L] (before grading)
  double grading = 1.0;
  double L = 40.0;
  int nodes_per_panel = 24;
  // explicit node list; built from the panels by make_line_scheme
  NodeSet nodes;
  // for nodes next to a singular point: its index and the exact offset
  // xi - a, which the absolute coordinate cannot resolve
  std::vector<int> anchors;
  std::vector<double> offsets;
};

// Nodes for the line determinant at parameter x: every singular point is a
// panel endpoint, panels are graded towards it and no wider than the sine
// kernel oscillation allows.
QuadratureScheme make_line_scheme(const SymbolSpec& spec, double x, int nodes_per_panel = 24, double L = 40.0);


// Estimated change of log det2 from cutting the symbol to 1 beyond the
// scheme's L: x/2pi int_{|xi| > L} (ln sigma + 1 - sigma) plus the matching
// change of the strong Szego constant. Needs sigma holomorphic for
// |Re xi| >= L.
cplx line_tail_correction(const SymbolSpec& spec, const QuadratureScheme& scheme, double x);

struct Det2Options {
  bool estimate_error = true;
  bool tail_correction = true;
};

DeterminantResult fredholm_det2_line(const SymbolSpec& spec, double x, const QuadratureScheme& scheme,
                                     Det2Options opts = {});
DeterminantResult fredholm_det2_line(const SymbolSpec& spec, double x);

// The same determinant from the convolution form on [0, x] with kernel
// K(t) = (1/2pi) int (sigma(xi) - 1) e^{-i t xi} dxi. Smooth symbols only.
// n_nodes is rounded up to a multiple of 96 (24-point panels, extrapolated
// over three levels).
DeterminantResult nystrom_tspace(const SymbolSpec& spec, double x, int n_nodes);

}  // namespace fhdet
