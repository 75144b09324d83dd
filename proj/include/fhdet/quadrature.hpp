#pragma once

#include <functional>
#include <vector>

#include "fhdet/core.hpp"

namespace fhdet {

// Nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Cached n-point Gauss-Legendre rule.
const Rule& gauss_legendre(int n);

// A flat list of nodes and weights on the real line.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
  void append(const NodeSet& other);
};

// n-point rule on [a, b].
void append_gl(NodeSet& out, double a, double b, int n);

// Rule for a segment whose endpoint `s0` carries an algebraic singularity.
// The substitution x = s0 + (s1 - s0) u^q flattens |x - s0|^p integrands, the
// u-interval is split into `panels` uniform pieces and the first one is refined
// geometrically (ratio 1/4, `geo` levels) to absorb complex exponents.
void append_graded(NodeSet& out, double s0, double s1, double q, int panels, int geo, int n);

// Graded rule on [s0, s1] (s0 singular, either orientation) whose panel widths
// in s never exceed max_width(s) at the panel midpoint. Panels start with `geo`
// levels of geometric refinement in u and grow by at most a factor 4.
void append_graded_adaptive(NodeSet& out, double s0, double s1, double q,
                            const std::function<double(double)>& max_width, int n, int geo = 10);

// Grading power for a worst-case exponent Re(-2 gamma): endpoint behaviour
// |x|^p with p = -2 Re gamma.
double grading_power(double p);

// Adaptive Gauss-Kronrod for complex integrands; limits may be infinite.
// Throws QuadratureError when the estimated error stays above tolerance.
cplx integrate(const std::function<cplx(double)>& f, double a, double b, double rel_tol = 1e-13,
               double* err_out = nullptr, int max_depth = 18);

// Same, but returns the best estimate without throwing.
cplx integrate_nothrow(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
                       double* err_out, int max_depth = 18);

// I(t) = int f(xi) e^{-i t xi} dxi over the real line. The core [-L, L] uses
// Gauss-Legendre panels fine enough for |t| <= t_max; the two tails are moved
// onto vertical rays from +-L, which requires f to be holomorphic and decaying
// in the quarter planes beyond +-L on the side where e^{-i t xi} decays.
class FourierIntegral {
 public:
  FourierIntegral(std::function<cplx(cplx)> f, double L, double t_max);
  cplx operator()(double t) const;
  double half_width() const { return L_; }

 private:
  std::function<cplx(cplx)> f_;
  double L_;
  double t_max_;
  NodeSet core_;
  std::vector<cplx> fw_;  // f(xi_j) w_j
};

}  // namespace fhdet
