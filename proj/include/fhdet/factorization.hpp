#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fhdet/symbols.hpp"

namespace fhdet {

// Szego data of a smooth circle symbol b.
struct SzegoData {
  cplx g_of_b = 1.0;
  cplx e_of_b = 1.0;
  // [ln b]_k = int dtheta/2pi e^{ik theta} ln b, k = -K..K at index k + K
  std::vector<cplx> fourier_log_coeffs;
  int truncation_K = 0;
  double tail = 0.0;  // max |[ln b]_{+-K}|

  cplx log_coeff(int k) const;
  // ln b_+(z) = sum_{k>=1} [ln b]_{-k} z^k, the part holomorphic inside the circle
  cplx log_b_plus(cplx z) const;
  // ln b_-(z) = sum_{k>=1} [ln b]_k z^{-k}, holomorphic outside
  cplx log_b_minus(cplx z) const;
};

// Fourier coefficients of ln b by the trapezoidal rule on at least 8K points.
// K is doubled until the end coefficients drop below 1e-14 (at most 4096).
SzegoData szego_constants(const RegularPart& regular, int K = 256);

struct CircleFactors {
  std::optional<cplx> b_plus;
  std::optional<cplx> b_minus;
};

// b_+ and b_- at z. Each factor is returned where its series converges; on
// |z| = 1 the values are radial limits.
CircleFactors wh_factor_circle(const SzegoData& data, cplx z);

enum class HalfPlane { upper, lower };

// Wiener-Hopf factors F = F_+ F_- of a smooth line symbol via Cauchy integrals
// of ln F. F_+ is holomorphic in the upper half plane, F_- in the lower one;
// both are continued across the real axis through F_+ F_- = F.
class LineFactorization {
 public:
  explicit LineFactorization(RegularPart F);

  cplx log_f_plus(cplx z) const;
  cplx log_f_minus(cplx z) const;
  // ln F_- - ln F_+ with a single Cauchy integral
  cplx log_f_ratio(cplx z) const;
  const RegularPart& regular() const { return F_; }

 private:
  RegularPart F_;
  // (1/2 i pi) int ln F(xi) / (xi - z) dxi for Im z != 0
  cplx cauchy(cplx z) const;
  cplx log_f(cplx z) const;
};

cplx wh_factor_line(const RegularPart& regular, cplx z, HalfPlane half);

// E[F] = exp int_0^inf t g(t) g(-t) dt with g the inverse Fourier transform of ln F.
cplx e_of_f(const RegularPart& regular);
// log of the same quantity
cplx log_e_of_f(const RegularPart& regular);

// Everything derived from the Wiener-Hopf factorization of one symbol:
// alpha, the regularized alpha-hat and the local functions K_p.
class SymbolFactorization {
 public:
  explicit SymbolFactorization(SymbolSpec spec);

  const SymbolSpec& spec() const { return spec_; }
  const SzegoData& szego() const;

  // ln of the regular factor holomorphic inside (circle: b_+, line: F_+)
  cplx log_plus(cplx z) const;
  cplx log_minus(cplx z) const;

  cplx alpha_up(cplx z) const;
  cplx alpha_down(cplx z) const;
  cplx alpha_hat_up(std::size_t p, cplx z) const;
  cplx alpha_hat_down(std::size_t p, cplx z) const;

  // log of alpha-hat in a form that is analytic across the real axis near a_p
  cplx log_alpha_hat_up(std::size_t p, cplx z) const;
  cplx log_alpha_hat_down(std::size_t p, cplx z) const;

  // K_p(z) with scale x (line) or m (circle); z must lie in the disk of
  // radius eps around a_p.
  cplx k_p(std::size_t p, cplx z, double scale) const;
  cplx log_k_p(std::size_t p, cplx z, double scale) const;
  double disk_radius() const { return eps_; }

 private:
  SymbolSpec spec_;
  std::shared_ptr<const SzegoData> szego_;
  std::shared_ptr<const LineFactorization> line_;
  double eps_ = 0.25;
};

// alpha at z: upper/inside values alpha_up, lower/outside alpha_down. On the
// contour the side picks the boundary value (above = upper half plane or
// inside of the circle).
cplx alpha_eval(const SymbolSpec& spec, cplx z, Side side = Side::principal);

cplx k_p_eval(const SymbolSpec& spec, std::size_t p, cplx z, double scale);

}  // namespace fhdet
