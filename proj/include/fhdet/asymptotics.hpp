#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fhdet/factorization.hpp"

namespace fhdet {

struct PredictionFactor {
  std::string name;
  cplx log_value;
};

struct AsymptoticPrediction {
  cplx log_leading = 0.0;
  // bulk, algebraic, szego_constant, barnes, local_regular, pair
  std::vector<PredictionFactor> factors;
  double rho = 0.0;
  // expected exponent of the relative error in m or x
  double correction_order = -1.0;

  cplx value() const { return std::exp(log_leading); }
  // log of the named factor; throws ParameterError for unknown names
  cplx factor(const std::string& name) const;
};

// Exponent of (1 - a_p/a_q) in the Toeplitz pair product.
enum class PairExponent {
  conjecture,  // (delta_p + gamma_p)(delta_q - gamma_q)
  as_printed,  // (gamma_p + delta_q)(delta_q - gamma_q)
};

// Pair-interaction factor of the Wiener-Hopf prediction.
enum class PairProduct {
  ordered,    // prod_{k != p} ((d + i)^2 / ((d + 2i) d))^{nubar_k nu_p}, d = a_k - a_p
  symmetric,  // prod_{k < p} (((d^2 + 1)^2) / ((d^2 + 4) d^2))^{nubar_k nu_p}
};

std::string to_string(PairExponent e);
std::string to_string(PairProduct p);

// Sub-leading terms at size m. In ln det T_m they enter as nosc/m and
// osc/m^2; osc already carries its m^{2(delta_l - delta_p)} drift and
// (a_p/a_l)^m phase.
struct CorrectionData {
  cplx osc = 0.0;
  cplx nosc = 0.0;
  cplx omega1_00 = 0.0;
  cplx omega2_00 = 0.0;
};

// Leading and first sub-leading large-m behaviour of det T_m for one circle
// symbol. The Wiener-Hopf factorization is computed once.
class ToeplitzAsymptotics {
 public:
  explicit ToeplitzAsymptotics(const SymbolSpec& spec);

  AsymptoticPrediction leading(int m, PairExponent pair = PairExponent::conjecture) const;
  CorrectionData subleading(int m) const;

  // d/dz ln K_p at a_p (central differences, one Richardson step)
  cplx dlog_k(std::size_t p, int m) const;
  const SymbolFactorization& factorization() const { return fac_; }

 private:
  SymbolFactorization fac_;
  cplx log_b_plus(cplx z) const;
  cplx log_b_minus(cplx z) const;
};

AsymptoticPrediction toeplitz_leading(const SymbolSpec& spec, int m, PairExponent pair = PairExponent::conjecture);
CorrectionData toeplitz_subleading(const SymbolSpec& spec, int m);

// Leading large-x behaviour of det2 for a line symbol. Everything except
// the x-dependence is computed in the constructor.
class WienerHopfAsymptotics {
 public:
  explicit WienerHopfAsymptotics(const SymbolSpec& spec);

  AsymptoticPrediction leading(double x, PairProduct pair = PairProduct::ordered) const;
  // int dxi/2pi (ln sigma + 1 - sigma)
  cplx bulk_density() const { return bulk_; }

 private:
  SymbolSpec spec_;
  cplx bulk_ = 0.0;
  cplx log_e_ = 0.0;
  cplx local_ = 0.0;
};

AsymptoticPrediction wh_leading(const SymbolSpec& spec, double x, PairProduct pair = PairProduct::ordered);

// int dxi/2pi (ln sigma + 1 - sigma), split at the singular points.
cplx log_g2_density(const SymbolSpec& spec);

struct TauPhi {
  cplx tau;
  cplx phi;
};

TauPhi tau_phi(cplx gamma_exp, cplx delta, double t);

// Diagonal of the zeroth-order resolvent at xi. Bulk form farther than the
// disk radius from every a_p, local form inside a disk; exactly on a disk
// boundary the branch is ambiguous and DomainError is thrown.
cplx r0_diagonal(const SymbolSpec& spec, double x, double xi);

}  // namespace fhdet
