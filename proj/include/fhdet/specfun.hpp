#pragma once

#include <vector>

#include "fhdet/core.hpp"

namespace fhdet {

// |z| above which the large-argument expansions of Phi and Psi are tried first.
inline constexpr double kKummerSwitchRadius = 30.0;

// Tolerance used to decide that an argument sits on a pole.
inline constexpr double kPoleTolerance = 1e-12;

enum class CutSide { none, above, below };

// log Gamma(z) on the principal branch (continuous off the negative axis).
cplx log_gamma(cplx z);
cplx gamma(cplx z);

// Product of Gamma(num) over product of Gamma(den). A pole in the denominator
// gives 0, a pole in the numerator throws PoleError.
cplx gamma_ratio(const std::vector<cplx>& num, const std::vector<cplx>& den);

cplx digamma(cplx z);

cplx log_barnes_g(cplx z);
cplx barnes_g(cplx z);

// Kummer Phi(a, c; z) = 1F1.
cplx kummer_phi(cplx a, cplx c, cplx z);
cplx kummer_phi_dz(cplx a, cplx c, cplx z);

// The two regimes, exposed so the overlap band can be checked directly.
// kummer_phi_convergent covers the whole plane (power series near the origin,
// Taylor continuation of the differential equation further out).
cplx kummer_phi_convergent(cplx a, cplx c, cplx z);
// Large-|z| expansion; err receives an absolute error estimate.
cplx kummer_phi_asymptotic(cplx a, cplx c, cplx z, double* err = nullptr);

// Tricomi Psi(a, c; z) = U(a, c, z), principal branch. On the negative real
// axis a side must be given.
cplx tricomi_psi(cplx a, cplx c, cplx z, CutSide side = CutSide::none);

// Psi continued to the sheet arg z + 2 pi k, built from the Phi connection
// formula. Requires non-integer c.
cplx tricomi_psi_sheet(cplx a, cplx c, cplx z, int k);

// 2F1 for |z| < 0.95 (series) or |z| > 1.05 (1/z continuation).
cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z);

// Appell F2(a; b, b'; c, c'; y, z) for |y| + |z| < 1.
cplx appell_f2(cplx a, cplx b1, cplx b2, cplx c1, cplx c2, cplx y, cplx z);

}  // namespace fhdet
