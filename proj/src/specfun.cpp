#include "fhdet/specfun.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "fhdet/quadrature.hpp"

namespace fhdet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// B_{2k} / (2k (2k - 1)) for the Stirling series
constexpr std::array<double, 9> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,          1.0 / 1260.0,        -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,     1.0 / 156.0,         -3617.0 / 122400.0,
    43867.0 / 244188.0};

// B_{2k} / (2k) for the digamma series
constexpr std::array<double, 9> kDigamma = {
    1.0 / 12.0,      -1.0 / 120.0,     1.0 / 252.0,      -1.0 / 240.0,      1.0 / 132.0,
    -691.0 / 32760.0, 1.0 / 12.0,      -3617.0 / 8160.0, 43867.0 / 14364.0};

void require_not_pole(cplx z, const char* where) {
  if (nonpositive_integer_distance(z) < kPoleTolerance)
    throw PoleError(std::string(where) + ": argument at a pole");
}

// cot(pi z) without overflow for large |Im z|
cplx cot_pi(cplx z) {
  if (z.imag() >= 0) {
    cplx p = std::exp(kTwoPi * kI * z);
    return kI * (p + 1.0) / (p - 1.0);
  }
  cplx q = std::exp(-kTwoPi * kI * z);
  return kI * (1.0 + q) / (1.0 - q);
}

}  // namespace

cplx log_gamma(cplx z) {
  require_not_pole(z, "log_gamma");
  cplx shift = 0.0;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  cplx zi = 1.0 / z, zi2 = zi * zi;
  cplx series = 0.0, p = zi;
  for (double b : kStirling) {
    series += b * p;
    p *= zi2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(kTwoPi) + series - shift;
}

cplx gamma(cplx z) { return checked(std::exp(log_gamma(z)), "gamma"); }

cplx gamma_ratio(const std::vector<cplx>& num, const std::vector<cplx>& den) {
  for (cplx z : num) require_not_pole(z, "gamma_ratio");
  for (cplx z : den)
    if (nonpositive_integer_distance(z) < kPoleTolerance) return 0.0;
  cplx s = 0.0;
  for (cplx z : num) s += log_gamma(z);
  for (cplx z : den) s -= log_gamma(z);
  return checked(std::exp(s), "gamma_ratio");
}

cplx digamma(cplx z) {
  require_not_pole(z, "digamma");
  if (z.real() < 0.5) return digamma(1.0 - z) - kPi * cot_pi(z);
  cplx shift = 0.0;
  while (z.real() < 15.0) {
    shift += 1.0 / z;
    z += 1.0;
  }
  cplx zi = 1.0 / z, zi2 = zi * zi;
  cplx series = 0.0, p = zi2;
  for (double b : kDigamma) {
    series += b * p;
    p *= zi2;
  }
  return std::log(z) - 0.5 * zi - series - shift;
}

cplx log_barnes_g(cplx z) {
  if (nonpositive_integer_distance(z) < kPoleTolerance)
    throw PoleError("log_barnes_g: G vanishes at non-positive integers");
  cplx w = z - 1.0;
  if (w.real() <= -0.5) return log_barnes_g(z + 1.0) - log_gamma(z);
  // log G(1 + w) = (w/2) log 2pi - w(w-1)/2 + int_0^w t psi(t) dt, with
  // t psi(t) = t psi(1 + t) - 1 keeping the integrand regular at 0
  auto f = [w](double s) { return s * digamma(1.0 + w * s); };
  double err = 0.0;
  cplx I = integrate_nothrow(f, 0.0, 1.0, 1e-13, &err, 12);
  return 0.5 * w * std::log(kTwoPi) - 0.5 * w * (w - 1.0) - w + w * w * I;
}

cplx barnes_g(cplx z) {
  if (nonpositive_integer_distance(z) < kPoleTolerance) return 0.0;
  return checked(std::exp(log_barnes_g(z)), "barnes_g");
}

// ---------------------------------------------------------------------------
// Confluent hypergeometric functions

namespace {

void require_c(cplx c) {
  if (nonpositive_integer_distance(c) < kPoleTolerance)
    throw ParameterError("kummer: c must not be a non-positive integer");
}

bool nonpositive_integer(cplx a) { return nonpositive_integer_distance(a) < kPoleTolerance; }

cplx phi_series(cplx a, cplx c, cplx z) {
  cplx sum = 1.0, t = 1.0;
  int small = 0;
  for (int n = 1; n < 20000; ++n) {
    t *= (a + double(n - 1)) / ((c + double(n - 1)) * double(n)) * z;
    sum += t;
    if (t == cplx(0.0)) return sum;
    if (std::abs(t) < 1e-17 * std::abs(sum) && double(n) > std::abs(z)) {
      if (++small == 2) return sum;
    } else {
      small = 0;
    }
  }
  throw ConvergenceError("kummer_phi: power series did not converge");
}

// Advance (w, w') of z w'' + (c - z) w' - a w = 0 from z0 to z1 along the
// straight segment by Taylor steps.
void ode_step(cplx a, cplx c, cplx z0, cplx z1, cplx& w, cplx& dw) {
  cplx z = z0;
  for (int guard = 0; guard < 100000; ++guard) {
    cplx rem = z1 - z;
    if (std::abs(rem) == 0.0) return;
    double hmax = std::min(0.5 * std::abs(z), 2.0);
    cplx h = std::abs(rem) <= hmax ? rem : rem * (hmax / std::abs(rem));
    // u_k = y_k h^k
    cplx u0 = w, u1 = dw * h;
    cplx val = u0 + u1, dval = u1;
    double scale = std::abs(u0) + std::abs(u1);
    int small = 0;
    for (int k = 0; k < 2000; ++k) {
      double kk = double(k);
      cplx u2 = ((kk + a) * u0 * h * h - (kk + 1.0) * (kk + c - z) * u1 * h) /
                (z * (kk + 1.0) * (kk + 2.0));
      val += u2;
      dval += (kk + 2.0) * u2;
      scale = std::max(scale, std::abs(u2));
      u0 = u1;
      u1 = u2;
      if (std::abs(u0) + std::abs(u1) < 1e-18 * scale) {
        if (++small == 3) break;
      } else {
        small = 0;
      }
      if (k == 1999) throw ConvergenceError("kummer: Taylor continuation did not converge");
    }
    w = val;
    dw = dval / h;
    z += h;
    if (!is_finite(w) || !is_finite(dw)) throw OverflowError("kummer: continuation overflowed");
  }
  throw ConvergenceError("kummer: too many continuation steps");
}

// Sum of an asymptotic series with optimal truncation. next(n) gives the
// ratio t_n / t_{n-1}.
template <class Ratio>
cplx asymptotic_sum(Ratio next, double* err) {
  cplx sum = 1.0, t = 1.0;
  double last = 1.0;
  for (int n = 1; n < 400; ++n) {
    cplx tn = t * next(n);
    double m = std::abs(tn);
    if (m > last) {
      *err = last;
      return sum;
    }
    sum += tn;
    t = tn;
    last = m;
    if (m < kEps * 0.1 * std::abs(sum)) {
      *err = m;
      return sum;
    }
  }
  *err = last;
  return sum;
}

constexpr double kSeriesRadius = 4.0;

}  // namespace

cplx kummer_phi_convergent(cplx a, cplx c, cplx z) {
  require_c(c);
  if (z == cplx(0.0)) return 1.0;
  if (nonpositive_integer(a)) return phi_series(a, c, z);
  if (z.real() < 0.0) {
    // Kummer transformation keeps the series free of cancellation
    cplx b = c - a;
    return checked(std::exp(z) * kummer_phi_convergent(b, c, -z), "kummer_phi");
  }
  if (std::abs(z) <= kSeriesRadius) return phi_series(a, c, z);
  cplx z0 = z * (kSeriesRadius / std::abs(z));
  cplx w = phi_series(a, c, z0);
  cplx dw = a / c * phi_series(a + 1.0, c + 1.0, z0);
  ode_step(a, c, z0, z, w, dw);
  return checked(w, "kummer_phi");
}

cplx kummer_phi_asymptotic(cplx a, cplx c, cplx z, double* err) {
  require_c(c);
  if (z == cplx(0.0)) throw DomainError("kummer_phi_asymptotic: z = 0");
  double eps = z.imag() < 0 ? -1.0 : 1.0;
  cplx lz = std::log(z);
  double e1 = 0.0, e2 = 0.0;
  cplx s1 = asymptotic_sum(
      [&](int n) { return (a + double(n - 1)) * (a - c + double(n)) / (double(n) * (-z)); }, &e1);
  cplx s2 = asymptotic_sum(
      [&](int n) { return (c - a + double(n - 1)) * (double(n) - a) / (double(n) * z); }, &e2);
  cplx p1 = gamma_ratio({c}, {c - a});
  if (p1 != cplx(0.0)) p1 *= std::exp(a * (kI * kPi * eps - lz));
  cplx p2 = gamma_ratio({c}, {a});
  if (p2 != cplx(0.0)) p2 *= std::exp(z + (a - c) * lz);
  cplx v = p1 * s1 + p2 * s2;
  if (err) *err = std::abs(p1) * e1 + std::abs(p2) * e2 + kEps * (std::abs(p1 * s1) + std::abs(p2 * s2));
  return checked(v, "kummer_phi_asymptotic");
}

cplx kummer_phi(cplx a, cplx c, cplx z) {
  require_c(c);
  if (std::abs(z) >= kKummerSwitchRadius && !nonpositive_integer(a) && !nonpositive_integer(c - a)) {
    double err = 0.0;
    cplx v = kummer_phi_asymptotic(a, c, z, &err);
    if (err <= 1e-13 * std::abs(v)) return v;
  }
  return kummer_phi_convergent(a, c, z);
}

cplx kummer_phi_dz(cplx a, cplx c, cplx z) {
  require_c(c);
  return a / c * kummer_phi(a + 1.0, c + 1.0, z);
}

namespace {

cplx psi_asymptotic(cplx a, cplx c, cplx z, double* err) {
  cplx s = asymptotic_sum(
      [&](int n) { return -(a + double(n - 1)) * (a - c + double(n)) / (double(n) * z); }, err);
  cplx p = std::exp(-a * std::log(z));
  *err = *err * std::abs(p) + kEps * std::abs(p * s);
  return p * s;
}

cplx psi_connection(cplx a, cplx c, cplx z) {
  cplx t1 = gamma_ratio({1.0 - c}, {a - c + 1.0});
  if (t1 != cplx(0.0)) t1 *= kummer_phi(a, c, z);
  cplx t2 = gamma_ratio({c - 1.0}, {a});
  if (t2 != cplx(0.0)) t2 *= std::exp((1.0 - c) * std::log(z)) * kummer_phi(a - c + 1.0, 2.0 - c, z);
  return t1 + t2;
}

constexpr double kIntegerC = 1e-6;

cplx psi_core(cplx a, cplx c, cplx z) {
  if (std::abs(z) >= kKummerSwitchRadius) {
    double err = 0.0;
    cplx v = psi_asymptotic(a, c, z, &err);
    if (err <= 1e-13 * std::abs(v)) return v;
  }
  bool int_c = std::abs(c.imag()) < kIntegerC && std::abs(c.real() - std::round(c.real())) < kIntegerC;
  bool step = int_c ? z.real() > 0.0 : z.real() > 4.0;
  if (step) {
    double R = kKummerSwitchRadius + 8.0;
    cplx zf = z * (R / std::abs(z));
    double e1 = 0.0, e2 = 0.0;
    cplx w = psi_asymptotic(a, c, zf, &e1);
    cplx dw = -a * psi_asymptotic(a + 1.0, c + 1.0, zf, &e2);
    ode_step(a, c, zf, z, w, dw);
    return w;
  }
  if (!int_c) return psi_connection(a, c, z);
  // integer c: Psi is smooth in c, so extrapolate symmetric averages
  cplx n = std::round(c.real());
  double h = 2e-3;
  auto avg = [&](double d) { return 0.5 * (psi_connection(a, n + d, z) + psi_connection(a, n - d, z)); };
  cplx A1 = avg(h), A2 = avg(0.5 * h);
  return (4.0 * A2 - A1) / 3.0;
}

}  // namespace

cplx tricomi_psi(cplx a, cplx c, cplx z, CutSide side) {
  if (z == cplx(0.0)) throw DomainError("tricomi_psi: z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0) {
    if (side == CutSide::none) throw BranchError("tricomi_psi: z on the branch cut needs a side");
    z = cplx(z.real(), side == CutSide::above ? 0.0 : -0.0);
  }
  return checked(psi_core(a, c, z), "tricomi_psi");
}

cplx tricomi_psi_sheet(cplx a, cplx c, cplx z, int k) {
  if (near_integer(c, kIntegerC)) throw ParameterError("tricomi_psi_sheet: c must not be an integer");
  if (z == cplx(0.0)) throw DomainError("tricomi_psi_sheet: z = 0");
  cplx t1 = gamma_ratio({1.0 - c}, {a - c + 1.0});
  if (t1 != cplx(0.0)) t1 *= kummer_phi(a, c, z);
  cplx t2 = gamma_ratio({c - 1.0}, {a});
  if (t2 != cplx(0.0))
    t2 *= std::exp((1.0 - c) * (std::log(z) + kTwoPi * kI * double(k))) * kummer_phi(a - c + 1.0, 2.0 - c, z);
  return checked(t1 + t2, "tricomi_psi_sheet");
}

// ---------------------------------------------------------------------------
// Gauss and Appell

namespace {

cplx f21_series(cplx a, cplx b, cplx c, cplx z) {
  cplx sum = 1.0, t = 1.0;
  int small = 0;
  for (int n = 1; n < 100000; ++n) {
    double m = double(n - 1);
    t *= (a + m) * (b + m) / ((c + m) * double(n)) * z;
    sum += t;
    if (t == cplx(0.0)) return sum;
    if (std::abs(t) < 1e-17 * std::abs(sum)) {
      if (++small == 2) return sum;
    } else {
      small = 0;
    }
  }
  throw ConvergenceError("gauss_2f1: series did not converge");
}

}  // namespace

cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z) {
  if (nonpositive_integer(c)) throw ParameterError("gauss_2f1: c must not be a non-positive integer");
  double r = std::abs(z);
  if (r < 0.95) return checked(f21_series(a, b, c, z), "gauss_2f1");
  if (r <= 1.05) throw DomainError("gauss_2f1: |z| too close to 1");
  if (near_integer(a - b, kPoleTolerance)) throw DegenerateError("gauss_2f1: a - b is an integer");
  cplx mz = -z, zi = 1.0 / z;
  cplx t1 = gamma_ratio({c, b - a}, {b, c - a});
  if (t1 != cplx(0.0)) t1 *= std::exp(-a * std::log(mz)) * f21_series(a, 1.0 + a - c, 1.0 + a - b, zi);
  cplx t2 = gamma_ratio({c, a - b}, {a, c - b});
  if (t2 != cplx(0.0)) t2 *= std::exp(-b * std::log(mz)) * f21_series(b, 1.0 + b - c, 1.0 + b - a, zi);
  return checked(t1 + t2, "gauss_2f1");
}

cplx appell_f2(cplx a, cplx b1, cplx b2, cplx c1, cplx c2, cplx y, cplx z) {
  if (nonpositive_integer(c1) || nonpositive_integer(c2))
    throw ParameterError("appell_f2: c, c' must not be non-positive integers");
  if (std::abs(y) + std::abs(z) >= 1.0) throw DomainError("appell_f2: needs |y| + |z| < 1");
  // sum over m of (a)_m (b')_m / (m! (c')_m) z^m * 2F1(a + m, b; c; y)
  cplx total = 0.0, outer = 1.0;
  int small = 0;
  for (int m = 0; m < 20000; ++m) {
    if (m > 0) {
      double k = double(m - 1);
      outer *= (a + k) * (b2 + k) / ((c2 + k) * double(m)) * z;
    }
    cplx term = outer * f21_series(a + double(m), b1, c1, y);
    total += term;
    if (std::abs(term) < 1e-17 * std::abs(total) || term == cplx(0.0)) {
      if (++small == 3) return checked(total, "appell_f2");
    } else {
      small = 0;
    }
  }
  throw ConvergenceError("appell_f2: series did not converge");
}

}  // namespace fhdet
