#include "fhdet/factorization.hpp"

#include <algorithm>
#include <limits>

#include "fhdet/quadrature.hpp"

namespace fhdet {

// ---------------------------------------------------------------------------
// Circle

cplx SzegoData::log_coeff(int k) const {
  if (std::abs(k) > truncation_K) return 0.0;
  return fourier_log_coeffs[std::size_t(k + truncation_K)];
}

cplx SzegoData::log_b_plus(cplx z) const {
  cplx s = 0.0;
  for (int k = truncation_K; k >= 1; --k) s = (s + log_coeff(-k)) * z;
  return s;
}

cplx SzegoData::log_b_minus(cplx z) const {
  cplx s = 0.0, zi = 1.0 / z;
  for (int k = truncation_K; k >= 1; --k) s = (s + log_coeff(k)) * zi;
  return s;
}

SzegoData szego_constants(const RegularPart& regular, int K) {
  if (K < 1) throw ParameterError("szego_constants: K must be positive");
  SzegoData d;
  if (regular.identity) {
    d.truncation_K = K;
    d.fourier_log_coeffs.assign(std::size_t(2 * K + 1), 0.0);
    return d;
  }
  for (;; K *= 2) {
    if (K > 4096) throw ConvergenceError("szego_constants: [ln b]_k does not decay by K = 4096");
    int N = 1;
    while (N < 8 * K) N *= 2;
    // continuous logarithm along the circle
    std::vector<cplx> lb(static_cast<std::size_t>(N));
    std::vector<cplx> roots(static_cast<std::size_t>(N));
    cplx prev = regular(1.0);
    double phase = std::arg(prev);
    for (int j = 0; j < N; ++j) {
      roots[j] = std::polar(1.0, kTwoPi * j / N);
      cplx v = regular(roots[j]);
      if (std::abs(v) == 0.0 || !is_finite(v)) throw DomainError("szego_constants: b vanishes or diverges");
      if (j > 0) phase += std::arg(v / prev);
      lb[j] = cplx(std::log(std::abs(v)), phase);
      prev = v;
    }
    double closing = phase + std::arg(regular(1.0) / prev) - std::arg(regular(1.0));
    if (std::abs(closing) > kPi) throw ParameterError("szego_constants: b has non-zero winding number");
    d.truncation_K = K;
    d.fourier_log_coeffs.assign(std::size_t(2 * K + 1), 0.0);
    for (int k = -K; k <= K; ++k) {
      cplx s = 0.0;
      long long kk = ((k % N) + N) % N;
      for (int j = 0; j < N; ++j) s += lb[j] * roots[std::size_t((kk * j) % N)];
      d.fourier_log_coeffs[std::size_t(k + K)] = s / double(N);
    }
    d.tail = std::max(std::abs(d.log_coeff(K)), std::abs(d.log_coeff(-K)));
    if (d.tail < 1e-14) break;
  }
  d.g_of_b = std::exp(d.log_coeff(0));
  cplx s = 0.0;
  for (int k = d.truncation_K; k >= 1; --k) s += double(k) * d.log_coeff(k) * d.log_coeff(-k);
  d.e_of_b = std::exp(s);
  return d;
}

namespace {

bool series_converges(const SzegoData& d, cplx w) {
  // last retained term of a series in w^k
  int K = d.truncation_K;
  double a = std::max(std::abs(d.log_coeff(K)), std::abs(d.log_coeff(-K)));
  double r = std::abs(w);
  if (r <= 1.0) return true;
  return a * std::pow(r, K) < 1e-12;
}

}  // namespace

CircleFactors wh_factor_circle(const SzegoData& data, cplx z) {
  if (z == cplx(0.0)) return {cplx(1.0), std::nullopt};
  CircleFactors out;
  double r = std::abs(z);
  if (std::abs(r - 1.0) < 1e-14) {
    // radial limits with one Richardson step
    const double r1 = 1.0 - 1e-6, r2 = 1.0 - 5e-7;
    cplx u = z / r;
    cplx lp = 2.0 * data.log_b_plus(r2 * u) - data.log_b_plus(r1 * u);
    cplx lm = 2.0 * data.log_b_minus(u / r2) - data.log_b_minus(u / r1);
    out.b_plus = std::exp(lp);
    out.b_minus = std::exp(lm);
    return out;
  }
  if (series_converges(data, z)) out.b_plus = std::exp(data.log_b_plus(z));
  if (series_converges(data, 1.0 / z)) out.b_minus = std::exp(data.log_b_minus(z));
  if (!out.b_plus && !out.b_minus) throw ConvergenceError("wh_factor_circle: neither series converges at z");
  return out;
}

// ---------------------------------------------------------------------------
// Line

namespace {
constexpr double kBoundaryOffset = 1e-6;
}

LineFactorization::LineFactorization(RegularPart F) : F_(std::move(F)) {}

cplx LineFactorization::log_f(cplx z) const { return std::log(F_(z)); }

cplx LineFactorization::cauchy(cplx z) const {
  const double x0 = z.real();
  const bool upper = z.imag() > 0;
  const cplx g0 = log_f(x0);
  const double h = 1e-4;
  // any slope works here; it only has to make the integrand smooth near x0
  const cplx g1 = (log_f(x0 + h) - log_f(x0 - h)) / (2.0 * h);
  auto r = [&](double xi) {
    double u = xi - x0;
    double hh = 1.0 / (1.0 + u * u);
    return (log_f(xi) - g0 * hh - g1 * u * hh) / (xi - z);
  };
  double e1 = 0, e2 = 0;
  const double inf = std::numeric_limits<double>::infinity();
  cplx I = integrate_nothrow(r, -inf, x0, 1e-13, &e1, 15) + integrate_nothrow(r, x0, inf, 1e-13, &e2, 15);
  // int h/(xi - z) and int u h/(xi - z) in closed form by residues
  cplx J0 = upper ? kPi / (x0 - kI - z) : kPi / (x0 + kI - z);
  cplx J1 = upper ? -kPi * kI / (x0 - kI - z) : kPi * kI / (x0 + kI - z);
  I += g0 * J0 + g1 * J1;
  return I / (kTwoPi * kI);
}

cplx LineFactorization::log_f_plus(cplx z) const {
  if (F_.identity) return 0.0;
  if (z.imag() > 0) return cauchy(z);
  if (z.imag() < 0) return log_f(z) + cauchy(z);
  const double e = kBoundaryOffset;
  return 2.0 * cauchy(cplx(z.real(), 0.5 * e)) - cauchy(cplx(z.real(), e));
}

cplx LineFactorization::log_f_minus(cplx z) const {
  if (F_.identity) return 0.0;
  if (z.imag() < 0) return -cauchy(z);
  if (z.imag() > 0) return log_f(z) - cauchy(z);
  const double e = kBoundaryOffset;
  return -(2.0 * cauchy(cplx(z.real(), -0.5 * e)) - cauchy(cplx(z.real(), -e)));
}

cplx LineFactorization::log_f_ratio(cplx z) const {
  if (F_.identity) return 0.0;
  if (z.imag() > 0) return log_f(z) - 2.0 * cauchy(z);
  if (z.imag() < 0) return -log_f(z) - 2.0 * cauchy(z);
  const double e = kBoundaryOffset;
  return log_f(z) - 2.0 * (2.0 * cauchy(cplx(z.real(), 0.5 * e)) - cauchy(cplx(z.real(), e)));
}

cplx wh_factor_line(const RegularPart& regular, cplx z, HalfPlane half) {
  if (half == HalfPlane::upper && z.imag() < 0) throw DomainError("wh_factor_line: F_+ needs Im z >= 0");
  if (half == HalfPlane::lower && z.imag() > 0) throw DomainError("wh_factor_line: F_- needs Im z <= 0");
  LineFactorization lf(regular);
  cplx l = half == HalfPlane::upper ? lf.log_f_plus(z) : lf.log_f_minus(z);
  return checked(std::exp(l), "wh_factor_line");
}

cplx log_e_of_f(const RegularPart& regular) {
  if (regular.identity) return 0.0;
  auto lnF = [&](cplx xi) { return std::log(regular(xi)); };
  const double L = 40.0;
  for (double T : {40.0, 80.0, 160.0}) {
    FourierIntegral ft(lnF, L, T);
    NodeSet nodes;
    for (double a = 0; a < T - 1e-12; a += 1.0) append_gl(nodes, a, a + 1.0, 16);
    cplx s = 0.0;
    double last = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double t = nodes.x[j];
      cplx v = t * ft(t) * ft(-t) / (kTwoPi * kTwoPi);
      s += nodes.w[j] * v;
      if (t > T - 1.0) last = std::max(last, std::abs(v));
    }
    if (last < 1e-15) return s;
  }
  throw ConvergenceError("e_of_f: inverse transform of ln F has not decayed by t = 160");
}

cplx e_of_f(const RegularPart& regular) { return std::exp(log_e_of_f(regular)); }

// ---------------------------------------------------------------------------
// alpha and K_p

SymbolFactorization::SymbolFactorization(SymbolSpec spec) : spec_(std::move(spec)) {
  if (spec_.geometry == Geometry::circle)
    szego_ = std::make_shared<SzegoData>(szego_constants(spec_.regular));
  else
    line_ = std::make_shared<LineFactorization>(spec_.regular);
  double gap = spec_.geometry == Geometry::line ? 1.5 : 0.75;
  auto& s = spec_.singularities;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) gap = std::min(gap, std::abs(s[i].location - s[j].location));
  eps_ = gap / 3.0;
}

const SzegoData& SymbolFactorization::szego() const {
  if (!szego_) throw ParameterError("szego: line symbol");
  return *szego_;
}

cplx SymbolFactorization::log_plus(cplx z) const {
  return szego_ ? szego_->log_b_plus(z) : line_->log_f_plus(z);
}

cplx SymbolFactorization::log_minus(cplx z) const {
  return szego_ ? szego_->log_b_minus(z) : line_->log_f_minus(z);
}

cplx SymbolFactorization::alpha_up(cplx z) const {
  cplx s = 0.0;
  if (szego_) {
    s = -szego_->log_b_plus(z) - szego_->log_coeff(0);
    for (auto& k : spec_.singularities) s += k.nu * std::log(1.0 - z / k.location);
  } else {
    s = -line_->log_f_plus(z);
    for (auto& k : spec_.singularities) s += k.nu * std::log((z - k.location) / (z - k.location + kI));
  }
  return checked(std::exp(s), "alpha_up");
}

cplx SymbolFactorization::alpha_down(cplx z) const {
  cplx s = 0.0;
  if (szego_) {
    s = szego_->log_b_minus(z);
    for (auto& k : spec_.singularities) s -= k.nubar * std::log(1.0 - k.location / z);
  } else {
    s = line_->log_f_minus(z);
    for (auto& k : spec_.singularities) s += k.nubar * std::log((z - k.location - kI) / (z - k.location));
  }
  return checked(std::exp(s), "alpha_down");
}

cplx SymbolFactorization::alpha_hat_up(std::size_t p, cplx z) const {
  return alpha_up(z) * std::exp(-spec_.singularities.at(p).nu * std::log(z - spec_.singularities[p].location));
}

cplx SymbolFactorization::alpha_hat_down(std::size_t p, cplx z) const {
  return alpha_down(z) * std::exp(spec_.singularities.at(p).nubar * std::log(z - spec_.singularities[p].location));
}

cplx SymbolFactorization::log_alpha_hat_up(std::size_t p, cplx z) const {
  if (!line_) throw ParameterError("log_alpha_hat_up: line symbols only");
  const auto& S = spec_.singularities;
  cplx s = -line_->log_f_plus(z) - S.at(p).nu * std::log(z - S[p].location + kI);
  for (std::size_t k = 0; k < S.size(); ++k)
    if (k != p) s += S[k].nu * std::log((z - S[k].location) / (z - S[k].location + kI));
  return s;
}

cplx SymbolFactorization::log_alpha_hat_down(std::size_t p, cplx z) const {
  if (!line_) throw ParameterError("log_alpha_hat_down: line symbols only");
  const auto& S = spec_.singularities;
  cplx s = line_->log_f_minus(z) + S.at(p).nubar * std::log(z - S[p].location - kI);
  for (std::size_t k = 0; k < S.size(); ++k)
    if (k != p) s += S[k].nubar * std::log((z - S[k].location - kI) / (z - S[k].location));
  return s;
}

namespace {

// (1 - w) / (-log w), analytic at w = 1
cplx ratio_one_minus_over_log(cplx w) {
  cplx u = w - 1.0;
  if (std::abs(u) < 1e-3) return 1.0 / (1.0 - u / 2.0 + u * u / 3.0 - u * u * u / 4.0);
  return (1.0 - w) / (-std::log(w));
}

}  // namespace

cplx SymbolFactorization::log_k_p(std::size_t p, cplx z, double scale) const {
  const auto& S = spec_.singularities;
  const FHSingularity& sp = S.at(p);
  if (std::abs(z - sp.location) > eps_ * (1 + 1e-12)) throw DomainError("k_p: z outside the disk around a_p");
  if (!(scale > 0)) throw ParameterError("k_p: scale must be positive");
  cplx s = 0.0;
  if (line_) {
    double ap = sp.location.real();
    s = 2.0 * sp.delta * std::log(scale) - kI * scale * ap + line_->log_f_ratio(z);
    for (auto& k : S) s += k.nubar * std::log(z - k.location - kI) - k.nu * std::log(z - k.location + kI);
    for (std::size_t k = 0; k < S.size(); ++k) {
      if (k == p) continue;
      double ak = S[k].location.real();
      if (ak < ap)
        s += S[k].nu * std::log(z - ak) - S[k].nubar * std::log(z - ak);
      else
        s += S[k].nu * std::log(ak - z) - S[k].nubar * std::log(ak - z) + kTwoPi * kI * S[k].gamma_exp;
    }
    return s;
  }
  cplx a = sp.location, w = z / a;
  int m = int(std::lround(scale));
  s = szego_->log_b_minus(z) - szego_->log_b_plus(z) - kI * kPi * sp.gamma_exp -
      2.0 * sp.delta * std::log(ratio_one_minus_over_log(w)) + 2.0 * sp.delta * std::log(scale) -
      double(m) * std::log(a) + sp.nubar * std::log(w);
  for (std::size_t r = 0; r < S.size(); ++r) {
    if (r == p) continue;
    s += S[r].nu * std::log(1.0 - z / S[r].location) - S[r].nubar * std::log(1.0 - S[r].location / z);
  }
  return s;
}

cplx SymbolFactorization::k_p(std::size_t p, cplx z, double scale) const {
  return checked(std::exp(log_k_p(p, z, scale)), "k_p");
}

cplx alpha_eval(const SymbolSpec& spec, cplx z, Side side) {
  SymbolFactorization f(spec);
  for (auto& k : spec.singularities)
    if (std::abs(z - k.location) < 1e-300) throw SingularPointError("alpha_eval: z at a singularity");
  bool upper;
  if (spec.geometry == Geometry::line) {
    if (z.imag() != 0.0) {
      upper = z.imag() > 0;
    } else {
      if (side == Side::principal) throw DomainError("alpha_eval: z on the contour needs a side");
      upper = side == Side::above;
    }
    return upper ? f.alpha_up(z) : f.alpha_down(z);
  }
  double r = std::abs(z);
  if (std::abs(r - 1.0) > 1e-14) return r < 1.0 ? f.alpha_up(z) : f.alpha_down(z);
  if (side == Side::principal) throw DomainError("alpha_eval: z on the circle needs a side");
  const double r1 = 1.0 - 1e-6, r2 = 1.0 - 5e-7;
  cplx u = z / r;
  if (side == Side::above) return std::exp(2.0 * std::log(f.alpha_up(r2 * u)) - std::log(f.alpha_up(r1 * u)));
  return std::exp(2.0 * std::log(f.alpha_down(u / r2)) - std::log(f.alpha_down(u / r1)));
}

cplx k_p_eval(const SymbolSpec& spec, std::size_t p, cplx z, double scale) {
  return SymbolFactorization(spec).k_p(p, z, scale);
}

}  // namespace fhdet
