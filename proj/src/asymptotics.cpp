#include "fhdet/asymptotics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "fhdet/quadrature.hpp"
#include "fhdet/specfun.hpp"

namespace fhdet {

cplx AsymptoticPrediction::factor(const std::string& name) const {
  for (auto& f : factors)
    if (f.name == name) return f.log_value;
  throw ParameterError("AsymptoticPrediction: no factor named " + name);
}

std::string to_string(PairExponent e) { return e == PairExponent::conjecture ? "conjecture" : "as_printed"; }
std::string to_string(PairProduct p) { return p == PairProduct::ordered ? "ordered" : "symmetric"; }

namespace {

double rho_of(const SymbolSpec& spec) {
  double r = 0.0;
  for (auto& s : spec.singularities) r = std::max(r, 2.0 * std::abs(s.delta.real()));
  return r;
}

cplx barnes_factor(const FHSingularity& s) {
  const cplx g = s.gamma_exp, d = s.delta;
  return log_barnes_g(1.0 - g + d) + log_barnes_g(1.0 - g - d) - log_barnes_g(1.0 - 2.0 * g);
}

AsymptoticPrediction assemble(std::vector<PredictionFactor> f, double rho, double order) {
  AsymptoticPrediction p;
  p.factors = std::move(f);
  for (auto& x : p.factors) p.log_leading += x.log_value;
  p.rho = rho;
  p.correction_order = order;
  return p;
}

cplx pochhammer(cplx a, int n) {
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= a + double(k);
  return r;
}

// u / log(1 + u) at w = 1 + u, analytic at u = 0
cplx u_over_log(cplx w) {
  cplx u = w - 1.0;
  if (std::abs(u) < 1e-3) return 1.0 / (1.0 - u / 2.0 + u * u / 3.0 - u * u * u / 4.0);
  return u / std::log(w);
}

struct Mat2 {
  cplx a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
};

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22, x.a21 * y.a11 + x.a22 * y.a21,
          x.a21 * y.a12 + x.a22 * y.a22};
}
Mat2 operator*(cplx c, const Mat2& x) { return {c * x.a11, c * x.a12, c * x.a21, c * x.a22}; }
Mat2 operator+(const Mat2& x, const Mat2& y) {
  return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
}
Mat2 operator-(const Mat2& x, const Mat2& y) { return x + (-1.0) * y; }

// log(b/a - 1) for a, b on the unit circle. At opposite points the two
// orders land on either side of the cut, as the limit from nearby points does.
cplx log_chord(cplx b, cplx a) {
  double phi = std::remainder(std::arg(b) - std::arg(a), kTwoPi);
  return {std::log(2.0 * std::abs(std::sin(phi / 2))), phi / 2 + (phi > 0 ? kPi / 2 : -kPi / 2)};
}

// central difference with one Richardson step
template <class F>
auto derivative(F f, cplx z0, double h) {
  auto d = [&](double s) { return (1.0 / (2.0 * s)) * (f(z0 + s) - f(z0 - s)); };
  auto d1 = d(h), d2 = d(h / 2);
  return (4.0 / 3.0) * d2 - (1.0 / 3.0) * d1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Toeplitz

ToeplitzAsymptotics::ToeplitzAsymptotics(const SymbolSpec& spec) : fac_(spec) {
  if (spec.geometry != Geometry::circle) throw ParameterError("ToeplitzAsymptotics: circle symbol required");
}

cplx ToeplitzAsymptotics::log_b_plus(cplx z) const { return fac_.szego().log_b_plus(z); }
cplx ToeplitzAsymptotics::log_b_minus(cplx z) const { return fac_.szego().log_b_minus(z); }

AsymptoticPrediction ToeplitzAsymptotics::leading(int m, PairExponent pair) const {
  if (m < 2) throw ParameterError("toeplitz_leading: m must be at least 2");
  const auto& S = fac_.spec().singularities;
  const SzegoData& sz = fac_.szego();
  cplx alg = 0.0, barnes = 0.0, local = 0.0, pairs = 0.0;
  for (auto& s : S) {
    const cplx g = s.gamma_exp, d = s.delta;
    alg += g * g - d * d;
    barnes += barnes_factor(s);
    local += (g + d) * log_b_plus(s.location) + (g - d) * log_b_minus(s.location);
  }
  for (std::size_t p = 0; p < S.size(); ++p)
    for (std::size_t q = 0; q < S.size(); ++q) {
      if (p == q) continue;
      const auto &sp = S[p], &sq = S[q];
      cplx e = pair == PairExponent::conjecture ? (sp.delta + sp.gamma_exp) * (sq.delta - sq.gamma_exp)
                                                : (sp.gamma_exp + sq.delta) * (sq.delta - sq.gamma_exp);
      pairs += e * std::log(1.0 - sp.location / sq.location);
    }
  double spread = 0.0;
  for (auto& a : S)
    for (auto& b : S) spread = std::max(spread, 2.0 * std::abs((a.delta - b.delta).real()));
  return assemble({{"bulk", double(m) * sz.log_coeff(0)},
                   {"algebraic", std::log(double(m)) * alg},
                   {"szego_constant", std::log(sz.e_of_b)},
                   {"barnes", barnes},
                   {"local_regular", local},
                   {"pair", pairs}},
                  rho_of(fac_.spec()), std::max(-1.0, spread - 2.0));
}

cplx ToeplitzAsymptotics::dlog_k(std::size_t p, int m) const {
  cplx a = fac_.spec().singularities.at(p).location;
  auto lk = [&](cplx z) { return fac_.log_k_p(p, z, double(m)); };
  // the step is taken along a; log K_p is holomorphic in the disk
  auto f = [&](cplx u) { return lk(a * (1.0 + u)); };
  return derivative(f, 0.0, 1e-5) / a;
}

CorrectionData ToeplitzAsymptotics::subleading(int m) const {
  if (m < 2) throw ParameterError("toeplitz_subleading: m must be at least 2");
  const auto& S = fac_.spec().singularities;
  const std::size_t n = S.size();
  for (auto& a : S)
    for (auto& b : S)
      if (std::abs((a.delta - b.delta).real()) >= 0.5)
        throw ParameterError("toeplitz_subleading: needs |Re(delta_l - delta_p)| < 1/2");

  CorrectionData out;
  const double md = double(m);

  // Osc
  auto cross = [&](std::size_t c) {
    cplx s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      cplx ar = S[r].location, ac = S[c].location;
      s += -(S[r].gamma_exp + S[r].delta) * log_chord(ar, ac) + (S[r].gamma_exp - S[r].delta) * log_chord(ac, ar);
    }
    return s;
  };
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t l = 0; l < n; ++l) {
      if (p == l) continue;
      const auto &sp = S[p], &sl = S[l];
      cplx gr = gamma_ratio({1.0 - sl.gamma_exp - sl.delta, 1.0 - sp.gamma_exp + sp.delta},
                            {-sl.gamma_exp + sl.delta, -sp.gamma_exp - sp.delta});
      if (gr == cplx(0.0)) continue;
      cplx ap = sp.location, al = sl.location;
      cplx lb = log_b_minus(al) + log_b_plus(ap) - log_b_plus(al) - log_b_minus(ap);
      double dtheta = std::arg(ap) - std::arg(al);
      cplx osc_phase = std::polar(1.0, std::remainder(md * dtheta, kTwoPi));
      cplx drift = std::exp((2.0 * sl.delta - 2.0 * sp.delta) * std::log(md));
      cplx den = (ap / al - 1.0) * (al / ap - 1.0);
      out.osc += gr * std::exp(lb + cross(l) - cross(p)) * drift * osc_phase / den;
    }

  // Nosc
  for (std::size_t p = 0; p < n; ++p) {
    const cplx g = S[p].gamma_exp, d = S[p].delta;
    cplx w = d * d - g * g;
    if (w != cplx(0.0)) out.nosc += S[p].location * (-w) * dlog_k(p, m);
    out.nosc += 0.5 * w * (w + 2.0);
  }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t l = 0; l < n; ++l) {
      if (p == l) continue;
      cplx wl = S[l].delta * S[l].delta - S[l].gamma_exp * S[l].gamma_exp;
      cplx wp = S[p].delta * S[p].delta - S[p].gamma_exp * S[p].gamma_exp;
      cplx r = S[l].location / S[p].location;
      out.nosc -= 0.5 * wl * wp * (r + 1.0) / (r - 1.0);
    }

  // Omega_1(0), Omega_2(0)
  auto delta_mat = [&](std::size_t p, int ell, cplx s) {
    const cplx g = S[p].gamma_exp, d = S[p].delta;
    cplx K = fac_.k_p(p, s, md);
    cplx b12 = kI * std::exp(-kI * kPi * g) / K * gamma_ratio({1.0 - g + d}, {-g - d});
    cplx b21 = -kI * K * std::exp(kI * kPi * g) * gamma_ratio({1.0 - g - d}, {d - g});
    double sign = (ell % 2) ? -1.0 : 1.0;
    Mat2 D;
    D.a11 = pochhammer(g - d, ell) * pochhammer(-g - d, ell);
    D.a22 = sign * pochhammer(g + d, ell) * pochhammer(d - g, ell);
    // the 1/(delta^2 - gamma^2) of the off-diagonal entries cancels against
    // the first Pochhammer factors
    D.a12 = kI * double(ell) * b12 * sign * pochhammer(g + d + 1.0, ell - 1) * pochhammer(d - g + 1.0, ell - 1);
    D.a21 = -kI * double(ell) * b21 * pochhammer(g - d + 1.0, ell - 1) * pochhammer(1.0 - g - d, ell - 1);
    return D;
  };
  Mat2 om1, om2;
  std::vector<Mat2> d1(n);
  for (std::size_t p = 0; p < n; ++p) {
    d1[p] = delta_mat(p, 1, S[p].location);
    om1 = om1 - d1[p];
  }
  for (std::size_t p = 0; p < n; ++p) {
    cplx a = S[p].location;
    double h = 1e-5 * std::abs(a);
    auto t1 = [&](cplx s) {
      cplx hh = a * u_over_log(s / a);
      return (hh * hh / (2.0 * s)) * delta_mat(p, 2, s);
    };
    om2 = om2 + derivative(t1, a, h);
    auto t3 = [&](cplx s) { return (a * u_over_log(s / a) / s) * delta_mat(p, 1, s); };
    om2 = om2 - a * (d1[p] * derivative(t3, a, h));
    for (std::size_t l = 0; l < n; ++l)
      if (l != p) om2 = om2 + (1.0 / (1.0 - S[l].location / a)) * (d1[p] * d1[l]);
  }
  out.omega1_00 = om1.a11;
  out.omega2_00 = om2.a11;
  return out;
}

AsymptoticPrediction toeplitz_leading(const SymbolSpec& spec, int m, PairExponent pair) {
  return ToeplitzAsymptotics(spec).leading(m, pair);
}

CorrectionData toeplitz_subleading(const SymbolSpec& spec, int m) { return ToeplitzAsymptotics(spec).subleading(m); }

// ---------------------------------------------------------------------------
// Wiener-Hopf

namespace {

// ln sigma + 1 - sigma from l = ln sigma
cplx g2_integrand(cplx l) {
  if (std::abs(l) < 0.1) {
    cplx term = l * l / 2.0, s = 0.0;
    for (int k = 3; k < 14; ++k) {
      s += term;
      term *= l / double(k);
    }
    return -s;
  }
  return l + 1.0 - std::exp(l);
}

}  // namespace

cplx log_g2_density(const SymbolSpec& spec) {
  if (spec.geometry != Geometry::line) throw ParameterError("log_g2_density: line symbol required");
  std::vector<FHSingularity> S;
  for (auto& s : spec.singularities)
    if (s.nu != cplx(0.0) || s.nubar != cplx(0.0)) S.push_back(s);
  std::sort(S.begin(), S.end(), [](auto& a, auto& b) { return a.location.real() < b.location.real(); });
  const double inf = std::numeric_limits<double>::infinity();
  auto far = [&](double xi) { return g2_integrand(log_line_symbol(spec, xi)); };
  if (S.empty()) return (integrate(far, -inf, 0.0, 1e-12) + integrate(far, 0.0, inf, 1e-12)) / kTwoPi;

  // ln sigma at a_k + s, with the offset s kept exact
  auto local = [&](std::size_t k, double s) {
    double ak = S[k].location.real();
    cplx l = spec.regular.identity ? cplx(0.0) : std::log(spec.regular(ak + s));
    for (std::size_t j = 0; j < S.size(); ++j) {
      double sj = j == k ? s : (ak - S[j].location.real()) + s;
      l += S[j].nu * std::log(cplx(1.0, 1.0 / sj)) + S[j].nubar * std::log(cplx(1.0, -1.0 / sj));
    }
    return g2_integrand(l);
  };
  cplx total = 0.0;
  const std::size_t n = S.size();
  for (std::size_t k = 0; k < n; ++k) {
    double ak = S[k].location.real();
    double left = k == 0 ? 1.0 : 0.5 * (ak - S[k - 1].location.real());
    double right = k + 1 == n ? 1.0 : 0.5 * (S[k + 1].location.real() - ak);
    double q = grading_power(-2.0 * S[k].gamma_exp.real());
    NodeSet r, l;
    append_graded(r, 0.0, right, q, 8, 12, 24);
    append_graded(l, 0.0, left, q, 8, 12, 24);
    for (std::size_t i = 0; i < r.size(); ++i) total += r.w[i] * local(k, r.x[i]);
    for (std::size_t i = 0; i < l.size(); ++i) total += l.w[i] * local(k, -l.x[i]);
  }
  total += integrate(far, -inf, S.front().location.real() - 1.0, 1e-12);
  total += integrate(far, S.back().location.real() + 1.0, inf, 1e-12);
  return total / kTwoPi;
}

WienerHopfAsymptotics::WienerHopfAsymptotics(const SymbolSpec& spec) : spec_(spec) {
  if (spec.geometry != Geometry::line) throw ParameterError("WienerHopfAsymptotics: line symbol required");
  bulk_ = log_g2_density(spec_);
  if (!spec_.regular.identity) {
    log_e_ = log_e_of_f(spec_.regular);
    LineFactorization lf(spec_.regular);
    for (auto& s : spec_.singularities) {
      cplx a = s.location.real();
      if (s.nubar != cplx(0.0)) local_ += s.nubar * (lf.log_f_plus(a) - lf.log_f_plus(a + kI));
      if (s.nu != cplx(0.0)) local_ += s.nu * (lf.log_f_minus(a) - lf.log_f_minus(a - kI));
    }
  }
}

AsymptoticPrediction WienerHopfAsymptotics::leading(double x, PairProduct pair) const {
  if (!(x > 0)) throw ParameterError("wh_leading: x must be positive");
  const auto& S = spec_.singularities;
  cplx alg = 0.0, barnes = 0.0, pairs = 0.0;
  for (auto& s : S) {
    alg += s.gamma_exp * s.gamma_exp - s.delta * s.delta;
    barnes += log_barnes_g(1.0 + s.delta - s.gamma_exp) + log_barnes_g(1.0 - s.delta - s.gamma_exp) -
              log_barnes_g(1.0 - 2.0 * s.gamma_exp);
  }
  if (pair == PairProduct::ordered) {
    for (std::size_t k = 0; k < S.size(); ++k)
      for (std::size_t p = 0; p < S.size(); ++p) {
        if (k == p) continue;
        cplx d = S[k].location.real() - S[p].location.real();
        pairs += S[k].nubar * S[p].nu * std::log((d + kI) * (d + kI) / ((d + 2.0 * kI) * d));
      }
  } else {
    std::vector<std::size_t> idx(S.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return S[a].location.real() < S[b].location.real(); });
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        const auto &k = S[idx[i]], &p = S[idx[j]];
        double d = k.location.real() - p.location.real();
        pairs += k.nubar * p.nu * std::log((d * d + 1) * (d * d + 1) / ((d * d + 4) * d * d));
      }
  }
  double rho = rho_of(spec_);
  return assemble({{"bulk", x * bulk_},
                   {"algebraic", std::log(x / 2.0) * alg},
                   {"szego_constant", log_e_},
                   {"barnes", barnes},
                   {"local_regular", local_},
                   {"pair", pairs}},
                  rho, rho - 1.0);
}

AsymptoticPrediction wh_leading(const SymbolSpec& spec, double x, PairProduct pair) {
  return WienerHopfAsymptotics(spec).leading(x, pair);
}

// ---------------------------------------------------------------------------
// tau, phi and the zeroth-order resolvent

TauPhi tau_phi(cplx g, cplx d, double t) {
  cplx c = 1.0 - 2.0 * g;
  if (std::abs(c - std::round(c.real())) < kPoleTolerance && c.real() < 0.5)
    throw PoleError("tau_phi: 1 - 2 gamma is a non-positive integer");
  cplx norm = gamma_ratio({1.0 + d - g, 1.0 - d - g}, {c, c});
  cplx z1 = cplx(0.0, -t), z2 = cplx(0.0, t);
  cplx p1 = kummer_phi(-g - d, c, z1), p2 = kummer_phi(d - g, c, z2);
  cplx q1 = kummer_phi_dz(-g - d, c, z1), q2 = kummer_phi_dz(d - g, c, z2);
  return {norm * (-p1 * p2 + q1 * p2 + p1 * q2), norm * p1 * p2};
}

cplx r0_diagonal(const SymbolSpec& spec, double x, double xi) {
  if (spec.geometry != Geometry::line) throw ParameterError("r0_diagonal: line symbol required");
  if (!(x > 0)) throw ParameterError("r0_diagonal: x must be positive");
  bool trivial = spec.regular.identity;
  for (auto& s : spec.singularities) trivial = trivial && s.nu == cplx(0.0) && s.nubar == cplx(0.0);
  if (trivial) return 0.0;

  SymbolFactorization fac(spec);
  const double eps = fac.disk_radius();
  const auto& S = spec.singularities;
  std::ptrdiff_t inside = -1;
  for (std::size_t p = 0; p < S.size(); ++p) {
    double r = std::abs(xi - S[p].location.real());
    if (r == eps) throw DomainError("r0_diagonal: xi on a disk boundary, branch is ambiguous");
    if (r < eps) inside = std::ptrdiff_t(p);
  }
  const double h = 1e-5;
  cplx sigma = eval_line_symbol(spec, xi);
  if (inside < 0) {
    auto logprod = [&](cplx z) {
      double r = z.real();
      return std::log(fac.alpha_up(r)) + std::log(fac.alpha_down(r));
    };
    // differences of logs of nearby values stay on one branch
    auto f = [&](cplx z) { return logprod(z) - logprod(xi); };
    auto wrap = [](cplx v) { return cplx(v.real(), std::remainder(v.imag(), kTwoPi)); };
    auto d = [&](double s) { return (wrap(f(xi + s)) - wrap(f(xi - s))) / (2.0 * s); };
    cplx dlog = (4.0 * d(h / 2) - d(h)) / 3.0;
    return (sigma - 1.0) / (2.0 * kI * kPi * sigma) * (kI * x - dlog);
  }
  std::size_t p = std::size_t(inside);
  const auto& sp = S[p];
  auto logprod = [&](cplx z) { return fac.log_alpha_hat_up(p, z) + fac.log_alpha_hat_down(p, z); };
  cplx dlog = derivative(logprod, xi, h);
  cplx sigma_hat = std::exp(fac.log_alpha_hat_down(p, xi) - fac.log_alpha_hat_up(p, xi));
  auto tp = tau_phi(sp.gamma_exp, sp.delta, x * (xi - sp.location.real()));
  cplx rhs = -kI * x * tp.tau - dlog * tp.phi;
  cplx pref = 2.0 * kI * kPi * std::exp(kI * kPi * sp.delta) * sigma_hat * std::exp(2.0 * sp.gamma_exp * std::log(x));
  return rhs * (sigma - 1.0) / pref;
}

}  // namespace fhdet
