#include "fhdet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace fhdet {

const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw ParameterError("gauss_legendre: n must be positive");
  // boost returns the non-negative zeros only, in increasing order
  auto zeros = boost::math::legendre_p_zeros<double>(n);
  Rule r;
  for (double z : zeros) {
    double dp = boost::math::legendre_p_prime<double>(n, z);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x.push_back(z);
    r.w.push_back(w);
    if (z != 0.0) {
      r.x.push_back(-z);
      r.w.push_back(w);
    }
  }
  std::vector<std::size_t> idx(r.x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.x[a] < r.x[b]; });
  Rule sorted;
  for (auto i : idx) {
    sorted.x.push_back(r.x[i]);
    sorted.w.push_back(r.w[i]);
  }
  return cache.emplace(n, std::move(sorted)).first->second;
}

void NodeSet::append(const NodeSet& other) {
  x.insert(x.end(), other.x.begin(), other.x.end());
  w.insert(w.end(), other.w.begin(), other.w.end());
}

void append_gl(NodeSet& out, double a, double b, int n) {
  const Rule& r = gauss_legendre(n);
  double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    out.x.push_back(mid + half * r.x[i]);
    out.w.push_back(std::abs(half) * r.w[i]);
  }
}

double grading_power(double p) {
  // p > -1 is the integrable range; the closer to -1, the stronger the grading
  double q = 2.0 / std::max(1.0 + p, 1e-3);
  return std::clamp(q, 1.0, 6.0);
}

void append_graded(NodeSet& out, double s0, double s1, double q, int panels, int geo, int n) {
  const Rule& r = gauss_legendre(n);
  double len = s1 - s0;
  auto add_u = [&](double u0, double u1) {
    double half = 0.5 * (u1 - u0), mid = 0.5 * (u0 + u1);
    for (int i = 0; i < n; ++i) {
      double u = mid + half * r.x[i];
      out.x.push_back(s0 + len * std::pow(u, q));
      out.w.push_back(std::abs(len) * q * std::pow(u, q - 1.0) * half * r.w[i]);
    }
  };
  double du = 1.0 / panels;
  // geometric refinement of [0, du]
  double lo = du;
  for (int g = 0; g < geo; ++g) lo *= 0.25;
  add_u(0.0, lo);
  for (double a = lo; a < du * (1 - 1e-14);) {
    double b = std::min(4.0 * a, du);
    add_u(a, b);
    a = b;
  }
  for (int p = 1; p < panels; ++p) add_u(p * du, (p + 1) * du);
}

void append_graded_adaptive(NodeSet& out, double s0, double s1, double q,
                            const std::function<double(double)>& max_width, int n, int geo) {
  const Rule& r = gauss_legendre(n);
  const double len = s1 - s0;
  if (len == 0.0) return;
  auto s_of = [&](double u) { return s0 + len * std::pow(u, q); };
  auto add_u = [&](double u0, double u1) {
    double half = 0.5 * (u1 - u0), mid = 0.5 * (u0 + u1);
    for (int i = 0; i < n; ++i) {
      double u = mid + half * r.x[i];
      out.x.push_back(s_of(u));
      out.w.push_back(std::abs(len) * q * std::pow(u, q - 1.0) * half * r.w[i]);
    }
  };
  // first panel: shrink until it respects the width limit, then refine geometrically
  double u = 0.25;
  while (std::abs(len) * std::pow(u, q) > max_width(s_of(0.5 * u))) u *= 0.5;
  for (int g = 0; g < geo; ++g) u *= 0.25;
  add_u(0.0, u);
  while (u < 1.0) {
    double b = std::min({4.0 * u, u + 0.25, 1.0});
    for (int it = 0; it < 200; ++it) {
      double w = std::abs(len) * (std::pow(b, q) - std::pow(u, q));
      if (w <= max_width(s_of(0.5 * (u + b)))) break;
      b = u + 0.7 * (b - u);
    }
    add_u(u, b);
    u = b;
  }
}

cplx integrate_nothrow(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
                       double* err_out, int max_depth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  cplx v = gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol, &err);
  if (err_out) *err_out = err;
  return v;
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
               double* err_out, int max_depth) {
  double err = 0.0;
  cplx v = integrate_nothrow(f, a, b, rel_tol, &err, max_depth);
  if (err_out) *err_out = err;
  if (!is_finite(v)) throw QuadratureError("integrate: non-finite result");
  // boost reports the absolute error estimate; allow an absolute floor for
  // integrals that vanish
  if (err > std::max(100.0 * rel_tol * std::abs(v), 1e-13))
    throw QuadratureError("integrate: tolerance not reached (error estimate " + std::to_string(err) + ")");
  return v;
}

FourierIntegral::FourierIntegral(std::function<cplx(cplx)> f, double L, double t_max)
    : f_(std::move(f)), L_(L), t_max_(t_max) {
  // 32-point panels stay spectrally accurate up to about 14 radians of phase
  // per half panel; also keep panels at most 0.5 wide to resolve f itself
  double w = std::min(0.5, 28.0 / std::max(t_max, 1e-3));
  int panels = int(std::ceil(2.0 * L / w));
  for (int p = 0; p < panels; ++p) append_gl(core_, -L + 2.0 * L * p / panels, -L + 2.0 * L * (p + 1) / panels, 32);
  fw_.resize(core_.size());
  for (std::size_t j = 0; j < core_.size(); ++j) fw_[j] = f_(core_.x[j]) * core_.w[j];
}

cplx FourierIntegral::operator()(double t) const {
  if (std::abs(t) > t_max_ * (1 + 1e-12)) throw ParameterError("FourierIntegral: |t| exceeds the resolved range");
  cplx core = 0.0;
  for (std::size_t j = 0; j < core_.size(); ++j) core += fw_[j] * std::polar(1.0, -t * core_.x[j]);
  const double L = L_;
  const double at = std::abs(t);
  // vertical rays xi = +-L -/+ i s, downward for t >= 0 and upward for t < 0
  const double dir = t >= 0 ? -1.0 : 1.0;
  auto right = [&](double s) { return f_(cplx(L, dir * s)) * std::exp(-at * s); };
  auto left = [&](double s) { return f_(cplx(-L, dir * s)) * std::exp(-at * s); };
  double e1 = 0, e2 = 0;
  cplx R = integrate_nothrow(right, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &e1, 15);
  cplx Lf = integrate_nothrow(left, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &e2, 15);
  cplx ph_r = std::polar(1.0, -t * L), ph_l = std::polar(1.0, t * L);
  // d xi = dir * i ds on both rays; the left ray is traversed towards -L
  cplx tails = dir * kI * (ph_r * R - ph_l * Lf);
  return core + tails;
}

}  // namespace fhdet
