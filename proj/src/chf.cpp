#include "fhdet/chf.hpp"

#include <array>

#include "fhdet/asymptotics.hpp"
#include "fhdet/quadrature.hpp"
#include "fhdet/specfun.hpp"

namespace fhdet {

namespace {

constexpr int kIdentities = 6;

// x psi(x), continued to -1 at x = 0
cplx x_digamma(cplx x) { return std::abs(x) < 1e-14 ? cplx(-1.0) : x * digamma(x); }

struct Integrands {
  cplx g, d;
  bool with_log;

  // contributions of one node at t (t != 0); the half-line identities only see t < 0
  std::array<cplx, kIdentities> operator()(double t) const {
    auto tp = tau_phi(g, d, t);
    const double sg = t > 0 ? 1.0 : -1.0, at = std::abs(t), lt = std::log(at);
    cplx A = std::exp(-kI * kPi * d * sg - 2.0 * g * lt);
    cplx phi_part = A * tp.phi - 1.0;
    cplx tau_part = A * tp.tau + 1.0 - 2.0 * kI * d / (t + sg);
    std::array<cplx, kIdentities> v{};
    if (t < 0) {
      v[0] = phi_part;
      v[2] = tau_part;
    }
    v[1] = phi_part;
    v[3] = tau_part;
    if (with_log) {
      v[4] = lt * phi_part;
      v[5] = lt * (A * tp.tau + 1.0);
    }
    return v;
  }
};

}  // namespace

std::vector<ChfIdentity> verify_chf_integrals(cplx g, cplx d, const ChfOptions& opts) {
  if (!(std::abs(d.real()) < 0.5)) throw ParameterError("verify_chf_integrals: needs |Re delta| < 1/2");
  if (!(g.real() < 0.5)) throw ParameterError("verify_chf_integrals: needs Re gamma < 1/2");
  if (opts.panels_per_period < 2 || opts.nodes < 2 || !(opts.t_start >= 2.0) || !(opts.t_max >= opts.t_start))
    throw ParameterError("verify_chf_integrals: bad options");
  const bool with_log = d == cplx(0.0);
  Integrands f{g, d, with_log};

  std::vector<ChfIdentity> out(kIdentities);
  out[0] = {"phi_half_line", "int_{-inf}^0 (e^{i pi delta}|t|^{-2 gamma} phi - 1) dt = 2 i delta"};
  out[1] = {"phi_line", "int_R (e^{-i pi delta sgn t}|t|^{-2 gamma} phi - 1) dt = 0"};
  out[2] = {"tau_half_line",
            "int_{-inf}^0 (e^{i pi delta}|t|^{-2 gamma} tau + 1 - 2 i delta/(t - 1)) dt = -2 i delta - pi gamma + "
            "i (gamma + delta) psi(-gamma - delta) + i (delta - gamma) psi(delta - gamma)"};
  out[3] = {"tau_line", "int_R (e^{-i pi delta sgn t}|t|^{-2 gamma} tau + 1 - 2 i delta/(t + sgn t)) dt = -2 pi gamma"};
  out[4] = {"phi_log", "int_R ln|t| (|t|^{-2 gamma} phi(gamma, 0; t) - 1) dt = -2 pi gamma"};
  out[5] = {"tau_log",
            "int_R ln|t| (|t|^{-2 gamma} tau(gamma, 0; t) + 1) dt = 2 pi gamma (psi(1 - gamma) - 2 psi(1 - 2 gamma) + 1)"};
  out[0].closed_form = 2.0 * kI * d;
  out[1].closed_form = 0.0;
  out[2].closed_form = -2.0 * kI * d - kPi * g - kI * x_digamma(-g - d) + kI * x_digamma(d - g);
  out[3].closed_form = -2.0 * kPi * g;
  out[4].closed_form = -2.0 * kPi * g;
  out[5].closed_form = 2.0 * kPi * g * (digamma(1.0 - g) - 2.0 * digamma(1.0 - 2.0 * g) + 1.0);

  std::array<cplx, kIdentities> F{};
  auto add = [&](double t, double w) {
    auto v = f(t);
    for (int k = 0; k < kIdentities; ++k) F[k] += w * v[k];
  };
  // [-1, 1], graded towards the |t|^{-2 gamma} (ln|t|) point
  NodeSet head;
  append_graded(head, 0.0, 1.0, grading_power(-2.0 * g.real()) + (with_log ? 1.0 : 0.0), 8, 12, 20);
  for (std::size_t i = 0; i < head.size(); ++i) {
    add(head.x[i], head.w[i]);
    add(-head.x[i], head.w[i]);
  }

  const int ppp = opts.panels_per_period;
  const double width = kTwoPi / ppp;
  const Rule& gl = gauss_legendre(opts.nodes);
  double T = 1.0;
  auto step = [&] {
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      double t = T + 0.5 * width * (gl.x[i] + 1.0), w = 0.5 * width * gl.w[i];
      add(t, w);
      add(-t, w);
    }
    T += width;
  };

  // one period of samples of F at panel ends; equal weights remove e^{+-iT}
  auto period_average = [&] {
    std::array<cplx, kIdentities> avg{};
    for (int j = 0; j < ppp; ++j) {
      step();
      for (int k = 0; k < kIdentities; ++k) avg[k] += F[k] / double(ppp);
    }
    return avg;
  };

  // averages at T_0 < T_1 < ... (each twice the previous)
  std::vector<std::array<cplx, kIdentities>> avgs;
  std::vector<double> ts;
  std::array<cplx, kIdentities> prev_ext{};
  for (double target = opts.t_start; target <= opts.t_max * (1 + 1e-12); target *= 2.0) {
    while (T < target) step();
    const double t_here = T;
    avgs.push_back(period_average());
    ts.push_back(t_here + kPi);
    const std::size_t n = avgs.size();
    if (n < 2) continue;
    std::array<cplx, kIdentities> ext{};
    for (int k = 0; k < kIdentities; ++k) {
      if (k >= 4 && n >= 3) {
        // tail (a + b ln T)/T from the ln|t|/t^2 part of the integrand:
        // solve T_i F_i = L T_i + a + b ln T_i on the last three levels
        double t1 = ts[n - 3], t2 = ts[n - 2], t3 = ts[n - 1];
        cplx y1 = t1 * avgs[n - 3][k], y2 = t2 * avgs[n - 2][k], y3 = t3 * avgs[n - 1][k];
        double l1 = std::log(t1), l2 = std::log(t2), l3 = std::log(t3);
        // eliminate a, then b
        cplx r1 = y2 - y1, r2 = y3 - y2;
        double u1 = t2 - t1, v1 = l2 - l1, u2 = t3 - t2, v2 = l3 - l2;
        ext[k] = (r1 * v2 - r2 * v1) / (u1 * v2 - u2 * v1);
      } else {
        ext[k] = (ts[n - 1] * avgs[n - 1][k] - ts[n - 2] * avgs[n - 2][k]) / (ts[n - 1] - ts[n - 2]);
      }
    }
    bool done = n >= 3;
    for (int k = 0; k < kIdentities; ++k) {
      out[k].computed = ext[k];
      out[k].tail_estimate = std::abs(ext[k] - (n >= 3 ? prev_ext[k] : avgs[n - 1][k]));
      out[k].converged = n >= (k >= 4 ? 4u : 3u) && out[k].tail_estimate < opts.tail_tol;
      if (k < 4 || with_log) done = done && out[k].converged;
    }
    prev_ext = ext;
    if (done || T >= opts.t_max) break;
  }
  for (auto& r : out) r.abs_error = std::abs(r.computed - r.closed_form);
  if (!with_log) out.resize(4);
  return out;
}

}  // namespace fhdet
