#include "fhdet/determinants.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Dense>

#include "fhdet/specfun.hpp"

namespace fhdet {

std::string to_string(DetMethod m) {
  switch (m) {
    case DetMethod::toeplitz_lu: return "toeplitz-lu";
    case DetMethod::nystrom_xi: return "nystrom-xi";
    case DetMethod::nystrom_t: return "nystrom-t";
  }
  return "?";
}

namespace {

// phase allowed across one panel for 24-point rules; gives ~1e-13 on e^{i w s}
constexpr double kPhaseBudget = 12.0;

struct LuInfo {
  cplx log_det = 0.0;
  bool singular = false;
  double rcond = 0.0;
};

LuInfo lu_info(const Eigen::MatrixXcd& A) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  LuInfo info;
  const auto& U = lu.matrixLU();
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    cplx d = U(i, i);
    if (d == cplx(0.0)) {
      info.singular = true;
      info.log_det = cplx(-std::numeric_limits<double>::infinity(), 0.0);
      return info;
    }
    info.log_det += std::log(d);
  }
  if (lu.permutationP().determinant() < 0) info.log_det += cplx(0.0, kPi);
  info.log_det.imag(std::remainder(info.log_det.imag(), kTwoPi));
  info.rcond = lu.rcond();
  return info;
}

DeterminantResult from_log(cplx log_det, bool singular, DetMethod method, int size) {
  DeterminantResult r;
  r.method = method;
  r.size = size;
  r.singular = singular;
  r.log_value = log_det;
  r.value = singular ? cplx(0.0) : std::exp(log_det);
  return r;
}

struct Anchored {
  std::vector<double> x, w, off;
  std::vector<int> anchor;
  void add(double a, const NodeSet& local, int k) {
    for (std::size_t j = 0; j < local.size(); ++j) {
      x.push_back(a + local.x[j]);
      w.push_back(local.w[j]);
      off.push_back(local.x[j]);
      anchor.push_back(k);
    }
  }
  void add_plain(double a, double b, int n) {
    NodeSet t;
    append_gl(t, a, b, n);
    for (std::size_t j = 0; j < t.size(); ++j) {
      x.push_back(t.x[j]);
      w.push_back(t.w[j]);
      off.push_back(0.0);
      anchor.push_back(-1);
    }
  }
};

std::vector<std::size_t> active_singularities(const SymbolSpec& spec) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < spec.singularities.size(); ++k)
    if (spec.singularities[k].nu != cplx(0.0) || spec.singularities[k].nubar != cplx(0.0)) idx.push_back(k);
  return idx;
}

// ---------------------------------------------------------------------------
// circle

struct CircleGrid {
  Anchored nodes;
  std::vector<std::size_t> active;  // anchor -> singularity index
  std::vector<double> angles;       // anchor -> angle
};

CircleGrid circle_grid(const SymbolSpec& spec, int kmax, int n) {
  if (spec.geometry != Geometry::circle) throw ParameterError("Toeplitz determinants need a circle symbol");
  CircleGrid g;
  const double wmax = std::min(kPhaseBudget / std::max(kmax, 1), 0.5);
  auto width = [&](double) { return wmax; };
  auto idx = active_singularities(spec);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return std::arg(spec.singularities[a].location) < std::arg(spec.singularities[b].location);
  });
  g.active = idx;
  for (auto k : idx) g.angles.push_back(std::arg(spec.singularities[k].location));
  if (idx.empty()) {
    int panels = int(std::ceil(kTwoPi / wmax));
    for (int p = 0; p < panels; ++p) g.nodes.add_plain(-kPi + kTwoPi * p / panels, -kPi + kTwoPi * (p + 1) / panels, n);
    return g;
  }
  const int m = int(idx.size());
  for (int j = 0; j < m; ++j) {
    int jn = (j + 1) % m;
    double alpha = g.angles[j];
    double beta = jn == 0 ? g.angles[0] + kTwoPi : g.angles[jn];
    double mid = 0.5 * (alpha + beta);
    double qa = grading_power(-2.0 * spec.singularities[idx[j]].gamma_exp.real());
    double qb = grading_power(-2.0 * spec.singularities[idx[jn]].gamma_exp.real());
    NodeSet left, right;
    append_graded_adaptive(left, 0.0, mid - alpha, qa, width, n);
    append_graded_adaptive(right, 0.0, mid - beta, qb, width, n);
    g.nodes.add(alpha, left, j);
    g.nodes.add(beta, right, jn);
  }
  return g;
}

double wrap_angle(double t) {
  t = std::remainder(t, kTwoPi);
  return t <= -kPi ? t + kTwoPi : t;
}

// sigma at a node; offsets from the anchoring singularity keep full precision
cplx circle_sigma_at(const SymbolSpec& spec, const CircleGrid& g, std::size_t i) {
  double th = g.nodes.x[i];
  cplx v = spec.regular.identity ? cplx(1.0) : spec.regular(std::polar(1.0, th));
  for (std::size_t r = 0; r < g.active.size(); ++r) {
    const auto& s = spec.singularities[g.active[r]];
    double phi = g.nodes.anchor[i] == int(r) ? g.nodes.off[i] : wrap_angle(th - g.angles[r]);
    if (phi == 0.0) throw SingularPointError("circle symbol evaluated at a singular point");
    // Log(1 - e^{i phi}) and Log(1 - e^{-i phi}) for phi in (-pi, pi]
    double mod = std::log(std::abs(2.0 * std::sin(0.5 * phi)));
    double arg = 0.5 * phi - 0.5 * kPi * (phi > 0 ? 1.0 : -1.0);
    v *= std::exp(-s.nu * cplx(mod, arg) - s.nubar * cplx(mod, -arg));
  }
  return v;
}

}  // namespace

DeterminantResult lu_log_det(const std::vector<cplx>& row_major, int n) {
  if (int(row_major.size()) != n * n) throw ParameterError("lu_log_det: size mismatch");
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = row_major[std::size_t(i) * n + j];
  auto info = lu_info(A);
  return from_log(info.log_det, info.singular, DetMethod::toeplitz_lu, n);
}

std::vector<cplx> fourier_coeffs(const SymbolSpec& spec, int kmax, int n) {
  if (kmax < 0) throw ParameterError("fourier_coeffs: kmax must be non-negative");
  if (spec.singularities.empty() && (spec.regular.identity || spec.regular.kind == RegularPart::Kind::fourier_series)) {
    // Laurent polynomial: exact coefficients, c_k = b_{-k} with the e^{ik theta} convention
    std::vector<cplx> c(std::size_t(2 * kmax + 1), 0.0);
    if (spec.regular.identity) {
      c[std::size_t(kmax)] = 1.0;
      return c;
    }
    const int K = int(spec.regular.laurent.size() / 2);
    for (int k = -std::min(K, kmax); k <= std::min(K, kmax); ++k)
      c[std::size_t(kmax + k)] = spec.regular.laurent[std::size_t(K - k)];
    return c;
  }
  CircleGrid g = circle_grid(spec, kmax, n);
  std::vector<cplx> c(std::size_t(2 * kmax + 1), 0.0);
  for (std::size_t i = 0; i < g.nodes.x.size(); ++i) {
    cplx f = circle_sigma_at(spec, g, i) * (g.nodes.w[i] / kTwoPi);
    cplx z = std::polar(1.0, g.nodes.x[i]);
    // c_k for k >= 0 with e^{ik theta}, k < 0 with the conjugate rotation
    cplx p = f, q = f, zc = std::conj(z);
    c[kmax] += f;
    for (int k = 1; k <= kmax; ++k) {
      p *= z;
      q *= zc;
      c[std::size_t(kmax + k)] += p;
      c[std::size_t(kmax - k)] += q;
    }
  }
  return c;
}

cplx fourier_coeff(const SymbolSpec& spec, int k) {
  int K = std::abs(k);
  return fourier_coeffs(spec, K)[std::size_t(k + K)];
}

cplx fh_coeff_closed_form(cplx nu, cplx nubar, cplx a, int k) {
  // k <= 0 pairs nu with j = -k; k > 0 is the mirror image with nu <-> nubar
  int j = std::abs(k);
  cplx p = k <= 0 ? nu : nubar, q = k <= 0 ? nubar : nu;
  cplx base;
  const double tol = 1e-12;
  if (nonpositive_integer_distance(1.0 - p) < tol || nonpositive_integer_distance(double(j) + 1.0 - q) < tol) {
    base = 0.0;
  } else if (nonpositive_integer_distance(p) < tol) {
    // (p)_j terminates
    cplx poch = 1.0;
    for (int i = 0; i < j; ++i) poch *= p + double(i);
    base = poch * gamma_ratio({1.0 - p - q}, {1.0 - p, double(j) + 1.0 - q});
  } else {
    base = std::exp(log_gamma(p + double(j)) - log_gamma(p) + log_gamma(1.0 - p - q) - log_gamma(1.0 - p) -
                    log_gamma(double(j) + 1.0 - q));
  }
  // shifting the singularity to a multiplies c_k by a^k
  return base * std::exp(double(k) * std::log(a));
}

ToeplitzEngine::ToeplitzEngine(const SymbolSpec& spec, int max_m) : max_m_(max_m) {
  if (max_m < 1) throw ParameterError("ToeplitzEngine: m must be at least 1");
  c_ = fourier_coeffs(spec, max_m - 1, 24);
  auto coarse = fourier_coeffs(spec, max_m - 1, 20);
  for (std::size_t i = 0; i < c_.size(); ++i) coeff_err_ = std::max(coeff_err_, std::abs(c_[i] - coarse[i]));
  coeff_err_ = std::max(coeff_err_, 1e-16);
}

DeterminantResult ToeplitzEngine::det(int m) const {
  if (m < 1 || m > max_m_) throw ParameterError("ToeplitzEngine::det: m out of range");
  const int K = max_m_ - 1;
  Eigen::MatrixXcd T(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) T(j, k) = c_[std::size_t(j - k + K)];
  double norm1 = T.cwiseAbs().colwise().sum().maxCoeff();
  auto info = lu_info(T);
  auto r = from_log(info.log_det, info.singular, DetMethod::toeplitz_lu, m);
  // |d log det| <= ||T^{-1}|| ||dT||, with ||dT||_1 <= m * coefficient error
  r.error_estimate = info.singular ? INFINITY : m * coeff_err_ / (info.rcond * norm1);
  return r;
}

DeterminantResult toeplitz_det(const SymbolSpec& spec, int m) { return ToeplitzEngine(spec, m).det(m); }

// ---------------------------------------------------------------------------
// line

namespace {

double sine_kernel(double x, double d) {
  double u = 0.5 * x * d;
  if (std::abs(u) < 1e-4) return x / kTwoPi * (1.0 - u * u / 6.0);
  return std::sin(u) / (kPi * d);
}

cplx line_sigma_minus_one(const SymbolSpec& spec, const QuadratureScheme& sch, const std::vector<std::size_t>& active,
                          std::size_t i) {
  double xi = sch.nodes.x[i];
  cplx v = spec.regular.identity ? cplx(1.0) : spec.regular(xi);
  for (std::size_t r = 0; r < active.size(); ++r) {
    const auto& s = spec.singularities[active[r]];
    double d = sch.anchors[i] == int(r) ? sch.offsets[i] : xi - s.location.real();
    v *= line_fh_factor(s.nu, s.nubar, d);
  }
  return v - 1.0;
}

}  // namespace

cplx gsk_kernel_line(const SymbolSpec& spec, double x, double xi, double eta) {
  cplx sm1 = eval_line_symbol(spec, xi) - 1.0;
  return sm1 * sine_kernel(x, xi - eta);
}

QuadratureScheme make_line_scheme(const SymbolSpec& spec, double x, int n, double L) {
  if (spec.geometry != Geometry::line) throw ParameterError("make_line_scheme: line symbol required");
  if (n < 4) throw ParameterError("make_line_scheme: at least 4 nodes per panel");
  auto idx = active_singularities(spec);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return spec.singularities[a].location.real() < spec.singularities[b].location.real();
  });
  std::vector<double> a;
  for (auto k : idx) a.push_back(spec.singularities[k].location.real());
  for (double v : a) L = std::max(L, std::abs(v) + 10.0);

  QuadratureScheme sch;
  sch.L = L;
  sch.nodes_per_panel = n;
  const double wmax = x > 0 ? 2.0 * kPhaseBudget / x : INFINITY;
  auto width = [&](double xi) {
    double d = std::abs(xi);
    if (!a.empty()) {
      d = INFINITY;
      for (double v : a) d = std::min(d, std::abs(xi - v));
    }
    return std::min(wmax, 0.5 * std::sqrt(1.0 + d * d));
  };

  Anchored nodes;
  if (a.empty()) {
    double cur = -L;
    while (cur < L) {
      double w = width(cur);
      w = std::min(w, width(cur + w));
      double b = cur + w;
      if (b > L - 0.2 * w) b = L;
      nodes.add_plain(cur, b, n);
      sch.panels.push_back({cur, b, n});
      cur = b;
    }
  } else {
    auto graded = [&](int k, double target) {
      double q = grading_power(-2.0 * spec.singularities[idx[k]].gamma_exp.real());
      sch.grading = std::max(sch.grading, q);
      NodeSet local;
      double a0 = a[k];
      append_graded_adaptive(local, 0.0, target - a0, q, [&](double s) { return width(a0 + s); }, n);
      nodes.add(a0, local, k);
      sch.panels.push_back({std::min(a0, target), std::max(a0, target), int(local.size())});
    };
    const int m = int(a.size());
    graded(0, -L);
    for (int k = 0; k + 1 < m; ++k) {
      double mid = 0.5 * (a[k] + a[k + 1]);
      graded(k, mid);
      graded(k + 1, mid);
    }
    graded(m - 1, L);
    std::sort(sch.panels.begin(), sch.panels.end(), [](auto& p, auto& q) { return p.a < q.a; });
  }
  sch.nodes.x = std::move(nodes.x);
  sch.nodes.w = std::move(nodes.w);
  sch.anchors = std::move(nodes.anchor);
  sch.offsets = std::move(nodes.off);
  return sch;
}

namespace {

// ln sigma for |Re xi| beyond every singular point, where all factors are
// close to one and principal logarithms are continuous.
cplx log_symbol_far(const SymbolSpec& spec, cplx xi) {
  cplx l = std::log(spec.regular(xi));
  for (auto& s : spec.singularities) {
    cplx u = xi - s.location;
    l += s.nu * std::log(1.0 + kI / u) + s.nubar * std::log(1.0 - kI / u);
  }
  return l;
}

// Nodes for int_0^inf h(s) e^{-t s} ds, uniform in accuracy for t in (0, 80]:
// dyadic panels near zero, then s = 4096 / u on the rest.
NodeSet ray_nodes() {
  NodeSet r;
  append_gl(r, 0.0, 1.0 / 64, 20);
  for (double a = 1.0 / 64; a < 4096; a *= 2) append_gl(r, a, 2 * a, 20);
  const Rule& g = gauss_legendre(20);
  for (int j = 0; j < 20; ++j) {
    double u = 0.5 * (1 + g.x[j]);
    r.x.push_back(4096.0 / u);
    r.w.push_back(0.5 * g.w[j] * 4096.0 / (u * u));
  }
  return r;
}

}  // namespace

namespace {

struct TailParts {
  cplx extensive = 0.0;
  cplx constant = 0.0;
};

TailParts tail_parts(const SymbolSpec& spec, const QuadratureScheme& sch, double x) {
  const double L = sch.L;
  // extensive part: x/2pi int_{|xi|>L} (ln sigma + 1 - sigma)
  auto f = [&](double xi) -> cplx {
    cplx l = log_line_symbol(spec, xi);
    // ln sigma + 1 - sigma = -(e^l - 1 - l)
    if (std::abs(l) < 0.1) {
      cplx term = l * l / 2.0, s = 0.0;
      for (int k = 3; k < 14; ++k) {
        s += term;
        term *= l / double(k);
      }
      return -s;
    }
    return l + 1.0 - std::exp(l);
  };
  const double inf = std::numeric_limits<double>::infinity();
  double e1 = 0, e2 = 0;
  cplx v = integrate_nothrow(f, L, inf, 1e-10, &e1, 15) + integrate_nothrow(f, -inf, -L, 1e-10, &e2, 15);
  cplx extensive = x / kTwoPi * v;

  // Non-extensive part: the change of (1/4pi^2) int_0^x t s(t) s(-t) dt,
  // s(t) = int ln sigma e^{i t xi}, when the symbol is cut to 1 beyond L.
  // The outer transform is taken along vertical rays from +-L.
  if (x > 80.0) return {extensive, 0.0};
  NodeSet ray = ray_nodes();
  const std::size_t R = ray.size();
  std::vector<cplx> ru(R), lu(R), rd(R), ld(R);
  for (std::size_t q = 0; q < R; ++q) {
    double sq = ray.x[q];
    ru[q] = ray.w[q] * log_symbol_far(spec, cplx(L, sq));
    lu[q] = ray.w[q] * log_symbol_far(spec, cplx(-L, sq));
    rd[q] = ray.w[q] * log_symbol_far(spec, cplx(L, -sq));
    ld[q] = ray.w[q] * log_symbol_far(spec, cplx(-L, -sq));
  }
  const std::size_t N = sch.nodes.size();
  std::vector<cplx> lw(N);
  for (std::size_t j = 0; j < N; ++j) {
    // nodes that round onto a singular point carry negligible weight
    try {
      lw[j] = sch.nodes.w[j] * log_line_symbol(spec, sch.nodes.x[j]);
    } catch (const SingularPointError&) {
      lw[j] = 0.0;
    }
  }

  NodeSet tq;
  const double width = std::min(0.5, 6.0 / L);
  const int panels = std::max(1, int(std::ceil(x / width)));
  for (int p = 0; p < panels; ++p) append_gl(tq, x * p / panels, x * (p + 1) / panels, 16);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < tq.size(); ++k) {
    double t = tq.x[k];
    cplx a_ru = 0.0, a_lu = 0.0, a_rd = 0.0, a_ld = 0.0;
    for (std::size_t q = 0; q < R; ++q) {
      double e = std::exp(-t * ray.x[q]);
      a_ru += ru[q] * e;
      a_lu += lu[q] * e;
      a_rd += rd[q] * e;
      a_ld += ld[q] * e;
    }
    cplx eL = std::polar(1.0, t * L);
    cplx out_p = kI * eL * a_ru - kI * std::conj(eL) * a_lu;   // s_out(t)
    cplx out_m = -kI * std::conj(eL) * a_rd + kI * eL * a_ld;  // s_out(-t)
    cplx in_p = 0.0, in_m = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      cplx e = std::polar(1.0, t * sch.nodes.x[j]);
      in_p += lw[j] * e;
      in_m += lw[j] * std::conj(e);
    }
    acc += tq.w[k] * t * (in_p * out_m + out_p * in_m + out_p * out_m);
  }
  return {extensive, acc / (4.0 * kPi * kPi)};
}

}  // namespace

cplx line_tail_correction(const SymbolSpec& spec, const QuadratureScheme& scheme, double x) {
  auto t = tail_parts(spec, scheme, x);
  return t.extensive + t.constant;
}

DeterminantResult fredholm_det2_line(const SymbolSpec& spec, double x, const QuadratureScheme& sch, Det2Options opts) {
  if (spec.geometry != Geometry::line) throw ParameterError("fredholm_det2_line: line symbol required");
  if (x < 0) throw ParameterError("fredholm_det2_line: x must be non-negative");
  auto active = active_singularities(spec);
  std::sort(active.begin(), active.end(), [&](auto a, auto b) {
    return spec.singularities[a].location.real() < spec.singularities[b].location.real();
  });
  const int N = int(sch.nodes.size());
  if (x == 0.0 || (active.empty() && spec.regular.identity)) return from_log(0.0, false, DetMethod::nystrom_xi, N);

  std::vector<cplx> sm1(N);
  for (int i = 0; i < N; ++i) sm1[i] = line_sigma_minus_one(spec, sch, active, std::size_t(i));
  Eigen::MatrixXcd A(N, N);
  cplx trace = 0.0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double d = (sch.anchors[i] >= 0 && sch.anchors[i] == sch.anchors[j]) ? sch.offsets[i] - sch.offsets[j]
                                                                            : sch.nodes.x[i] - sch.nodes.x[j];
      A(i, j) = sch.nodes.w[j] * sm1[i] * sine_kernel(x, d);
    }
    trace += A(i, i);
    A(i, i) += 1.0;
  }
  auto info = lu_info(A);
  cplx logv = info.log_det - trace;
  double trunc_err = 0.0;
  if (opts.tail_correction) {
    auto t = tail_parts(spec, sch, x);
    logv += t.extensive + t.constant;
    // the constant-term correction is itself accurate to a few percent
    trunc_err = 0.05 * std::abs(t.constant);
  }
  auto r = from_log(logv, info.singular, DetMethod::nystrom_xi, N);
  if (opts.estimate_error && !info.singular) {
    auto coarse_scheme = make_line_scheme(spec, x, std::max(8, 2 * sch.nodes_per_panel / 3), sch.L);
    auto coarse = fredholm_det2_line(spec, x, coarse_scheme, {false, opts.tail_correction});
    r.error_estimate = std::abs(std::exp(coarse.log_value - r.log_value) - 1.0) + trunc_err;
  }
  return r;
}

DeterminantResult fredholm_det2_line(const SymbolSpec& spec, double x) {
  return fredholm_det2_line(spec, x, make_line_scheme(spec, x));
}

namespace {

// Piecewise Chebyshev interpolant (second-kind points, barycentric form).
class ChebTable {
 public:
  ChebTable(const std::function<cplx(double)>& f, double lo, double hi, double width, int degree)
      : lo_(lo), hi_(hi), deg_(degree) {
    panels_ = std::max(1, int(std::ceil((hi - lo) / width)));
    h_ = (hi - lo) / panels_;
    for (int j = 0; j <= deg_; ++j) nodes_.push_back(std::cos(kPi * j / deg_));
    vals_.resize(std::size_t(panels_) * (deg_ + 1));
    for (int p = 0; p < panels_; ++p)
      for (int j = 0; j <= deg_; ++j) vals_[std::size_t(p) * (deg_ + 1) + j] = f(lo + h_ * (p + 0.5 * (1 + nodes_[j])));
  }
  cplx operator()(double t) const {
    int p = std::clamp(int((t - lo_) / h_), 0, panels_ - 1);
    double s = 2.0 * (t - lo_ - h_ * p) / h_ - 1.0;
    const cplx* v = &vals_[std::size_t(p) * (deg_ + 1)];
    cplx num = 0.0;
    double den = 0.0;
    for (int j = 0; j <= deg_; ++j) {
      double d = s - nodes_[j];
      if (d == 0.0) return v[j];
      double wj = ((j & 1) ? -1.0 : 1.0) * ((j == 0 || j == deg_) ? 0.5 : 1.0) / d;
      num += wj * v[j];
      den += wj;
    }
    return num / den;
  }

 private:
  double lo_, hi_, h_;
  int deg_, panels_;
  std::vector<double> nodes_;
  std::vector<cplx> vals_;
};

}  // namespace

DeterminantResult nystrom_tspace(const SymbolSpec& spec, double x, int n_nodes) {
  if (spec.geometry != Geometry::line) throw ParameterError("nystrom_tspace: line symbol required");
  if (!active_singularities(spec).empty())
    throw ParameterError("nystrom_tspace: only symbols without Fisher-Hartwig singularities");
  if (x < 0) throw ParameterError("nystrom_tspace: x must be non-negative");
  const int n = 24;
  const int P = 4 * std::max(1, (n_nodes + 4 * n - 1) / (4 * n));
  if (x == 0.0 || spec.regular.identity) return from_log(0.0, false, DetMethod::nystrom_t, P * n);

  RegularPart F = spec.regular;
  FourierIntegral ft([F](cplx xi) { return F(xi) - 1.0; }, 40.0, x);
  auto K = [&](double t) { return ft(t) / kTwoPi; };
  // K has a derivative jump at t = 0 only; tabulate each side separately
  ChebTable kpos(K, 0.0, x, 0.25, 32), kneg(K, -x, 0.0, 0.25, 32);
  auto Kt = [&](double t) { return t >= 0 ? kpos(t) : kneg(t); };

  // Plain composite Gauss-Legendre. The kink of K at t = 0 makes the error an
  // even expansion in the panel width, removed by two Richardson steps over
  // P, P/2 and P/4 panels.
  const Rule& r = gauss_legendre(n);
  auto level = [&](int panels, bool* singular) {
    const double h = x / panels;
    const int N = panels * n;
    std::vector<double> t(N), w(N);
    for (int p = 0; p < panels; ++p)
      for (int j = 0; j < n; ++j) {
        t[p * n + j] = h * (p + 0.5 * (1 + r.x[j]));
        w[p * n + j] = 0.5 * h * r.w[j];
      }
    Eigen::MatrixXcd A(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) A(i, j) = (i == j ? 1.0 : 0.0) + w[j] * Kt(t[i] - t[j]);
    auto info = lu_info(A);
    *singular = *singular || info.singular;
    return info.log_det;
  };
  bool singular = false;
  cplx d1 = level(P, &singular), d2 = level(P / 2, &singular), d4 = level(P / 4, &singular);
  cplx r1 = (4.0 * d1 - d2) / 3.0, r2 = (4.0 * d2 - d4) / 3.0;
  cplx logdet = (16.0 * r1 - r2) / 15.0;
  // the continuous kernel has trace x K(0)
  auto res = from_log(logdet - x * K(0.0), singular, DetMethod::nystrom_t, P * n);
  res.error_estimate = std::abs(logdet - r1);
  return res;
}

}  // namespace fhdet
