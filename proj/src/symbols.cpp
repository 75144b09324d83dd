#include "fhdet/symbols.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace fhdet {

FHSingularity make_singularity(cplx location, cplx nu, cplx nubar) {
  return {location, nu, nubar, 0.5 * (nubar - nu), 0.5 * (nu + nubar)};
}

FHSingularity make_singularity_gd(cplx location, cplx gamma_exp, cplx delta) {
  return {location, gamma_exp - delta, gamma_exp + delta, delta, gamma_exp};
}

RegularPart RegularPart::one() { return RegularPart{}; }

RegularPart RegularPart::from_expression(const std::string& text, double decay_kappa) {
  RegularPart r;
  r.kind = Kind::analytic_closed_form;
  r.expr = Expression::parse(text);
  r.decay_kappa = decay_kappa;
  r.identity = r.expr.is_constant() && r.expr(1.0) == cplx(1.0);
  return r;
}

RegularPart RegularPart::from_laurent(std::vector<cplx> coeffs) {
  if (coeffs.size() % 2 != 1) throw ParameterError("Laurent coefficients need an odd length (k = -K..K)");
  RegularPart r;
  r.kind = Kind::fourier_series;
  r.laurent = std::move(coeffs);
  int K = int(r.laurent.size() / 2);
  r.identity = r.laurent[K] == cplx(1.0);
  for (int k = 0; k < int(r.laurent.size()); ++k)
    if (k != K && r.laurent[k] != cplx(0.0)) r.identity = false;
  return r;
}

cplx RegularPart::operator()(cplx z) const {
  if (identity) return 1.0;
  if (kind == Kind::analytic_closed_form) return expr(z);
  int K = int(laurent.size() / 2);
  // Horner in z for k >= 0 and in 1/z for k < 0
  cplx pos = 0.0, neg = 0.0, zi = 1.0 / z;
  for (int k = K; k >= 0; --k) pos = pos * z + laurent[k + K];
  for (int k = K; k >= 1; --k) neg = neg * zi + laurent[K - k];
  return pos + neg * zi;
}

std::string RegularPart::describe() const {
  if (kind == Kind::analytic_closed_form) return expr.text();
  return "laurent[" + std::to_string(laurent.size()) + "]";
}

double SymbolSpec::rho() const {
  double r = 0.0;
  for (auto& s : singularities) r = std::max(r, 2.0 * std::abs(s.delta.real()));
  return r;
}

double SymbolSpec::max_re_gamma() const {
  double g = 0.0;
  for (auto& s : singularities) g = std::max(g, s.gamma_exp.real());
  return g;
}

std::string ValidationReport::failures() const {
  std::ostringstream os;
  for (auto& c : checks)
    if (!c.passed) os << c.name << ": " << c.detail << "; ";
  return os.str();
}

namespace {

// Samples |f| on a grid, then refines around the smallest samples.
double min_modulus(const std::function<cplx(double)>& f, double a, double b) {
  const int n = 4096;
  double h = (b - a) / n, best = INFINITY;
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i <= n; ++i) {
    double t = a + h * i;
    double m = std::abs(f(t));
    samples.push_back({m, t});
    best = std::min(best, m);
  }
  std::partial_sort(samples.begin(), samples.begin() + 8, samples.end());
  for (int j = 0; j < 8; ++j) {
    double t0 = samples[j].second;
    for (int k = -8; k <= 8; ++k) best = std::min(best, std::abs(f(t0 + k * h / 8.0)));
  }
  return best;
}

}  // namespace

ValidationReport validate_symbol(const SymbolSpec& spec) {
  ValidationReport rep;
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
    if (!ok) rep.ok = false;
  };
  bool line = spec.geometry == Geometry::line;
  double gmax = line ? 0.25 : 0.5;
  for (std::size_t k = 0; k < spec.singularities.size(); ++k) {
    const auto& s = spec.singularities[k];
    std::string tag = "singularity " + std::to_string(k);
    if (std::abs(s.delta - 0.5 * (s.nubar - s.nu)) > 1e-14 || std::abs(s.gamma_exp - 0.5 * (s.nu + s.nubar)) > 1e-14)
      add(tag + " exponents", false, "delta/gamma inconsistent with nu/nubar");
    if (!(std::abs(s.delta.real()) < 0.5))
      add(tag + " delta", false, "|Re(delta)| < 1/2 violated");
    else
      add(tag + " delta", true, "");
    if (!(s.gamma_exp.real() < gmax))
      add(tag + " gamma", false, line ? "Re(gamma) < 1/4 violated" : "Re(gamma) < 1/2 violated");
    else
      add(tag + " gamma", true, "");
    if (line && s.location.imag() != 0.0) add(tag + " location", false, "line locations must be real");
    if (!line && std::abs(std::abs(s.location) - 1.0) > 1e-12)
      add(tag + " location", false, "circle locations must be unimodular");
    for (std::size_t j = 0; j < k; ++j)
      if (std::abs(s.location - spec.singularities[j].location) < 1e-6)
        add(tag + " distinct", false, "closer than 1e-6 to singularity " + std::to_string(j));
  }
  add("rho", spec.rho() < 1.0, "rho = " + std::to_string(spec.rho()));
  if (!spec.regular.identity) {
    try {
      if (line) {
        // xi = 50 tan(phi) covers the line with resolution near the origin
        auto f = [&](double phi) { return spec.regular(50.0 * std::tan(phi)); };
        double m = min_modulus(f, -1.55, 1.55);
        add("regular part non-vanishing", m > 1e-10, "min |F| = " + std::to_string(m));
        double far = 0.0;
        for (double x : {1e5, -1e5}) far = std::max(far, std::abs(spec.regular(x) - 1.0));
        double mid = 0.0;
        for (double x : {1e3, -1e3}) mid = std::max(mid, std::abs(spec.regular(x) - 1.0));
        add("regular part decay", far < 1e-3 && far <= mid + 1e-15,
            "|F - 1| = " + std::to_string(mid) + " at 1e3, " + std::to_string(far) + " at 1e5");
      } else {
        auto f = [&](double t) { return spec.regular(std::polar(1.0, t)); };
        double m = min_modulus(f, 0.0, kTwoPi);
        add("regular part non-vanishing", m > 1e-10, "min |b| = " + std::to_string(m));
        if (m > 1e-10) {
          int w = winding_number(spec.regular);
          add("winding number", w == 0, "winding = " + std::to_string(w));
        }
      }
    } catch (const Error& e) {
      add("regular part evaluation", false, e.what());
    }
  }
  return rep;
}

cplx line_fh_factor(cplx nu, cplx nubar, double s) {
  if (s == 0.0) throw SingularPointError("line_fh_factor: s = 0");
  return std::exp(nu * std::log(cplx(1.0, 1.0 / s)) + nubar * std::log(cplx(1.0, -1.0 / s)));
}

cplx log_line_symbol(const SymbolSpec& spec, double xi) {
  cplx s = spec.regular.identity ? cplx(0.0) : std::log(spec.regular(xi));
  for (auto& k : spec.singularities) {
    double d = xi - k.location.real();
    if (d == 0.0) throw SingularPointError("log_line_symbol: xi at a singular point");
    s += k.nu * std::log(cplx(1.0, 1.0 / d)) + k.nubar * std::log(cplx(1.0, -1.0 / d));
  }
  return s;
}

cplx eval_line_symbol(const SymbolSpec& spec, double xi, Side side) {
  if (spec.geometry != Geometry::line) throw ParameterError("eval_line_symbol: circle spec");
  cplx v = spec.regular.identity ? cplx(1.0) : spec.regular(xi);
  for (auto& k : spec.singularities) {
    double d = xi - k.location.real();
    if (d != 0.0) {
      v *= line_fh_factor(k.nu, k.nubar, d);
      continue;
    }
    if (side == Side::principal || k.gamma_exp != cplx(0.0))
      throw SingularPointError("eval_line_symbol: xi at singular point " + std::to_string(xi));
    // gamma = 0: the factor tends to exp(-/+ i pi delta) from the right/left
    v *= std::exp((side == Side::above ? -1.0 : 1.0) * kI * kPi * k.delta);
  }
  return v;
}

cplx eval_circle_symbol(const SymbolSpec& spec, double theta) {
  if (spec.geometry != Geometry::circle) throw ParameterError("eval_circle_symbol: line spec");
  cplx z = std::polar(1.0, theta);
  cplx v = spec.regular.identity ? cplx(1.0) : spec.regular(z);
  for (auto& k : spec.singularities) {
    cplx u = 1.0 - z / k.location, w = 1.0 - k.location / z;
    if (std::abs(u) < 1e-300) {
      if (k.nu == cplx(0.0) && k.nubar == cplx(0.0)) continue;
      throw SingularPointError("eval_circle_symbol: theta at a singular point");
    }
    v *= std::exp(-k.nu * std::log(u) - k.nubar * std::log(w));
  }
  return v;
}

int winding_number(const RegularPart& regular) {
  if (regular.identity) return 0;
  auto b = [&](double t) {
    cplx v = regular(std::polar(1.0, t));
    if (std::abs(v) == 0.0 || !is_finite(v)) throw DomainError("winding_number: regular part vanishes or diverges");
    return v;
  };
  std::function<double(double, double, cplx, cplx, int)> phase = [&](double t0, double t1, cplx v0, cplx v1,
                                                                      int depth) -> double {
    double d = std::arg(v1 / v0);
    if (std::abs(d) <= 0.5 * kPi) return d;
    if (depth > 30) throw DomainError("winding_number: phase not resolved after refinement");
    double tm = 0.5 * (t0 + t1);
    cplx vm = b(tm);
    return phase(t0, tm, v0, vm, depth + 1) + phase(tm, t1, vm, v1, depth + 1);
  };
  const int n = 256;
  double total = 0.0;
  cplx prev = b(0.0), first = prev;
  for (int j = 1; j <= n; ++j) {
    double t1 = kTwoPi * j / n;
    cplx cur = j == n ? first : b(t1);
    total += phase(kTwoPi * (j - 1) / n, t1, prev, cur, 0);
    prev = cur;
  }
  return int(std::lround(total / kTwoPi));
}

}  // namespace fhdet
