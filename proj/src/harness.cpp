#include "fhdet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "fhdet/chf.hpp"
#include "fhdet/determinants.hpp"
#include "fhdet/specfun.hpp"
#include "json.hpp"

namespace fhdet {

using json = nlohmann::ordered_json;

namespace {

constexpr double kErrorFloor = 1e-13;
constexpr const char* kReportSchema = "fhdet-report/1";

// ---------------------------------------------------------------------------
// JSON helpers

cplx complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) {
    try {
      return parse_complex(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ValidationError(what + ": " + e.what());
    }
  }
  throw ValidationError(what + ": expected a number, [re, im] or a complex literal");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  const json* v = find(j, key);
  if (!v) return fallback;
  try {
    return v->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + "." + key + ": wrong type");
  }
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "circle") return Geometry::circle;
  if (s == "line") return Geometry::line;
  throw ValidationError("symbol.geometry: expected circle or line, got '" + s + "'");
}

FHSingularity singularity_from_json(const json& j, std::size_t idx) {
  std::string where = "symbol.singularities[" + std::to_string(idx) + "]";
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  const json* loc = find(j, "location");
  if (!loc) throw ValidationError(where + ": missing location");
  cplx a = complex_from_json(*loc, where + ".location");
  auto part = [&](const char* re, const char* im) -> std::optional<cplx> {
    const json* r = find(j, re);
    const json* i = find(j, im);
    if (!r && !i) return std::nullopt;
    return cplx(r ? get_or<double>(j, re, 0.0, where) : 0.0, i ? get_or<double>(j, im, 0.0, where) : 0.0);
  };
  auto full = [&](const char* key) -> std::optional<cplx> {
    const json* v = find(j, key);
    if (!v) return std::nullopt;
    return complex_from_json(*v, where + "." + key);
  };
  auto nu = full("nu"), nubar = full("nubar");
  if (!nu) nu = part("nu_re", "nu_im");
  if (!nubar) nubar = part("nubar_re", "nubar_im");
  auto g = full("gamma"), d = full("delta");
  if ((nu || nubar) && (g || d)) throw ValidationError(where + ": give either nu/nubar or gamma/delta");
  if (g || d) return make_singularity_gd(a, g.value_or(0.0), d.value_or(0.0));
  return make_singularity(a, nu.value_or(0.0), nubar.value_or(0.0));
}

SymbolSpec symbol_from_json(const json& j, Geometry fallback) {
  if (!j.is_object()) throw ValidationError("symbol: expected an object");
  SymbolSpec s;
  s.geometry = find(j, "geometry") ? geometry_from_string(get_or<std::string>(j, "geometry", "", "symbol"))
                                   : fallback;
  double kappa = get_or<double>(j, "decay_kappa", 3.0, "symbol");
  if (const json* lau = find(j, "regular_laurent")) {
    if (!lau->is_array() || lau->size() % 2 != 1)
      throw ValidationError("symbol.regular_laurent: expected an odd-length array b_{-K..K}");
    std::vector<cplx> c;
    for (std::size_t k = 0; k < lau->size(); ++k)
      c.push_back(complex_from_json((*lau)[k], "symbol.regular_laurent[" + std::to_string(k) + "]"));
    s.regular = RegularPart::from_laurent(std::move(c));
  } else {
    std::string text = get_or<std::string>(j, "regular", "1", "symbol");
    try {
      s.regular = RegularPart::from_expression(text, kappa);
    } catch (const ParseError& e) {
      throw ValidationError(std::string("symbol.regular: ") + e.what());
    }
  }
  if (const json* sing = find(j, "singularities")) {
    if (!sing->is_array()) throw ValidationError("symbol.singularities: expected an array");
    for (std::size_t i = 0; i < sing->size(); ++i) s.singularities.push_back(singularity_from_json((*sing)[i], i));
  }
  return s;
}

json symbol_to_json(const SymbolSpec& s) {
  json j;
  j["geometry"] = s.geometry == Geometry::circle ? "circle" : "line";
  if (s.regular.kind == RegularPart::Kind::fourier_series) {
    json c = json::array();
    for (cplx v : s.regular.laurent) c.push_back(complex_to_json(v));
    j["regular_laurent"] = c;
  } else {
    j["regular"] = s.regular.identity ? std::string("1") : s.regular.expr.text();
    j["decay_kappa"] = s.regular.decay_kappa;
  }
  json sing = json::array();
  for (auto& p : s.singularities)
    sing.push_back({{"location", complex_to_json(p.location)},
                    {"nu", complex_to_json(p.nu)},
                    {"nubar", complex_to_json(p.nubar)}});
  j["singularities"] = sing;
  return j;
}

ReportFormat format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ValidationError("output.format: expected csv or json, got '" + s + "'");
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  if (!c.name.empty()) j["name"] = c.name;
  j["mode"] = to_string(c.mode);
  if (c.mode == Mode::toeplitz || c.mode == Mode::wienerhopf) {
    j["symbol"] = symbol_to_json(c.symbol);
    j["sweep"] = c.sweep;
  }
  const Numerics& n = c.numerics;
  json nj;
  nj["workers"] = n.workers;
  nj["row_timeout_s"] = n.row_timeout_s;
  nj["nodes_per_panel"] = n.nodes_per_panel;
  nj["L"] = n.L;
  if (n.tol) nj["tol"] = *n.tol;
  nj["seed"] = n.seed;
  nj["timing"] = n.timing;
  nj["chf_gamma"] = n.chf_gamma;
  nj["chf_delta"] = n.chf_delta;
  j["numerics"] = nj;
  j["output"] = {{"format", c.output.format == ReportFormat::csv ? "csv" : "json"}, {"path", c.output.path}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  std::string schema = get_or<std::string>(j, "schema", "", "config");
  if (schema != kConfigSchema)
    throw ValidationError("config.schema: expected '" + std::string(kConfigSchema) + "', got '" + schema + "'");
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", "", "config");
  if (!find(j, "mode")) throw ValidationError("config.mode: missing");
  c.mode = mode_from_string(get_or<std::string>(j, "mode", "", "config"));
  Geometry g = c.mode == Mode::wienerhopf ? Geometry::line : Geometry::circle;
  if (const json* s = find(j, "symbol")) c.symbol = symbol_from_json(*s, g);
  else c.symbol.geometry = g;
  if (const json* s = find(j, "sweep")) {
    if (!s->is_array()) throw ValidationError("config.sweep: expected an array of numbers");
    for (auto& v : *s) {
      if (!v.is_number()) throw ValidationError("config.sweep: expected numbers");
      c.sweep.push_back(v.get<double>());
    }
  }
  if (const json* nj = find(j, "numerics")) {
    Numerics& n = c.numerics;
    const std::string w = "numerics";
    n.workers = get_or<int>(*nj, "workers", n.workers, w);
    n.row_timeout_s = get_or<double>(*nj, "row_timeout_s", n.row_timeout_s, w);
    n.nodes_per_panel = get_or<int>(*nj, "nodes_per_panel", n.nodes_per_panel, w);
    n.L = get_or<double>(*nj, "L", n.L, w);
    if (find(*nj, "tol")) n.tol = get_or<double>(*nj, "tol", 0.0, w);
    n.seed = get_or<std::uint64_t>(*nj, "seed", n.seed, w);
    n.timing = get_or<bool>(*nj, "timing", n.timing, w);
    n.chf_gamma = get_or<std::vector<double>>(*nj, "chf_gamma", n.chf_gamma, w);
    n.chf_delta = get_or<std::vector<double>>(*nj, "chf_delta", n.chf_delta, w);
  }
  if (const json* o = find(j, "output")) {
    c.output.format = format_from_string(get_or<std::string>(*o, "format", "csv", "output"));
    c.output.path = get_or<std::string>(*o, "path", "", "output");
  }
  return c;
}

// ---------------------------------------------------------------------------
// numbers

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_num(std::string_view s) {
  if (s == "nan" || s == "-nan") return std::nan("");
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError("csv: bad number '" + std::string(s) + "'");
  return v;
}

cplx reduce_log(cplx z) { return {z.real(), std::remainder(z.imag(), kTwoPi)}; }

void set_comparison(ComparisonRow& row, cplx numeric, cplx predicted) {
  row.log_det_numeric = numeric;
  row.log_det_predicted = predicted;
  row.residual_after_leading = reduce_log(numeric - predicted);
  row.rel_error = std::abs(std::exp(row.residual_after_leading) - 1.0);
  row.ok = true;
}

double rel_error_of(cplx numeric, cplx predicted) { return std::abs(std::exp(reduce_log(numeric - predicted)) - 1.0); }

// ---------------------------------------------------------------------------
// fits

std::optional<ConvergenceFit> try_fit(const std::vector<ComparisonRow>& rows, std::string* status) {
  try {
    auto f = fit_convergence(rows);
    if (status) *status = "ok";
    return f;
  } catch (const DegenerateError&) {
    if (status) *status = "converged below floor";
  } catch (const ParameterError&) {
    if (status) *status = "insufficient rows";
  }
  return std::nullopt;
}

std::optional<Arbitration> arbitrate(const ExperimentConfig& cfg, const std::vector<ComparisonRow>& rows) {
  std::vector<ComparisonRow> prim, alt;
  for (auto& r : rows) {
    if (!r.ok || !r.log_det_alternative) continue;
    prim.push_back(r);
    ComparisonRow a = r;
    a.rel_error = rel_error_of(r.log_det_numeric, *r.log_det_alternative);
    alt.push_back(a);
  }
  if (prim.empty()) return std::nullopt;
  Arbitration out;
  bool toe = cfg.mode == Mode::toeplitz;
  out.primary = toe ? to_string(PairExponent::conjecture) : to_string(PairProduct::ordered);
  out.alternative = toe ? to_string(PairExponent::as_printed) : to_string(PairProduct::symmetric);
  out.primary_error = prim.back().rel_error;
  out.alternative_error = alt.back().rel_error;
  if (auto f = try_fit(prim, nullptr)) out.primary_exponent = f->exponent;
  if (auto f = try_fit(alt, nullptr)) out.alternative_exponent = f->exponent;
  out.alternative_plateau = out.alternative_exponent && *out.alternative_exponent > -0.3;
  double scale = std::max(out.primary_error, out.alternative_error);
  if (std::abs(out.primary_error - out.alternative_error) <= 1e-12 * scale) out.winner = "tie";
  else out.winner = out.primary_error < out.alternative_error ? "primary" : "alternative";
  return out;
}

// residual = K + lambda * osc over the rows carrying an osc term
std::optional<OscFit> fit_osc(const std::vector<ComparisonRow>& rows, std::string* status) {
  std::vector<cplx> r, o;
  for (auto& row : rows)
    if (row.ok && row.osc_term) {
      r.push_back(row.residual_after_leading);
      o.push_back(*row.osc_term);
    }
  if (r.size() < 3) {
    *status = r.empty() ? "no oscillating term" : "insufficient rows";
    return std::nullopt;
  }
  const double n = double(r.size());
  cplx so = 0.0, sr = 0.0, sor = 0.0;
  double soo = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    so += o[i];
    sr += r[i];
    sor += std::conj(o[i]) * r[i];
    soo += std::norm(o[i]);
  }
  double den = soo - std::norm(so) / n;
  if (!(den > 0.0)) {
    *status = "oscillating term is constant";
    return std::nullopt;
  }
  OscFit f;
  f.points = int(r.size());
  f.amplitude = (sor - std::conj(so) * sr / n) / den;
  f.constant = (sr - f.amplitude * so) / n;
  f.amplitude_ratio = std::abs(f.amplitude);
  double ss_res = 0.0, ss_tot = 0.0;
  int agree = 0;
  cplx mean = sr / n;
  for (std::size_t i = 0; i < r.size(); ++i) {
    ss_res += std::norm(r[i] - f.constant - f.amplitude * o[i]);
    ss_tot += std::norm(r[i] - mean);
    if (((r[i] - f.constant) * std::conj(o[i])).real() > 0.0) ++agree;
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.sign_agreement = agree / n;
  *status = "ok";
  return f;
}

// ---------------------------------------------------------------------------
// row execution

using RowFn = std::function<ComparisonRow(double)>;

ComparisonRow failed_row(double size, std::string why) {
  ComparisonRow r;
  r.size = size;
  r.ok = false;
  r.failure = std::move(why);
  return r;
}

ComparisonRow guarded(const RowFn& fn, double size) {
  try {
    return fn(size);
  } catch (const std::exception& e) {
    return failed_row(size, e.what());
  }
}

// Runs fn on its own thread; if it overruns, the thread is abandoned and the
// row records the timeout.
ComparisonRow run_row(std::shared_ptr<const RowFn> fn, double size, double timeout_s) {
  struct State {
    std::mutex mu;
    std::condition_variable cv;
    bool done = false;
    ComparisonRow row;
  };
  auto st = std::make_shared<State>();
  std::thread t([st, fn, size] {
    ComparisonRow r = guarded(*fn, size);
    std::lock_guard<std::mutex> lk(st->mu);
    st->row = std::move(r);
    st->done = true;
    st->cv.notify_all();
  });
  std::unique_lock<std::mutex> lk(st->mu);
  bool done = st->cv.wait_for(lk, std::chrono::duration<double>(timeout_s), [&] { return st->done; });
  lk.unlock();
  if (!done) {
    t.detach();
    return failed_row(size, "timeout after " + num(timeout_s) + " s");
  }
  t.join();
  return st->row;
}

}  // namespace

std::vector<ComparisonRow> run_rows(const std::vector<double>& sweep, std::function<ComparisonRow(double)> fn,
                                    const Numerics& numerics) {
  auto shared = std::make_shared<const RowFn>(std::move(fn));
  std::vector<ComparisonRow> out(sweep.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < sweep.size();) {
      auto t0 = std::chrono::steady_clock::now();
      out[i] = run_row(shared, sweep[i], numerics.row_timeout_s);
      out[i].size = sweep[i];
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      out[i].wall_time_ms = numerics.timing ? ms : 0.0;
    }
  };
  int nw = std::clamp(numerics.workers, 1, int(std::max<std::size_t>(sweep.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Mode m) {
  switch (m) {
    case Mode::toeplitz: return "toeplitz";
    case Mode::wienerhopf: return "wienerhopf";
    case Mode::specfun_suite: return "specfun-suite";
    case Mode::chf_integrals: return "chf-integrals";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::toeplitz, Mode::wienerhopf, Mode::specfun_suite, Mode::chf_integrals})
    if (s == to_string(m)) return m;
  throw ValidationError("config.mode: unknown mode '" + s + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

void validate_config(const ExperimentConfig& cfg) {
  const Numerics& n = cfg.numerics;
  if (n.workers < 1) throw ValidationError("numerics.workers must be at least 1");
  if (!(n.row_timeout_s > 0.0)) throw ValidationError("numerics.row_timeout_s must be positive");
  if (n.tol && !(*n.tol > 0.0)) throw ValidationError("numerics.tol must be positive");
  if (cfg.mode == Mode::chf_integrals) {
    if (n.chf_gamma.empty() || n.chf_delta.empty()) throw ValidationError("numerics.chf_gamma/chf_delta: empty grid");
    return;
  }
  if (cfg.mode == Mode::specfun_suite) return;

  if (cfg.sweep.empty()) throw ValidationError("sweep: must not be empty");
  for (std::size_t i = 1; i < cfg.sweep.size(); ++i)
    if (!(cfg.sweep[i] > cfg.sweep[i - 1])) throw ValidationError("sweep: must be strictly increasing");
  if (cfg.mode == Mode::toeplitz) {
    if (cfg.symbol.geometry != Geometry::circle) throw ValidationError("toeplitz mode needs a circle symbol");
    for (double m : cfg.sweep)
      if (m != std::floor(m) || m < 2 || m > 1e5) throw ValidationError("sweep: toeplitz sizes must be integers >= 2");
  } else {
    if (cfg.symbol.geometry != Geometry::line) throw ValidationError("wienerhopf mode needs a line symbol");
    for (double x : cfg.sweep)
      if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("sweep: wienerhopf lengths must be positive");
    if (n.nodes_per_panel < 2) throw ValidationError("numerics.nodes_per_panel must be at least 2");
    if (!(n.L > 0.0)) throw ValidationError("numerics.L must be positive");
  }
  auto rep = validate_symbol(cfg.symbol);
  if (!rep.ok) throw ValidationError("symbol: " + rep.failures());
}

ConvergenceFit fit_convergence(const std::vector<ComparisonRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  int ok = 0;
  for (auto& r : rows) {
    if (!r.ok || !(r.size > 0.0) || !std::isfinite(r.rel_error)) continue;
    ++ok;
    if (r.rel_error > std::max(kErrorFloor, r.numeric_error)) pts.emplace_back(std::log(r.size), std::log(r.rel_error));
  }
  if (ok >= 3 && pts.empty()) throw DegenerateError("converged below floor");
  if (pts.size() < 3) throw ParameterError("fit_convergence: needs at least 3 rows with rel_error above the floor");
  double n = double(pts.size()), sx = 0, sy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("fit_convergence: all sizes equal");
  ConvergenceFit f;
  f.exponent = sxy / sxx;
  double ss_res = syy - f.exponent * sxy;
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  f.points = int(pts.size());
  return f;
}

ExperimentSummary summarize(const ExperimentConfig& cfg, const std::vector<ComparisonRow>& rows,
                            const std::vector<IdentityCheck>& checks) {
  ExperimentSummary s;
  for (auto& r : rows) (r.ok ? s.rows_ok : s.rows_failed)++;
  for (auto& c : checks) (c.passed ? s.checks_passed : s.checks_failed)++;
  if (cfg.mode != Mode::toeplitz && cfg.mode != Mode::wienerhopf) return s;
  s.fit = try_fit(rows, &s.fit_status);
  s.arbitration = arbitrate(cfg, rows);
  if (cfg.mode == Mode::toeplitz) s.osc = fit_osc(rows, &s.osc_status);
  return s;
}

namespace {

std::vector<ComparisonRow> run_toeplitz(const ExperimentConfig& cfg) {
  const SymbolSpec& spec = cfg.symbol;
  std::shared_ptr<const ToeplitzEngine> engine;
  std::shared_ptr<const ToeplitzAsymptotics> asym;
  try {
    engine = std::make_shared<ToeplitzEngine>(spec, int(cfg.sweep.back()));
    asym = std::make_shared<ToeplitzAsymptotics>(spec);
  } catch (const std::exception& e) {
    std::vector<ComparisonRow> rows;
    for (double m : cfg.sweep) rows.push_back(failed_row(m, e.what()));
    return rows;
  }
  const bool pairs = spec.singularities.size() >= 2;
  auto fn = [engine, asym, pairs](double size) {
    int m = int(size);
    ComparisonRow row;
    row.size = size;
    auto d = engine->det(m);
    if (d.singular) throw DegenerateError("toeplitz matrix is singular at m = " + std::to_string(m));
    auto p = asym->leading(m, PairExponent::conjecture);
    set_comparison(row, d.log_value, p.log_leading);
    row.numeric_error = d.error_estimate;
    row.factors = p.factors;
    if (pairs) {
      row.log_det_alternative = asym->leading(m, PairExponent::as_printed).log_leading;
      try {
        row.osc_term = asym->subleading(m).osc / (double(m) * double(m));
      } catch (const ParameterError&) {
        // outside the range where the correction is stated
      }
    }
    return row;
  };
  return run_rows(cfg.sweep, fn, cfg.numerics);
}

std::vector<ComparisonRow> run_wienerhopf(const ExperimentConfig& cfg) {
  auto spec = std::make_shared<const SymbolSpec>(cfg.symbol);
  std::shared_ptr<const WienerHopfAsymptotics> asym;
  try {
    asym = std::make_shared<WienerHopfAsymptotics>(*spec);
  } catch (const std::exception& e) {
    std::vector<ComparisonRow> rows;
    for (double x : cfg.sweep) rows.push_back(failed_row(x, e.what()));
    return rows;
  }
  const bool pairs = spec->singularities.size() >= 2;
  const int npp = cfg.numerics.nodes_per_panel;
  const double L = cfg.numerics.L;
  auto fn = [spec, asym, pairs, npp, L](double x) {
    ComparisonRow row;
    row.size = x;
    auto scheme = make_line_scheme(*spec, x, npp, L);
    auto d = fredholm_det2_line(*spec, x, scheme);
    if (d.singular) throw DegenerateError("Nystrom matrix is singular");
    auto p = asym->leading(x, PairProduct::ordered);
    set_comparison(row, d.log_value, p.log_leading);
    row.numeric_error = d.error_estimate;
    row.factors = p.factors;
    if (pairs) row.log_det_alternative = asym->leading(x, PairProduct::symmetric).log_leading;
    return row;
  };
  return run_rows(cfg.sweep, fn, cfg.numerics);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentResult res;
  res.config = cfg;
  switch (cfg.mode) {
    case Mode::toeplitz: res.rows = run_toeplitz(cfg); break;
    case Mode::wienerhopf: res.rows = run_wienerhopf(cfg); break;
    case Mode::specfun_suite: res.checks = run_specfun_suite(cfg.numerics.seed, cfg.numerics.tol); break;
    case Mode::chf_integrals: res.checks = run_chf_suite(cfg.numerics); break;
  }
  res.summary = summarize(cfg, res.rows, res.checks);
  return res;
}

// ---------------------------------------------------------------------------
// identity suites

namespace {

struct Check {
  IdentityCheck c;
  explicit Check(std::string name, std::string params, double tol) {
    c.name = std::move(name);
    c.parameters = std::move(params);
    c.tolerance = tol;
  }
  template <class F>
  void point(F&& residual) {
    ++c.points;
    try {
      double r = residual();
      if (!std::isfinite(r)) throw OverflowError("residual is not finite");
      c.max_residual = std::max(c.max_residual, r);
    } catch (const std::exception& e) {
      if (c.failure.empty()) c.failure = e.what();
    }
  }
  IdentityCheck done() {
    c.passed = c.failure.empty() && c.max_residual < c.tolerance;
    return c;
  }
};

// parameter on a random point of the box, kept at least 0.05 from integers
cplx random_param(std::mt19937_64& g, double re0, double re1, double im) {
  std::uniform_real_distribution<double> x(re0, re1), y(-im, im);
  for (;;) {
    cplx c(x(g), y(g));
    if (!near_integer(c, 0.05)) return c;
  }
}

double rel_to(cplx residual, std::initializer_list<cplx> terms) {
  double s = 0.0;
  for (cplx t : terms) s = std::max(s, std::abs(t));
  return std::abs(residual) / s;
}

}  // namespace

std::vector<IdentityCheck> run_specfun_suite(std::uint64_t seed, std::optional<double> tol) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<IdentityCheck> out;
  auto t = [&](double def) { return tol.value_or(def); };
  auto log_radius = [&](double r0, double r1) { return r0 * std::pow(r1 / r0, unit(g)); };

  // Psi = Gamma[1-c; a-c+1] Phi(a, c; z) + Gamma[c-1; a] z^{1-c} Phi(a-c+1, 2-c; z)
  {
    Check k("kummer_connection", "500 points, |z| in [0.1, 20], c not an integer", t(1e-9));
    for (int i = 0; i < 500; ++i) {
      cplx a = random_param(g, -0.5, 1.5, 0.5), c = random_param(g, 0.1, 2.9, 0.5);
      cplx z = std::polar(log_radius(0.1, 20.0), kPi * (2.0 * unit(g) - 1.0) * 0.999);
      k.point([&] {
        cplx psi = tricomi_psi(a, c, z);
        cplx t1 = gamma_ratio({1.0 - c}, {a - c + 1.0}) * kummer_phi(a, c, z);
        cplx t2 = gamma_ratio({c - 1.0}, {a}) * std::exp((1.0 - c) * std::log(z)) * kummer_phi(a - c + 1.0, 2.0 - c, z);
        return rel_to(psi - t1 - t2, {psi, t1, t2});
      });
    }
    out.push_back(k.done());
  }

  // Psi(a, c; z e^{+-2 i pi}) against the principal branch, Im z < 0 (+) and Im z > 0 (-)
  for (int s : {1, -1}) {
    Check k(s > 0 ? "monodromy_lower" : "monodromy_upper",
            s > 0 ? "100 points, Im z < 0, z e^{2 i pi}" : "100 points, Im z > 0, z e^{-2 i pi}", t(1e-8));
    for (int i = 0; i < 100; ++i) {
      cplx a = random_param(g, -0.5, 1.5, 0.5), c = random_param(g, 0.1, 2.9, 0.5);
      double th = kPi * (0.01 + 0.98 * unit(g));
      cplx z = std::polar(log_radius(0.1, 20.0), -s * th);
      k.point([&] {
        cplx lhs = tricomi_psi_sheet(a, c, z, s);
        cplx t1 = std::exp(-double(s) * kTwoPi * kI * a) * tricomi_psi(a, c, z);
        cplx t2 = double(s) * kTwoPi * kI * std::exp(-double(s) * kI * kPi * a + z) *
                  gamma_ratio({}, {a, 1.0 + a - c}) * tricomi_psi(c - a, c, -z);
        return rel_to(lhs - t1 - t2, {lhs, t1, t2});
      });
    }
    out.push_back(k.done());
  }

  {
    Check k("phi_regime_overlap", "200 points, |z| in the switchover band", t(1e-8));
    for (int i = 0; i < 200; ++i) {
      cplx a = random_param(g, -0.5, 1.5, 0.5), c = random_param(g, 0.3, 2.5, 0.5);
      cplx z = std::polar(kKummerSwitchRadius + 15.0 * unit(g), kPi * (2.0 * unit(g) - 1.0));
      k.point([&] {
        double err = 0.0;
        cplx va = kummer_phi_asymptotic(a, c, z, &err), vc = kummer_phi_convergent(a, c, z);
        return std::abs(va - vc) / std::abs(vc);
      });
    }
    out.push_back(k.done());
  }

  {
    Check k("barnes_recurrence", "Re z in [0.2, 4] step 0.2, Im z in [-2, 2] step 0.25", t(1e-9));
    for (int ix = 1; ix <= 20; ++ix)
      for (int iy = -8; iy <= 8; ++iy) {
        cplx z(0.2 * ix, 0.25 * iy);
        k.point([&] {
          cplx lhs = barnes_g(z + 1.0);
          return std::abs(lhs - gamma(z) * barnes_g(z)) / std::abs(lhs);
        });
      }
    out.push_back(k.done());
  }

  {
    Check refl("digamma_reflection", "200 points, psi(1-z) - psi(z) = pi cot(pi z)", t(1e-10));
    Check rec("digamma_recurrence", "200 points, psi(z+1) = psi(z) + 1/z", t(1e-10));
    for (int i = 0; i < 200; ++i) {
      cplx z = random_param(g, -3.0, 3.0, 2.0);
      refl.point([&] {
        cplx a = digamma(1.0 - z), b = digamma(z), c = kPi / std::tan(kPi * z);
        return rel_to(a - b - c, {a, b, c});
      });
      rec.point([&] {
        cplx a = digamma(z + 1.0), b = digamma(z), c = 1.0 / z;
        return rel_to(a - b - c, {a, b, c});
      });
    }
    out.push_back(refl.done());
    out.push_back(rec.done());
  }
  return out;
}

std::vector<IdentityCheck> run_chf_suite(const Numerics& numerics) {
  std::vector<std::pair<double, double>> grid;
  for (double gm : numerics.chf_gamma)
    for (double d : numerics.chf_delta) grid.emplace_back(gm, d);
  std::vector<std::vector<IdentityCheck>> per(grid.size());
  const double tol = numerics.tol.value_or(1e-4);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
      auto [gm, d] = grid[i];
      std::string params = "gamma=" + num(gm) + " delta=" + num(d);
      try {
        for (auto& r : verify_chf_integrals(gm, d)) {
          IdentityCheck c;
          c.name = r.name;
          c.parameters = params;
          c.points = 1;
          c.max_residual = r.abs_error;
          c.tolerance = tol;
          c.passed = r.abs_error < tol;
          if (!r.converged) c.failure = "tail not converged (change " + num(r.tail_estimate) + ")";
          per[i].push_back(c);
        }
      } catch (const std::exception& e) {
        IdentityCheck c;
        c.name = "chf";
        c.parameters = params;
        c.tolerance = tol;
        c.failure = e.what();
        per[i].push_back(c);
      }
    }
  };
  int nw = std::clamp(numerics.workers, 1, int(std::max<std::size_t>(grid.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<IdentityCheck> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// ---------------------------------------------------------------------------
// reports

namespace {

const char* kCsvHeader =
    "size,log_det_num_re,log_det_num_im,log_det_pred_re,log_det_pred_im,rel_error,residual_re,residual_im,wall_time_ms";
const char* kCheckHeader = "name,parameters,points,max_residual,tolerance,passed,failure";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

json opt_double(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json summary_json(const ExperimentSummary& s) {
  json j;
  j["rows_ok"] = s.rows_ok;
  j["rows_failed"] = s.rows_failed;
  j["checks_passed"] = s.checks_passed;
  j["checks_failed"] = s.checks_failed;
  if (!s.fit_status.empty()) j["fit_status"] = s.fit_status;
  if (s.fit) j["fit"] = {{"exponent", s.fit->exponent}, {"r_squared", s.fit->r_squared}, {"points", s.fit->points}};
  if (auto& a = s.arbitration)
    j["pair_arbitration"] = {{"primary", a->primary},
                             {"alternative", a->alternative},
                             {"primary_error", a->primary_error},
                             {"alternative_error", a->alternative_error},
                             {"primary_exponent", opt_double(a->primary_exponent)},
                             {"alternative_exponent", opt_double(a->alternative_exponent)},
                             {"alternative_plateau", a->alternative_plateau},
                             {"winner", a->winner}};
  if (!s.osc_status.empty()) j["osc_status"] = s.osc_status;
  if (auto& o = s.osc)
    j["osc_fit"] = {{"amplitude", complex_to_json(o->amplitude)},
                    {"constant", complex_to_json(o->constant)},
                    {"amplitude_ratio", o->amplitude_ratio},
                    {"r_squared", o->r_squared},
                    {"sign_agreement", o->sign_agreement},
                    {"points", o->points}};
  return j;
}

json row_json(const ComparisonRow& r) {
  json j;
  j["size"] = r.size;
  j["ok"] = r.ok;
  if (!r.ok) {
    j["failure"] = r.failure;
    j["wall_time_ms"] = r.wall_time_ms;
    return j;
  }
  j["log_det_num_re"] = r.log_det_numeric.real();
  j["log_det_num_im"] = r.log_det_numeric.imag();
  j["log_det_pred_re"] = r.log_det_predicted.real();
  j["log_det_pred_im"] = r.log_det_predicted.imag();
  j["rel_error"] = r.rel_error;
  j["residual_re"] = r.residual_after_leading.real();
  j["residual_im"] = r.residual_after_leading.imag();
  j["wall_time_ms"] = r.wall_time_ms;
  j["numeric_error_estimate"] = r.numeric_error;
  json f = json::array();
  for (auto& p : r.factors) f.push_back({{"name", p.name}, {"log_value", complex_to_json(p.log_value)}});
  j["factors"] = f;
  if (r.log_det_alternative) j["log_det_alternative"] = complex_to_json(*r.log_det_alternative);
  if (r.osc_term) j["osc_term"] = complex_to_json(*r.osc_term);
  return j;
}

ComparisonRow row_from_json(const json& j) {
  ComparisonRow r;
  const std::string w = "report.rows";
  r.size = get_or<double>(j, "size", 0.0, w);
  r.ok = get_or<bool>(j, "ok", false, w);
  r.wall_time_ms = get_or<double>(j, "wall_time_ms", 0.0, w);
  if (!r.ok) {
    r.failure = get_or<std::string>(j, "failure", "", w);
    return r;
  }
  auto d = [&](const char* k) { return get_or<double>(j, k, 0.0, w); };
  r.log_det_numeric = {d("log_det_num_re"), d("log_det_num_im")};
  r.log_det_predicted = {d("log_det_pred_re"), d("log_det_pred_im")};
  r.rel_error = d("rel_error");
  r.residual_after_leading = {d("residual_re"), d("residual_im")};
  r.numeric_error = d("numeric_error_estimate");
  if (const json* f = find(j, "factors"))
    for (auto& p : *f)
      r.factors.push_back({p.at("name").get<std::string>(), complex_from_json(p.at("log_value"), w + ".factors")});
  if (const json* a = find(j, "log_det_alternative")) r.log_det_alternative = complex_from_json(*a, w);
  if (const json* o = find(j, "osc_term")) r.osc_term = complex_from_json(*o, w);
  return r;
}

json check_json(const IdentityCheck& c) {
  return {{"name", c.name},         {"parameters", c.parameters}, {"points", c.points},
          {"max_residual", c.max_residual}, {"tolerance", c.tolerance}, {"passed", c.passed},
          {"failure", c.failure}};
}

IdentityCheck check_from_json(const json& j) {
  IdentityCheck c;
  const std::string w = "report.checks";
  c.name = get_or<std::string>(j, "name", "", w);
  c.parameters = get_or<std::string>(j, "parameters", "", w);
  c.points = get_or<int>(j, "points", 0, w);
  c.max_residual = get_or<double>(j, "max_residual", 0.0, w);
  c.tolerance = get_or<double>(j, "tolerance", 0.0, w);
  c.passed = get_or<bool>(j, "passed", false, w);
  c.failure = get_or<std::string>(j, "failure", "", w);
  return c;
}

}  // namespace

std::string render_report(const ExperimentResult& res, ReportFormat format) {
  if (format == ReportFormat::json) {
    json j;
    j["schema"] = kReportSchema;
    j["config"] = config_json(res.config);
    json rows = json::array();
    for (auto& r : res.rows) rows.push_back(row_json(r));
    j["rows"] = rows;
    json checks = json::array();
    for (auto& c : res.checks) checks.push_back(check_json(c));
    j["checks"] = checks;
    j["summary"] = summary_json(res.summary);
    return j.dump(2) + "\n";
  }
  std::string s;
  if (res.config.mode == Mode::specfun_suite || res.config.mode == Mode::chf_integrals) {
    s = std::string(kCheckHeader) + "\n";
    for (auto& c : res.checks)
      s += csv_field(c.name) + "," + csv_field(c.parameters) + "," + std::to_string(c.points) + "," +
           num(c.max_residual) + "," + num(c.tolerance) + "," + (c.passed ? "true" : "false") + "," +
           csv_field(c.failure) + "\n";
    return s;
  }
  s = std::string(kCsvHeader) + "\n";
  const double nan = std::nan("");
  for (auto& r : res.rows) {
    cplx n = r.ok ? r.log_det_numeric : cplx(nan, nan), p = r.ok ? r.log_det_predicted : cplx(nan, nan);
    cplx q = r.ok ? r.residual_after_leading : cplx(nan, nan);
    double e = r.ok ? r.rel_error : nan;
    for (double v : {r.size, n.real(), n.imag(), p.real(), p.imag(), e, q.real(), q.imag()}) s += num(v) + ",";
    s += num(r.wall_time_ms) + "\n";
  }
  return s;
}

void emit_report(const ExperimentResult& res, const OutputSpec& out) {
  std::string text = render_report(res, out.format);
  if (out.path.empty() || out.path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(out.path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + out.path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to '" + out.path + "' failed");
}

ExperimentResult replay_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  if (!j.is_object() || get_or<std::string>(j, "schema", "", "report") != kReportSchema)
    throw ValidationError(std::string("report: expected schema '") + kReportSchema + "'");
  ExperimentResult res;
  res.config = config_from_json(j.at("config"));
  try {
    for (auto& r : j.at("rows")) res.rows.push_back(row_from_json(r));
    for (auto& c : j.at("checks")) res.checks.push_back(check_from_json(c));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
  res.summary = summarize(res.config, res.rows, res.checks);
  return res;
}

std::vector<ComparisonRow> parse_csv_rows(std::string_view csv) {
  std::vector<ComparisonRow> rows;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= csv.size()) return false;
    std::size_t e = csv.find('\n', pos);
    if (e == std::string_view::npos) e = csv.size();
    line = csv.substr(pos, e - pos);
    pos = e + 1;
    return true;
  };
  std::string_view line;
  if (!next_line(line) || line != kCsvHeader) throw ParseError("csv: unexpected header");
  while (next_line(line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::size_t s = 0;
    for (;;) {
      std::size_t c = line.find(',', s);
      v.push_back(parse_num(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s)));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    if (v.size() != 9) throw ParseError("csv: expected 9 fields");
    ComparisonRow r;
    r.size = v[0];
    r.ok = !std::isnan(v[5]);
    if (r.ok) {
      r.log_det_numeric = {v[1], v[2]};
      r.log_det_predicted = {v[3], v[4]};
      r.rel_error = v[5];
      r.residual_after_leading = {v[6], v[7]};
    }
    r.wall_time_ms = v[8];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace fhdet
