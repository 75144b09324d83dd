// fhdet: run determinant sweeps and identity suites, write CSV/JSON reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fhdet/harness.hpp"

using namespace fhdet;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitAllFailed = 3;

struct Common {
  std::string out;
  std::string format;
  int workers = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool timing = false;
};

struct SymbolArgs {
  std::string regular = "1";
  double decay_kappa = 3.0;
  std::vector<std::string> sings;
  std::vector<double> sizes;
};

// LOC:GAMMA:DELTA, each a complex literal
FHSingularity parse_sing(const std::string& s) {
  auto c1 = s.find(':'), c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ValidationError("--sing expects LOC:GAMMA:DELTA, got '" + s + "'");
  try {
    return make_singularity_gd(parse_complex(s.substr(0, c1)), parse_complex(s.substr(c1 + 1, c2 - c1 - 1)),
                               parse_complex(s.substr(c2 + 1)));
  } catch (const ParseError& e) {
    throw ValidationError("--sing '" + s + "': " + e.what());
  }
}

SymbolSpec build_symbol(const SymbolArgs& a, Geometry g) {
  SymbolSpec s;
  s.geometry = g;
  try {
    s.regular = RegularPart::from_expression(a.regular, a.decay_kappa);
  } catch (const ParseError& e) {
    throw ValidationError(std::string("--regular: ") + e.what());
  }
  for (auto& t : a.sings) s.singularities.push_back(parse_sing(t));
  return s;
}

void add_symbol_options(CLI::App* app, SymbolArgs& a, const char* size_help) {
  app->add_option("--regular", a.regular, "regular part as an expression (theta or z on the circle, xi on the line)");
  app->add_option("--decay-kappa", a.decay_kappa, "line symbols: F - 1 = O(|xi|^{-(1+kappa)/2})");
  app->add_option("--sing", a.sings, "singularity LOC:GAMMA:DELTA (repeatable)");
  app->add_option("--sizes", a.sizes, size_help)->required()->delimiter(',');
}

void apply_common(ExperimentConfig& cfg, const Common& c, const CLI::App& app) {
  if (app.count("--out")) cfg.output.path = c.out;
  if (app.count("--format")) cfg.output.format = c.format == "json" ? ReportFormat::json : ReportFormat::csv;
  if (app.count("--workers")) {
    cfg.numerics.workers = c.workers;
  } else if (const char* env = std::getenv("FHDET_WORKERS")) {
    try {
      cfg.numerics.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("FHDET_WORKERS: not an integer: '") + env + "'");
    }
  }
  if (app.count("--tol")) cfg.numerics.tol = c.tol;
  if (app.count("--seed")) cfg.numerics.seed = c.seed;
  if (app.count("--timing")) cfg.numerics.timing = true;
}

std::string summary_line(const ExperimentResult& r) {
  const auto& s = r.summary;
  std::ostringstream o;
  o.precision(4);
  if (!r.checks.empty() || r.rows.empty()) {
    o << "checks: " << s.checks_passed << " passed, " << s.checks_failed << " failed";
    for (auto& c : r.checks)
      if (!c.passed)
        o << "\n  FAIL " << c.name << " [" << c.parameters << "] residual " << c.max_residual << " tol " << c.tolerance
          << (c.failure.empty() ? "" : " (" + c.failure + ")");
    return o.str();
  }
  o << "rows: " << s.rows_ok << " ok, " << s.rows_failed << " failed";
  for (auto& row : r.rows)
    if (!row.ok) o << "\n  size " << row.size << ": " << row.failure;
  if (s.fit) o << "\nfitted exponent " << s.fit->exponent << " (r^2 " << s.fit->r_squared << ")";
  else if (!s.fit_status.empty()) o << "\nfit: " << s.fit_status;
  if (auto& a = s.arbitration)
    o << "\npair variants at largest size: " << a->primary << " " << a->primary_error << ", " << a->alternative << " "
      << a->alternative_error << (a->alternative_plateau ? " (plateau)" : "") << " -> " << a->winner;
  if (auto& f = s.osc)
    o << "\nosc amplitude ratio " << f->amplitude_ratio << ", sign agreement " << f->sign_agreement;
  return o.str();
}

int finish(const ExperimentResult& r) {
  emit_report(r, r.config.output);
  std::cerr << summary_line(r) << "\n";
  const auto& s = r.summary;
  if (!r.rows.empty() && s.rows_ok == 0) return kExitAllFailed;
  if (!r.checks.empty() && s.checks_passed == 0) return kExitAllFailed;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher-Hartwig determinant experiments"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out, "report path (default stdout)");
  app.add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", common.workers, "worker threads (default FHDET_WORKERS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--tol", common.tol, "override the pass tolerance of identity checks")->check(CLI::PositiveNumber);
  app.add_option("--seed", common.seed, "seed for randomized identity points");
  app.add_flag("--timing", common.timing, "record wall time per row (reports are then not byte-stable)");
  app.fallthrough();

  SymbolArgs toe_args, wh_args;
  int nodes_per_panel = 24;
  double cut_L = 40.0;
  auto* toe = app.add_subcommand("toeplitz", "det T_m against the leading Toeplitz asymptotics");
  add_symbol_options(toe, toe_args, "matrix sizes m, comma separated");
  auto* wh = app.add_subcommand("wienerhopf", "det2 on [0, x] against the leading Wiener-Hopf asymptotics");
  add_symbol_options(wh, wh_args, "interval lengths x, comma separated");
  wh->add_option("--nodes-per-panel", nodes_per_panel, "Gauss-Legendre nodes per panel");
  wh->add_option("--cut", cut_L, "truncation of the xi axis");
  auto* spf = app.add_subcommand("specfun", "special-function identity suite");
  std::vector<double> chf_g{0.0, 0.1, 0.2}, chf_d{0.0, 0.1, 0.2};
  auto* chf = app.add_subcommand("chf-integrals", "closed-form integrals of the CHF products tau and phi");
  chf->add_option("--gamma", chf_g, "gamma values")->delimiter(',');
  chf->add_option("--delta", chf_d, "delta values")->delimiter(',');
  std::string config_path, replay_path;
  auto* sweep = app.add_subcommand("sweep", "run a JSON experiment config");
  sweep->add_option("--config", config_path, "config file")->required();
  auto* replay = app.add_subcommand("replay", "recompute the summary of a JSON report");
  replay->add_option("report", replay_path, "JSON report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    ExperimentConfig cfg;
    if (*replay) {
      std::ifstream in(replay_path);
      if (!in) throw IoError("cannot read report '" + replay_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      auto r = replay_report(ss.str());
      r.config.output = {ReportFormat::json, ""};
      apply_common(r.config, common, app);
      return finish(r);
    }
    if (*sweep) {
      cfg = load_config(config_path);
    } else if (*toe) {
      cfg.mode = Mode::toeplitz;
      cfg.symbol = build_symbol(toe_args, Geometry::circle);
      cfg.sweep = toe_args.sizes;
    } else if (*wh) {
      cfg.mode = Mode::wienerhopf;
      cfg.symbol = build_symbol(wh_args, Geometry::line);
      cfg.sweep = wh_args.sizes;
      cfg.numerics.nodes_per_panel = nodes_per_panel;
      cfg.numerics.L = cut_L;
    } else if (*spf) {
      cfg.mode = Mode::specfun_suite;
    } else if (*chf) {
      cfg.mode = Mode::chf_integrals;
      cfg.numerics.chf_gamma = chf_g;
      cfg.numerics.chf_delta = chf_d;
    }
    apply_common(cfg, common, app);
    return finish(run_experiment(cfg));
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParameterError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
