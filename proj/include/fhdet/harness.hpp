#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fhdet/asymptotics.hpp"
#include "fhdet/symbols.hpp"

namespace fhdet {

inline constexpr const char* kConfigSchema = "fhdet-experiment/1";

enum class Mode { toeplitz, wienerhopf, specfun_suite, chf_integrals };
enum class ReportFormat { csv, json };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct Numerics {
  int workers = 1;
  double row_timeout_s = 120.0;
  // line determinant
  int nodes_per_panel = 24;
  double L = 40.0;
  // identity suites: overrides every per-check tolerance when set
  std::optional<double> tol;
  std::uint64_t seed = 1;
  // wall_time_ms is written as 0 unless enabled, so reports are byte-stable
  bool timing = false;
  // chf-integrals grid, every (gamma, delta) pair
  std::vector<double> chf_gamma{0.0, 0.1, 0.2};
  std::vector<double> chf_delta{0.0, 0.1, 0.2};
};

struct OutputSpec {
  ReportFormat format = ReportFormat::csv;
  std::string path;  // empty or "-" is stdout
};

struct ExperimentConfig {
  std::string name;
  Mode mode = Mode::toeplitz;
  SymbolSpec symbol;
  // m (toeplitz) or x (wienerhopf); unused by the identity suites
  std::vector<double> sweep;
  Numerics numerics;
  OutputSpec output;
};

// JSON config; throws ValidationError (or ParseError for bad syntax).
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
// Sweep order, mode/geometry consistency and symbol admissibility.
void validate_config(const ExperimentConfig& cfg);

struct ComparisonRow {
  double size = 0.0;
  cplx log_det_numeric = 0.0;
  cplx log_det_predicted = 0.0;
  double rel_error = 0.0;
  // log_det_numeric - log_det_predicted, imaginary part in (-pi, pi]
  cplx residual_after_leading = 0.0;
  double wall_time_ms = 0.0;
  // error estimate of the ground-truth determinant
  double numeric_error = 0.0;
  bool ok = false;
  std::string failure;
  std::vector<PredictionFactor> factors;
  // the other pair variant (as printed / symmetric) when there are >= 2 singularities
  std::optional<cplx> log_det_alternative;
  // toeplitz: predicted oscillating term osc/m^2 of the log determinant
  std::optional<cplx> osc_term;
};

// One identity of the special-function or CHF suites.
struct IdentityCheck {
  std::string name;
  std::string parameters;
  int points = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string failure;
};

struct ConvergenceFit {
  double exponent = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

struct Arbitration {
  std::string primary;      // conjecture / ordered
  std::string alternative;  // as_printed / symmetric
  double primary_error = 0.0;
  double alternative_error = 0.0;
  std::optional<double> primary_exponent;
  std::optional<double> alternative_exponent;
  // the alternative error has stopped decaying
  bool alternative_plateau = false;
  std::string winner;  // primary, alternative or tie
};

struct OscFit {
  cplx amplitude = 0.0;  // residual = K + amplitude * osc_term
  cplx constant = 0.0;
  double amplitude_ratio = 0.0;
  double r_squared = 0.0;
  // share of rows whose detrended residual points along osc_term
  double sign_agreement = 0.0;
  int points = 0;
};

struct ExperimentSummary {
  int rows_ok = 0;
  int rows_failed = 0;
  std::string fit_status;  // ok, converged below floor, insufficient rows
  std::optional<ConvergenceFit> fit;
  std::optional<Arbitration> arbitration;
  std::string osc_status;
  std::optional<OscFit> osc;
  int checks_passed = 0;
  int checks_failed = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ComparisonRow> rows;
  std::vector<IdentityCheck> checks;
  ExperimentSummary summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Evaluates fn at every sweep point on up to numerics.workers threads; rows
// come back in sweep order. Exceptions and per-row timeouts become failed rows.
std::vector<ComparisonRow> run_rows(const std::vector<double>& sweep, std::function<ComparisonRow(double)> fn,
                                    const Numerics& numerics);

// Least-squares slope of log rel_error against log size over the rows that
// succeeded. Rows at or below max(1e-13, numeric_error) carry no rate
// information and are left out; if that is every row, DegenerateError
// ("converged below floor"). ParameterError with fewer than three usable rows.
ConvergenceFit fit_convergence(const std::vector<ComparisonRow>& rows);

// Summary statistics from rows and checks alone; run_experiment and replay
// both go through this.
ExperimentSummary summarize(const ExperimentConfig& cfg, const std::vector<ComparisonRow>& rows,
                            const std::vector<IdentityCheck>& checks);

std::string render_report(const ExperimentResult& result, ReportFormat format);
// Writes render_report to out.path (stdout for "" or "-"); IoError names the path.
void emit_report(const ExperimentResult& result, const OutputSpec& out);

// Rebuilds a result from a JSON report, recomputing the summary.
ExperimentResult replay_report(std::string_view json_text);

// CSV rows back to ComparisonRow (the CSV columns only).
std::vector<ComparisonRow> parse_csv_rows(std::string_view csv);

std::vector<IdentityCheck> run_specfun_suite(std::uint64_t seed, std::optional<double> tol = std::nullopt);
std::vector<IdentityCheck> run_chf_suite(const Numerics& numerics);

}  // namespace fhdet
