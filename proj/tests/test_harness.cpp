#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <sys/wait.h>

#include "fhdet/harness.hpp"

using namespace fhdet;

namespace {

std::vector<ComparisonRow> synthetic(const std::vector<double>& sizes, const std::function<double(double)>& err) {
  std::vector<ComparisonRow> rows;
  for (double s : sizes) {
    ComparisonRow r;
    r.size = s;
    r.ok = true;
    r.rel_error = err(s);
    rows.push_back(r);
  }
  return rows;
}

ExperimentConfig toeplitz_config(std::vector<FHSingularity> s, std::vector<double> sweep, const char* b = "1") {
  ExperimentConfig c;
  c.mode = Mode::toeplitz;
  c.symbol.geometry = Geometry::circle;
  c.symbol.regular = RegularPart::from_expression(b);
  c.symbol.singularities = std::move(s);
  c.sweep = std::move(sweep);
  return c;
}

ExperimentConfig two_jump_config() {
  return toeplitz_config({make_singularity_gd(1.0, 0.1, 0.05), make_singularity_gd(-1.0, 0.0, -0.1)},
                         {8, 12, 16, 24, 32, 48, 64});
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fhdet_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(FitConvergence, SyntheticPowerLaws) {
  std::vector<double> sizes{8, 16, 32, 64, 128};
  auto c = fit_convergence(synthetic(sizes, [](double) { return 3e-3; }));
  EXPECT_NEAR(c.exponent, 0.0, 1e-12);
  auto inv = fit_convergence(synthetic(sizes, [](double m) { return 0.7 / m; }));
  EXPECT_NEAR(inv.exponent, -1.0, 1e-6);
  EXPECT_NEAR(inv.r_squared, 1.0, 1e-12);
  auto p = fit_convergence(synthetic(sizes, [](double m) { return 2.0 * std::pow(m, -0.7); }));
  EXPECT_NEAR(p.exponent, -0.7, 1e-9);
  EXPECT_EQ(p.points, 5);
}

TEST(FitConvergence, RandomLinesAreRecovered) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> ex(-3.0, 1.0), lc(-8.0, 0.0);
  for (int i = 0; i < 50; ++i) {
    double k = ex(g), c = std::exp(lc(g));
    std::vector<double> sizes;
    for (double s = 2.0 + 3.0 * std::abs(lc(g)); sizes.size() < 6; s *= 1.7) sizes.push_back(s);
    auto rows = synthetic(sizes, [&](double m) { return c * std::pow(m, k); });
    if (rows.back().rel_error <= 1e-13) continue;
    EXPECT_NEAR(fit_convergence(rows).exponent, k, 1e-9);
  }
}

TEST(FitConvergence, FloorAndPreconditions) {
  std::vector<double> sizes{8, 16, 32};
  EXPECT_THROW(fit_convergence(synthetic(sizes, [](double) { return 1e-15; })), DegenerateError);
  EXPECT_THROW(fit_convergence(synthetic({8, 16}, [](double m) { return 1.0 / m; })), ParameterError);
  // failed rows are ignored
  auto rows = synthetic({8, 16, 32, 64}, [](double m) { return 1.0 / m; });
  rows[1].ok = false;
  rows[1].rel_error = 1e3;
  EXPECT_NEAR(fit_convergence(rows).exponent, -1.0, 1e-12);
}

// ---------------------------------------------------------------------------

TEST(Config, ParsesAndRoundTrips) {
  const char* text = R"j({
    "schema": "fhdet-experiment/1",
    "mode": "toeplitz",
    "symbol": {"regular": "exp(0.5*cos(theta))",
               "singularities": [{"location": 1, "gamma": 0.15, "delta": [0, 0.1]},
                                 {"location": "-1", "nu": 0.1, "nubar": "0.2i"}]},
    "sweep": [8, 16, 32],
    "numerics": {"workers": 2, "seed": 7},
    "output": {"format": "json", "path": "out.json"}
  })j";
  auto c = parse_config(text);
  EXPECT_EQ(c.mode, Mode::toeplitz);
  EXPECT_EQ(c.symbol.geometry, Geometry::circle);
  ASSERT_EQ(c.symbol.singularities.size(), 2u);
  EXPECT_EQ(c.symbol.singularities[0].gamma_exp, cplx(0.15));
  EXPECT_EQ(c.symbol.singularities[0].delta, cplx(0.0, 0.1));
  EXPECT_EQ(c.symbol.singularities[1].nubar, cplx(0.0, 0.2));
  EXPECT_EQ(c.sweep, (std::vector<double>{8, 16, 32}));
  EXPECT_EQ(c.numerics.workers, 2);
  EXPECT_EQ(c.numerics.seed, 7u);
  EXPECT_EQ(c.output.format, ReportFormat::json);
  EXPECT_NO_THROW(validate_config(c));

  auto again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
  EXPECT_EQ(again.symbol.singularities[1].location, cplx(-1.0));
}

TEST(Config, Validation) {
  auto ok = toeplitz_config({make_singularity_gd(1.0, 0.1, 0.0)}, {4, 8});
  EXPECT_NO_THROW(validate_config(ok));
  auto c = ok;
  c.sweep = {};
  EXPECT_THROW(validate_config(c), ValidationError);
  c.sweep = {8, 8};
  EXPECT_THROW(validate_config(c), ValidationError);
  c.sweep = {8, 4};
  EXPECT_THROW(validate_config(c), ValidationError);
  c.sweep = {4.5, 8};
  EXPECT_THROW(validate_config(c), ValidationError);
  c = ok;
  c.symbol.geometry = Geometry::line;
  EXPECT_THROW(validate_config(c), ValidationError);
  c = ok;
  c.mode = Mode::wienerhopf;
  EXPECT_THROW(validate_config(c), ValidationError);
  c = ok;
  c.symbol.singularities = {make_singularity_gd(1.0, 0.7, 0.0)};  // Re gamma out of range
  EXPECT_THROW(validate_config(c), ValidationError);
  c = ok;
  c.numerics.workers = 0;
  EXPECT_THROW(validate_config(c), ValidationError);

  EXPECT_THROW(parse_config("{"), ParseError);
  EXPECT_THROW(parse_config(R"({"schema": "other", "mode": "toeplitz"})"), ValidationError);
  EXPECT_THROW(parse_config(R"({"schema": "fhdet-experiment/1", "mode": "lattice"})"), ValidationError);
  EXPECT_THROW(parse_config(R"({"schema": "fhdet-experiment/1", "mode": "toeplitz",
                                "symbol": {"singularities": [{"location": 1, "gamma": 0.1, "nu": 0.2}]}})"),
               ValidationError);
  // geometry follows the mode unless given
  auto w = parse_config(R"({"schema": "fhdet-experiment/1", "mode": "wienerhopf", "sweep": [1]})");
  EXPECT_EQ(w.symbol.geometry, Geometry::line);
}

// ---------------------------------------------------------------------------

TEST(Report, EmptyRowsGiveHeaderOnlyCsv) {
  ExperimentResult r;
  r.config = toeplitz_config({}, {4});
  EXPECT_EQ(render_report(r, ReportFormat::csv),
            "size,log_det_num_re,log_det_num_im,log_det_pred_re,log_det_pred_im,rel_error,residual_re,residual_im,"
            "wall_time_ms\n");
  EXPECT_TRUE(parse_csv_rows(render_report(r, ReportFormat::csv)).empty());
}

TEST(Report, CsvRowRoundTrips) {
  ExperimentResult r;
  r.config = toeplitz_config({}, {4});
  ComparisonRow row;
  row.size = 37;
  row.ok = true;
  row.log_det_numeric = {-0.1234567890123456, 2.5e-17};
  row.log_det_predicted = {-0.1234567, 1.0 / 3.0};
  row.rel_error = 0.1 + 0.2;
  row.residual_after_leading = {-8.9e-9, -1.0 / 3.0};
  row.wall_time_ms = 12.5;
  r.rows = {row};
  std::string csv = render_report(r, ReportFormat::csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  auto back = parse_csv_rows(csv);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].size, row.size);
  EXPECT_EQ(back[0].log_det_numeric, row.log_det_numeric);
  EXPECT_EQ(back[0].log_det_predicted, row.log_det_predicted);
  EXPECT_EQ(back[0].rel_error, row.rel_error);
  EXPECT_EQ(back[0].residual_after_leading, row.residual_after_leading);
  EXPECT_EQ(back[0].wall_time_ms, row.wall_time_ms);

  // a failed row keeps its size and reads back as failed
  ComparisonRow bad;
  bad.size = 40;
  bad.failure = "pole";
  r.rows.push_back(bad);
  back = parse_csv_rows(render_report(r, ReportFormat::csv));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_FALSE(back[1].ok);
  EXPECT_EQ(back[1].size, 40.0);
}

TEST(Report, JsonReplayReproducesSummary) {
  auto res = run_experiment(two_jump_config());
  ASSERT_EQ(res.summary.rows_ok, 7);
  ASSERT_TRUE(res.summary.fit);
  ASSERT_TRUE(res.summary.arbitration);
  ASSERT_TRUE(res.summary.osc);
  std::string text = render_report(res, ReportFormat::json);
  auto back = replay_report(text);
  ASSERT_EQ(back.rows.size(), res.rows.size());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    EXPECT_LE(std::abs(back.rows[i].log_det_numeric - res.rows[i].log_det_numeric), 1e-15);
    EXPECT_LE(std::abs(back.rows[i].log_det_predicted - res.rows[i].log_det_predicted), 1e-15);
    EXPECT_EQ(back.rows[i].factors.size(), res.rows[i].factors.size());
  }
  EXPECT_EQ(back.summary.fit->exponent, res.summary.fit->exponent);
  EXPECT_EQ(back.summary.fit->r_squared, res.summary.fit->r_squared);
  EXPECT_EQ(back.summary.arbitration->winner, res.summary.arbitration->winner);
  EXPECT_EQ(back.summary.osc->amplitude, res.summary.osc->amplitude);
  EXPECT_EQ(render_report(back, ReportFormat::json), text);

  EXPECT_THROW(replay_report("[]"), ValidationError);
  EXPECT_THROW(replay_report("{"), ParseError);
}

TEST(Report, EmitWritesFileAndReportsBadPath) {
  auto res = run_experiment(toeplitz_config({}, {4, 8}));
  std::string p = temp_path("emit.csv");
  emit_report(res, {ReportFormat::csv, p});
  EXPECT_EQ(slurp(p), render_report(res, ReportFormat::csv));
  std::remove(p.c_str());
  try {
    emit_report(res, {ReportFormat::csv, "/nonexistent-dir/x.csv"});
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------

TEST(RunExperiment, TrivialSymbolIsExact) {
  auto res = run_experiment(toeplitz_config({}, {4, 8}));
  ASSERT_EQ(res.rows.size(), 2u);
  for (auto& r : res.rows) {
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.rel_error, 0.0);
    EXPECT_EQ(r.log_det_numeric, cplx(0.0));
  }
  EXPECT_FALSE(res.summary.arbitration);
}

TEST(RunExperiment, StrongSzegoConverges) {
  std::vector<double> sizes{8, 16, 32, 64, 128};
  auto res = run_experiment(toeplitz_config({}, sizes, "exp(0.5*cos(theta))"));
  ASSERT_EQ(res.summary.rows_ok, 5);
  EXPECT_LE(res.rows.back().rel_error, 1e-2);
  // already at rounding level from m = 8 on
  for (auto& r : res.rows) EXPECT_LT(r.rel_error, 1e-12);
  EXPECT_EQ(res.summary.fit_status, "converged below floor");
}

TEST(RunExperiment, RowsComeBackInSweepOrderForAnyWorkerCount) {
  auto cfg = two_jump_config();
  cfg.numerics.workers = 1;
  auto one = run_experiment(cfg);
  cfg.numerics.workers = 3;
  auto three = run_experiment(cfg);
  EXPECT_EQ(render_report(one, ReportFormat::csv), render_report(three, ReportFormat::csv));
  std::string a = render_report(one, ReportFormat::json), b = render_report(three, ReportFormat::json);
  // the config echo differs only in the worker count
  auto strip = [](std::string s) {
    auto p = s.find("\"workers\"");
    return s.erase(p, s.find('\n', p) - p);
  };
  EXPECT_EQ(strip(a), strip(b));
  EXPECT_EQ(render_report(run_experiment(cfg), ReportFormat::json), b);
}

TEST(RunExperiment, PairArbitrationPrefersConjecture) {
  auto res = run_experiment(two_jump_config());
  auto& a = *res.summary.arbitration;
  EXPECT_EQ(a.primary, "conjecture");
  EXPECT_EQ(a.alternative, "as_printed");
  EXPECT_EQ(a.winner, "primary");
  EXPECT_LT(a.primary_error, a.alternative_error);
  EXPECT_TRUE(a.alternative_plateau);
}

TEST(RunExperiment, WienerHopfSingleSingularity) {
  ExperimentConfig c;
  c.mode = Mode::wienerhopf;
  c.symbol.geometry = Geometry::line;
  c.symbol.singularities = {make_singularity_gd(0.0, 0.1, 0.0)};
  c.sweep = {3, 6, 12};
  auto res = run_experiment(c);
  ASSERT_EQ(res.summary.rows_ok, 3);
  EXPECT_GT(res.rows[0].rel_error, res.rows[1].rel_error);
  EXPECT_GT(res.rows[1].rel_error, res.rows[2].rel_error);
  ASSERT_TRUE(res.summary.fit);
  EXPECT_NEAR(res.summary.fit->exponent, -1.0, 0.4);
  auto names = res.rows[0].factors;
  EXPECT_FALSE(names.empty());
}

TEST(RunRows, FailureIsIsolated) {
  Numerics n;
  auto fn = [](double s) {
    if (s == 3.0) throw PoleError("Gamma pole at the sweep point");
    ComparisonRow r;
    r.ok = true;
    r.rel_error = 1.0 / s;
    return r;
  };
  for (int workers : {1, 4}) {
    n.workers = workers;
    auto rows = run_rows({1, 2, 3, 4, 5}, fn, n);
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i].size, double(i + 1));
      if (i == 2) {
        EXPECT_FALSE(rows[i].ok);
        EXPECT_NE(rows[i].failure.find("pole"), std::string::npos);
      } else {
        EXPECT_TRUE(rows[i].ok);
        EXPECT_EQ(rows[i].rel_error, 1.0 / double(i + 1));
      }
    }
    auto s = summarize(toeplitz_config({}, {1, 2, 3, 4, 5}), rows, {});
    EXPECT_EQ(s.rows_ok, 4);
    EXPECT_EQ(s.rows_failed, 1);
    EXPECT_NEAR(s.fit->exponent, -1.0, 1e-12);
  }
}

TEST(RunRows, TimeoutAbortsOnlyThatRow) {
  Numerics n;
  n.row_timeout_s = 0.2;
  auto fn = [](double s) {
    if (s == 2.0) std::this_thread::sleep_for(std::chrono::seconds(2));
    ComparisonRow r;
    r.ok = true;
    return r;
  };
  auto rows = run_rows({1, 2, 3}, fn, n);
  EXPECT_TRUE(rows[0].ok);
  EXPECT_FALSE(rows[1].ok);
  EXPECT_NE(rows[1].failure.find("timeout"), std::string::npos);
  EXPECT_TRUE(rows[2].ok);
}

TEST(RunRows, TimingIsOptIn) {
  Numerics n;
  auto fn = [](double) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    return ComparisonRow{};
  };
  EXPECT_EQ(run_rows({1}, fn, n)[0].wall_time_ms, 0.0);
  n.timing = true;
  EXPECT_GE(run_rows({1}, fn, n)[0].wall_time_ms, 4.0);
}

// ---------------------------------------------------------------------------

TEST(Summary, OscFitRecoversSyntheticAmplitude) {
  auto cfg = toeplitz_config({}, {1});
  std::vector<ComparisonRow> rows;
  const cplx K(0.3, -0.1), lam(0.9, 0.2);
  for (int m = 20; m < 40; ++m) {
    ComparisonRow r;
    r.size = m;
    r.ok = true;
    cplx o = (m % 2 ? -1.0 : 1.0) * std::pow(double(m), -1.8) * cplx(1.0, 0.5);
    r.osc_term = o;
    r.residual_after_leading = K + lam * o;
    r.rel_error = std::abs(std::exp(r.residual_after_leading) - 1.0);
    rows.push_back(r);
  }
  auto s = summarize(cfg, rows, {});
  ASSERT_TRUE(s.osc);
  EXPECT_LT(std::abs(s.osc->amplitude - lam), 1e-10);
  EXPECT_LT(std::abs(s.osc->constant - K), 1e-12);
  EXPECT_NEAR(s.osc->r_squared, 1.0, 1e-10);
  EXPECT_EQ(s.osc->sign_agreement, 1.0);
}

TEST(Summary, IdentityModesCountChecks) {
  ExperimentConfig cfg;
  cfg.mode = Mode::specfun_suite;
  IdentityCheck a, b;
  a.passed = true;
  auto s = summarize(cfg, {}, {a, b});
  EXPECT_EQ(s.checks_passed, 1);
  EXPECT_EQ(s.checks_failed, 1);
  EXPECT_FALSE(s.fit);
}

// ---------------------------------------------------------------------------

TEST(IdentitySuites, SpecfunSuitePassesAndIsSeeded) {
  auto a = run_specfun_suite(5), b = run_specfun_suite(5), c = run_specfun_suite(6);
  ASSERT_EQ(a.size(), 7u);
  for (auto& k : a) EXPECT_TRUE(k.passed) << k.name << " " << k.max_residual << " " << k.failure;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].max_residual, b[i].max_residual);
  EXPECT_NE(a[0].max_residual, c[0].max_residual);
  // an absurd tolerance turns every check into a failure
  for (auto& k : run_specfun_suite(5, 1e-300)) EXPECT_FALSE(k.passed);
}

TEST(IdentitySuites, ChfSuiteOnOnePoint) {
  Numerics n;
  n.chf_gamma = {0.1};
  n.chf_delta = {0.0};
  auto checks = run_chf_suite(n);
  ASSERT_EQ(checks.size(), 6u);
  for (auto& k : checks) EXPECT_TRUE(k.passed) << k.name << " " << k.max_residual;
  n.chf_delta = {0.1};
  EXPECT_EQ(run_chf_suite(n).size(), 4u);
}

// ---------------------------------------------------------------------------

#ifdef FHDET_CLI_PATH
namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::string& args) {
  std::string p = temp_path("cli_out.txt");
  std::string cmd = std::string(FHDET_CLI_PATH) + " " + args + " > " + p + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  CliRun r{WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(p)};
  std::remove(p.c_str());
  return r;
}

}  // namespace

TEST(Cli, ToeplitzCsvToStdout) {
  auto r = cli("toeplitz --sizes 4,8 --sing 1:0.1:0.05");
  EXPECT_EQ(r.code, 0);
  auto rows = parse_csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].ok);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("toeplitz --sizes 8,4").code, 2);
  EXPECT_EQ(cli("toeplitz --sizes 4 --sing 1:0.9:0").code, 2);
  EXPECT_EQ(cli("sweep --config /nonexistent.json").code, 2);
  EXPECT_EQ(cli("nonsense").code, 2);

  std::string cfg = temp_path("timeout.json");
  std::ofstream(cfg) << R"({"schema": "fhdet-experiment/1", "mode": "wienerhopf",
    "symbol": {"singularities": [{"location": 0, "gamma": 0.1, "delta": 0}]},
    "sweep": [30, 40], "numerics": {"row_timeout_s": 0.001}})";
  EXPECT_EQ(cli("sweep --config " + cfg).code, 3);
  std::remove(cfg.c_str());
}

TEST(Cli, SweepJsonReplayAndDeterminism) {
  std::string cfg = temp_path("sweep.json"), out1 = temp_path("r1.json"), out2 = temp_path("r2.json");
  std::ofstream(cfg) << R"({"schema": "fhdet-experiment/1", "mode": "toeplitz",
    "symbol": {"singularities": [{"location": 1, "gamma": 0.1, "delta": 0.05},
                                 {"location": -1, "gamma": 0, "delta": -0.1}]},
    "sweep": [8, 16, 32], "output": {"format": "json"}})";
  ASSERT_EQ(cli("sweep --config " + cfg + " --out " + out1 + " --workers 2").code, 0);
  std::string first = slurp(out1);
  ASSERT_EQ(cli("sweep --config " + cfg + " --out " + out1 + " --workers 2").code, 0);
  EXPECT_EQ(slurp(out1), first);
  ASSERT_EQ(cli("replay " + out1 + " --out " + out2 + " --workers 2").code, 0);
  EXPECT_EQ(slurp(out2).size(), first.size() + std::string(out2).size() - std::string(out1).size());
  EXPECT_EQ(replay_report(slurp(out2)).summary.fit->exponent, replay_report(first).summary.fit->exponent);
  for (auto& p : {cfg, out1, out2}) std::remove(p.c_str());
}

TEST(Cli, WorkerEnvironmentVariable) {
  std::string out = temp_path("env.json");
  std::string cmd = "FHDET_WORKERS=3 " + std::string(FHDET_CLI_PATH) + " toeplitz --sizes 4 --format json --out " + out + " 2>/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NE(slurp(out).find("\"workers\": 3"), std::string::npos);
  std::remove(out.c_str());
}

TEST(Cli, SpecfunSuite) {
  auto r = cli("specfun --seed 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("name,parameters,points,max_residual,tolerance,passed,failure\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 8);
  EXPECT_EQ(r.out.find(",false,"), std::string::npos);
}
#endif
