#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "tcap/analytic_models.hpp"
#include "tcap/cli.hpp"

using namespace tcap;
using namespace tcap::cli;

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(cells);
  }
  return rows;
}

std::string config_key_error(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

ExperimentConfig single(Scheme scheme, int M, int N, int K) {
  ExperimentConfig c;
  c.schemes = {scheme};
  c.params.M = M;
  c.params.N = N;
  c.params.K = K;
  return c;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.params.alpha = 3.5;
  c.params.eta = 1e-7;
  c.lambda = 2.5e-4;
  c.schemes = {Scheme::BdUb, Scheme::ZfMulti};
  c.grid = {{4, 2, 2}, {8, 4, 2}};
  c.mode = mc::SweepMode::Both;
  c.seed = 99;
  c.format = OutputFormat::Json;
  c.out = "result.json";
  c.sections[Scheme::BdUb].sim.bd_gain = sim::BdGain::MuMax;
  c.sections[Scheme::BdUb].sim.window_radius = 1500.0;
  c.sections[Scheme::ZfMulti].methods = {DensityMethod::SmallEps};
  c.sections[Scheme::ZfMulti].sim.marks = sim::MarkModel::Explicit;
  c.sections[Scheme::ZfMulti].sim.power = sim::PowerConvention::TotalSplit;
  const ExperimentConfig back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));
  CHECK(parse_config(serialize_config(ExperimentConfig{})) == ExperimentConfig{});
}

TEST_CASE("config errors name the key") {
  CHECK(config_key_error("alpha = 4\ncolour = red\n") == "colour");
  CHECK(config_key_error("[NOT-A-SCHEME]\nmethods = small-eps\n") == "NOT-A-SCHEME");
  CHECK(config_key_error("[ZF-MISO]\nspeed = 3\n") == "ZF-MISO.speed");
  CHECK(config_key_error("epsilon = 0\n") == "epsilon");
  CHECK(config_key_error("epsilon = 1\n") == "epsilon");
  CHECK(config_key_error("alpha = 2\n") == "alpha");
  CHECK(config_key_error("alpha = four\n") == "alpha");
  CHECK(config_key_error("schemes = \n") == "schemes");
  CHECK(config_key_error("grid = 4x4\n") == "grid");
  CHECK(config_key_error("mode = fast\n") == "mode");
  CHECK(config_key_error("alpha = 4\n") == "");
}

TEST_CASE("snr in decibels") {
  const ExperimentConfig c = parse_config("snr_db = 20\n");
  CHECK(c.params.eta == 1.0);
  CHECK(c.params.rho == doctest::Approx(100.0));
  NetworkParams p;
  p.eta = 1e-6;
  apply_snr_db(p, 30.0);
  CHECK(p.rho / p.eta == doctest::Approx(1000.0));
}

TEST_CASE("shipped default config loads") {
  const ExperimentConfig c = load_config(TCAP_SOURCE_DIR "/configs/default.ini");
  validate_config(c);
  CHECK(c.params.distance == 10.0);
  CHECK(c.params.epsilon == 0.1);
  CHECK(c.params.alpha == 4.0);
  CHECK(c.params.beta == 3.0);
  CHECK(c.params.M == 4);
  CHECK(c.schemes.size() == 5);
  CHECK_THROWS_AS(load_config("/nonexistent/tcap.ini"), ConfigError);
}

TEST_CASE("analytic command") {
  ExperimentConfig c = single(Scheme::ZfMiso, 1, 1, 1);
  std::ostringstream out, diag;
  REQUIRE(cmd_analytic(c, out, diag) == kExitOk);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 2);
  CHECK(out.str().substr(0, kCsvHeader.size()) == kCsvHeader);
  CHECK(rows[1][0] == "ZF-MISO");
  CHECK(rows[1][12] == "exact-root");
  CHECK(std::stod(rows[1][10]) == doctest::Approx(1.233e-4).epsilon(1e-3));

  ExperimentConfig d = single(Scheme::DpcMimoUb, 3, 3, 3);
  d.sections[Scheme::DpcMimoUb].methods = {DensityMethod::LowerBound};
  std::ostringstream o2;
  REQUIRE(cmd_analytic(d, o2, diag) == kExitOk);
  const auto r2 = csv_rows(o2.str());
  CHECK(r2[1][12] == "lower-bound");
  CHECK(std::stod(r2[1][13]) < std::stod(r2[1][14]));

  ExperimentConfig bad = single(Scheme::BdUb, 4, 4, 2);
  std::ostringstream o3, d3;
  CHECK(cmd_analytic(bad, o3, d3) == kExitNumerical);
  CHECK_FALSE(d3.str().empty());
}

TEST_CASE("simulate command") {
  ExperimentConfig c = single(Scheme::SisoBaseline, 1, 1, 1);
  c.lambda = 1e-4;
  c.trials = 20000;
  c.seed = 12;
  std::ostringstream a, b, diag;
  REQUIRE(cmd_simulate(c, a, diag) == kExitOk);
  REQUIRE(cmd_simulate(c, b, diag) == kExitOk);
  CHECK(a.str() == b.str());
  const auto rows = csv_rows(a.str());
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][12] == "mc-outage");
  CHECK(rows[1][16] == "12");
  NetworkParams p = c.params;
  p = adapt_to_scheme(Scheme::SisoBaseline, p);
  p.lambda = 1e-4;
  const double exact = -std::expm1(-p.lambda * std::sqrt(3.0) * 100.0 * std::pow(std::numbers::pi, 2) / 2);
  const auto doc_row = [&] {
    ExperimentConfig j = c;
    j.format = OutputFormat::Json;
    std::ostringstream o;
    cmd_simulate(j, o, diag);
    return nlohmann::json::parse(o.str())["rows"][0];
  }();
  const double p_hat = doc_row["outage"];
  CHECK(std::abs(p_hat - exact) <= 3.0 * std::sqrt(exact * (1 - exact) / 20000));
  CHECK(std::stod(rows[1][13]) < p_hat);
  CHECK(p_hat < std::stod(rows[1][14]));

  ExperimentConfig quiet = single(Scheme::ZfMiso, 4, 1, 4);
  quiet.lambda = 0.0;
  quiet.trials = 1000;
  quiet.format = OutputFormat::Json;
  std::ostringstream q;
  REQUIRE(cmd_simulate(quiet, q, diag) == kExitOk);
  CHECK(nlohmann::json::parse(q.str())["rows"][0]["outage"] == 0.0);

  ExperimentConfig starved = single(Scheme::SisoBaseline, 1, 1, 1);
  starved.initial_trials = 2000;
  starved.trial_budget = 5000;
  std::ostringstream s, sd;
  CHECK(cmd_simulate(starved, s, sd) == kExitInconclusive);
  CHECK(sd.str().find("bracket") != std::string::npos);
}

TEST_CASE("sweep command") {
  ExperimentConfig c;
  c.schemes = {Scheme::DpcMimoUb};
  c.sections[Scheme::DpcMimoUb].methods = {DensityMethod::SmallEps, DensityMethod::UpperBound,
                                           DensityMethod::LowerBound};
  std::ostringstream out, diag;
  REQUIRE(cmd_sweep(c, out, diag) == kExitOk);
  CHECK(diag.str().find("slope DPC-MIMO-UB small-eps") != std::string::npos);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 13);
  for (int m : {2, 4, 8, 16}) {
    double small = 0, upper = 0, lower = 0;
    for (const auto& r : rows) {
      if (r[1] != std::to_string(m)) continue;
      if (r[12] == "small-eps") small = std::stod(r[10]);
      if (r[12] == "upper-bound") upper = std::stod(r[10]);
      if (r[12] == "lower-bound") lower = std::stod(r[10]);
    }
    CAPTURE(m);
    CHECK(upper >= small);
    CHECK(small >= lower);
  }

  ExperimentConfig empty = c;
  empty.schemes.clear();
  std::ostringstream e, ed;
  CHECK(cmd_sweep(empty, e, ed) == kExitConfig);
  CHECK(ed.str().find("schemes") != std::string::npos);
  ExperimentConfig one = c;
  one.grid = {{4, 4, 4}};
  CHECK(cmd_sweep(one, e, ed) == kExitConfig);
}

TEST_CASE("validate command") {
  ExperimentConfig c;
  c.trials = 5000;
  const ValidationReport report = run_validation(c);
  for (const auto& check : report.checks) {
    CAPTURE(check.name);
    CHECK(check.pass);
  }
  CHECK(report.checks.size() >= 10);
  std::ostringstream out, diag;
  CHECK(cmd_validate(c, out, diag) == kExitOk);

  ValidationFixture wrong;
  wrong.reference_alpha = 3.0;
  const ValidationReport broken = run_validation(c, wrong);
  CHECK_FALSE(broken.pass());
}

TEST_CASE("CSV and JSON carry identical values") {
  ExperimentConfig c = single(Scheme::ZfAntSel, 4, 2, 4);
  c.params.eta = 1e-7;
  std::ostringstream csv, json, diag;
  REQUIRE(cmd_analytic(c, csv, diag) == kExitOk);
  c.format = OutputFormat::Json;
  REQUIRE(cmd_analytic(c, json, diag) == kExitOk);
  const auto rows = csv_rows(csv.str());
  const auto doc = nlohmann::json::parse(json.str());
  REQUIRE(doc["rows"].size() == rows.size() - 1);
  const auto& columns = doc["columns"];
  REQUIRE(columns.size() == rows[0].size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = doc["rows"][i - 1];
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const std::string key = columns[j];
      CAPTURE(key);
      const auto& v = row[key];
      if (v.is_null()) {
        CHECK(rows[i][j].empty());
      } else if (v.is_string()) {
        CHECK(v.get<std::string>() == rows[i][j]);
      } else if (v.is_number_float()) {
        CHECK(format_double(v.get<double>()) == rows[i][j]);
      } else {
        CHECK(std::to_string(v.get<long long>()) == rows[i][j]);
      }
    }
  }
  CHECK(doc["exponents"]["ZF-ANTSEL"] == 1.0);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.233e-4) == "0.0001233");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(INFINITY) == "inf");
}

}  // TEST_SUITE
