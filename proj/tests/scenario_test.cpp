#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "colsim/scenarios.hpp"

using namespace colsim;
using Catch::Matchers::ContainsSubstring;

namespace {

ScenarioConfig config_from(const char* text) { return parse_config(Json::parse(text)); }

// CSV body with the timestamp line dropped: the deterministic region.
std::string hashed_region(const ResultTable& table) {
  std::ostringstream os;
  write_csv(table, os);
  std::istringstream is(os.str());
  std::ostringstream out;
  std::string line;
  while (std::getline(is, line))
    if (line.rfind("# timestamp", 0) != 0) out << line << "\n";
  return out.str();
}

int column_index(const ResultTable& table, const std::string& name) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    if (table.columns[c] == name) return static_cast<int>(c);
  throw std::runtime_error("missing column " + name);
}

}  // namespace

TEST_CASE("ResultTable: CSV round-trips values bit-exactly and metadata losslessly") {
  std::mt19937 rng(2717u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ResultTable table;
  table.columns = {"a", "b", "c"};
  table.add_metadata("tool", "colsim test");
  table.add_metadata("parameters", "{\"k\":0.7,\"coeffs\":[1.0,2.0]}");
  for (int r = 0; r < 64; ++r) {
    const double x = uni(rng);
    table.add_row({x, std::exp(40.0 * x), 1e-300 * x});
  }
  table.add_row({0.1, 1.0 / 3.0, 6.02214076e23});

  std::ostringstream os;
  write_csv(table, os);
  std::istringstream is(os.str());
  ResultTable back = read_csv(is);

  REQUIRE(back.columns == table.columns);
  REQUIRE(back.metadata == table.metadata);
  REQUIRE(back.rows.size() == table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      REQUIRE(back.rows[r][c] == table.rows[r][c]);
}

TEST_CASE("ResultTable: NaN cells survive the round trip") {
  ResultTable table;
  table.columns = {"x", "y"};
  table.add_row({1.0, std::nan("")});
  std::ostringstream os;
  write_csv(table, os);
  std::istringstream is(os.str());
  ResultTable back = read_csv(is);
  REQUIRE(back.rows[0][0] == 1.0);
  REQUIRE(std::isnan(back.rows[0][1]));
}

TEST_CASE("config parsing: unknown keys, bad scenario and model mismatch are rejected") {
  REQUIRE_THROWS_MATCHES(
      config_from(R"({"model":"qubit","scenario":"fig3_population_dynamics","extra":1})"),
      ConfigError, Catch::Matchers::MessageMatches(ContainsSubstring("extra")));

  REQUIRE_THROWS_MATCHES(config_from(R"({"model":"qubit","scenario":"nope"})"), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("unknown scenario")));

  REQUIRE_THROWS_MATCHES(
      config_from(R"({"model":"gaussian","scenario":"fig3_population_dynamics"})"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("qubit")));
}

TEST_CASE("parameter resolution: misspelled, ill-typed and out-of-domain keys are named") {
  const ScenarioDef& def = find_scenario("fig3_population_dynamics");

  REQUIRE_THROWS_MATCHES(resolve_parameters(def, Json::parse(R"({"NA":16})")), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("NA")));

  REQUIRE_THROWS_MATCHES(resolve_parameters(def, Json::parse(R"({"tau":"fast"})")), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("tau")));

  REQUIRE_THROWS_MATCHES(resolve_parameters(def, Json::parse(R"({"N_A":16.5})")), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("N_A")));

  REQUIRE_THROWS_MATCHES(resolve_parameters(def, Json::parse(R"({"N_A":-3})")), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("N_A")));

  REQUIRE_THROWS_MATCHES(
      resolve_parameters(def, Json::parse(R"({"N_A":8,"coeffs":[1.0,1.0,1.0,1.0,1.0]})")),
      ConfigError, Catch::Matchers::MessageMatches(ContainsSubstring("coeffs")));

  // Resource guard fires during validation, before any state is allocated.
  REQUIRE_THROWS_AS(resolve_parameters(def, Json::parse(R"({"N_A":22})")), ResourceGuardError);

  const ScenarioDef& gdef = find_scenario("gaussian_dynamics");
  REQUIRE_THROWS_MATCHES(resolve_parameters(gdef, Json::parse(R"({"K":0.5})")), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("K")));
  REQUIRE_THROWS_MATCHES(resolve_parameters(gdef, Json::parse(R"({"law":"magic"})")),
                         ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("law")));
  REQUIRE_THROWS_MATCHES(resolve_parameters(gdef, Json::parse(R"({"tau":1e301})")), ConfigError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("tau")));
}

TEST_CASE("every scenario carries a dataset tag and model") {
  for (const ScenarioDef& def : scenario_catalog()) {
    REQUIRE_FALSE(def.target.empty());
    REQUIRE((def.model == "qubit" || def.model == "gaussian"));
  }
}

TEST_CASE("fig3 scenario: expected columns and matched reference trajectory") {
  ScenarioConfig config = config_from(
      R"({"model":"qubit","scenario":"fig3_population_dynamics",
          "parameters":{"N_A":8,"k":0.7,"coeffs":[1.0],"tau":1.0}})");
  ResultTable table = run_scenario(config);
  REQUIRE(table.columns == std::vector<std::string>{"n", "p", "p_uncorr"});
  REQUIRE(table.rows.size() == 9);
  REQUIRE(table.rows.front()[0] == 0.0);
  REQUIRE(table.rows.back()[0] == 8.0);
  for (const auto& row : table.rows) {
    REQUIRE(row[1] >= -1e-10);
    REQUIRE(row[1] <= 1.0 + 1e-10);
  }

  bool saw_params = false;
  for (const auto& [key, value] : table.metadata) {
    if (key == "parameters") {
      saw_params = true;
      REQUIRE_THAT(value, ContainsSubstring("\"N_A\":8"));
      REQUIRE_THAT(value, ContainsSubstring("\"tau\":1.0"));
    }
  }
  REQUIRE(saw_params);
}

TEST_CASE("fig2c scenario: profile symmetric about the ring midpoint") {
  ScenarioConfig config = config_from(
      R"({"model":"qubit","scenario":"fig2c_mi_profile","parameters":{"N_A":7,"k":0.7}})");
  ResultTable table = run_scenario(config);
  REQUIRE(table.columns ==
          std::vector<std::string>{"n", "mi_nn1", "mi_nn2", "mi_nn3"});
  REQUIRE(table.rows.size() == 6);  // n = 2..7
  // I(1:n) = I(1:9-n)
  auto row_for = [&](int n) -> const std::vector<double>& {
    for (const auto& row : table.rows)
      if (row[0] == n) return row;
    throw std::runtime_error("row not found");
  };
  for (int n = 2; n <= 7; ++n)
    for (int c = 1; c <= 3; ++c)
      REQUIRE(std::abs(row_for(n)[c] - row_for(9 - n)[c]) < 1e-10);
}

TEST_CASE("prefactor scenario: grid covers [0, 2pi] and vanishes at pi/2") {
  ScenarioConfig config = config_from(
      R"({"model":"gaussian","scenario":"prefactor_curve","parameters":{"K_values":[10.0],
          "tau_steps":401}})");
  ResultTable table = run_scenario(config);
  REQUIRE(table.columns.size() == 2);
  REQUIRE(table.rows.front()[0] == 0.0);
  REQUIRE(std::abs(table.rows.back()[0] - 2.0 * M_PI) < 1e-12);
  double at_half_pi = 1e300;
  for (const auto& row : table.rows)
    if (std::abs(row[0] - M_PI / 2.0) < 1e-2) at_half_pi = std::min(at_half_pi, std::abs(row[1]));
  REQUIRE(at_half_pi < 2e-2);  // grid point nearest pi/2
  REQUIRE(std::abs(algebraic_prefactor(10.0, M_PI / 2.0)) < 1e-10);
}

TEST_CASE("gaussian_dynamics scenario: simulation columns equal the closed form") {
  ScenarioConfig config = config_from(
      R"({"model":"gaussian","scenario":"gaussian_dynamics",
          "parameters":{"N_A":40,"tau":0.6,"law":"algebraic","K":1.8,"n_collisions":30}})");
  ResultTable table = run_scenario(config);
  const int sim_qq = column_index(table, "sim_qq"), cf_qq = column_index(table, "cf_qq");
  const int sim_pp = column_index(table, "sim_pp"), cf_pp = column_index(table, "cf_pp");
  for (const auto& row : table.rows) {
    REQUIRE(std::abs(row[sim_qq] - row[cf_qq]) < 1e-9);
    REQUIRE(std::abs(row[sim_pp] - row[cf_pp]) < 1e-9);
  }
}

TEST_CASE("gaussian_steady_state_check scenario: passes with the derived tolerance") {
  ScenarioConfig config = config_from(
      R"({"model":"gaussian","scenario":"gaussian_steady_state_check",
          "parameters":{"N_A":200,"tau":0.5,"law":"nn","zeta_q":0.1,"zeta_p":-0.1,
                        "n_collisions":100}})");
  ResultTable table = run_scenario(config);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) REQUIRE(row[3] < 1e-6);
}

TEST_CASE("determinism: identical configs give identical CSV bodies") {
  ScenarioConfig config = config_from(
      R"({"model":"qubit","scenario":"fig3_population_dynamics",
          "parameters":{"N_A":6,"k":0.7,"coeffs":[1.0],"tau":0.5}})");
  const std::string first = hashed_region(run_scenario(config));
  const std::string second = hashed_region(run_scenario(config));
  REQUIRE_FALSE(first.empty());
  REQUIRE(first == second);
}

TEST_CASE("run_sweep: tau sweep reproduces individual runs in order") {
  ScenarioConfig config = config_from(
      R"({"model":"qubit","scenario":"fig3_population_dynamics",
          "parameters":{"N_A":6,"k":0.7,"coeffs":[1.0]},
          "sweep":[{"parameter":"tau","values":[0.1,0.5,1.0,1.5]}]})");
  std::vector<SweepOutcome> outcomes = run_sweep(config, 4);
  REQUIRE(outcomes.size() == 4);
  const double taus[4] = {0.1, 0.5, 1.0, 1.5};
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(outcomes[i].error.empty());
    REQUIRE(outcomes[i].table.has_value());
    REQUIRE(outcomes[i].overrides.at("tau").get<double>() == taus[i]);

    ScenarioConfig single = config;
    single.sweep.clear();
    single.parameters["tau"] = taus[i];
    ResultTable expected = run_scenario(single);
    REQUIRE(outcomes[i].table->rows == expected.rows);
  }
}

TEST_CASE("run_sweep: empty sweep yields one table identical to run_scenario") {
  ScenarioConfig config = config_from(
      R"({"model":"qubit","scenario":"fig2c_mi_profile","parameters":{"N_A":6,"k":0.4}})");
  std::vector<SweepOutcome> outcomes = run_sweep(config, 2);
  REQUIRE(outcomes.size() == 1);
  REQUIRE(outcomes[0].table.has_value());
  REQUIRE(outcomes[0].table->rows == run_scenario(config).rows);
}

TEST_CASE("run_sweep: type errors abort upfront, domain errors fail per point") {
  ScenarioConfig bad_type = config_from(
      R"({"model":"qubit","scenario":"fig3_population_dynamics",
          "parameters":{"N_A":6},
          "sweep":[{"parameter":"tau","values":[0.1,"fast"]}]})");
  REQUIRE_THROWS_AS(run_sweep(bad_type, 1), ConfigError);

  // K = 0.5 violates the K > 1 domain: that point fails, the other runs.
  ScenarioConfig partial = config_from(
      R"({"model":"gaussian","scenario":"gaussian_dynamics",
          "parameters":{"N_A":30,"law":"algebraic","n_collisions":10},
          "sweep":[{"parameter":"K","values":[0.5,2.0]}]})");
  std::vector<SweepOutcome> outcomes = run_sweep(partial, 2);
  REQUIRE(outcomes.size() == 2);
  REQUIRE_FALSE(outcomes[0].error.empty());
  REQUIRE_THAT(outcomes[0].error, ContainsSubstring("K"));
  REQUIRE(outcomes[1].table.has_value());
}

TEST_CASE("run_sweep: homogenization gap doubles when k doubles (graph law)") {
  ScenarioConfig config = config_from(
      R"({"model":"gaussian","scenario":"gaussian_dynamics",
          "parameters":{"N_A":60,"tau":1.0,"law":"graph","coeffs":[1.0],"n_collisions":20},
          "sweep":[{"parameter":"k","values":[0.05,0.1]}]})");
  std::vector<SweepOutcome> outcomes = run_sweep(config, 2);
  REQUIRE(outcomes.size() == 2);
  const int gap_qq = column_index(*outcomes[0].table, "gap_qq");
  const double small = outcomes[0].table->rows.back()[gap_qq];
  const double large = outcomes[1].table->rows.back()[gap_qq];
  REQUIRE(std::abs(large / small - 2.0) < 0.1);
}

TEST_CASE("emit: plot script references the CSV by relative path") {
  ScenarioConfig config = config_from(
      R"({"model":"gaussian","scenario":"prefactor_curve",
          "parameters":{"K_values":[1.5],"tau_steps":51}})");
  ResultTable table = run_scenario(config);

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "colsim_emit_test";
  std::filesystem::create_directories(dir);
  EmitResult files = emit(table, EmitFormat::PlotScript, dir, "prefactor");
  REQUIRE(std::filesystem::exists(files.csv_path));
  REQUIRE(files.script_path.has_value());

  std::ifstream is(*files.script_path);
  std::stringstream script;
  script << is.rdbuf();
  REQUIRE_THAT(script.str(), ContainsSubstring("'prefactor.csv'"));
  REQUIRE_THAT(script.str(), ContainsSubstring("using 1:2"));

  ResultTable back = read_csv_file(files.csv_path);
  REQUIRE(back.rows == table.rows);
  std::filesystem::remove_all(dir);
}

TEST_CASE("emit: correlation tables get a grouped |zeta| vs d plot script") {
  ScenarioConfig config = config_from(
      R"({"model":"gaussian","scenario":"fig5_fig6_cv_correlations",
          "parameters":{"N_A":40,"d_max":6,"nn_orders":[1],"k_values":[0.2,0.5]}})");
  ResultTable table = run_scenario(config);
  const std::string script = plot_script_for(table, "corr.csv", "corr.png");
  REQUIRE_THAT(script, ContainsSubstring("abs($4)"));
  REQUIRE_THAT(script, ContainsSubstring("abs($5)"));
  REQUIRE_THAT(script, ContainsSubstring("$2==0.5"));
  REQUIRE_THAT(script, ContainsSubstring("logscale y"));
}

TEST_CASE("fig2a scenario: undefined ring orders are emitted as NaN") {
  ScenarioConfig config = config_from(
      R"({"model":"qubit","scenario":"fig2a_population_vs_NA",
          "parameters":{"k":0.7,"na_min":3,"na_max":7}})");
  ResultTable table = run_scenario(config);
  REQUIRE(table.rows.size() == 5);
  // N_A = 3: only NN1 is defined.
  REQUIRE_FALSE(std::isnan(table.rows[0][1]));
  REQUIRE(std::isnan(table.rows[0][2]));
  REQUIRE(std::isnan(table.rows[0][3]));
  // N_A = 7: NN1-NN3 all defined, population equals the direct computation.
  REQUIRE(std::abs(table.rows[4][1] - ancilla_local_population({7, {1.0}, 0.7})) < 1e-12);
}

TEST_CASE("fig4 scenario: step-0 profile matches the prepared state") {
  ScenarioConfig config = config_from(
      R"({"model":"qubit","scenario":"fig4_mi_dynamics",
          "parameters":{"N_A":8,"k":0.7,"tau":1.0}})");
  ResultTable table = run_scenario(config);
  REQUIRE(table.columns ==
          std::vector<std::string>{"step", "n", "mi_markovian", "mi_nn1", "mi_nn3"});
  StateVector nn1 = prepare_graph_state({8, {1.0}, 0.7}, false);
  for (const auto& row : table.rows) {
    if (row[0] != 0.0) continue;
    const int n = static_cast<int>(row[1]);
    REQUIRE(std::abs(row[3] - mutual_information(nn1, 0, n - 1)) < 1e-10);
    REQUIRE(row[2] < 1e-10);  // Markovian register starts uncorrelated
  }
}
