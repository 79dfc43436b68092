#pragma once

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/gaussian.hpp"
#include "colsim/qubit.hpp"
#include "colsim/table.hpp"
#include "colsim/version.hpp"

namespace colsim {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Parameter schema
// ---------------------------------------------------------------------------

enum class ParamType { Int, Real, RealList, IntList, Text };

struct ParamSpec {
  std::string name;
  ParamType type;
  Json default_value;
  std::string doc;
  double min_value = -1e300;
  double max_value = 1e300;
};

/// Parameter map after defaulting and type/domain validation. Values are kept
/// as JSON so the exact map can be echoed into result metadata.
struct ResolvedParams {
  std::map<std::string, Json> values;

  const Json& at(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw ConfigError("internal: parameter '" + name + "' not resolved");
    return it->second;
  }
  int get_int(const std::string& name) const { return at(name).get<int>(); }
  double get_real(const std::string& name) const { return at(name).get<double>(); }
  std::vector<double> get_real_list(const std::string& name) const {
    return at(name).get<std::vector<double>>();
  }
  std::vector<int> get_int_list(const std::string& name) const {
    return at(name).get<std::vector<int>>();
  }
  std::string get_text(const std::string& name) const { return at(name).get<std::string>(); }

  std::string to_json_string() const {
    Json obj = Json::object();
    for (const auto& [key, value] : values) obj[key] = value;
    return obj.dump();
  }
};

struct ScenarioDef {
  std::string name;
  std::string model;   // "qubit" or "gaussian"
  std::string target;  // dataset tag, e.g. "fig3"
  std::string description;
  std::vector<ParamSpec> params;
  /// Cross-parameter domain checks; must throw ConfigError (or
  /// ResourceGuardError) naming the offending key.
  std::function<void(const ResolvedParams&)> validate;
  std::function<ResultTable(const ResolvedParams&)> run;
};

namespace detail {

inline bool type_matches(ParamType type, const Json& v) {
  switch (type) {
    case ParamType::Int:
      return v.is_number_integer() || v.is_number_unsigned();
    case ParamType::Real:
      return v.is_number() && !v.is_boolean();
    case ParamType::RealList: {
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_number()) return false;
      return true;
    }
    case ParamType::IntList: {
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!(e.is_number_integer() || e.is_number_unsigned())) return false;
      return true;
    }
    case ParamType::Text:
      return v.is_string();
  }
  return false;
}

inline const char* type_name(ParamType type) {
  switch (type) {
    case ParamType::Int:
      return "integer";
    case ParamType::Real:
      return "real";
    case ParamType::RealList:
      return "list of reals";
    case ParamType::IntList:
      return "list of integers";
    case ParamType::Text:
      return "string";
  }
  return "?";
}

inline void check_domain(const ParamSpec& spec, const Json& v) {
  auto check_scalar = [&](double x) {
    if (!std::isfinite(x))
      throw ConfigError("parameter '" + spec.name + "' must be finite");
    if (x < spec.min_value || x > spec.max_value) {
      std::ostringstream os;
      os << "parameter '" << spec.name << "' = " << x << " outside [" << spec.min_value << ", "
         << spec.max_value << "]";
      throw ConfigError(os.str());
    }
  };
  if (v.is_number()) {
    check_scalar(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) check_scalar(e.get<double>());
  }
}

}  // namespace detail

/// Applies defaults, rejects unknown keys, checks types and scalar domains.
inline ResolvedParams resolve_parameters(const ScenarioDef& scenario, const Json& params) {
  if (!params.is_object()) throw ConfigError("'parameters' must be an object");
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool known = false;
    for (const ParamSpec& spec : scenario.params) known = known || (spec.name == it.key());
    if (!known)
      throw ConfigError("unknown parameter '" + it.key() + "' for scenario " + scenario.name);
  }
  ResolvedParams resolved;
  for (const ParamSpec& spec : scenario.params) {
    const Json& v = params.contains(spec.name) ? params.at(spec.name) : spec.default_value;
    if (!detail::type_matches(spec.type, v))
      throw ConfigError("parameter '" + spec.name + "' must be a " +
                        detail::type_name(spec.type));
    detail::check_domain(spec, v);
    resolved.values[spec.name] = v;
  }
  if (scenario.validate) scenario.validate(resolved);
  return resolved;
}

// ---------------------------------------------------------------------------
// Scenario runners
// ---------------------------------------------------------------------------

namespace scenarios {

inline std::vector<double> nn_coeffs(int order) { return std::vector<double>(order, 1.0); }

inline Eigen::Matrix2d block_from(double qq, double pp, double qp) {
  Eigen::Matrix2d b;
  b << qq, qp, qp, pp;
  return b;
}

inline ResultTable fig2a(const ResolvedParams& p) {
  const double k = p.get_real("k");
  const int na_min = p.get_int("na_min"), na_max = p.get_int("na_max");
  ResultTable table;
  table.columns = {"N_A", "p_nn1", "p_nn2", "p_nn3"};
  for (int na = na_min; na <= na_max; ++na) {
    std::vector<double> row{static_cast<double>(na)};
    for (int order = 1; order <= 3; ++order) {
      if (order <= na / 2)
        row.push_back(ancilla_local_population({na, nn_coeffs(order), k}));
      else
        row.push_back(std::nan(""));
    }
    table.add_row(std::move(row));
  }
  return table;
}

inline ResultTable fig2b(const ResolvedParams& p) {
  const int na = p.get_int("N_A");
  const double k_min = p.get_real("k_min"), k_max = p.get_real("k_max");
  const int steps = p.get_int("k_steps");
  ResultTable table;
  table.columns = {"k", "p_nn1", "p_nn2", "p_nn3"};
  for (int i = 0; i < steps; ++i) {
    const double k = k_min + (k_max - k_min) * i / (steps - 1);
    std::vector<double> row{k};
    for (int order = 1; order <= 3; ++order) {
      if (order <= na / 2)
        row.push_back(ancilla_local_population({na, nn_coeffs(order), k}));
      else
        row.push_back(std::nan(""));
    }
    table.add_row(std::move(row));
  }
  return table;
}

inline ResultTable fig2c(const ResolvedParams& p) {
  const int na = p.get_int("N_A");
  const double k = p.get_real("k");
  ResultTable table;
  table.columns = {"n", "mi_nn1", "mi_nn2", "mi_nn3"};
  std::vector<StateVector> states;
  for (int order = 1; order <= 3; ++order)
    states.push_back(prepare_graph_state({na, nn_coeffs(order), k}, false));
  for (int n = 2; n <= na; ++n) {
    std::vector<double> row{static_cast<double>(n)};
    for (const StateVector& psi : states) row.push_back(mutual_information(psi, 0, n - 1));
    table.add_row(std::move(row));
  }
  return table;
}

inline ResultTable fig3(const ResolvedParams& p) {
  QubitCollisionConfig config;
  config.graph = {p.get_int("N_A"), p.get_real_list("coeffs"), p.get_real("k")};
  config.tau = p.get_real("tau");
  const int requested = p.get_int("n_collisions");
  config.n_collisions = requested == 0 ? config.graph.n_ancillas : requested;
  config.record_uncorrelated = true;
  Trajectory traj = run_correlated_collisions(config);
  ResultTable table;
  table.columns = {"n", "p", "p_uncorr"};
  for (std::size_t n = 0; n < traj.populations.size(); ++n)
    table.add_row({static_cast<double>(n), traj.populations[n],
                   traj.uncorrelated_populations[n]});
  return table;
}

inline ResultTable fig4(const ResolvedParams& p) {
  const int na = p.get_int("N_A");
  const double k = p.get_real("k");
  const double tau = p.get_real("tau");
  const int ref = p.get_int("reference");

  auto run_variant = [&](const CirculantGraphSpec& graph,
                         const Eigen::Vector2cd& site) -> Trajectory {
    QubitCollisionConfig config;
    config.graph = graph;
    config.tau = tau;
    config.n_collisions = na;
    config.record_mi = true;
    config.mi_reference_ancilla = ref;
    config.record_uncorrelated = false;
    config.site = site;
    return run_correlated_collisions(config);
  };

  // Markovian reference: product ancillas whose local population matches the
  // NN1 graph state, implemented as a tilted site state with k = 0.
  const double pa = ancilla_local_population({na, nn_coeffs(1), k});
  const double theta = std::asin(std::min(1.0, std::sqrt(pa)));
  const Eigen::Vector2cd tilted(Complex(std::cos(theta), 0.0), Complex(std::sin(theta), 0.0));

  Trajectory markov = run_variant({na, {}, 0.0}, tilted);
  Trajectory nn1 = run_variant({na, nn_coeffs(1), k}, Eigen::Vector2cd(1.0, 0.0));
  Trajectory nn3 = run_variant({na, nn_coeffs(3), k}, Eigen::Vector2cd(1.0, 0.0));

  ResultTable table;
  table.columns = {"step", "n", "mi_markovian", "mi_nn1", "mi_nn3"};
  for (std::size_t step = 0; step < nn1.mi_profiles.size(); ++step)
    for (std::size_t t = 0; t < nn1.mi_partners.size(); ++t)
      table.add_row({static_cast<double>(step), static_cast<double>(nn1.mi_partners[t]),
                     markov.mi_profiles[step][t], nn1.mi_profiles[step][t],
                     nn3.mi_profiles[step][t]});
  return table;
}

inline ResultTable fig5_fig6(const ResolvedParams& p) {
  const int na = p.get_int("N_A");
  const int d_max = p.get_int("d_max");
  const std::vector<int> orders = p.get_int_list("nn_orders");
  const std::vector<double> ks = p.get_real_list("k_values");
  ResultTable table;
  table.columns = {"nn", "k", "d", "zeta_q", "zeta_p"};
  table.add_metadata("plot_style", "correlation_decay");
  for (int order : orders) {
    for (double k : ks) {
      const CirculantGraphSpec spec{na, nn_coeffs(order), k};
      for (int d = 1; d <= d_max; ++d) {
        const CovarianceBlock z = circulant_correlations(spec, d);
        table.add_row({static_cast<double>(order), k, static_cast<double>(d), z(0, 0),
                       z(1, 1)});
      }
    }
  }
  return table;
}

inline ResultTable prefactor_curve(const ResolvedParams& p) {
  const std::vector<double> ks = p.get_real_list("K_values");
  const double tau_max = p.get_real("tau_max");
  const int steps = p.get_int("tau_steps");
  ResultTable table;
  table.columns = {"tau"};
  for (double kdec : ks) {
    std::ostringstream os;
    os << "pref_K" << kdec;
    table.columns.push_back(os.str());
  }
  for (int i = 0; i < steps; ++i) {
    const double tau = tau_max * i / (steps - 1);
    std::vector<double> row{tau};
    for (double kdec : ks) row.push_back(algebraic_prefactor(kdec, tau));
    table.add_row(std::move(row));
  }
  return table;
}

struct GaussianSetup {
  CovarianceBlock gamma_s0;
  CovarianceBlock gamma_a;
  CorrelationLaw law;
  int n_ancillas;
};

inline GaussianSetup gaussian_setup_from(const ResolvedParams& p) {
  GaussianSetup setup{block_from(p.get_real("gs_qq"), p.get_real("gs_pp"), p.get_real("gs_qp")),
                      block_from(p.get_real("ga_qq"), p.get_real("ga_pp"), p.get_real("ga_qp")),
                      ExplicitCorrelations{{}}, p.get_int("N_A")};
  const Eigen::Matrix2d z =
      block_from(p.get_real("zeta_q"), p.get_real("zeta_p"), p.get_real("zeta_qp"));
  const std::string law = p.get_text("law");
  if (law == "nn") {
    setup.law = NearestNeighborCorrelations{z};
  } else if (law == "algebraic") {
    setup.law = AlgebraicCorrelations{z, p.get_real("K")};
  } else {
    const CirculantGraphSpec spec{setup.n_ancillas, p.get_real_list("coeffs"), p.get_real("k")};
    setup.law = GraphCorrelations{spec};
    setup.gamma_a = circulant_local_cm(spec);
  }
  return setup;
}

inline ResultTable gaussian_dynamics(const ResolvedParams& p) {
  GaussianSetup setup = gaussian_setup_from(p);
  const double tau = p.get_real("tau");
  const int requested = p.get_int("n_collisions");
  const int n = requested == 0 ? setup.n_ancillas : requested;

  EnsembleCM gamma = build_ensemble_cm(setup.gamma_s0, setup.gamma_a, setup.law,
                                       setup.n_ancillas);
  GaussianRun run = run_gaussian_collisions(std::move(gamma), tau, n);

  const auto wrapped = [&](int d) { return ring_zeta(setup.law, d, setup.n_ancillas); };
  ResultTable table;
  table.columns = {"n",     "sim_qq", "sim_pp", "sim_qp", "cf_qq",
                   "cf_pp", "cf_qp",  "gap_qq", "gap_pp", "gap_qp"};
  for (int step = 0; step <= n; ++step) {
    const CovarianceBlock sim = run.system_blocks[step];
    const CovarianceBlock cf = closed_form_cm(step, setup.gamma_s0, setup.gamma_a, wrapped, tau);
    const CovarianceBlock gap =
        step == 0 ? CovarianceBlock::Zero() : CovarianceBlock(homogenization_gap(step, wrapped, tau));
    table.add_row({static_cast<double>(step), sim(0, 0), sim(1, 1), sim(0, 1), cf(0, 0),
                   cf(1, 1), cf(0, 1), gap(0, 0), gap(1, 1), gap(0, 1)});
  }
  return table;
}

inline ResultTable gaussian_steady_state_check(const ResolvedParams& p) {
  GaussianSetup setup = gaussian_setup_from(p);
  const double tau = p.get_real("tau");
  const int requested = p.get_int("n_collisions");
  const int n = requested == 0 ? setup.n_ancillas / 2 : requested;
  const int d_max = std::min(p.get_int("d_max"), setup.n_ancillas - 1);

  EnsembleCM gamma = build_ensemble_cm(setup.gamma_s0, setup.gamma_a, setup.law,
                                       setup.n_ancillas);
  GaussianRun run = run_gaussian_collisions(std::move(gamma), tau, n);
  const CovarianceBlock sim = run.system_blocks[n];
  SteadyStateResult ss = general_steady_state(setup.gamma_a, setup.law, tau, d_max);

  // Tolerance derived from the finite collision count. The exact residual is
  //   c^{2n} (gamma_S0 - gamma_A) - 2 sum_{d<n} c^{2n-d} zeta_d
  //   - 2 sum_{d>=n} c^d zeta_d,
  // bounded here term by term.
  const double c = std::abs(std::cos(tau));
  double tolerance = std::pow(c, 2.0 * n) *
                         (setup.gamma_s0 - setup.gamma_a).cwiseAbs().maxCoeff() +
                     1e-9;
  for (int d = 1; d <= d_max; ++d) {
    const double weight = d < n ? std::pow(c, 2.0 * n - d) : std::pow(c, d);
    tolerance += 2.0 * weight * law_zeta(setup.law, d).cwiseAbs().maxCoeff();
  }

  ResultTable table;
  table.columns = {"component", "simulated", "predicted", "abs_error"};
  const double sims[3] = {sim(0, 0), sim(1, 1), sim(0, 1)};
  const double preds[3] = {ss.value(0, 0), ss.value(1, 1), ss.value(0, 1)};
  double worst = 0.0;
  for (int comp = 0; comp < 3; ++comp) {
    const double err = std::abs(sims[comp] - preds[comp]);
    worst = std::max(worst, err);
    table.add_row({static_cast<double>(comp), sims[comp], preds[comp], err});
  }
  table.add_metadata("components", "0=qq 1=pp 2=qp");
  table.add_metadata("derived_tolerance", format_double(tolerance));
  if (ss.truncation_warning) table.add_metadata("truncation_warning", "true");
  if (worst > tolerance) {
    std::ostringstream os;
    os << "gaussian_steady_state_check: simulation deviates from the steady state by " << worst
       << " (derived tolerance " << tolerance << ")";
    throw PhysicalityError(os.str());
  }
  return table;
}

}  // namespace scenarios

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

inline const std::vector<ScenarioDef>& scenario_catalog() {
  static const std::vector<ScenarioDef> catalog = [] {
    std::vector<ScenarioDef> defs;
    const double two_pi = 2.0 * M_PI;

    auto qubit_guard = [](int n_qubits, const char* key) {
      if (n_qubits > max_dense_qubits) {
        std::ostringstream os;
        os << "parameter '" << key << "' requests " << n_qubits
           << " qubits, above the dense guard of " << max_dense_qubits;
        throw ResourceGuardError(os.str());
      }
    };

    defs.push_back(
        {"fig2a_population_vs_NA",
         "qubit",
         "fig2a",
         "Ancilla excited-state population vs ring size for NN1-NN3 graph states",
         {{"k", ParamType::Real, 0.7, "graph-state strength"},
          {"na_min", ParamType::Int, 3, "smallest ring size", 2, 10000},
          {"na_max", ParamType::Int, 13, "largest ring size", 2, 10000}},
         [qubit_guard](const ResolvedParams& p) {
           if (p.get_int("na_min") > p.get_int("na_max"))
             throw ConfigError("parameter 'na_min' exceeds 'na_max'");
           qubit_guard(p.get_int("na_max"), "na_max");
         },
         scenarios::fig2a});

    defs.push_back(
        {"fig2b_population_vs_k",
         "qubit",
         "fig2b",
         "Ancilla excited-state population vs graph strength k at fixed ring size",
         {{"N_A", ParamType::Int, 7, "ring size", 2, 10000},
          {"k_min", ParamType::Real, 0.0, "lowest strength"},
          {"k_max", ParamType::Real, 2.0, "highest strength"},
          {"k_steps", ParamType::Int, 41, "grid points", 2, 100000}},
         [qubit_guard](const ResolvedParams& p) {
           if (p.get_real("k_min") > p.get_real("k_max"))
             throw ConfigError("parameter 'k_min' exceeds 'k_max'");
           qubit_guard(p.get_int("N_A"), "N_A");
         },
         scenarios::fig2b});

    defs.push_back(
        {"fig2c_mi_profile",
         "qubit",
         "fig2c",
         "Mutual information I(1:n) across the prepared ring for NN1-NN3",
         {{"N_A", ParamType::Int, 7, "ring size", 6, 10000},
          {"k", ParamType::Real, 0.7, "graph-state strength"}},
         [qubit_guard](const ResolvedParams& p) { qubit_guard(p.get_int("N_A"), "N_A"); },
         scenarios::fig2c});

    defs.push_back(
        {"fig3_population_dynamics",
         "qubit",
         "fig3",
         "System excited-state population vs collision number, correlated vs uncorrelated",
         {{"N_A", ParamType::Int, 16, "number of ancillas", 1, 10000},
          {"k", ParamType::Real, 0.7, "graph-state strength"},
          {"coeffs", ParamType::RealList, Json::array({1.0}), "ring coupling coefficients"},
          {"tau", ParamType::Real, 1.0, "collision strength"},
          {"n_collisions", ParamType::Int, 0, "collisions to run (0 = all)", 0, 10000}},
         [qubit_guard](const ResolvedParams& p) {
           const int na = p.get_int("N_A");
           qubit_guard(na + 1, "N_A");
           if (static_cast<int>(p.get_real_list("coeffs").size()) > na / 2)
             throw ConfigError("parameter 'coeffs' longer than floor(N_A/2)");
           if (p.get_int("n_collisions") > na)
             throw ConfigError("parameter 'n_collisions' exceeds N_A");
         },
         scenarios::fig3});

    defs.push_back(
        {"fig4_mi_dynamics",
         "qubit",
         "fig4",
         "Mutual-information profile I(ref:n) after each collision: Markovian, NN1, NN3",
         {{"N_A", ParamType::Int, 16, "number of ancillas", 6, 10000},
          {"k", ParamType::Real, 0.7, "graph-state strength"},
          {"tau", ParamType::Real, 1.0, "collision strength"},
          {"reference", ParamType::Int, 1, "reference ancilla", 1, 10000}},
         [qubit_guard](const ResolvedParams& p) {
           qubit_guard(p.get_int("N_A") + 1, "N_A");
           if (p.get_int("reference") > p.get_int("N_A"))
             throw ConfigError("parameter 'reference' exceeds N_A");
         },
         scenarios::fig4});

    defs.push_back(
        {"fig5_fig6_cv_correlations",
         "gaussian",
         "fig5/fig6",
         "Graph-state quadrature correlations vs distance for each ring order and strength",
         {{"N_A", ParamType::Int, 100, "ring size", 4, 100000},
          {"d_max", ParamType::Int, 10, "largest distance", 1, 100000},
          {"nn_orders", ParamType::IntList, Json::array({1, 2, 3, 4}), "ring orders"},
          {"k_values", ParamType::RealList, Json::array({0.2, 0.5, 1.0, 2.0}), "strengths"}},
         [](const ResolvedParams& p) {
           const int na = p.get_int("N_A");
           if (p.get_int("d_max") > na - 1)
             throw ConfigError("parameter 'd_max' exceeds N_A - 1");
           for (int order : p.get_int_list("nn_orders"))
             if (order < 1 || order > na / 2)
               throw ConfigError("parameter 'nn_orders' entries must lie in [1, N_A/2]");
         },
         scenarios::fig5_fig6});

    defs.push_back(
        {"prefactor_curve",
         "gaussian",
         "prefactor figure",
         "Steady-state correlation prefactor 2cK/(K-c) vs tau",
         {{"K_values", ParamType::RealList, Json::array({1.05, 1.5, 3.0, 10.0}),
           "decay constants (each > 1)"},
          {"tau_max", ParamType::Real, two_pi, "end of the tau grid", 1e-6, 1000.0},
          {"tau_steps", ParamType::Int, 401, "grid points", 2, 1000000}},
         [](const ResolvedParams& p) {
           for (double kdec : p.get_real_list("K_values"))
             if (!(kdec > 1.0)) throw ConfigError("parameter 'K_values' entries must exceed 1");
         },
         scenarios::prefactor_curve});

    const std::vector<ParamSpec> gaussian_common = {
        {"N_A", ParamType::Int, 200, "number of ancillas", 1, 100000},
        {"tau", ParamType::Real, 0.5, "beam-splitter angle"},
        {"law", ParamType::Text, "nn", "correlation law: nn | algebraic | graph"},
        {"zeta_q", ParamType::Real, 0.1, "position correlation"},
        {"zeta_p", ParamType::Real, -0.1, "momentum correlation"},
        {"zeta_qp", ParamType::Real, 0.0, "cross correlation"},
        {"K", ParamType::Real, 2.0, "algebraic decay constant", 1.0 + 1e-12, 1e300},
        {"k", ParamType::Real, 0.7, "graph strength (law = graph)"},
        {"coeffs", ParamType::RealList, Json::array({1.0}), "ring coefficients (law = graph)"},
        {"gs_qq", ParamType::Real, 1.5, "initial system <q^2>"},
        {"gs_pp", ParamType::Real, 1.5, "initial system <p^2>"},
        {"gs_qp", ParamType::Real, 0.0, "initial system <qp>"},
        {"ga_qq", ParamType::Real, 1.5, "ancilla <q^2> (nn/algebraic laws)"},
        {"ga_pp", ParamType::Real, 1.5, "ancilla <p^2> (nn/algebraic laws)"},
        {"ga_qp", ParamType::Real, 0.0, "ancilla <qp> (nn/algebraic laws)"}};

    auto gaussian_validate = [](const ResolvedParams& p) {
      const std::string law = p.get_text("law");
      if (law != "nn" && law != "algebraic" && law != "graph")
        throw ConfigError("parameter 'law' must be one of nn, algebraic, graph");
      const int na = p.get_int("N_A");
      if (law == "graph" &&
          static_cast<int>(p.get_real_list("coeffs").size()) > na / 2)
        throw ConfigError("parameter 'coeffs' longer than floor(N_A/2)");
      if (p.get_int("n_collisions") > na)
        throw ConfigError("parameter 'n_collisions' exceeds N_A");
    };

    {
      ScenarioDef def{"gaussian_dynamics",
                      "gaussian",
                      "covariance dynamics (general solution)",
                      "System covariance vs collision number with the matching closed form "
                      "and homogenization gap",
                      gaussian_common,
                      gaussian_validate,
                      scenarios::gaussian_dynamics};
      def.params.push_back(
          {"n_collisions", ParamType::Int, 0, "collisions to run (0 = all)", 0, 100000});
      defs.push_back(std::move(def));
    }

    {
      // The comparison target is the law's (open-chain) steady state, so the
      // run must stop at n <= N_A/2, before collisions reach register slots
      // whose correlations wrap around the ring.
      ScenarioDef def{"gaussian_steady_state_check",
                      "gaussian",
                      "steady-state cross-check",
                      "Long-run simulation against the law-specific steady state, with a "
                      "derived tolerance",
                      gaussian_common,
                      [gaussian_validate](const ResolvedParams& p) {
                        gaussian_validate(p);
                        if (p.get_int("n_collisions") > p.get_int("N_A") / 2)
                          throw ConfigError("parameter 'n_collisions' exceeds N_A/2");
                      },
                      scenarios::gaussian_steady_state_check};
      def.params.push_back(
          {"n_collisions", ParamType::Int, 0, "collisions to run (0 = N_A/2)", 0, 100000});
      def.params.push_back({"d_max", ParamType::Int, 60, "steady-state truncation", 1, 100000});
      defs.push_back(std::move(def));
    }

    for (ScenarioDef& def : defs)
      def.params.push_back({"output", ParamType::Text, "", "output file stem override"});
    return defs;
  }();
  return catalog;
}

inline const ScenarioDef& find_scenario(const std::string& name) {
  for (const ScenarioDef& def : scenario_catalog())
    if (def.name == name) return def;
  std::ostringstream os;
  os << "unknown scenario '" << name << "'; known scenarios:";
  for (const ScenarioDef& def : scenario_catalog()) os << " " << def.name;
  throw ConfigError(os.str());
}

// ---------------------------------------------------------------------------
// Config ingestion and execution
// ---------------------------------------------------------------------------

struct ScenarioConfig {
  std::string model;
  std::string scenario;
  Json parameters = Json::object();
  std::vector<std::pair<std::string, Json>> sweep;  // (parameter, values array)
};

inline ScenarioConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key != "model" && key != "scenario" && key != "parameters" && key != "sweep")
      throw ConfigError("unknown config key '" + key + "'");
  }
  if (!doc.contains("model") || !doc.at("model").is_string())
    throw ConfigError("config requires a string 'model'");
  if (!doc.contains("scenario") || !doc.at("scenario").is_string())
    throw ConfigError("config requires a string 'scenario'");

  ScenarioConfig config;
  config.model = doc.at("model").get<std::string>();
  config.scenario = doc.at("scenario").get<std::string>();
  if (config.model != "qubit" && config.model != "gaussian")
    throw ConfigError("'model' must be qubit or gaussian");
  if (doc.contains("parameters")) {
    if (!doc.at("parameters").is_object()) throw ConfigError("'parameters' must be an object");
    config.parameters = doc.at("parameters");
  }
  if (doc.contains("sweep")) {
    if (!doc.at("sweep").is_array()) throw ConfigError("'sweep' must be an array");
    for (const Json& entry : doc.at("sweep")) {
      if (!entry.is_object() || !entry.contains("parameter") || !entry.contains("values"))
        throw ConfigError("each sweep entry needs 'parameter' and 'values'");
      for (auto it = entry.begin(); it != entry.end(); ++it)
        if (it.key() != "parameter" && it.key() != "values")
          throw ConfigError("unknown sweep key '" + it.key() + "'");
      if (!entry.at("parameter").is_string() || !entry.at("values").is_array() ||
          entry.at("values").empty())
        throw ConfigError("sweep entries need a string 'parameter' and nonempty 'values'");
      config.sweep.emplace_back(entry.at("parameter").get<std::string>(), entry.at("values"));
    }
  }

  const ScenarioDef& def = find_scenario(config.scenario);
  if (def.model != config.model)
    throw ConfigError("scenario " + config.scenario + " belongs to model '" + def.model +
                      "', config says '" + config.model + "'");
  return config;
}

inline ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

inline std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

/// Runs the scenario once with the config's base parameters. The metadata
/// block records the tool version, the dataset tag and the exact parameter
/// map; the timestamp line is the only non-deterministic output.
inline ResultTable run_scenario(const ScenarioConfig& config) {
  const ScenarioDef& def = find_scenario(config.scenario);
  const ResolvedParams params = resolve_parameters(def, config.parameters);
  ResultTable table = def.run(params);
  std::vector<std::pair<std::string, std::string>> meta{
      {"tool", std::string("colsim ") + version_string},
      {"scenario", def.name},
      {"model", def.model},
      {"target", def.target},
      {"parameters", params.to_json_string()}};
  for (auto& kv : table.metadata) meta.push_back(std::move(kv));
  meta.emplace_back("timestamp", iso_timestamp());
  table.metadata = std::move(meta);
  return table;
}

struct SweepOutcome {
  std::size_t index = 0;
  std::map<std::string, Json> overrides;
  std::optional<ResultTable> table;
  std::string error;  // empty on success
};

/// Cartesian product of the sweep axes, executed concurrently up to
/// `workers` threads. Every point is type- and domain-checked before any
/// computation starts; per-point runtime failures are reported in the
/// outcome list without aborting the remaining points.
inline std::vector<SweepOutcome> run_sweep(const ScenarioConfig& config, int workers = 1) {
  const ScenarioDef& def = find_scenario(config.scenario);

  // Sweep axes must name known parameters and carry finite, type-correct
  // values; that is checked before anything runs. Domain violations surface
  // per point without aborting the rest of the sweep.
  for (const auto& [name, values] : config.sweep) {
    const ParamSpec* spec = nullptr;
    for (const ParamSpec& candidate : def.params)
      if (candidate.name == name) spec = &candidate;
    if (spec == nullptr)
      throw ConfigError("sweep parameter '" + name + "' unknown for " + def.name);
    for (const Json& value : values) {
      if (!detail::type_matches(spec->type, value))
        throw ConfigError("sweep values for '" + name + "' must each be a " +
                          detail::type_name(spec->type));
      if (value.is_number() && !std::isfinite(value.get<double>()))
        throw ConfigError("sweep values for '" + name + "' must be finite");
    }
  }

  std::vector<std::size_t> sizes;
  std::size_t total = 1;
  for (const auto& [name, values] : config.sweep) {
    sizes.push_back(values.size());
    total *= values.size();
  }

  std::vector<ScenarioConfig> points(total, config);
  std::vector<SweepOutcome> outcomes(total);
  for (std::size_t index = 0; index < total; ++index) {
    outcomes[index].index = index;
    std::size_t rest = index;
    for (std::size_t axis = 0; axis < config.sweep.size(); ++axis) {
      const auto& [name, values] = config.sweep[axis];
      const Json& value = values.at(rest % sizes[axis]);
      rest /= sizes[axis];
      points[index].parameters[name] = value;
      outcomes[index].overrides[name] = value;
    }
    points[index].sweep.clear();
  }

  if (workers < 1) workers = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t index = next.fetch_add(1); index < total; index = next.fetch_add(1)) {
      try {
        outcomes[index].table = run_scenario(points[index]);
      } catch (const std::exception& e) {
        outcomes[index].error = e.what();
      }
    }
  };
  if (workers == 1 || total <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(workers, total);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return outcomes;
}

}  // namespace colsim
