#include "ifl/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifl/analysis.hpp"
#include "ifl/config.hpp"
#include "ifl/emit.hpp"
#include "ifl/errors.hpp"
#include "ifl/selfcheck.hpp"
#include "ifl/sweep.hpp"

namespace ifl {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError(ctx + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError(ctx + ": unknown field '" + key + "'");
  }
}

void check_schema_version(const json& doc, const std::string& ctx) {
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
    throw ConfigError(ctx + ": unsupported or missing schema_version");
}

FloorParams floor_params_from_json(const json& doc) {
  check_keys(doc,
             {"schema_version", "K", "T", "D", "log_N", "gamma_bar",
              "delta_bar", "eps10", "eps01", "m_bar", "c"},
             "params");
  check_schema_version(doc, "params");
  FloorParams p;
  p.K = doc.value("K", 3);
  p.T = doc.at("T").get<int64_t>();
  p.D = doc.value("D", 0.0);
  p.log_N = doc.at("log_N").get<double>();
  p.gamma_bar = doc.value("gamma_bar", 0.0);
  p.delta_bar = doc.value("delta_bar", 0.0);
  p.eps10 = doc.value("eps10", 0.0);
  p.eps01 = doc.value("eps01", 0.0);
  if (doc.contains("m_bar")) p.m_bar = doc["m_bar"].get<double>();
  p.c = doc.value("c", 1.0);
  try {
    p.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  return p;
}

void print_row(std::ostream& out, const std::string& name, double value) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%-28s %24s", name.c_str(),
                format_double(value).c_str());
  out << buf << '\n';
}

int cmd_bound(const std::string& params_path, bool as_json) {
  const FloorParams p = floor_params_from_json(load_json_file(params_path));
  const double floor = regret_floor(p);
  std::optional<double> with_maturity;
  if (p.m_bar) with_maturity = regret_floor_with_maturity(p);
  const double q_bar =
      average_q(p.gamma_bar, p.delta_bar, p.m_bar.value_or(1.0), p.eps10,
                p.eps01);
  if (as_json) {
    json rec{{"regret_floor", floor}, {"average_q", q_bar}};
    if (with_maturity) rec["regret_floor_with_maturity"] = *with_maturity;
    std::cout << rec.dump() << '\n';
  } else {
    print_row(std::cout, "regret_floor", floor);
    if (with_maturity)
      print_row(std::cout, "regret_floor_with_maturity", *with_maturity);
    print_row(std::cout, "average_q", q_bar);
  }
  return 0;
}

int cmd_statics(const std::string& params_path, bool as_json) {
  const FloorParams p = floor_params_from_json(load_json_file(params_path));
  std::vector<Sensitivity> sensitivities;
  try {
    sensitivities = marginal_sensitivities(p);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  std::sort(sensitivities.begin(), sensitivities.end(),
            [](const Sensitivity& a, const Sensitivity& b) {
              return std::abs(a.partial) > std::abs(b.partial);
            });
  if (as_json) {
    for (const auto& s : sensitivities) {
      json rec{{"parameter", s.parameter},
               {"partial", s.partial},
               {"finite_difference", s.finite_difference}};
      std::cout << rec.dump() << '\n';
    }
  } else {
    char buf[120];
    std::snprintf(buf, sizeof buf, "%-12s %24s %24s", "parameter", "partial",
                  "finite_diff");
    std::cout << buf << '\n';
    for (const auto& s : sensitivities) {
      std::snprintf(buf, sizeof buf, "%-12s %24s %24s", s.parameter.c_str(),
                    format_double(s.partial).c_str(),
                    format_double(s.finite_difference).c_str());
      std::cout << buf << '\n';
    }
  }
  return 0;
}

int cmd_hetero(const std::string& network_path, bool as_json) {
  const json doc = load_json_file(network_path);
  check_keys(doc,
             {"schema_version", "K", "T", "D", "log_N", "c_prime", "issuers"},
             "network");
  check_schema_version(doc, "network");
  const int K = doc.value("K", 3);
  const int64_t T = doc.at("T").get<int64_t>();
  const double D = doc.value("D", 0.0);
  const double log_N = doc.at("log_N").get<double>();
  const double c_prime = doc.value("c_prime", 1.0);

  std::vector<IssuerSummary> issuers;
  std::vector<double> maturities;
  for (const auto& entry : doc.at("issuers")) {
    check_keys(entry, {"alpha", "gamma", "delta", "eps_sum", "m"},
               "network.issuers");
    issuers.push_back(IssuerSummary{
        entry.at("alpha").get<double>(), entry.value("gamma", 0.0),
        entry.value("delta", 0.0), entry.value("eps_sum", 0.0)});
    maturities.push_back(entry.value("m", 1.0));
  }

  double floor = 0.0, penalty = 0.0;
  std::vector<double> etas, qs, alphas;
  JensenGap jg{};
  try {
    floor = hetero_floor(issuers, K, T, D, log_N, c_prime);
    penalty = variance_penalty(issuers);
    for (size_t i = 0; i < issuers.size(); ++i) {
      etas.push_back(impairment_index(issuers[i].gamma, issuers[i].delta,
                                      issuers[i].eps_sum));
      qs.push_back(conditional_q(maturities[i], issuers[i].gamma,
                                 issuers[i].delta, issuers[i].eps_sum));
      alphas.push_back(issuers[i].alpha);
    }
    jg = jensen_gap(qs, alphas);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("network: ") + e.what());
  }

  if (as_json) {
    for (size_t i = 0; i < issuers.size(); ++i) {
      json rec{{"issuer", i},          {"alpha", issuers[i].alpha},
               {"gamma", issuers[i].gamma}, {"delta", issuers[i].delta},
               {"eps_sum", issuers[i].eps_sum}, {"m", maturities[i]},
               {"eta", etas[i]},       {"conditional_q", qs[i]}};
      std::cout << rec.dump() << '\n';
    }
    json summary{{"hetero_floor", floor},
                 {"variance_penalty", penalty},
                 {"jensen_mean_inverse", jg.mean_inverse},
                 {"jensen_inverse_mean", jg.inverse_mean},
                 {"jensen_gap", jg.gap}};
    std::cout << summary.dump() << '\n';
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %10s %10s %10s %10s %10s %14s %14s",
                  "issuer", "alpha", "gamma", "delta", "eps_sum", "m", "eta",
                  "cond_q");
    std::cout << buf << '\n';
    for (size_t i = 0; i < issuers.size(); ++i) {
      std::snprintf(buf, sizeof buf,
                    "%-8zu %10.4g %10.4g %10.4g %10.4g %10.4g %14.8g %14.8g",
                    i, issuers[i].alpha, issuers[i].gamma, issuers[i].delta,
                    issuers[i].eps_sum, maturities[i], etas[i], qs[i]);
      std::cout << buf << '\n';
    }
    std::cout << '\n';
    print_row(std::cout, "hetero_floor", floor);
    print_row(std::cout, "variance_penalty", penalty);
    print_row(std::cout, "jensen_mean_inverse", jg.mean_inverse);
    print_row(std::cout, "jensen_inverse_mean", jg.inverse_mean);
    print_row(std::cout, "jensen_gap", jg.gap);
  }
  return 0;
}

int cmd_simulate(const std::string& config_path,
                 std::optional<uint64_t> seed_flag, const std::string& out,
                 const std::string& format) {
  const ScenarioConfig config =
      parse_scenario_config(load_json_file(config_path));
  const Scenario scenario = materialize_scenario(config);
  const uint64_t seed = seed_flag.value_or(config.seeds.front());
  const RunResult result = run_simulation(scenario, seed);
  emit_results(result, emit_format_from_string(format), out);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const std::string& out, const std::string& format) {
  const json base = load_json_file(config_path);
  const SweepSpec grid = parse_grid(load_json_file(grid_path));
  const SweepTable table = run_sweep(base, grid);
  emit_results(table, emit_format_from_string(format), out);
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"card-authorization learning under impaired feedback"};
  app.require_subcommand(1);

  std::string config_path, grid_path, params_path, network_path;
  std::string out = "-", format = "csv";
  std::optional<uint64_t> seed;
  bool as_json = false;

  auto* simulate = app.add_subcommand("simulate", "run one scenario seed");
  simulate->add_option("--config", config_path, "scenario JSON")->required();
  simulate->add_option("--seed", seed, "seed override (default: first in config)");
  simulate->add_option("--out", out, "output path ('-' = stdout)");
  simulate->add_option("--format", format, "csv or json");

  auto* sweep = app.add_subcommand("sweep", "run a parameter grid x seeds");
  sweep->add_option("--config", config_path, "base scenario JSON")->required();
  sweep->add_option("--grid", grid_path, "grid JSON")->required();
  sweep->add_option("--out", out, "output path ('-' = stdout)");
  sweep->add_option("--format", format, "csv or json");

  auto* bound = app.add_subcommand("bound", "evaluate the regret floor");
  bound->add_option("--params", params_path, "floor parameter JSON")->required();
  bound->add_flag("--json", as_json, "emit JSON records");

  auto* statics = app.add_subcommand("statics", "marginal sensitivities, ranked");
  statics->add_option("--params", params_path, "floor parameter JSON")->required();
  statics->add_flag("--json", as_json, "emit JSON records");

  auto* hetero = app.add_subcommand("hetero", "issuer network diagnostics");
  hetero->add_option("--network", network_path, "issuer network JSON")->required();
  hetero->add_flag("--json", as_json, "emit JSON records");

  auto* selfcheck = app.add_subcommand("selfcheck", "fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, seed, out, format);
    if (sweep->parsed()) return cmd_sweep(config_path, grid_path, out, format);
    if (bound->parsed()) return cmd_bound(params_path, as_json);
    if (statics->parsed()) return cmd_statics(params_path, as_json);
    if (hetero->parsed()) return cmd_hetero(network_path, as_json);
    if (selfcheck->parsed()) return run_selfcheck(std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    // Missing or mistyped fields in input documents.
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ifl
