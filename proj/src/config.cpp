#include "ifl/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ifl/errors.hpp"

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

const json& need(const json& obj, const std::string& key,
                 const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError(ctx + ": missing required field '" + key + "'");
  return *it;
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return it->get<T>();
}

DelayModel delay_from_json(const json& doc, const std::string& ctx) {
  check_keys(doc, {"kind", "lag", "rate", "entries"}, ctx);
  const auto kind = need(doc, "kind", ctx).get<std::string>();
  if (kind == "constant")
    return DelayModel::constant(need(doc, "lag", ctx).get<int64_t>());
  if (kind == "geometric")
    return DelayModel::geometric(need(doc, "rate", ctx).get<double>());
  if (kind == "table") {
    std::vector<std::pair<int64_t, double>> entries;
    for (const auto& e : need(doc, "entries", ctx))
      entries.emplace_back(e.at(0).get<int64_t>(), e.at(1).get<double>());
    return DelayModel::from_table(std::move(entries));
  }
  throw ConfigError(ctx + ": unknown delay kind '" + kind + "'");
}

json delay_to_json(const DelayModel& m) {
  switch (m.kind) {
    case DelayModel::Kind::kConstant:
      return {{"kind", "constant"}, {"lag", m.constant_lag}};
    case DelayModel::Kind::kGeometric:
      return {{"kind", "geometric"}, {"rate", m.geometric_rate}};
    case DelayModel::Kind::kTable: {
      json entries = json::array();
      for (const auto& [lag, prob] : m.table)
        entries.push_back(json::array({lag, prob}));
      return {{"kind", "table"}, {"entries", entries}};
    }
  }
  throw ConfigError("delay_to_json: unknown kind");
}

IssuerProfile issuer_from_json(const json& doc, const std::string& ctx) {
  check_keys(doc, {"issuer_id", "gamma", "channel", "delay", "volume_share"},
             ctx);
  IssuerProfile p;
  p.issuer_id = get_or<int>(doc, "issuer_id", 0);
  p.gamma = get_or<double>(doc, "gamma", 0.0);
  p.volume_share = get_or<double>(doc, "volume_share", 1.0);
  if (doc.contains("channel")) {
    const json& ch = doc["channel"];
    check_keys(ch, {"eps10", "eps01"}, ctx + ".channel");
    p.channel.eps10 = get_or<double>(ch, "eps10", 0.0);
    p.channel.eps01 = get_or<double>(ch, "eps01", 0.0);
  }
  if (doc.contains("delay")) p.delay = delay_from_json(doc["delay"], ctx + ".delay");
  p.validate();
  return p;
}

json issuer_to_json(const IssuerProfile& p) {
  return {{"issuer_id", p.issuer_id},
          {"gamma", p.gamma},
          {"channel", {{"eps10", p.channel.eps10}, {"eps01", p.channel.eps01}}},
          {"delay", delay_to_json(p.delay)},
          {"volume_share", p.volume_share}};
}

}  // namespace

EnvironmentSpec environment_from_json(const json& doc) {
  const std::string ctx = "environment";
  check_keys(doc,
             {"fraud_prob", "cell_weights", "issuer_of_cell", "losses",
              "network"},
             ctx);
  EnvironmentSpec env;
  env.fraud_prob = need(doc, "fraud_prob", ctx).get<std::vector<double>>();
  env.cell_weights = need(doc, "cell_weights", ctx).get<std::vector<double>>();
  env.issuer_of_cell = need(doc, "issuer_of_cell", ctx).get<std::vector<int>>();
  const json& losses = need(doc, "losses", ctx);
  check_keys(losses, {"fn", "ch", "fp"}, ctx + ".losses");
  env.losses.fn_loss = need(losses, "fn", ctx).get<std::vector<double>>();
  env.losses.ch_loss = need(losses, "ch", ctx).get<std::vector<double>>();
  env.losses.fp_loss = need(losses, "fp", ctx).get<std::vector<double>>();
  for (const auto& issuer : need(doc, "network", ctx))
    env.network.push_back(issuer_from_json(issuer, ctx + ".network"));
  env.validate();
  return env;
}

json environment_to_json(const EnvironmentSpec& env) {
  json network = json::array();
  for (const auto& issuer : env.network) network.push_back(issuer_to_json(issuer));
  return {{"fraud_prob", env.fraud_prob},
          {"cell_weights", env.cell_weights},
          {"issuer_of_cell", env.issuer_of_cell},
          {"losses",
           {{"fn", env.losses.fn_loss},
            {"ch", env.losses.ch_loss},
            {"fp", env.losses.fp_loss}}},
          {"network", network}};
}

ScenarioConfig parse_scenario_config(const json& doc) {
  const std::string ctx = "scenario";
  check_keys(doc,
             {"schema_version", "horizon", "report_every", "seeds",
              "environment", "policy_class", "learner"},
             ctx);
  if (need(doc, "schema_version", ctx).get<int>() != 1)
    throw ConfigError("scenario: unsupported schema_version");

  ScenarioConfig config;
  config.horizon = need(doc, "horizon", ctx).get<int64_t>();
  if (config.horizon < 1) throw ConfigError("scenario: horizon must be >= 1");
  config.report_every = get_or<int64_t>(doc, "report_every", config.horizon);
  if (config.report_every < 1)
    throw ConfigError("scenario: report_every must be >= 1");
  config.seeds = need(doc, "seeds", ctx).get<std::vector<uint64_t>>();
  if (config.seeds.empty()) throw ConfigError("scenario: need at least one seed");

  config.environment = need(doc, "environment", ctx);
  config.policy_class = get_or<json>(doc, "policy_class", json::object());

  const json& learner = need(doc, "learner", ctx);
  check_keys(learner,
             {"kind", "exploration_rate", "learning_rate",
              "initial_log_weights"},
             ctx + ".learner");
  config.learner.kind =
      learner_kind_from_string(need(learner, "kind", ctx).get<std::string>());
  config.learner.exploration_rate =
      get_or<double>(learner, "exploration_rate", 0.0);
  if (learner.contains("learning_rate"))
    config.learner.learning_rate = learner["learning_rate"].get<double>();
  config.learner.initial_log_weights =
      get_or<std::vector<double>>(learner, "initial_log_weights", {});
  return config;
}

namespace {

PolicyClass class_from_config(const json& doc, int num_cells) {
  check_keys(doc, {"type", "max_size", "seed"}, "policy_class");
  const auto type = get_or<std::string>(doc, "type", "enumerate");
  if (type != "enumerate")
    throw ConfigError("policy_class: unknown type '" + type + "'");
  const int max_size = get_or<int>(doc, "max_size", 27);
  const auto seed = get_or<uint64_t>(doc, "seed", 0);
  return enumerate_policy_class(num_cells, max_size, seed);
}

FastSlowPartition partition_from_json(const json& doc) {
  check_keys(doc, {"fast_cells", "slow_cells", "m_fast", "m_slow"},
             "partition");
  FastSlowPartition part;
  part.fast_cells = need(doc, "fast_cells", "partition").get<std::vector<int>>();
  part.slow_cells = need(doc, "slow_cells", "partition").get<std::vector<int>>();
  part.m_fast = need(doc, "m_fast", "partition").get<double>();
  part.m_slow = need(doc, "m_slow", "partition").get<double>();
  return part;
}

}  // namespace

Scenario materialize_scenario(const ScenarioConfig& config) {
  Scenario scenario;
  scenario.config = config;

  const json& env_doc = config.environment;
  const std::string ctx = "environment";
  const auto type = need(env_doc, "type", ctx).get<std::string>();

  try {
    if (type == "explicit") {
      json body = env_doc;
      body.erase("type");
      scenario.env = environment_from_json(body);
      scenario.policies =
          class_from_config(config.policy_class, scenario.env.num_cells());
    } else if (type == "packing" || type == "fast_slow") {
      check_keys(env_doc,
                 type == "packing"
                     ? std::set<std::string>{"type", "num_policies", "gap",
                                             "env_index", "base"}
                     : std::set<std::string>{"type", "num_policies", "gap",
                                             "env_index", "base", "partition",
                                             "hard_mass"},
                 ctx);
      const int num_policies = need(env_doc, "num_policies", ctx).get<int>();
      const double gap = need(env_doc, "gap", ctx).get<double>();
      const int env_index = get_or<int>(env_doc, "env_index", 0);
      const EnvironmentSpec base =
          environment_from_json(need(env_doc, "base", ctx));
      PackingFamily family;
      if (type == "packing") {
        family = build_packing_family(num_policies, gap, base);
      } else {
        family = build_fast_slow_family(
            partition_from_json(need(env_doc, "partition", ctx)),
            get_or<double>(env_doc, "hard_mass", 1.0), num_policies, gap, base);
      }
      if (env_index < 0 || env_index >= int(family.environments.size()))
        throw ConfigError("environment: env_index out of range");
      scenario.env = family.environments[size_t(env_index)];
      scenario.policies = family.policies;
      if (!config.policy_class.empty())
        throw ConfigError(
            "environment: packing scenarios use the companion policy class; "
            "drop policy_class");
    } else if (type == "hetero") {
      check_keys(env_doc, {"type", "cells_per_issuer", "profiles"}, ctx);
      std::vector<IssuerProfile> profiles;
      for (const auto& p : need(env_doc, "profiles", ctx))
        profiles.push_back(issuer_from_json(p, ctx + ".profiles"));
      scenario.env = build_hetero_network(
          profiles, need(env_doc, "cells_per_issuer", ctx).get<int>());
      scenario.policies =
          class_from_config(config.policy_class, scenario.env.num_cells());
    } else {
      throw ConfigError("environment: unknown type '" + type + "'");
    }
  } catch (const std::invalid_argument& e) {
    // Construction preconditions surface as configuration errors.
    throw ConfigError(std::string("environment: ") + e.what());
  }

  auto [index, loss] = oracle_best_policy(scenario.env, scenario.policies);
  scenario.comparator_index = index;
  scenario.comparator_loss = loss;
  return scenario;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return doc;
}

FloorParams declared_floor_params(const Scenario& scenario) {
  FloorParams p;
  p.K = kNumActions;
  p.T = scenario.config.horizon;
  double mean_delay = 0.0, gamma = 0.0, e10 = 0.0, e01 = 0.0;
  for (const auto& issuer : scenario.env.network) {
    mean_delay += issuer.volume_share * issuer.delay.mean_delay();
    gamma += issuer.volume_share * issuer.gamma;
    e10 += issuer.volume_share * issuer.channel.eps10;
    e01 += issuer.volume_share * issuer.channel.eps01;
  }
  p.D = double(p.T) * mean_delay;
  p.gamma_bar = gamma;
  p.delta_bar = 0.0;
  p.eps10 = e10;
  p.eps01 = e01;
  p.log_N = std::log(double(scenario.policies.size()));
  p.c = 1.0;
  return p;
}

}  // namespace ifl
