#include "ifl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "ifl/errors.hpp"

namespace ifl {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> tokens;
  std::string token;
  for (char ch : path) {
    if (ch == '.') {
      tokens.push_back(token);
      token.clear();
    } else {
      token.push_back(ch);
    }
  }
  tokens.push_back(token);
  for (const auto& t : tokens)
    if (t.empty()) throw ConfigError("grid: empty path segment in '" + path + "'");
  return tokens;
}

json* navigate(json& doc, const std::string& path) {
  json* node = &doc;
  for (const auto& token : split_path(path)) {
    if (node->is_object()) {
      auto it = node->find(token);
      if (it == node->end())
        throw ConfigError("grid: path '" + path + "' does not resolve");
      node = &*it;
    } else if (node->is_array()) {
      size_t index = 0;
      try {
        index = std::stoul(token);
      } catch (...) {
        throw ConfigError("grid: non-numeric index in '" + path + "'");
      }
      if (index >= node->size())
        throw ConfigError("grid: index out of range in '" + path + "'");
      node = &(*node)[index];
    } else {
      throw ConfigError("grid: path '" + path + "' descends into a scalar");
    }
  }
  return node;
}

unsigned thread_budget(size_t tasks) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("IFL_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(cap, &end, 10);
    if (end == cap || parsed < 1) throw ConfigError("IFL_THREADS must be >= 1");
    n = std::min<unsigned>(n, unsigned(parsed));
  }
  return std::min<unsigned>(n, unsigned(std::max<size_t>(tasks, 1)));
}

}  // namespace

void apply_override(json& doc, const std::string& path, const json& value) {
  *navigate(doc, path) = value;
}

SweepSpec parse_grid(const json& doc) {
  if (!doc.is_object()) throw ConfigError("grid: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "schema_version" && key != "grid" && key != "max_runs")
      throw ConfigError("grid: unknown field '" + key + "'");
  }
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
    throw ConfigError("grid: unsupported schema_version");

  SweepSpec spec;
  if (doc.contains("max_runs")) {
    spec.max_runs = doc["max_runs"].get<size_t>();
    if (spec.max_runs < 1) throw ConfigError("grid: max_runs must be >= 1");
  }
  for (const auto& axis_doc : doc.at("grid")) {
    GridAxis axis;
    if (axis_doc.contains("path")) {
      for (const auto& [key, value] : axis_doc.items()) {
        (void)value;
        if (key != "path" && key != "values")
          throw ConfigError("grid: unknown axis field '" + key + "'");
      }
      axis.paths.push_back(axis_doc.at("path").get<std::string>());
      for (const auto& v : axis_doc.at("values"))
        axis.values.push_back({v});
    } else if (axis_doc.contains("zip")) {
      for (const auto& [key, value] : axis_doc.items()) {
        (void)value;
        if (key != "zip")
          throw ConfigError("grid: unknown axis field '" + key + "'");
      }
      size_t steps = 0;
      for (const auto& member : axis_doc.at("zip")) {
        for (const auto& [key, value] : member.items()) {
          (void)value;
          if (key != "path" && key != "values")
            throw ConfigError("grid: unknown zip field '" + key + "'");
        }
        axis.paths.push_back(member.at("path").get<std::string>());
        const auto& vals = member.at("values");
        if (steps == 0) {
          steps = vals.size();
          axis.values.resize(steps);
        } else if (vals.size() != steps) {
          throw ConfigError("grid: zipped value lists differ in length");
        }
        for (size_t i = 0; i < steps; ++i) axis.values[i].push_back(vals[i]);
      }
      if (axis.paths.empty()) throw ConfigError("grid: empty zip axis");
    } else {
      throw ConfigError("grid: axis needs 'path' or 'zip'");
    }
    if (axis.values.empty()) throw ConfigError("grid: axis with no values");
    spec.axes.push_back(std::move(axis));
  }
  return spec;
}

SweepTable run_sweep(const json& base_config, const SweepSpec& grid) {
  // Validate the base config and every path before any run starts.
  const ScenarioConfig base_parsed = parse_scenario_config(base_config);

  // Stable axis order: alphabetical by leading path.
  std::vector<const GridAxis*> axes;
  for (const auto& axis : grid.axes) axes.push_back(&axis);
  std::sort(axes.begin(), axes.end(),
            [](const GridAxis* a, const GridAxis* b) {
              return a->paths.front() < b->paths.front();
            });

  {
    json probe = base_config;
    for (const auto* axis : axes)
      for (const auto& path : axis->paths)
        (void)navigate(probe, path);
  }

  size_t num_points = 1;
  for (const auto* axis : axes) num_points *= axis->values.size();
  if (num_points * base_parsed.seeds.size() > grid.max_runs)
    throw ConfigError("grid: cross product x seeds exceeds max_runs (" +
                      std::to_string(num_points * base_parsed.seeds.size()) +
                      " > " + std::to_string(grid.max_runs) + ")");

  // Every grid point must materialize cleanly before any run starts.
  {
    std::vector<size_t> probe_step(axes.size(), 0);
    for (size_t point = 0; point < num_points; ++point) {
      json doc = base_config;
      for (size_t a = 0; a < axes.size(); ++a)
        for (size_t m = 0; m < axes[a]->paths.size(); ++m)
          apply_override(doc, axes[a]->paths[m],
                         axes[a]->values[probe_step[a]][m]);
      (void)materialize_scenario(parse_scenario_config(doc));
      for (size_t a = axes.size(); a-- > 0;) {
        if (++probe_step[a] < axes[a]->values.size()) break;
        probe_step[a] = 0;
      }
    }
  }

  SweepTable table;
  std::vector<std::pair<size_t, size_t>> column_source;  // (axis, member)
  for (size_t a = 0; a < axes.size(); ++a)
    for (size_t m = 0; m < axes[a]->paths.size(); ++m) {
      table.param_columns.push_back(axes[a]->paths[m]);
      column_source.emplace_back(a, m);
    }
  {
    // Columns are alphabetical even when a zip axis interleaves names.
    std::vector<size_t> order(table.param_columns.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
      return table.param_columns[x] < table.param_columns[y];
    });
    std::vector<std::string> cols;
    std::vector<std::pair<size_t, size_t>> src;
    for (size_t i : order) {
      cols.push_back(table.param_columns[i]);
      src.push_back(column_source[i]);
    }
    table.param_columns = std::move(cols);
    column_source = std::move(src);
  }

  struct Task {
    std::vector<size_t> step;  // per axis
    uint64_t seed;
  };
  std::vector<Task> tasks;
  std::vector<size_t> step(axes.size(), 0);
  for (size_t point = 0; point < num_points; ++point) {
    for (uint64_t seed : base_parsed.seeds) tasks.push_back({step, seed});
    for (size_t a = axes.size(); a-- > 0;) {
      if (++step[a] < axes[a]->values.size()) break;
      step[a] = 0;
    }
  }

  table.rows.resize(tasks.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) return;
      try {
        const Task& task = tasks[i];
        json doc = base_config;
        for (size_t a = 0; a < axes.size(); ++a)
          for (size_t m = 0; m < axes[a]->paths.size(); ++m)
            apply_override(doc, axes[a]->paths[m],
                           axes[a]->values[task.step[a]][m]);
        const Scenario scenario =
            materialize_scenario(parse_scenario_config(doc));
        const RunResult run = run_simulation(scenario, task.seed);

        SweepRow row;
        for (const auto& [a, m] : column_source)
          row.params.push_back(axes[a]->values[task.step[a]][m]);
        row.seed = task.seed;
        row.rates = measure_realized_rates(run);
        row.final_regret = run.final_regret();
        row.floor_value = scenario.policies.size() >= 2
                              ? regret_floor(declared_floor_params(scenario))
                              : 0.0;
        table.rows[i] = std::move(row);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned threads = thread_budget(tasks.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) std::rethrow_exception(failure);
  return table;
}

}  // namespace ifl
