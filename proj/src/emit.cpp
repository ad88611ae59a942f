#include "ifl/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>

#include "ifl/errors.hpp"

namespace ifl {

using nlohmann::json;

EmitFormat emit_format_from_string(const std::string& s) {
  if (s == "csv") return EmitFormat::kCsv;
  if (s == "json") return EmitFormat::kJson;
  throw ConfigError("unknown output format: " + s);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string cell_text(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json number_or_null(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

void write_table_csv(const SweepTable& table, std::ostream& out) {
  for (const auto& column : table.param_columns) out << column << ',';
  out << "seed,gamma_hat,delta_hat,m_hat,D_hat,q_hat,final_regret,floor_value\n";
  for (const auto& row : table.rows) {
    for (const auto& p : row.params) out << cell_text(p) << ',';
    out << row.seed << ',' << format_double(row.rates.gamma_hat) << ','
        << format_double(row.rates.delta_hat) << ','
        << format_double(row.rates.m_hat) << ','
        << format_double(row.rates.d_hat) << ','
        << format_double(row.rates.q_hat) << ','
        << format_double(row.final_regret) << ','
        << format_double(row.floor_value) << '\n';
  }
}

void write_table_jsonl(const SweepTable& table, std::ostream& out) {
  for (const auto& row : table.rows) {
    json rec = json::object();
    for (size_t i = 0; i < table.param_columns.size(); ++i)
      rec[table.param_columns[i]] = row.params[i];
    rec["seed"] = row.seed;
    rec["gamma_hat"] = row.rates.gamma_hat;
    rec["delta_hat"] = row.rates.delta_hat;
    rec["m_hat"] = number_or_null(row.rates.m_hat);
    rec["D_hat"] = row.rates.d_hat;
    rec["q_hat"] = row.rates.q_hat;
    rec["final_regret"] = row.final_regret;
    rec["floor_value"] = row.floor_value;
    out << rec.dump() << '\n';
  }
}

void write_run_csv(const RunResult& result, std::ostream& out) {
  const RealizedRates rates = measure_realized_rates(result);
  out << "round,cum_regret,gamma_hat,delta_hat,m_hat,D_hat,q_hat,"
         "matured,suppressed,censored,expired,final_regret\n";
  for (size_t i = 0; i < result.checkpoint_rounds.size(); ++i) {
    out << result.checkpoint_rounds[i] << ','
        << format_double(result.regret_trajectory[i]) << ','
        << format_double(rates.gamma_hat) << ','
        << format_double(rates.delta_hat) << ','
        << format_double(rates.m_hat) << ',' << format_double(rates.d_hat)
        << ',' << format_double(rates.q_hat) << ',' << result.matured << ','
        << result.suppressed << ',' << result.censored << ','
        << result.expired << ',' << format_double(result.final_regret())
        << '\n';
  }
}

void write_run_jsonl(const RunResult& result, std::ostream& out) {
  const RealizedRates rates = measure_realized_rates(result);
  for (size_t i = 0; i < result.checkpoint_rounds.size(); ++i) {
    json rec{{"round", result.checkpoint_rounds[i]},
             {"cum_regret", result.regret_trajectory[i]},
             {"gamma_hat", rates.gamma_hat},
             {"delta_hat", rates.delta_hat},
             {"m_hat", number_or_null(rates.m_hat)},
             {"D_hat", rates.d_hat},
             {"q_hat", rates.q_hat},
             {"matured", result.matured},
             {"suppressed", result.suppressed},
             {"censored", result.censored},
             {"expired", result.expired},
             {"final_regret", result.final_regret()}};
    out << rec.dump() << '\n';
  }
}

template <typename Payload>
void emit_to(const Payload& payload, EmitFormat format,
             const std::string& destination,
             void (*writer)(const Payload&, EmitFormat, std::ostream&)) {
  if (destination == "-") {
    writer(payload, format, std::cout);
    if (!std::cout) throw IoError("write to stdout failed");
    return;
  }
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + destination);
  writer(payload, format, out);
  out.flush();
  if (!out) throw IoError("write failed: " + destination);
}

}  // namespace

void write_table(const SweepTable& table, EmitFormat format,
                 std::ostream& out) {
  format == EmitFormat::kCsv ? write_table_csv(table, out)
                             : write_table_jsonl(table, out);
}

void write_run(const RunResult& result, EmitFormat format, std::ostream& out) {
  format == EmitFormat::kCsv ? write_run_csv(result, out)
                             : write_run_jsonl(result, out);
}

void emit_results(const SweepTable& table, EmitFormat format,
                  const std::string& destination) {
  emit_to(table, format, destination, &write_table);
}

void emit_results(const RunResult& result, EmitFormat format,
                  const std::string& destination) {
  emit_to(result, format, destination, &write_run);
}

}  // namespace ifl
