#pragma once

// Result emission: CSV with a fixed, documented column order, or
// line-delimited JSON. Floating-point values use 17 significant digits so
// re-parsing reproduces them exactly.

#include <iosfwd>
#include <string>

#include "ifl/simulate.hpp"
#include "ifl/sweep.hpp"

namespace ifl {

enum class EmitFormat { kCsv, kJson };

EmitFormat emit_format_from_string(const std::string& s);

// Round-trip-exact decimal rendering of a double.
std::string format_double(double x);

// Sweep columns: grid parameters (alphabetical), seed, gamma_hat,
// delta_hat, m_hat, D_hat, q_hat, final_regret, floor_value.
void write_table(const SweepTable& table, EmitFormat format, std::ostream& out);

// Run rows: one per checkpoint (round, cum_regret) with the run-level
// realized rates and counters repeated on each row.
void write_run(const RunResult& result, EmitFormat format, std::ostream& out);

// destination "-" writes to stdout; anything else is a file path. Failures
// throw IoError.
void emit_results(const SweepTable& table, EmitFormat format,
                  const std::string& destination);
void emit_results(const RunResult& result, EmitFormat format,
                  const std::string& destination);

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ifl
