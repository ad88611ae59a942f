#pragma once

namespace ifl {

// Entry point behind tools/ifl: subcommands simulate, bound, sweep,
// statics, hetero, selfcheck. Exit codes: 0 success, 2 configuration or
// usage error, 1 runtime error.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace ifl
