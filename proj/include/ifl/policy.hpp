#pragma once

#include <cstdint>
#include <vector>

#include "ifl/core.hpp"

namespace ifl {

// A deterministic cell -> action table.
struct PolicyTable {
  std::vector<ActionKind> action_of_cell;

  ActionKind at(int cell) const;
  int num_cells() const { return int(action_of_cell.size()); }
  bool operator==(const PolicyTable&) const = default;

  static PolicyTable uniform(int cells, ActionKind a);
};

struct PolicyClass {
  std::vector<PolicyTable> policies;

  int size() const { return int(policies.size()); }
  void validate(int num_cells) const;  // nonempty, total, pairwise distinct
};

// Deterministic, seedable subset of the 3^num_cells tables, size
// min(max_size, 3^num_cells), always containing the three uniform tables.
PolicyClass enumerate_policy_class(int num_cells, int max_size,
                                   uint64_t seed = 0);

}  // namespace ifl
