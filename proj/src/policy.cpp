#include "ifl/policy.hpp"

#include <set>
#include <stdexcept>

namespace ifl {

ActionKind PolicyTable::at(int cell) const {
  if (cell < 0 || cell >= num_cells())
    throw std::domain_error("PolicyTable: cell index out of range");
  return action_of_cell[size_t(cell)];
}

PolicyTable PolicyTable::uniform(int cells, ActionKind a) {
  return PolicyTable{std::vector<ActionKind>(size_t(cells), a)};
}

void PolicyClass::validate(int num_cells) const {
  if (policies.empty()) throw std::invalid_argument("PolicyClass: empty");
  std::set<std::vector<ActionKind>> seen;
  for (const auto& p : policies) {
    if (p.num_cells() != num_cells)
      throw std::invalid_argument("PolicyClass: table with wrong cell count");
    if (!seen.insert(p.action_of_cell).second)
      throw std::invalid_argument("PolicyClass: duplicate table");
  }
}

PolicyClass enumerate_policy_class(int num_cells, int max_size,
                                   uint64_t seed) {
  if (num_cells < 1) throw std::invalid_argument("enumerate: num_cells < 1");
  if (max_size < 1) throw std::invalid_argument("enumerate: max_size < 1");

  // 3^num_cells, saturating well above any practical max_size.
  uint64_t total = 1;
  for (int c = 0; c < num_cells && total <= (1ull << 62) / 3; ++c) total *= 3;

  PolicyClass cls;
  if (total <= uint64_t(max_size)) {
    for (uint64_t i = 0; i < total; ++i) {
      PolicyTable t;
      t.action_of_cell.resize(size_t(num_cells));
      uint64_t rem = i;
      for (int c = 0; c < num_cells; ++c) {
        t.action_of_cell[size_t(c)] = ActionKind(rem % 3);
        rem /= 3;
      }
      cls.policies.push_back(std::move(t));
    }
  } else {
    // The three uniform tables come first; max_size < 3 keeps a prefix.
    for (ActionKind a : {ActionKind::kApprove, ActionKind::kChallenge,
                         ActionKind::kDecline}) {
      if (int(cls.policies.size()) >= max_size) break;
      cls.policies.push_back(PolicyTable::uniform(num_cells, a));
    }
    std::set<std::vector<ActionKind>> seen;
    for (const auto& p : cls.policies) seen.insert(p.action_of_cell);
    uint64_t draw = 0;
    while (int(cls.policies.size()) < max_size) {
      RngStream rng(seed, draw++, Draw::kPolicyEnum);
      PolicyTable t;
      t.action_of_cell.resize(size_t(num_cells));
      for (int c = 0; c < num_cells; ++c)
        t.action_of_cell[size_t(c)] = ActionKind(rng.below(3));
      if (seen.insert(t.action_of_cell).second)
        cls.policies.push_back(std::move(t));
    }
  }
  cls.validate(num_cells);
  return cls;
}

}  // namespace ifl
