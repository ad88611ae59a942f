#include "ifl/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ifl {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// A lag no run can outlive; "never arrives" still belongs to censorship.
constexpr int64_t kFarLag = int64_t(1) << 40;

int signature_bits(int num_policies) {
  int bits = 0;
  while ((1 << bits) < num_policies) ++bits;
  return bits;
}

ActionKind base_optimal_action(const EnvironmentSpec& env, int cell) {
  ActionKind best = ActionKind::kApprove;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int a = 0; a < kNumActions; ++a) {
    const double loss =
        expected_loss(cell, ActionKind(a), env.fraud_prob[size_t(cell)],
                      env.losses);
    if (loss < best_loss) {
      best_loss = loss;
      best = ActionKind(a);
    }
  }
  return best;
}

// Largest fraud probability at which approve still beats both challenge and
// decline by `margin` at this cell, or < 0 when infeasible.
double approve_signature_prob(const LossSpec& losses, int cell, double margin) {
  const auto c = size_t(cell);
  const double fn = losses.fn_loss[c], ch = losses.ch_loss[c],
               fp = losses.fp_loss[c];
  double p = ch - margin;
  if (fn + fp > 0.0) p = std::min(p, (fp - margin) / (fn + fp));
  return p;
}

// Smallest fraud probability at which decline beats both approve and
// challenge by `margin`, or > 1 when infeasible.
double decline_signature_prob(const LossSpec& losses, int cell, double margin) {
  const auto c = size_t(cell);
  const double fn = losses.fn_loss[c], ch = losses.ch_loss[c],
               fp = losses.fp_loss[c];
  double p = fn + fp > 0.0 ? (fp + margin) / (fn + fp)
                           : std::numeric_limits<double>::infinity();
  if (fp > 0.0) {
    p = std::max(p, 1.0 - (ch - margin) / fp);
  } else if (ch < margin) {
    p = std::numeric_limits<double>::infinity();
  }
  return std::max(p, 0.0);
}

}  // namespace

const IssuerProfile& EnvironmentSpec::issuer_for_cell(int cell) const {
  if (cell < 0 || cell >= num_cells())
    throw std::domain_error("EnvironmentSpec: cell index out of range");
  return network[size_t(issuer_of_cell[size_t(cell)])];
}

void EnvironmentSpec::validate() const {
  require(!fraud_prob.empty(), "environment: no cells");
  require(cell_weights.size() == fraud_prob.size() &&
              issuer_of_cell.size() == fraud_prob.size(),
          "environment: per-cell array lengths differ");
  losses.validate();
  require(losses.num_cells() == num_cells(),
          "environment: loss spec cell count mismatch");
  double weight_sum = 0.0;
  for (size_t i = 0; i < fraud_prob.size(); ++i) {
    require(fraud_prob[i] >= 0.0 && fraud_prob[i] <= 1.0,
            "environment: fraud_prob outside [0,1]");
    require(cell_weights[i] >= 0.0, "environment: negative cell weight");
    weight_sum += cell_weights[i];
    require(issuer_of_cell[i] >= 0 && size_t(issuer_of_cell[i]) < network.size(),
            "environment: issuer index out of range");
  }
  require(std::abs(weight_sum - 1.0) <= 1e-9,
          "environment: cell weights must sum to 1");
  require(!network.empty(), "environment: empty issuer network");
  double share_sum = 0.0;
  for (const auto& issuer : network) {
    issuer.validate();
    share_sum += issuer.volume_share;
  }
  require(std::abs(share_sum - 1.0) <= 1e-9,
          "environment: issuer volume shares must sum to 1");
}

Transaction draw_transaction(const EnvironmentSpec& env, RngStream& rng) {
  const double u = rng.uniform01();
  int cell = env.num_cells() - 1;
  double acc = 0.0;
  for (int c = 0; c < env.num_cells(); ++c) {
    acc += env.cell_weights[size_t(c)];
    if (u < acc) {
      cell = c;
      break;
    }
  }
  const int latent = rng.bernoulli(env.fraud_prob[size_t(cell)]) ? 1 : 0;
  return Transaction{cell, env.issuer_of_cell[size_t(cell)], latent};
}

double analytic_policy_loss(const EnvironmentSpec& env,
                            const PolicyTable& policy) {
  if (policy.num_cells() != env.num_cells())
    throw std::domain_error("analytic_policy_loss: policy misses cells");
  double total = 0.0;
  for (int c = 0; c < env.num_cells(); ++c) {
    total += env.cell_weights[size_t(c)] *
             expected_loss(c, policy.at(c), env.fraud_prob[size_t(c)],
                           env.losses);
  }
  return total;
}

std::pair<int, double> oracle_best_policy(const EnvironmentSpec& env,
                                          const PolicyClass& cls) {
  require(cls.size() >= 1, "oracle_best_policy: empty class");
  int best = 0;
  double best_loss = analytic_policy_loss(env, cls.policies[0]);
  for (int j = 1; j < cls.size(); ++j) {
    const double loss = analytic_policy_loss(env, cls.policies[size_t(j)]);
    if (loss < best_loss) {
      best_loss = loss;
      best = j;
    }
  }
  return {best, best_loss};
}

PackingFamily build_packing_family_on(int num_policies, double gap,
                                      const EnvironmentSpec& base,
                                      std::span<const int> eligible_cells) {
  base.validate();
  require(num_policies >= 1, "packing: need at least one policy");
  require(num_policies <= (1 << 20), "packing: class size too large");
  require(gap > 0.0 || num_policies == 1, "packing: gap must be positive");

  const int bits = signature_bits(num_policies);
  require(int(eligible_cells.size()) >= bits,
          "packing: not enough eligible cells for the class size");

  // Background actions shared by every companion policy.
  PolicyTable background;
  background.action_of_cell.resize(size_t(base.num_cells()));
  for (int c = 0; c < base.num_cells(); ++c)
    background.action_of_cell[size_t(c)] = base_optimal_action(base, c);

  // Per signature cell, fraud probabilities making approve / decline the
  // strict per-cell optimum with weighted margin >= gap.
  std::vector<int> sig(eligible_cells.begin(), eligible_cells.begin() + bits);
  std::vector<double> p_approve(sig.size());
  std::vector<double> p_decline(sig.size());
  for (int b = 0; b < bits; ++b) {
    const int cell = sig[size_t(b)];
    require(cell >= 0 && cell < base.num_cells(),
            "packing: eligible cell out of range");
    const double w = base.cell_weights[size_t(cell)];
    require(w > 0.0, "packing: signature cell has zero weight");
    const double margin = gap / w;
    const double pa = approve_signature_prob(base.losses, cell, margin);
    const double pd = decline_signature_prob(base.losses, cell, margin);
    require(pa >= 0.0 && pd <= 1.0,
            "packing: gap infeasible for the template's loss spec");
    p_approve[size_t(b)] = pa;
    p_decline[size_t(b)] = pd;
  }

  PackingFamily family;
  family.gap = gap;
  for (int j = 0; j < num_policies; ++j) {
    PolicyTable policy = background;
    EnvironmentSpec env = base;
    for (int b = 0; b < bits; ++b) {
      const int cell = sig[size_t(b)];
      const bool approves = (j >> b) & 1;
      policy.action_of_cell[size_t(cell)] =
          approves ? ActionKind::kApprove : ActionKind::kDecline;
      env.fraud_prob[size_t(cell)] =
          approves ? p_approve[size_t(b)] : p_decline[size_t(b)];
    }
    env.validate();
    family.policies.policies.push_back(std::move(policy));
    family.environments.push_back(std::move(env));
    family.favored_policy.push_back(j);
  }
  family.policies.validate(base.num_cells());
  return family;
}

PackingFamily build_packing_family(int num_policies, double gap,
                                   const EnvironmentSpec& base) {
  std::vector<int> all(size_t(base.num_cells()));
  for (int c = 0; c < base.num_cells(); ++c) all[size_t(c)] = c;
  return build_packing_family_on(num_policies, gap, base, all);
}

EnvironmentSpec build_hetero_network(const std::vector<IssuerProfile>& profiles,
                                     int cells_per_issuer) {
  require(!profiles.empty(), "hetero network: empty profile list");
  require(cells_per_issuer >= 1, "hetero network: cells_per_issuer < 1");
  double share_sum = 0.0;
  for (const auto& p : profiles) {
    p.validate();
    share_sum += p.volume_share;
  }
  require(std::abs(share_sum - 1.0) <= 1e-9,
          "hetero network: volume shares must sum to 1");

  EnvironmentSpec env;
  env.network = profiles;
  const int cells = int(profiles.size()) * cells_per_issuer;
  env.fraud_prob.assign(size_t(cells), 0.5);
  env.losses = LossSpec::uniform(cells);
  env.cell_weights.resize(size_t(cells));
  env.issuer_of_cell.resize(size_t(cells));
  for (size_t i = 0; i < profiles.size(); ++i) {
    for (int k = 0; k < cells_per_issuer; ++k) {
      const size_t cell = i * size_t(cells_per_issuer) + size_t(k);
      env.cell_weights[cell] = profiles[i].volume_share / cells_per_issuer;
      env.issuer_of_cell[cell] = int(i);
    }
  }
  env.validate();
  return env;
}

void FastSlowPartition::validate(int num_cells) const {
  std::vector<char> seen(size_t(num_cells), 0);
  auto mark = [&](const std::vector<int>& cells) {
    for (int c : cells) {
      require(c >= 0 && c < num_cells, "fast/slow: cell index out of range");
      require(!seen[size_t(c)], "fast/slow: cell listed twice");
      seen[size_t(c)] = 1;
    }
  };
  mark(fast_cells);
  mark(slow_cells);
  for (char s : seen) require(s == 1, "fast/slow: partition must cover all cells");
  require(m_fast >= 0.0 && m_fast <= 1.0 && m_slow >= 0.0 && m_slow <= 1.0,
          "fast/slow: maturity outside [0,1]");
  require(m_fast >= m_slow, "fast/slow: m_fast must be >= m_slow");
}

namespace {

DelayModel two_point_delay(double maturity) {
  if (maturity >= 1.0) return DelayModel::constant(0);
  if (maturity <= 0.0) return DelayModel::constant(kFarLag);
  return DelayModel::from_table({{0, maturity}, {kFarLag, 1.0 - maturity}});
}

}  // namespace

EnvironmentSpec build_fast_slow(const FastSlowPartition& partition,
                                double hard_mass, const EnvironmentSpec& base) {
  base.validate();
  partition.validate(base.num_cells());
  require(hard_mass >= 0.0 && hard_mass <= 1.0,
          "fast/slow: hard_mass outside [0,1]");

  EnvironmentSpec env = base;
  env.network.clear();
  env.issuer_of_cell.assign(size_t(base.num_cells()), -1);

  // One issuer per (base issuer, speed group) actually used by some cell.
  std::map<std::pair<int, int>, int> group_issuer;
  auto add_group = [&](const std::vector<int>& cells, double maturity,
                       int group) {
    for (int cell : cells) {
      const int base_issuer = base.issuer_of_cell[size_t(cell)];
      auto [it, inserted] =
          group_issuer.try_emplace({base_issuer, group}, int(env.network.size()));
      if (inserted) {
        IssuerProfile clone = base.network[size_t(base_issuer)];
        clone.delay = two_point_delay(maturity);
        clone.volume_share = 0.0;
        env.network.push_back(clone);
      }
      env.network[size_t(it->second)].volume_share +=
          base.cell_weights[size_t(cell)];
      env.issuer_of_cell[size_t(cell)] = it->second;
    }
  };
  add_group(partition.fast_cells, partition.m_fast, 0);
  add_group(partition.slow_cells, partition.m_slow, 1);

  env.validate();
  return env;
}

PackingFamily build_fast_slow_family(const FastSlowPartition& partition,
                                     double hard_mass, int num_policies,
                                     double gap, const EnvironmentSpec& base) {
  const EnvironmentSpec env = build_fast_slow(partition, hard_mass, base);
  const int bits = signature_bits(num_policies);
  const int want_slow = int(std::lround(hard_mass * bits));
  require(want_slow <= int(partition.slow_cells.size()) &&
              bits - want_slow <= int(partition.fast_cells.size()),
          "fast/slow: partition too small for the requested class");
  std::vector<int> pool;
  pool.insert(pool.end(), partition.slow_cells.begin(),
              partition.slow_cells.begin() + want_slow);
  pool.insert(pool.end(), partition.fast_cells.begin(),
              partition.fast_cells.begin() + (bits - want_slow));
  return build_packing_family_on(num_policies, gap, env, pool);
}

}  // namespace ifl
