#pragma once

// Ground-truth world construction: explicit environments, packing-style
// hard families, heterogeneous issuer networks, fast/slow maturity splits.

#include <span>
#include <vector>

#include "ifl/core.hpp"
#include "ifl/policy.hpp"

namespace ifl {

struct EnvironmentSpec {
  std::vector<double> fraud_prob;    // latent P(fraud | cell)
  std::vector<double> cell_weights;  // context distribution, sums to 1
  std::vector<int> issuer_of_cell;
  LossSpec losses;
  std::vector<IssuerProfile> network;

  int num_cells() const { return int(fraud_prob.size()); }
  const IssuerProfile& issuer_for_cell(int cell) const;
  void validate() const;
};

// N environments over a shared context distribution; environment j makes
// companion policy j uniquely optimal by at least `gap` per round.
struct PackingFamily {
  std::vector<EnvironmentSpec> environments;
  PolicyClass policies;  // companion class, one favored member per environment
  std::vector<int> favored_policy;
  double gap = 0.0;
};

struct FastSlowPartition {
  std::vector<int> fast_cells;
  std::vector<int> slow_cells;
  double m_fast = 1.0;
  double m_slow = 0.0;
  void validate(int num_cells) const;  // disjoint cover, m_fast >= m_slow
};

struct Transaction {
  int cell;
  int issuer;
  int latent;
};

Transaction draw_transaction(const EnvironmentSpec& env, RngStream& rng);

// Exact per-round expected loss of a policy: sum over cells of
// weight * expected_loss. No sampling.
double analytic_policy_loss(const EnvironmentSpec& env,
                            const PolicyTable& policy);

// argmin / min of analytic_policy_loss over the class; ties to lowest index.
std::pair<int, double> oracle_best_policy(const EnvironmentSpec& env,
                                          const PolicyClass& cls);

// Signature-cell packing construction over ceil(log2 N) eligible cells:
// companion policy j approves on its signature subset and declines on the
// other signature cells; environment j sets fraud probabilities so that
// exactly that table is per-cell optimal with weighted margin >= gap.
// Throws std::invalid_argument when the gap is infeasible for the losses.
PackingFamily build_packing_family(int num_policies, double gap,
                                   const EnvironmentSpec& base);

// Same construction with the signature cells restricted to a pool.
PackingFamily build_packing_family_on(int num_policies, double gap,
                                      const EnvironmentSpec& base,
                                      std::span<const int> eligible_cells);

// One environment per issuer profile list: cell weights realize the volume
// shares and each issuer's cells route through its own gamma/channel/delay.
EnvironmentSpec build_hetero_network(const std::vector<IssuerProfile>& profiles,
                                     int cells_per_issuer);

// Rewires per-cell delay so fast cells mature with probability m_fast and
// slow cells with m_slow (two-point delay tables: now, or far beyond any
// horizon). hard_mass is validated here and consumed by
// build_fast_slow_family, which places the discriminating structure.
EnvironmentSpec build_fast_slow(const FastSlowPartition& partition,
                                double hard_mass, const EnvironmentSpec& base);

// Packing family over the fast/slow environment with round(hard_mass * bits)
// of the signature cells drawn from the slow region and the rest from the
// fast region. hard_mass=1 places every discriminating difference on slow
// cells; hard_mass=0 places them all on fast cells.
PackingFamily build_fast_slow_family(const FastSlowPartition& partition,
                                     double hard_mass, int num_policies,
                                     double gap, const EnvironmentSpec& base);

}  // namespace ifl
