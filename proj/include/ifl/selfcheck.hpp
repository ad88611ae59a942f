#pragma once

#include <iosfwd>

namespace ifl {

// Fast invariant suite behind `ifl selfcheck`: kernel equivalence, channel
// frequency fidelity, debias unbiasedness, maturity monotonicity, packing
// soundness, floor identities, convexity spot checks. Returns 0 on success.
int run_selfcheck(std::ostream& out);

}  // namespace ifl
