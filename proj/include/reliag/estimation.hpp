#pragma once

#include <vector>

#include "reliag/aggregation.hpp"
#include "reliag/types.hpp"

namespace reliag {

struct EstimationSettings {
  int eta_max = 25;         // iteration cap; convergence is not guaranteed
  double eps_conv = 1e-6;   // max-norm tolerance on consecutive v vectors
  double scale = 0.0;       // 0 means "use N"; cap it when N is unmanageable

  void validate(int n_sources) const;
  double effective_scale(int n_sources) const {
    return scale > 0.0 ? scale : static_cast<double>(n_sources);
  }
};

struct EstimationIteration {
  std::vector<double> v;
  std::vector<Answer> consensus;
};

struct EstimationTrace {
  std::vector<EstimationIteration> iterations;
  int iterations_run = 0;
  bool converged = false;
};

// One consensus pass: per query row, weighted vote over the clustered
// responses under the current weights. All-IDK rows yield IDK, and so does an
// exact tie for the top score: a tie carries no consensus, and resolving it
// positionally would bias the subsequent match counts toward low source ids.
std::vector<Answer> consensus_step(const ResponseMatrix& matrix,
                                   std::span<const double> v,
                                   const EquivalenceOracle& oracle);

// One reliability pass: w_hat[i] = matches with the consensus / rows that
// cross-check source i. A row cross-checks i only when i answered TEXT, at
// least one other source answered TEXT, and the row has a consensus answer;
// self-confirmed singletons and no-consensus rows are evidence for nobody.
// A source with an empty denominator gets the neutral w_hat = 1/scale so its
// rescaled vote is exactly zero.
std::vector<double> reliability_step(const ResponseMatrix& matrix,
                                     std::span<const Answer> consensus,
                                     const EquivalenceOracle& oracle,
                                     double scale);

// Alternate consensus and reliability passes from the unit-weight start until
// the v vector moves by at most eps_conv in max norm or eta_max is reached.
std::pair<WeightVector, EstimationTrace> estimate_reliability(
    const ResponseMatrix& matrix, const EstimationSettings& settings,
    const EquivalenceOracle& oracle);

}  // namespace reliag
