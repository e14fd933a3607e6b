#pragma once

#include <functional>
#include <span>
#include <vector>

#include "reliag/answer.hpp"
#include "reliag/types.hpp"

namespace reliag {

// Pluggable pairwise equivalence between two TEXT answers. Must be reflexive
// and symmetric; the built-in oracle (canonical id equality) is also
// transitive, which makes the greedy clustering below order-independent as a
// partition.
using EquivalenceOracle = std::function<bool(const Answer&, const Answer&)>;

// Equality of canonical_id. The simulation represents paraphrase pools by
// giving equivalent answers the same canonical id and different surfaces.
const EquivalenceOracle& canonical_oracle();

// Misalignment filter: replaces a response whose alignment score falls below
// tau with IDK, otherwise passes it through. IDK is a fixed point.
Answer filter_response(const Answer& raw, double alignment_score, double tau);

// Greedy one-pass clustering. IDK entries are dropped; each TEXT response is
// compared against the first element of each existing cluster in creation
// order and joins the first match, else opens a new cluster.
ClusterSet cluster(std::span<const SourcedAnswer> responses,
                   const EquivalenceOracle& oracle);

struct VoteOptions {
  // Ablation switch: treat negative cluster scores as zero. Off by default;
  // with v = N*w - 1 an unreliable source legitimately votes against.
  bool clamp_negative_scores = false;
};

// Weighted majority voting over clusters: score(C) = sum of v[source] over
// members, argmax wins, ties broken by earliest cluster creation. Returns the
// first response of the winning cluster; empty cluster set yields IDK.
Answer weighted_majority_vote(const ClusterSet& clusters,
                              std::span<const double> v,
                              const VoteOptions& options = {});

// Unit-weight special case of WMV.
Answer majority_vote(const ClusterSet& clusters, int n_sources);

// filter -> cluster -> WMV for one query's records.
Answer aggregate(std::span<const ResponseRecord> records,
                 std::span<const double> v, double tau,
                 const EquivalenceOracle& oracle);

}  // namespace reliag
