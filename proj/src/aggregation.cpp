#include "reliag/aggregation.hpp"

#include <string>

namespace reliag {

const EquivalenceOracle& canonical_oracle() {
  static const EquivalenceOracle oracle = [](const Answer& a, const Answer& b) {
    return a.canonical_id() == b.canonical_id();
  };
  return oracle;
}

Answer filter_response(const Answer& raw, double alignment_score, double tau) {
  if (!(alignment_score >= 0.0 && alignment_score <= 1.0))
    throw Error(ErrorCode::RejectRange, "alignment score outside [0,1]");
  if (!(tau >= 0.0 && tau <= 1.0))
    throw Error(ErrorCode::RejectRange, "tau outside [0,1]");
  if (raw.is_idk()) return raw;
  return alignment_score < tau ? Answer::idk() : raw;
}

ClusterSet cluster(std::span<const SourcedAnswer> responses,
                   const EquivalenceOracle& oracle) {
  ClusterSet set;
  for (const auto& entry : responses) {
    if (entry.answer.is_idk()) continue;
    bool placed = false;
    for (auto& members : set.clusters) {
      if (oracle(members.front().answer, entry.answer)) {
        members.push_back(entry);
        placed = true;
        break;
      }
    }
    if (!placed) set.clusters.push_back({entry});
  }
  return set;
}

Answer weighted_majority_vote(const ClusterSet& clusters,
                              std::span<const double> v,
                              const VoteOptions& options) {
  if (clusters.empty()) return Answer::idk();

  int best = -1;
  double best_score = 0.0;
  for (std::size_t k = 0; k < clusters.clusters.size(); ++k) {
    double score = 0.0;
    for (const auto& member : clusters.clusters[k]) {
      if (member.source_id < 0 ||
          static_cast<std::size_t>(member.source_id) >= v.size())
        throw Error(ErrorCode::SourceIndexOutOfRange,
                    "cluster member source " + std::to_string(member.source_id) +
                        " not covered by weight vector of size " +
                        std::to_string(v.size()));
      score += v[member.source_id];
    }
    if (options.clamp_negative_scores && score < 0.0) score = 0.0;
    if (best < 0 || score > best_score) {
      best = static_cast<int>(k);
      best_score = score;
    }
  }
  return clusters.clusters[best].front().answer;
}

Answer majority_vote(const ClusterSet& clusters, int n_sources) {
  std::vector<double> unit(static_cast<std::size_t>(n_sources), 1.0);
  return weighted_majority_vote(clusters, unit);
}

Answer aggregate(std::span<const ResponseRecord> records,
                 std::span<const double> v, double tau,
                 const EquivalenceOracle& oracle) {
  std::vector<SourcedAnswer> filtered;
  filtered.reserve(records.size());
  for (const auto& record : records) {
    filtered.push_back(
        {record.source_id,
         filter_response(record.raw_answer, record.alignment_score, tau)});
  }
  return weighted_majority_vote(cluster(filtered, oracle), v);
}

}  // namespace reliag
