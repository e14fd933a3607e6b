#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "reliag/aggregation.hpp"
#include "reliag/types.hpp"

namespace reliag {

struct QueryRef {
  int index = 0;            // row index when the caller knows it, else -1
  std::string id;
  std::string text;
};

struct ProbeResult {
  Answer raw;
  double alignment_score = 0.0;
};

// One response per probed source. Implementations may be probed for distinct
// queries concurrently when they declare it safe; probes within one query are
// sequential (the selection rules stop early).
class ResponseProvider {
 public:
  virtual ~ResponseProvider() = default;
  // May throw ProviderFailure; a transport failure must not masquerade as IDK.
  virtual ProbeResult probe(const QueryRef& query, int source_id) = 0;
  virtual bool safe_for_concurrent_queries() const { return false; }
};

struct ProbeEntry {
  int source_id = 0;
  Answer filtered;
  bool was_selected = false;
};

struct ProbeLog {
  std::vector<ProbeEntry> entries;
  int probes_made = 0;
};

struct SelectionResult {
  std::vector<SourcedAnswer> responses;  // the selected set
  ProbeLog log;
};

// Descending-v probe order, ties by ascending source id.
std::vector<int> probe_order(std::span<const double> v);

// kappa-reliable-and-relevant selection: probe sources in descending weight
// order, filter each response, keep the first kappa non-IDK ones, stop early.
// If fewer than kappa relevant sources exist the partial set is returned.
SelectionResult kappa_rrss(const QueryRef& query, std::span<const double> v,
                           int kappa, ResponseProvider& provider, double tau);

// Ablation: probe exactly the top-kappa sources by weight, relevance unchecked.
// IDK responses stay in the returned set and vanish later in clustering.
SelectionResult kappa_rss(const QueryRef& query, std::span<const double> v,
                          int kappa, ResponseProvider& provider, double tau);

// Cluster the selected responses and vote with the sources' weights.
Answer aggregate_kappa(std::span<const SourcedAnswer> selected,
                       std::span<const double> v,
                       const EquivalenceOracle& oracle);

}  // namespace reliag
