#include "reliag/selection.hpp"

#include <algorithm>
#include <numeric>

namespace reliag {

std::vector<int> probe_order(std::span<const double> v) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return v[a] > v[b]; });
  return order;
}

SelectionResult kappa_rrss(const QueryRef& query, std::span<const double> v,
                           int kappa, ResponseProvider& provider, double tau) {
  if (kappa < 1) throw Error(ErrorCode::RejectRange, "kappa must be >= 1");

  SelectionResult result;
  int selected = 0;
  for (int source_id : probe_order(v)) {
    ProbeResult probe = provider.probe(query, source_id);
    Answer filtered = filter_response(probe.raw, probe.alignment_score, tau);
    ++result.log.probes_made;
    const bool relevant = filtered.is_text();
    result.log.entries.push_back({source_id, filtered, relevant});
    if (relevant) {
      result.responses.push_back({source_id, std::move(filtered)});
      if (++selected == kappa) break;
    }
  }
  return result;
}

SelectionResult kappa_rss(const QueryRef& query, std::span<const double> v,
                          int kappa, ResponseProvider& provider, double tau) {
  if (kappa < 1) throw Error(ErrorCode::RejectRange, "kappa must be >= 1");

  SelectionResult result;
  auto order = probe_order(v);
  const int take = std::min<int>(kappa, static_cast<int>(order.size()));
  for (int k = 0; k < take; ++k) {
    const int source_id = order[k];
    ProbeResult probe = provider.probe(query, source_id);
    Answer filtered = filter_response(probe.raw, probe.alignment_score, tau);
    ++result.log.probes_made;
    result.log.entries.push_back({source_id, filtered, true});
    result.responses.push_back({source_id, std::move(filtered)});
  }
  return result;
}

Answer aggregate_kappa(std::span<const SourcedAnswer> selected,
                       std::span<const double> v,
                       const EquivalenceOracle& oracle) {
  // Cluster in source-id order, not probe order, so a full consultation
  // (kappa = N, everyone relevant) reproduces plain WMV answer-for-answer.
  std::vector<SourcedAnswer> ordered(selected.begin(), selected.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SourcedAnswer& a, const SourcedAnswer& b) {
                     return a.source_id < b.source_id;
                   });
  return weighted_majority_vote(cluster(ordered, oracle), v);
}

}  // namespace reliag
