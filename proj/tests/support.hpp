#pragma once

// Shared helpers for tests: an independent brute-force voting oracle and
// random response generators. Kept free of any dependence on the library's
// clustering/voting path so the equivalence checks mean something.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "reliag/answer.hpp"
#include "reliag/rng.hpp"

namespace reliag::testing {

// Exhaustive score table over canonical ids: score[c] = sum of v over
// responses answering c; winner is the max-score canonical, ties broken by
// earliest first occurrence in the input; the returned answer is the first
// response carrying the winning canonical. IDK entries never participate.
inline Answer brute_force_vote(const std::vector<SourcedAnswer>& responses,
                               std::span<const double> v) {
  std::vector<std::string> order;
  std::map<std::string, double> score;
  for (const auto& r : responses) {
    if (r.answer.is_idk()) continue;
    const std::string& c = r.answer.canonical_id();
    if (!score.count(c)) order.push_back(c);
    score[c] += v[r.source_id];
  }
  if (order.empty()) return Answer::idk();
  std::string best = order.front();
  for (const auto& c : order)
    if (score[c] > score[best]) best = c;
  for (const auto& r : responses)
    if (r.answer.is_text() && r.answer.canonical_id() == best) return r.answer;
  return Answer::idk();
}

// Random responses over a small canonical pool; index 0 in the pool stands
// for IDK.
inline std::vector<SourcedAnswer> random_responses(Rng& rng, int n_sources,
                                                   int n_answers,
                                                   double idk_prob = 0.25) {
  std::vector<SourcedAnswer> out;
  out.reserve(n_sources);
  for (int i = 0; i < n_sources; ++i) {
    if (rng.u01() < idk_prob) {
      out.push_back({i, Answer::idk()});
    } else {
      int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_answers)));
      out.push_back({i, Answer::text("a" + std::to_string(a))});
    }
  }
  return out;
}

}  // namespace reliag::testing
