#include "reliag/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace reliag {

void EstimationSettings::validate(int n_sources) const {
  if (eta_max < 1)
    throw Error(ErrorCode::RejectRange, "eta_max must be >= 1");
  if (!(eps_conv > 0.0))
    throw Error(ErrorCode::RejectRange, "eps_conv must be positive");
  if (!(effective_scale(n_sources) > 1.0))
    throw Error(ErrorCode::RejectRange, "scale must exceed 1");
}

std::vector<Answer> consensus_step(const ResponseMatrix& matrix,
                                   std::span<const double> v,
                                   const EquivalenceOracle& oracle) {
  if (static_cast<std::size_t>(matrix.n_sources) != v.size())
    throw Error(ErrorCode::DimensionMismatch,
                "matrix width does not match weight vector");
  std::vector<Answer> consensus;
  consensus.reserve(matrix.cells.size());
  std::vector<SourcedAnswer> row;
  for (const auto& cells : matrix.cells) {
    row.clear();
    for (int i = 0; i < matrix.n_sources; ++i) row.push_back({i, cells[i]});
    ClusterSet clusters = cluster(row, oracle);

    // Unlike the inference-time vote, an exactly tied top score here yields
    // IDK: a tie identifies no consensus answer, and breaking it by cluster
    // creation order would systematically credit low-indexed sources during
    // the match counting that follows.
    int best = -1;
    bool tied = false;
    double best_score = 0.0;
    for (std::size_t k = 0; k < clusters.clusters.size(); ++k) {
      double score = 0.0;
      for (const auto& member : clusters.clusters[k]) score += v[member.source_id];
      if (best < 0 || score > best_score) {
        best = static_cast<int>(k);
        best_score = score;
        tied = false;
      } else if (score == best_score) {
        tied = true;
      }
    }
    consensus.push_back(best < 0 || tied ? Answer::idk()
                                         : clusters.clusters[best].front().answer);
  }
  return consensus;
}

std::vector<double> reliability_step(const ResponseMatrix& matrix,
                                     std::span<const Answer> consensus,
                                     const EquivalenceOracle& oracle,
                                     double scale) {
  if (consensus.size() != matrix.cells.size())
    throw Error(ErrorCode::DimensionMismatch,
                "consensus length does not match matrix height");
  const int n = matrix.n_sources;
  std::vector<int> matched(n, 0);
  std::vector<int> answered(n, 0);
  for (std::size_t j = 0; j < matrix.cells.size(); ++j) {
    const auto& row = matrix.cells[j];
    const Answer& truth = consensus[j];
    // A row without a consensus answer (all IDK, or an exact tie) judges
    // nobody. Counting such rows in the denominator would deflate every
    // participant of a 1-vs-1 disagreement and leave the ranking to noise.
    if (truth.is_idk()) continue;
    int voters = 0;
    for (int i = 0; i < n; ++i)
      if (row[i].is_text()) ++voters;
    for (int i = 0; i < n; ++i) {
      if (row[i].is_idk()) continue;
      // A row where i is the lone voter pits the source against itself: the
      // consensus there is its own answer by construction. Such rows carry no
      // cross-checking evidence either, otherwise low-coverage sources
      // self-certify.
      if (voters == 1) continue;
      ++answered[i];
      if (oracle(row[i], truth)) ++matched[i];
    }
  }
  std::vector<double> w_hat(n);
  for (int i = 0; i < n; ++i) {
    w_hat[i] = answered[i] > 0
                   ? static_cast<double>(matched[i]) / answered[i]
                   : 1.0 / scale;  // no evidence, no influence
  }
  return w_hat;
}

std::pair<WeightVector, EstimationTrace> estimate_reliability(
    const ResponseMatrix& matrix, const EstimationSettings& settings,
    const EquivalenceOracle& oracle) {
  matrix.validate();
  if (matrix.n_queries() < 1)
    throw Error(ErrorCode::DimensionMismatch, "estimation needs at least one query");
  if (matrix.n_sources < 2)
    throw Error(ErrorCode::DimensionMismatch, "estimation needs at least two sources");
  settings.validate(matrix.n_sources);

  bool any_text = false;
  for (const auto& row : matrix.cells)
    for (const auto& cell : row)
      if (cell.is_text()) { any_text = true; break; }
  if (!any_text)
    throw Error(ErrorCode::DegenerateMatrix, "every cell is IDK");

  const int n = matrix.n_sources;
  const double scale = settings.effective_scale(n);

  EstimationTrace trace;
  std::vector<double> v(n, 1.0);
  std::vector<double> w_hat(n, 0.0);

  for (int t = 0; t < settings.eta_max; ++t) {
    auto consensus = consensus_step(matrix, v, oracle);
    w_hat = reliability_step(matrix, consensus, oracle, scale);

    std::vector<double> v_next(n);
    for (int i = 0; i < n; ++i) v_next[i] = scale * w_hat[i] - 1.0;

    double delta = 0.0;
    for (int i = 0; i < n; ++i)
      delta = std::max(delta, std::abs(v_next[i] - v[i]));

    v = std::move(v_next);
    trace.iterations.push_back({v, std::move(consensus)});
    trace.iterations_run = t + 1;
    if (delta <= settings.eps_conv) {
      trace.converged = true;
      break;
    }
  }

  WeightVector weights = WeightVector::from_w_hat(std::move(w_hat), scale);
  return {std::move(weights), std::move(trace)};
}

}  // namespace reliag
