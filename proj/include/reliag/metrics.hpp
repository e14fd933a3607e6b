#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reliag/answer.hpp"
#include "reliag/selection.hpp"
#include "reliag/types.hpp"

namespace reliag {

// Fraction of predictions whose canonical id equals the gold id. IDK counts
// as incorrect. This is the simulation-mode metric.
double accuracy_canonical(std::span<const Answer> predictions,
                          std::span<const std::string> gold);

// Text-mode metric for external providers: case-normalized substring
// containment of any gold alias in the prediction surface.
double accuracy_containment(std::span<const Answer> predictions,
                            std::span<const std::vector<std::string>> gold_aliases);

struct Correlation {
  double pcc = 0.0;
  double srcc = 0.0;
};

// Pearson and Spearman coefficients; needs >= 3 points and nonzero variance.
Correlation correlation(std::span<const double> estimated,
                        std::span<const double> truth);

struct CostReport {
  double calls_per_query = 0.0;
  double tokens_per_query = 0.0;
  double dollars_per_query = 0.0;
};

CostReport cost_report(std::span<const ProbeLog> logs, const CostModel& model);
CostReport cost_from_calls(double calls_per_query, const CostModel& model);

}  // namespace reliag
