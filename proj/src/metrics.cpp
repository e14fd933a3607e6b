#include "reliag/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace reliag {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Ranks with ties averaged, for Spearman.
std::vector<double> ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw Error(ErrorCode::DegenerateVariance, "zero variance input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double accuracy_canonical(std::span<const Answer> predictions,
                          std::span<const std::string> gold) {
  if (predictions.size() != gold.size())
    throw Error(ErrorCode::LengthMismatch, "predictions vs gold");
  if (predictions.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i].is_text() && predictions[i].canonical_id() == gold[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double accuracy_containment(std::span<const Answer> predictions,
                            std::span<const std::vector<std::string>> gold_aliases) {
  if (predictions.size() != gold_aliases.size())
    throw Error(ErrorCode::LengthMismatch, "predictions vs gold aliases");
  if (predictions.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!predictions[i].is_text()) continue;
    const std::string surface = to_lower(predictions[i].surface());
    for (const auto& alias : gold_aliases[i]) {
      if (!alias.empty() && surface.find(to_lower(alias)) != std::string::npos) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

Correlation correlation(std::span<const double> estimated,
                        std::span<const double> truth) {
  if (estimated.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, "estimated vs truth");
  if (estimated.size() < 3)
    throw Error(ErrorCode::LengthMismatch, "correlation needs >= 3 points");
  Correlation out;
  out.pcc = pearson(estimated, truth);
  auto rx = ranks(estimated);
  auto ry = ranks(truth);
  out.srcc = pearson(rx, ry);
  return out;
}

CostReport cost_report(std::span<const ProbeLog> logs, const CostModel& model) {
  model.validate();
  if (logs.empty()) return {};
  double total = 0.0;
  for (const auto& log : logs) total += log.probes_made;
  return cost_from_calls(total / static_cast<double>(logs.size()), model);
}

CostReport cost_from_calls(double calls_per_query, const CostModel& model) {
  CostReport report;
  report.calls_per_query = calls_per_query;
  report.tokens_per_query = calls_per_query * model.tokens_per_call;
  report.dollars_per_query = report.tokens_per_query * model.price_per_token;
  return report;
}

}  // namespace reliag
