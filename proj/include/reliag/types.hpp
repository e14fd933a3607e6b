#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reliag/answer.hpp"
#include "reliag/error.hpp"

namespace reliag {

// Ground-truth parameters of one simulated source: p = probability a relevant
// retrieval is factual, r = probability the source holds relevant documents.
struct SourceProfile {
  int source_id = 0;
  double p = 0.0;
  double r = 0.0;
};

void validate_profile(const SourceProfile& profile);

// One (query, source) probe, before and after misalignment filtering.
struct ResponseRecord {
  int source_id = 0;
  std::string query_id;
  Answer raw_answer;
  double alignment_score = 0.0;
  Answer filtered_answer;
};

// M queries x N sources of responses. Every cell is populated; IDK is an
// explicit value, never a hole.
struct ResponseMatrix {
  int n_sources = 0;
  std::vector<std::string> query_ids;
  std::vector<std::vector<Answer>> cells;  // [query][source]

  int n_queries() const noexcept { return static_cast<int>(query_ids.size()); }
  void validate() const;
};

// Estimated per-source accuracy w_hat plus the rescaled voting weights
// v = scale * w_hat - 1. scale defaults to the source count but is stored,
// so it can be capped when the source count is unmanageably large.
struct WeightVector {
  std::vector<double> w_hat;
  std::vector<double> v;
  double scale = 0.0;

  int size() const noexcept { return static_cast<int>(w_hat.size()); }
  void validate() const;

  static WeightVector from_w_hat(std::vector<double> w_hat, double scale);
};

enum class PriorKind { Beta, AdversaryHammer, Explicit };

// Source-reliability prior. Beta(2*w_bar/(1-w_bar), 2) has mean w_bar; the
// adversary-hammer prior is the two-point {0.1, 0.9} worst case; Explicit
// carries arbitrary per-source (p, r) pairs.
struct PriorSpec {
  PriorKind kind = PriorKind::Beta;
  double w_bar = 0.6;                   // Beta
  int n_adversaries = 0;                // AdversaryHammer
  int n_total = 0;                      // AdversaryHammer
  std::vector<SourceProfile> profiles;  // Explicit
  double coverage_r = 0.6;              // Beta / AdversaryHammer

  static PriorSpec beta(double w_bar, double coverage_r);
  static PriorSpec adversary_hammer(int n_adversaries, int n_total, double coverage_r);
  static PriorSpec explicit_profiles(std::vector<SourceProfile> profiles);

  void validate() const;
};

enum class DocType { Factual, Misinfo, Irrelevant };
enum class AnswerType { Correct, Incorrect, Idk, Hallucination };

constexpr int kNumDocTypes = 3;
constexpr int kNumAnswerTypes = 4;

const char* doc_type_name(DocType t);
const char* answer_type_name(AnswerType t);
std::optional<DocType> doc_type_from_name(const std::string& name);
std::optional<AnswerType> answer_type_from_name(const std::string& name);

// Answer-type noise for generated responses, one distribution per retrieved
// document type, measured with and without misalignment filtering at a fixed
// threshold tau. Filtering can only replace answers with IDK, so the model
// realizes the filtered column through per-type survival ratios
// min(1, filtered/raw); the IDK row absorbs whatever is censored.
struct NoiseModel {
  std::string name;   // preset name, or empty for ad-hoc models
  double tau = 0.1;   // threshold the filtered distributions were measured at
  int n_distractors = 9;
  // Normalized distributions indexed by [DocType][AnswerType].
  std::array<std::array<double, kNumAnswerTypes>, kNumDocTypes> raw{};
  std::array<std::array<double, kNumAnswerTypes>, kNumDocTypes> filtered{};

  void validate() const;

  double raw_prob(DocType d, AnswerType a) const {
    return raw[static_cast<int>(d)][static_cast<int>(a)];
  }
  double filtered_prob(DocType d, AnswerType a) const {
    return filtered[static_cast<int>(d)][static_cast<int>(a)];
  }

  // Probability a raw answer of this type survives filtering, clamped to 1.
  double survival(DocType d, AnswerType a) const;

  // The filtered distribution actually realizable by censoring: raw mass
  // times survival, remainder folded into IDK. Equal to `filtered` whenever
  // the measured columns are censoring-consistent.
  std::array<double, kNumAnswerTypes> effective_filtered(DocType d) const;
};

// Linear token/price bookkeeping per probe. tokens_per_call defaults to the
// per-call token mass of a 1000-source full sweep so full-probe token totals
// come out in round numbers.
struct CostModel {
  double tokens_per_call = 627.115;
  double price_per_token = 0.096 / 627115.0;

  void validate() const;
};

}  // namespace reliag
