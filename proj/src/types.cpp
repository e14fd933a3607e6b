#include "reliag/types.hpp"

#include <sstream>

namespace reliag {

namespace {

void require_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0,1], got " << x;
    throw Error(ErrorCode::RejectRange, os.str());
  }
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::RejectRange: return "REJECT_RANGE";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::SourceIndexOutOfRange: return "SOURCE_INDEX_OUT_OF_RANGE";
    case ErrorCode::DegenerateMatrix: return "DEGENERATE_MATRIX";
    case ErrorCode::DegenerateVariance: return "DEGENERATE_VARIANCE";
    case ErrorCode::LengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::ProviderFailure: return "PROVIDER_FAILURE";
    case ErrorCode::ConfigParse: return "CONFIG_PARSE";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::Internal: return "INTERNAL";
  }
  return "UNKNOWN";
}

void validate_profile(const SourceProfile& profile) {
  require_unit_interval(profile.p, "reliability p");
  require_unit_interval(profile.r, "coverage r");
  if (profile.source_id < 0)
    throw Error(ErrorCode::RejectRange, "source_id must be nonnegative");
}

void ResponseMatrix::validate() const {
  if (n_sources < 1)
    throw Error(ErrorCode::RejectRange, "matrix needs at least one source");
  if (cells.size() != query_ids.size())
    throw Error(ErrorCode::DimensionMismatch, "row count != query id count");
  for (const auto& row : cells) {
    if (static_cast<int>(row.size()) != n_sources)
      throw Error(ErrorCode::DimensionMismatch, "ragged matrix row");
  }
}

void WeightVector::validate() const {
  if (w_hat.size() != v.size())
    throw Error(ErrorCode::DimensionMismatch, "w_hat and v lengths differ");
  if (!(scale > 1.0))
    throw Error(ErrorCode::RejectRange, "scale must exceed 1");
  for (std::size_t i = 0; i < w_hat.size(); ++i) {
    require_unit_interval(w_hat[i], "w_hat");
    if (std::abs(v[i] - (scale * w_hat[i] - 1.0)) > 1e-12)
      throw Error(ErrorCode::RejectRange, "v != scale*w_hat - 1");
    if (v[i] < -1.0 - 1e-12 || v[i] > scale - 1.0 + 1e-12)
      throw Error(ErrorCode::RejectRange, "v outside [-1, scale-1]");
  }
}

WeightVector WeightVector::from_w_hat(std::vector<double> w_hat, double scale) {
  WeightVector wv;
  wv.scale = scale;
  wv.v.reserve(w_hat.size());
  for (double w : w_hat) wv.v.push_back(scale * w - 1.0);
  wv.w_hat = std::move(w_hat);
  wv.validate();
  return wv;
}

PriorSpec PriorSpec::beta(double w_bar, double coverage_r) {
  PriorSpec spec;
  spec.kind = PriorKind::Beta;
  spec.w_bar = w_bar;
  spec.coverage_r = coverage_r;
  spec.validate();
  return spec;
}

PriorSpec PriorSpec::adversary_hammer(int n_adversaries, int n_total, double coverage_r) {
  PriorSpec spec;
  spec.kind = PriorKind::AdversaryHammer;
  spec.n_adversaries = n_adversaries;
  spec.n_total = n_total;
  spec.coverage_r = coverage_r;
  spec.validate();
  return spec;
}

PriorSpec PriorSpec::explicit_profiles(std::vector<SourceProfile> profiles) {
  PriorSpec spec;
  spec.kind = PriorKind::Explicit;
  spec.profiles = std::move(profiles);
  spec.validate();
  return spec;
}

void PriorSpec::validate() const {
  switch (kind) {
    case PriorKind::Beta:
      if (!(w_bar > 0.0 && w_bar < 1.0))
        throw Error(ErrorCode::RejectRange, "beta prior requires 0 < w_bar < 1");
      require_unit_interval(coverage_r, "coverage r");
      break;
    case PriorKind::AdversaryHammer:
      if (n_adversaries < 0 || n_total < 0 || n_adversaries > n_total)
        throw Error(ErrorCode::RejectRange,
                    "adversary-hammer requires 0 <= n_adversaries <= n_total");
      require_unit_interval(coverage_r, "coverage r");
      break;
    case PriorKind::Explicit:
      if (profiles.empty())
        throw Error(ErrorCode::RejectRange, "explicit prior requires profiles");
      for (const auto& profile : profiles) validate_profile(profile);
      break;
  }
}

const char* doc_type_name(DocType t) {
  switch (t) {
    case DocType::Factual: return "factual";
    case DocType::Misinfo: return "misinformation";
    case DocType::Irrelevant: return "irrelevant";
  }
  return "?";
}

const char* answer_type_name(AnswerType t) {
  switch (t) {
    case AnswerType::Correct: return "correct";
    case AnswerType::Incorrect: return "incorrect";
    case AnswerType::Idk: return "idk";
    case AnswerType::Hallucination: return "hallucination";
  }
  return "?";
}

std::optional<DocType> doc_type_from_name(const std::string& name) {
  if (name == "factual") return DocType::Factual;
  if (name == "misinformation" || name == "misinfo") return DocType::Misinfo;
  if (name == "irrelevant") return DocType::Irrelevant;
  return std::nullopt;
}

std::optional<AnswerType> answer_type_from_name(const std::string& name) {
  if (name == "correct") return AnswerType::Correct;
  if (name == "incorrect") return AnswerType::Incorrect;
  if (name == "idk") return AnswerType::Idk;
  if (name == "hallucination") return AnswerType::Hallucination;
  return std::nullopt;
}

void NoiseModel::validate() const {
  require_unit_interval(tau, "tau");
  if (n_distractors < 1)
    throw Error(ErrorCode::RejectRange, "n_distractors must be >= 1");
  for (int d = 0; d < kNumDocTypes; ++d) {
    double raw_sum = 0.0, filtered_sum = 0.0;
    for (int a = 0; a < kNumAnswerTypes; ++a) {
      if (raw[d][a] < 0.0 || filtered[d][a] < 0.0)
        throw Error(ErrorCode::RejectRange, "negative probability in noise model");
      raw_sum += raw[d][a];
      filtered_sum += filtered[d][a];
    }
    if (std::abs(raw_sum - 1.0) > 1e-9 || std::abs(filtered_sum - 1.0) > 1e-9)
      throw Error(ErrorCode::RejectRange, "noise distributions must sum to 1");
  }
  // Factual documents never yield the designated wrong answer.
  if (raw_prob(DocType::Factual, AnswerType::Incorrect) != 0.0)
    throw Error(ErrorCode::RejectRange,
                "factual raw distribution must have zero INCORRECT mass");
  // A zero threshold cannot censor anything, so it cannot realize a filtered
  // column that loses mass relative to raw.
  if (tau == 0.0) {
    for (int d = 0; d < kNumDocTypes; ++d)
      for (int a = 0; a < kNumAnswerTypes; ++a)
        if (survival(static_cast<DocType>(d), static_cast<AnswerType>(a)) < 1.0)
          throw Error(ErrorCode::RejectRange,
                      "tau = 0 is inconsistent with a censoring filtered column");
  }
}

double NoiseModel::survival(DocType d, AnswerType a) const {
  if (a == AnswerType::Idk) return 1.0;
  double r = raw_prob(d, a);
  if (r <= 0.0) return 1.0;
  double f = filtered_prob(d, a);
  return f >= r ? 1.0 : f / r;
}

std::array<double, kNumAnswerTypes> NoiseModel::effective_filtered(DocType d) const {
  std::array<double, kNumAnswerTypes> out{};
  double idk = raw_prob(d, AnswerType::Idk);
  for (AnswerType a : {AnswerType::Correct, AnswerType::Incorrect, AnswerType::Hallucination}) {
    double kept = raw_prob(d, a) * survival(d, a);
    out[static_cast<int>(a)] = kept;
    idk += raw_prob(d, a) - kept;
  }
  out[static_cast<int>(AnswerType::Idk)] = idk;
  return out;
}

void CostModel::validate() const {
  if (tokens_per_call < 0.0 || price_per_token < 0.0)
    throw Error(ErrorCode::RejectRange, "cost model fields must be nonnegative");
}

}  // namespace reliag
