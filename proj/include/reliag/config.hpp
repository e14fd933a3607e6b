#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reliag/estimation.hpp"
#include "reliag/types.hpp"

namespace reliag {

enum class Method { RaRag, Mv, OracleWmv, KappaRss, RaRagNoFilter };

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// Full experiment description. n_sources and n_adversaries may hold several
// values; the sweep runs their cross product. Parsed from a flat, commented
// key=value file (see configs/example.cfg).
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int n_trials = 10;
  int m_est = 200;    // reliability-estimation split
  int m_test = 1400;  // evaluation split
  std::vector<Method> methods = {Method::RaRag, Method::Mv, Method::OracleWmv};
  int kappa = 4;
  double tau = 0.1;
  EstimationSettings estimation;

  std::vector<int> n_sources = {9};
  PriorSpec prior = PriorSpec::beta(0.6, 0.6);
  std::vector<int> n_adversaries;  // adversary-hammer sweep axis
  std::string noise = "exact";     // "exact", preset name, or .tsv path
  int n_paraphrases = 9;
  int n_distractors = 9;

  CostModel cost;
  bool log_probe_counts = true;
  int max_threads = 0;  // 0 = one worker per trial up to hardware limit
  std::string out_dir;
};

// Normalizes defaults and rejects invariant-violating fields. Also verifies
// that a named noise preset actually loads.
ExperimentConfig validate(ExperimentConfig config);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// For Method::RaRag et al. the noise model referenced by `noise`, or nullopt
// for EXACT mode.
std::optional<NoiseModel> resolve_noise(const ExperimentConfig& config);

}  // namespace reliag
