#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reliag/config.hpp"
#include "reliag/metrics.hpp"
#include "reliag/simulation.hpp"

namespace reliag {

extern const char* const kToolVersion;

// Per-method results across trials. Every float is rounded to 6 significant
// digits on the way in, and the aggregates are computed from the rounded
// trial values, so the report is exactly recomputable from itself.
struct MethodStats {
  Method method = Method::Mv;
  std::vector<double> trial_accuracy;
  std::vector<double> trial_calls;  // probes per query, per trial
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // sample std over trials
  double calls_per_query = 0.0;
  double tokens_per_query = 0.0;
  double dollars_per_query = 0.0;
  std::vector<std::vector<int>> probe_counts;  // [trial][test query], optional
};

struct TrialDiagnostics {
  std::vector<double> true_p;
  std::vector<double> estimated_w;
  std::vector<double> estimated_v;
  std::vector<double> estimated_w_nofilter;  // populated by ra_rag_no_filter
  std::vector<double> estimated_v_nofilter;
  std::optional<double> pcc;   // absent when true p has zero variance
  std::optional<double> srcc;
  bool converged = false;
  int iterations = 0;
};

struct SettingReport {
  int n_sources = 0;
  int n_adversaries = -1;  // -1 when the prior has no adversary axis
  std::vector<MethodStats> methods;
  std::vector<TrialDiagnostics> trials;
};

struct RunReport {
  std::string tool_version;
  std::uint64_t seed = 0;
  ExperimentConfig config;  // echo of the validated config
  std::vector<SettingReport> settings;
};

// Run the full experiment: per sweep point and trial, build a world, estimate
// reliability on the estimation split, evaluate every configured method on
// the test split. Trials run in parallel on derived seeds and are reduced in
// trial order, so the report bytes never depend on scheduling.
RunReport run_experiment(const ExperimentConfig& config);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& json_text);

// One row per (method, sweep point, trial).
std::string report_to_sweep_csv(const RunReport& report);

// Accuracy and cost tables for humans.
std::string report_to_markdown(const RunReport& report);

}  // namespace reliag
