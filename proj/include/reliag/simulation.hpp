#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reliag/rng.hpp"
#include "reliag/selection.hpp"
#include "reliag/types.hpp"

namespace reliag {

// Synthetic multi-source world. `noise` empty means EXACT mode: a relevant
// truthful source answers gold, a relevant lying source answers its committed
// distractor, an irrelevant source answers IDK, and no filtering ever fires.
struct WorldSpec {
  int n_queries = 0;
  int n_sources = 0;
  PriorSpec prior;
  std::optional<NoiseModel> noise;
  int n_paraphrases = 9;   // surfaces per gold answer
  int n_distractors = 9;   // committed wrong answers per query (EXACT mode)
  std::uint64_t seed = 0;

  void validate() const;
  int distractor_count() const {
    return noise ? noise->n_distractors : n_distractors;
  }
};

// Materialized profiles plus the latent-state key. Latent state for a
// (source, query) cell is a pure function of (seed, source_id, query_index),
// so regeneration is bit-identical and cells can be produced lazily in any
// order; the probing path and the matrix path must agree exactly.
struct SourceWorld {
  WorldSpec spec;
  std::vector<SourceProfile> profiles;

  bool relevant(int source_id, int query_index) const;
  bool truthful(int source_id, int query_index) const;
  int distractor_index(int source_id, int query_index) const;

  std::string gold_canonical(int query_index) const;
  std::string query_id(int query_index) const;
};

// Draw per-source profiles from a prior. Beta uses Beta(2w/(1-w), 2);
// adversary-hammer assigns 0.1 to n_adversaries sources and 0.9 to the rest,
// then shuffles the assignment.
std::vector<SourceProfile> sample_prior(const PriorSpec& spec, int n, Rng& rng);

SourceWorld build_world(const WorldSpec& spec);

// Generate the (source, query) response. Deterministic in the world seed.
ResponseRecord generate_response(const SourceWorld& world, int source_id,
                                 int query_index);

struct GeneratedMatrix {
  ResponseMatrix raw;
  ResponseMatrix filtered;
  std::vector<std::string> gold;  // canonical id per query row
  SourceWorld world;
};

// Materialize all M x N records. Row split into estimation/test halves is the
// caller's concern.
GeneratedMatrix build_matrix(const WorldSpec& spec);

// Lazily materializing provider over a simulated world. Pure function of the
// world seed, so it is safe for concurrent probes across queries.
class SimulationProvider : public ResponseProvider {
 public:
  explicit SimulationProvider(const SourceWorld& world) : world_(world) {}

  ProbeResult probe(const QueryRef& query, int source_id) override;
  bool safe_for_concurrent_queries() const override { return true; }

 private:
  int query_index(const QueryRef& query) const;
  const SourceWorld& world_;
};

// Named Appendix-style noise presets, shipped as plain-text data files
// ("<model>_<dataset>_tau{01,05,08}"). Resolution: RELIAG_NOISE_DIR env var,
// then the configured data directory.
NoiseModel load_noise_preset(const std::string& name);
NoiseModel load_noise_file(const std::string& path);
std::vector<std::string> list_noise_presets();
std::string noise_preset_dir();
void set_noise_preset_dir(const std::string& dir);

}  // namespace reliag
