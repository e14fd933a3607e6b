#include "reliag/simulation.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "reliag/aggregation.hpp"

#ifndef RELIAG_DATA_DIR
#define RELIAG_DATA_DIR ""
#endif

namespace reliag {

namespace {

// Draw channels; one stream per purpose so draws never interleave.
enum Channel : std::uint64_t {
  kChProfile = 1,
  kChRelevant,
  kChTruth,
  kChDistractor,
  kChParaphrase,
  kChAnswerType,
  kChSurvive,
  kChScore,
};

double cell_u01(const WorldSpec& spec, int source_id, int query_index,
                Channel channel) {
  Rng rng = keyed_rng(spec.seed, static_cast<std::uint64_t>(source_id),
                      static_cast<std::uint64_t>(query_index), channel);
  return rng.u01();
}

std::uint64_t cell_below(const WorldSpec& spec, int source_id, int query_index,
                         Channel channel, std::uint64_t n) {
  Rng rng = keyed_rng(spec.seed, static_cast<std::uint64_t>(source_id),
                      static_cast<std::uint64_t>(query_index), channel);
  return rng.below(n);
}

AnswerType draw_answer_type(const NoiseModel& noise, DocType doc, double u) {
  const auto& dist = noise.raw[static_cast<int>(doc)];
  double acc = 0.0;
  for (int a = 0; a < kNumAnswerTypes; ++a) {
    acc += dist[a];
    if (u < acc) return static_cast<AnswerType>(a);
  }
  return AnswerType::Idk;  // guard against accumulated rounding
}

}  // namespace

void WorldSpec::validate() const {
  if (n_queries < 1)
    throw Error(ErrorCode::RejectRange, "n_queries must be >= 1");
  if (n_sources < 2)
    throw Error(ErrorCode::RejectRange, "n_sources must be >= 2");
  if (n_paraphrases < 1)
    throw Error(ErrorCode::RejectRange, "n_paraphrases must be >= 1");
  if (n_distractors < 1)
    throw Error(ErrorCode::RejectRange, "n_distractors must be >= 1");
  prior.validate();
  if (noise) noise->validate();
  if (prior.kind == PriorKind::Explicit &&
      static_cast<int>(prior.profiles.size()) != n_sources)
    throw Error(ErrorCode::DimensionMismatch,
                "explicit prior must list exactly n_sources profiles");
  if (prior.kind == PriorKind::AdversaryHammer && prior.n_total != n_sources)
    throw Error(ErrorCode::DimensionMismatch,
                "adversary-hammer n_total must equal n_sources");
}

std::vector<SourceProfile> sample_prior(const PriorSpec& spec, int n, Rng& rng) {
  spec.validate();
  std::vector<SourceProfile> profiles(static_cast<std::size_t>(n));
  switch (spec.kind) {
    case PriorKind::Beta: {
      const double alpha = 2.0 * spec.w_bar / (1.0 - spec.w_bar);
      for (int i = 0; i < n; ++i)
        profiles[i] = {i, rng.beta(alpha, 2.0), spec.coverage_r};
      break;
    }
    case PriorKind::AdversaryHammer: {
      if (spec.n_total != n)
        throw Error(ErrorCode::DimensionMismatch,
                    "adversary-hammer n_total must equal requested n");
      std::vector<double> ps(static_cast<std::size_t>(n), 0.9);
      std::fill(ps.begin(), ps.begin() + spec.n_adversaries, 0.1);
      rng.shuffle(ps);
      for (int i = 0; i < n; ++i) profiles[i] = {i, ps[i], spec.coverage_r};
      break;
    }
    case PriorKind::Explicit: {
      if (static_cast<int>(spec.profiles.size()) != n)
        throw Error(ErrorCode::DimensionMismatch,
                    "explicit prior size must equal requested n");
      profiles = spec.profiles;
      for (int i = 0; i < n; ++i) profiles[i].source_id = i;
      break;
    }
  }
  return profiles;
}

bool SourceWorld::relevant(int source_id, int query_index) const {
  return cell_u01(spec, source_id, query_index, kChRelevant) <
         profiles[source_id].r;
}

bool SourceWorld::truthful(int source_id, int query_index) const {
  return cell_u01(spec, source_id, query_index, kChTruth) <
         profiles[source_id].p;
}

int SourceWorld::distractor_index(int source_id, int query_index) const {
  return static_cast<int>(cell_below(spec, source_id, query_index, kChDistractor,
                                     static_cast<std::uint64_t>(spec.distractor_count())));
}

std::string SourceWorld::gold_canonical(int query_index) const {
  return "q" + std::to_string(query_index) + ":gold";
}

std::string SourceWorld::query_id(int query_index) const {
  return "q" + std::to_string(query_index);
}

SourceWorld build_world(const WorldSpec& spec) {
  spec.validate();
  SourceWorld world;
  world.spec = spec;
  Rng rng = keyed_rng(spec.seed, 0, 0, kChProfile);
  world.profiles = sample_prior(spec.prior, spec.n_sources, rng);
  return world;
}

ResponseRecord generate_response(const SourceWorld& world, int source_id,
                                 int query_index) {
  if (source_id < 0 || source_id >= world.spec.n_sources)
    throw Error(ErrorCode::SourceIndexOutOfRange, "source_id out of range");
  if (query_index < 0 || query_index >= world.spec.n_queries)
    throw Error(ErrorCode::RejectRange, "query index out of range");

  const WorldSpec& spec = world.spec;
  ResponseRecord record;
  record.source_id = source_id;
  record.query_id = world.query_id(query_index);

  const bool relevant = world.relevant(source_id, query_index);
  const bool truthful = world.truthful(source_id, query_index);

  auto gold_answer = [&]() {
    int k = static_cast<int>(cell_below(spec, source_id, query_index,
                                        kChParaphrase,
                                        static_cast<std::uint64_t>(spec.n_paraphrases)));
    std::string canonical = world.gold_canonical(query_index);
    std::string surface = canonical + "~p" + std::to_string(k);
    return Answer::text(std::move(canonical), std::move(surface));
  };
  auto distractor_answer = [&]() {
    std::string canonical = "q" + std::to_string(query_index) + ":wrong" +
                            std::to_string(world.distractor_index(source_id, query_index));
    return Answer::text(canonical, canonical);
  };

  if (!spec.noise) {
    // EXACT mode: outcome is fully determined by the latent state.
    if (!relevant) {
      record.raw_answer = Answer::idk();
      record.alignment_score = 0.0;
    } else {
      record.raw_answer = truthful ? gold_answer() : distractor_answer();
      record.alignment_score = 1.0;
    }
    record.filtered_answer = record.raw_answer;
    return record;
  }

  const NoiseModel& noise = *spec.noise;
  const DocType doc = !relevant ? DocType::Irrelevant
                     : truthful ? DocType::Factual
                                : DocType::Misinfo;
  const AnswerType type =
      draw_answer_type(noise, doc, cell_u01(spec, source_id, query_index, kChAnswerType));

  switch (type) {
    case AnswerType::Correct:
      record.raw_answer = gold_answer();
      break;
    case AnswerType::Incorrect:
      record.raw_answer = distractor_answer();
      break;
    case AnswerType::Idk:
      record.raw_answer = Answer::idk();
      break;
    case AnswerType::Hallucination: {
      // Globally unique canonical id: hallucinations never merge with any
      // real cluster, nor with each other.
      std::string canonical = "q" + std::to_string(query_index) + ":hallu-s" +
                              std::to_string(source_id);
      record.raw_answer = Answer::text(canonical, canonical);
      break;
    }
  }

  if (record.raw_answer.is_idk()) {
    record.alignment_score = 0.0;
  } else {
    const bool survives =
        cell_u01(spec, source_id, query_index, kChSurvive) < noise.survival(doc, type);
    const double u = cell_u01(spec, source_id, query_index, kChScore);
    record.alignment_score =
        survives ? noise.tau + u * (1.0 - noise.tau) : u * noise.tau;
  }
  record.filtered_answer =
      filter_response(record.raw_answer, record.alignment_score, noise.tau);
  return record;
}

GeneratedMatrix build_matrix(const WorldSpec& spec) {
  GeneratedMatrix out;
  out.world = build_world(spec);

  out.raw.n_sources = spec.n_sources;
  out.filtered.n_sources = spec.n_sources;
  out.raw.query_ids.reserve(spec.n_queries);
  out.gold.reserve(spec.n_queries);
  for (int j = 0; j < spec.n_queries; ++j) {
    std::vector<Answer> raw_row, filtered_row;
    raw_row.reserve(spec.n_sources);
    filtered_row.reserve(spec.n_sources);
    for (int i = 0; i < spec.n_sources; ++i) {
      ResponseRecord record = generate_response(out.world, i, j);
      raw_row.push_back(std::move(record.raw_answer));
      filtered_row.push_back(std::move(record.filtered_answer));
    }
    out.raw.query_ids.push_back(out.world.query_id(j));
    out.raw.cells.push_back(std::move(raw_row));
    out.filtered.cells.push_back(std::move(filtered_row));
    out.gold.push_back(out.world.gold_canonical(j));
  }
  out.filtered.query_ids = out.raw.query_ids;
  return out;
}

ProbeResult SimulationProvider::probe(const QueryRef& query, int source_id) {
  ResponseRecord record = generate_response(world_, source_id, query_index(query));
  return {std::move(record.raw_answer), record.alignment_score};
}

int SimulationProvider::query_index(const QueryRef& query) const {
  if (query.index >= 0) return query.index;
  // Accept the canonical "q<index>" ids the simulator emits.
  if (query.id.size() > 1 && query.id[0] == 'q') {
    try {
      std::size_t pos = 0;
      int j = std::stoi(query.id.substr(1), &pos);
      if (pos + 1 == query.id.size()) return j;
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::RejectRange,
              "simulation provider cannot resolve query id '" + query.id + "'");
}

namespace {

std::mutex g_preset_dir_mutex;
std::string g_preset_dir;  // empty -> resolve lazily

std::string resolve_preset_dir() {
  std::lock_guard<std::mutex> lock(g_preset_dir_mutex);
  if (!g_preset_dir.empty()) return g_preset_dir;
  if (const char* env = std::getenv("RELIAG_NOISE_DIR"); env && *env)
    return g_preset_dir = env;
  return g_preset_dir = RELIAG_DATA_DIR;
}

std::string normalize_preset_name(std::string name) {
  for (char& c : name) {
    if (c == '-') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (name.find("_tau") == std::string::npos) name += "_tau01";
  return name;
}

}  // namespace

std::string noise_preset_dir() { return resolve_preset_dir(); }

void set_noise_preset_dir(const std::string& dir) {
  std::lock_guard<std::mutex> lock(g_preset_dir_mutex);
  g_preset_dir = dir;
}

NoiseModel load_noise_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open noise model " + path);

  NoiseModel model;
  model.name = std::filesystem::path(path).stem().string();

  std::array<std::array<double, kNumAnswerTypes>, kNumDocTypes> raw{};
  std::array<std::array<double, kNumAnswerTypes>, kNumDocTypes> filtered{};
  std::array<std::array<bool, kNumAnswerTypes>, kNumDocTypes> seen{};

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "tau") {
      if (!(fields >> model.tau))
        throw Error(ErrorCode::ConfigParse, path + ": bad tau directive");
      continue;
    }
    std::string answer_name;
    double raw_pct = 0.0, filtered_pct = 0.0;
    if (!(fields >> answer_name >> raw_pct >> filtered_pct))
      throw Error(ErrorCode::ConfigParse,
                  path + ":" + std::to_string(line_no) + ": expected 4 fields");
    auto doc = doc_type_from_name(first);
    auto ans = answer_type_from_name(answer_name);
    if (!doc || !ans)
      throw Error(ErrorCode::ConfigParse,
                  path + ":" + std::to_string(line_no) + ": unknown type name");
    raw[static_cast<int>(*doc)][static_cast<int>(*ans)] = raw_pct;
    filtered[static_cast<int>(*doc)][static_cast<int>(*ans)] = filtered_pct;
    seen[static_cast<int>(*doc)][static_cast<int>(*ans)] = true;
  }

  for (int d = 0; d < kNumDocTypes; ++d)
    for (int a = 0; a < kNumAnswerTypes; ++a)
      if (!seen[d][a])
        throw Error(ErrorCode::ConfigParse,
                    path + ": missing row for " +
                        doc_type_name(static_cast<DocType>(d)) + "/" +
                        answer_type_name(static_cast<AnswerType>(a)));

  // Published columns are percentages whose sums drift slightly from 100;
  // normalize each column into a proper distribution.
  for (int d = 0; d < kNumDocTypes; ++d) {
    double raw_sum = 0.0, filtered_sum = 0.0;
    for (int a = 0; a < kNumAnswerTypes; ++a) {
      raw_sum += raw[d][a];
      filtered_sum += filtered[d][a];
    }
    if (raw_sum <= 0.0 || filtered_sum <= 0.0)
      throw Error(ErrorCode::ConfigParse, path + ": empty distribution");
    for (int a = 0; a < kNumAnswerTypes; ++a) {
      model.raw[d][a] = raw[d][a] / raw_sum;
      model.filtered[d][a] = filtered[d][a] / filtered_sum;
    }
  }
  model.validate();
  return model;
}

NoiseModel load_noise_preset(const std::string& name) {
  if (name.find('/') != std::string::npos ||
      name.find(".tsv") != std::string::npos)
    return load_noise_file(name);
  std::string file = normalize_preset_name(name) + ".tsv";
  std::filesystem::path path = std::filesystem::path(resolve_preset_dir()) / file;
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::ConfigParse,
                "unknown noise preset '" + name + "' (looked for " + path.string() + ")");
  NoiseModel model = load_noise_file(path.string());
  model.name = normalize_preset_name(name);
  return model;
}

std::vector<std::string> list_noise_presets() {
  std::vector<std::string> names;
  std::filesystem::path dir = resolve_preset_dir();
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".tsv")
      names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace reliag
