#include "reliag/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "reliag/serialization.hpp"
#include "reliag/simulation.hpp"

namespace reliag {

const char* method_name(Method m) {
  switch (m) {
    case Method::RaRag: return "ra_rag";
    case Method::Mv: return "mv";
    case Method::OracleWmv: return "oracle_wmv";
    case Method::KappaRss: return "kappa_rss";
    case Method::RaRagNoFilter: return "ra_rag_no_filter";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "ra_rag") return Method::RaRag;
  if (name == "mv") return Method::Mv;
  if (name == "oracle_wmv") return Method::OracleWmv;
  if (name == "kappa_rss") return Method::KappaRss;
  if (name == "ra_rag_no_filter") return Method::RaRagNoFilter;
  return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "4,5,6" or "1..7" (inclusive range).
std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) {
    auto dots = item.find("..");
    if (dots != std::string::npos) {
      int lo = static_cast<int>(parse_double(trim(item.substr(0, dots))));
      int hi = static_cast<int>(parse_double(trim(item.substr(dots + 2))));
      if (hi < lo)
        throw Error(ErrorCode::ConfigParse, key + ": empty range " + item);
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(static_cast<int>(parse_double(item)));
    }
  }
  if (out.empty()) throw Error(ErrorCode::ConfigParse, key + ": empty list");
  return out;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigParse, key + ": bad unsigned integer '" + value + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  PriorKind prior_kind = PriorKind::Beta;
  double w_bar = 0.6, coverage_r = 0.6;
  std::vector<SourceProfile> profiles;
  bool prior_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigParse,
                  "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "seed") config.seed = parse_u64(value, key);
    else if (key == "n_trials") config.n_trials = static_cast<int>(parse_double(value));
    else if (key == "m_est") config.m_est = static_cast<int>(parse_double(value));
    else if (key == "m_test") config.m_test = static_cast<int>(parse_double(value));
    else if (key == "kappa") config.kappa = static_cast<int>(parse_double(value));
    else if (key == "tau") config.tau = parse_double(value);
    else if (key == "scale") config.estimation.scale = parse_double(value);
    else if (key == "eta_max") config.estimation.eta_max = static_cast<int>(parse_double(value));
    else if (key == "eps_conv") config.estimation.eps_conv = parse_double(value);
    else if (key == "n_sources") config.n_sources = parse_int_list(value, key);
    else if (key == "n_adversaries") config.n_adversaries = parse_int_list(value, key);
    else if (key == "w_bar") w_bar = parse_double(value);
    else if (key == "coverage_r") coverage_r = parse_double(value);
    else if (key == "noise") config.noise = value;
    else if (key == "n_paraphrases") config.n_paraphrases = static_cast<int>(parse_double(value));
    else if (key == "n_distractors") config.n_distractors = static_cast<int>(parse_double(value));
    else if (key == "tokens_per_call") config.cost.tokens_per_call = parse_double(value);
    else if (key == "price_per_token") config.cost.price_per_token = parse_double(value);
    else if (key == "max_threads") config.max_threads = static_cast<int>(parse_double(value));
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "probe_log") {
      if (value == "counts") config.log_probe_counts = true;
      else if (value == "none") config.log_probe_counts = false;
      else throw Error(ErrorCode::ConfigParse, "probe_log must be counts or none");
    } else if (key == "methods") {
      config.methods.clear();
      for (const auto& name : split_list(value)) {
        auto m = method_from_name(name);
        if (!m) throw Error(ErrorCode::ConfigParse, "unknown method '" + name + "'");
        config.methods.push_back(*m);
      }
    } else if (key == "prior") {
      prior_seen = true;
      if (value == "beta") prior_kind = PriorKind::Beta;
      else if (value == "adversary_hammer") prior_kind = PriorKind::AdversaryHammer;
      else if (value == "explicit") prior_kind = PriorKind::Explicit;
      else throw Error(ErrorCode::ConfigParse, "unknown prior '" + value + "'");
    } else if (key == "profiles") {
      profiles.clear();
      int id = 0;
      for (const auto& item : split_list(value)) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
          throw Error(ErrorCode::ConfigParse, "profiles entries are p:r pairs");
        SourceProfile profile;
        profile.source_id = id++;
        profile.p = parse_double(trim(item.substr(0, colon)));
        profile.r = parse_double(trim(item.substr(colon + 1)));
        profiles.push_back(profile);
      }
    } else {
      throw Error(ErrorCode::ConfigParse, "unknown key '" + key + "'");
    }
  }

  if (prior_seen || !profiles.empty()) {
    switch (prior_kind) {
      case PriorKind::Beta:
        config.prior = PriorSpec::beta(w_bar, coverage_r);
        break;
      case PriorKind::AdversaryHammer: {
        PriorSpec spec;
        spec.kind = PriorKind::AdversaryHammer;
        spec.coverage_r = coverage_r;
        // counts are filled per sweep point
        config.prior = spec;
        break;
      }
      case PriorKind::Explicit:
        config.prior = PriorSpec::explicit_profiles(profiles);
        break;
    }
  } else {
    config.prior = PriorSpec::beta(w_bar, coverage_r);
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

ExperimentConfig validate(ExperimentConfig config) {
  if (config.methods.empty())
    throw Error(ErrorCode::RejectRange, "methods must be nonempty");
  if (config.n_trials < 1)
    throw Error(ErrorCode::RejectRange, "n_trials must be positive");
  if (config.kappa < 1)
    throw Error(ErrorCode::RejectRange, "kappa must be >= 1");
  if (!(config.tau >= 0.0 && config.tau <= 1.0))
    throw Error(ErrorCode::RejectRange, "tau must lie in [0,1]");
  if (config.m_est < 1 || config.m_test < 1)
    throw Error(ErrorCode::RejectRange, "m_est and m_test must be positive");
  if (config.n_paraphrases < 1 || config.n_distractors < 1)
    throw Error(ErrorCode::RejectRange, "paraphrase/distractor counts must be >= 1");
  config.cost.validate();

  std::sort(config.n_sources.begin(), config.n_sources.end());
  for (int n : config.n_sources) {
    if (n < 2) throw Error(ErrorCode::RejectRange, "n_sources must be >= 2");
    config.estimation.validate(n);
  }

  if (config.prior.kind == PriorKind::AdversaryHammer) {
    if (config.n_adversaries.empty())
      config.n_adversaries = {config.prior.n_adversaries};
    for (int a : config.n_adversaries) {
      for (int n : config.n_sources)
        if (a < 0 || a > n)
          throw Error(ErrorCode::RejectRange,
                      "n_adversaries must lie in [0, n_sources]");
    }
  } else {
    config.prior.validate();
    if (!config.n_adversaries.empty())
      throw Error(ErrorCode::RejectRange,
                  "n_adversaries only applies to the adversary_hammer prior");
    if (config.prior.kind == PriorKind::Explicit) {
      if (config.n_sources.size() != 1 ||
          config.n_sources[0] != static_cast<int>(config.prior.profiles.size()))
        throw Error(ErrorCode::RejectRange,
                    "explicit prior requires n_sources == number of profiles");
    }
  }

  resolve_noise(config);  // throws on unknown preset
  return config;
}

std::optional<NoiseModel> resolve_noise(const ExperimentConfig& config) {
  if (config.noise.empty() || config.noise == "exact") return std::nullopt;
  NoiseModel model = load_noise_preset(config.noise);
  model.n_distractors = config.n_distractors;
  if (model.tau != config.tau)
    throw Error(ErrorCode::RejectRange,
                "noise preset '" + model.name + "' was measured at tau=" +
                    format_double(model.tau) + " but config tau=" +
                    format_double(config.tau));
  return model;
}

}  // namespace reliag
