#include "reliag/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "json.hpp"
#include "reliag/serialization.hpp"

namespace reliag {

const char* const kToolVersion = "reliag 0.1.0";

namespace {

using nlohmann::json;

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

std::vector<double> round6_all(std::vector<double> xs) {
  for (double& x : xs) x = round6(x);
  return xs;
}

// Index-pulling worker pool; results land by index, failures abort the run.
void parallel_for(int count, int max_threads, const std::function<void(int)>& fn) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  int workers = max_threads > 0 ? max_threads : hw;
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
}

bool uses_method(const ExperimentConfig& config, Method m) {
  return std::find(config.methods.begin(), config.methods.end(), m) !=
         config.methods.end();
}

bool is_probing(Method m) {
  return m == Method::RaRag || m == Method::KappaRss || m == Method::RaRagNoFilter;
}

struct TrialResult {
  std::vector<double> accuracy;             // per method
  std::vector<double> mean_probes;          // per method
  std::vector<std::vector<int>> probe_counts;  // per method (probing only)
  TrialDiagnostics diag;
};

ResponseMatrix slice_filtered(const SourceWorld& world, int from, int to, bool raw) {
  ResponseMatrix m;
  m.n_sources = world.spec.n_sources;
  for (int j = from; j < to; ++j) {
    std::vector<Answer> row;
    row.reserve(static_cast<std::size_t>(m.n_sources));
    for (int i = 0; i < m.n_sources; ++i) {
      ResponseRecord rec = generate_response(world, i, j);
      row.push_back(raw ? std::move(rec.raw_answer) : std::move(rec.filtered_answer));
    }
    m.query_ids.push_back(world.query_id(j));
    m.cells.push_back(std::move(row));
  }
  return m;
}

TrialResult run_trial(const ExperimentConfig& config,
                      const std::optional<NoiseModel>& noise, int n_sources,
                      int n_adversaries, std::uint64_t trial_seed) {
  WorldSpec spec;
  spec.n_queries = config.m_est + config.m_test;
  spec.n_sources = n_sources;
  spec.prior = config.prior;
  if (spec.prior.kind == PriorKind::AdversaryHammer) {
    spec.prior.n_adversaries = n_adversaries;
    spec.prior.n_total = n_sources;
  }
  spec.noise = noise;
  spec.n_paraphrases = config.n_paraphrases;
  spec.n_distractors = config.n_distractors;
  spec.seed = trial_seed;

  const SourceWorld world = build_world(spec);
  SimulationProvider provider(world);
  const EquivalenceOracle& oracle = canonical_oracle();

  EstimationSettings est = config.estimation;

  TrialResult result;
  result.diag.true_p.reserve(world.profiles.size());
  for (const auto& profile : world.profiles) result.diag.true_p.push_back(profile.p);

  // Reliability estimation on the first m_est rows.
  WeightVector weights;
  {
    ResponseMatrix est_matrix = slice_filtered(world, 0, config.m_est, false);
    auto [w, trace] = estimate_reliability(est_matrix, est, oracle);
    weights = std::move(w);
    result.diag.estimated_w = weights.w_hat;
    result.diag.estimated_v = weights.v;
    result.diag.converged = trace.converged;
    result.diag.iterations = trace.iterations_run;
    try {
      Correlation corr = correlation(weights.w_hat, result.diag.true_p);
      result.diag.pcc = corr.pcc;
      result.diag.srcc = corr.srcc;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateVariance &&
          e.code() != ErrorCode::LengthMismatch)
        throw;
    }
  }

  WeightVector weights_nofilter;
  if (uses_method(config, Method::RaRagNoFilter)) {
    ResponseMatrix raw_matrix = slice_filtered(world, 0, config.m_est, true);
    auto [w, trace] = estimate_reliability(raw_matrix, est, oracle);
    weights_nofilter = std::move(w);
    result.diag.estimated_w_nofilter = weights_nofilter.w_hat;
    result.diag.estimated_v_nofilter = weights_nofilter.v;
  }

  // Perfect-knowledge baseline: the same rescaling the estimated pipeline
  // uses, fed with the true reliabilities.
  std::vector<double> oracle_v;
  oracle_v.reserve(world.profiles.size());
  const double oracle_scale = est.effective_scale(n_sources);
  for (const auto& profile : world.profiles)
    oracle_v.push_back(oracle_scale * profile.p - 1.0);

  const bool need_full_rows =
      uses_method(config, Method::Mv) || uses_method(config, Method::OracleWmv);
  const int m_total = spec.n_queries;
  const std::size_t n_methods = config.methods.size();

  std::vector<std::vector<Answer>> predictions(n_methods);
  std::vector<std::vector<int>> probe_counts(n_methods);
  std::vector<long long> probe_totals(n_methods, 0);
  std::vector<std::string> gold;
  gold.reserve(static_cast<std::size_t>(config.m_test));

  std::vector<SourcedAnswer> full_row;
  for (int j = config.m_est; j < m_total; ++j) {
    gold.push_back(world.gold_canonical(j));
    QueryRef query{j, world.query_id(j), ""};

    if (need_full_rows) {
      full_row.clear();
      for (int i = 0; i < n_sources; ++i)
        full_row.push_back({i, generate_response(world, i, j).filtered_answer});
    }

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const Method method = config.methods[mi];
      Answer answer;
      int probes = n_sources;  // full-consultation methods touch every source
      switch (method) {
        case Method::Mv:
          answer = majority_vote(cluster(full_row, oracle), n_sources);
          break;
        case Method::OracleWmv:
          answer = weighted_majority_vote(cluster(full_row, oracle), oracle_v);
          break;
        case Method::RaRag: {
          auto sel = kappa_rrss(query, weights.v, config.kappa, provider, config.tau);
          answer = aggregate_kappa(sel.responses, weights.v, oracle);
          probes = sel.log.probes_made;
          break;
        }
        case Method::KappaRss: {
          auto sel = kappa_rss(query, weights.v, config.kappa, provider, config.tau);
          answer = aggregate_kappa(sel.responses, weights.v, oracle);
          probes = sel.log.probes_made;
          break;
        }
        case Method::RaRagNoFilter: {
          // Filtering is bypassed in the estimation phase only: the variant
          // demonstrates how unfiltered responses distort the weights, so
          // inference runs the standard filtered pipeline under them.
          auto sel = kappa_rrss(query, weights_nofilter.v, config.kappa, provider,
                                config.tau);
          answer = aggregate_kappa(sel.responses, weights_nofilter.v, oracle);
          probes = sel.log.probes_made;
          break;
        }
      }
      predictions[mi].push_back(std::move(answer));
      probe_totals[mi] += probes;
      if (config.log_probe_counts && is_probing(method))
        probe_counts[mi].push_back(probes);
    }
  }

  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    result.accuracy.push_back(accuracy_canonical(predictions[mi], gold));
    result.mean_probes.push_back(static_cast<double>(probe_totals[mi]) /
                                 static_cast<double>(config.m_test));
  }
  result.probe_counts = std::move(probe_counts);
  return result;
}

std::uint64_t trial_seed(const ExperimentConfig& config, int n_sources,
                         int n_adversaries, int trial) {
  std::uint64_t s = mix64(config.seed, static_cast<std::uint64_t>(n_sources));
  s = mix64(s, static_cast<std::uint64_t>(n_adversaries + 1));
  return mix64(s, static_cast<std::uint64_t>(trial));
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& raw_config) {
  ExperimentConfig config = validate(raw_config);
  const std::optional<NoiseModel> noise = resolve_noise(config);

  RunReport report;
  report.tool_version = kToolVersion;
  report.seed = config.seed;
  report.config = config;

  std::vector<std::pair<int, int>> points;  // (n_sources, n_adversaries)
  for (int n : config.n_sources) {
    if (config.prior.kind == PriorKind::AdversaryHammer) {
      for (int a : config.n_adversaries) points.emplace_back(n, a);
    } else {
      points.emplace_back(n, -1);
    }
  }

  for (const auto& [n, adv] : points) {
    std::vector<TrialResult> trials(static_cast<std::size_t>(config.n_trials));
    parallel_for(config.n_trials, config.max_threads, [&](int t) {
      trials[t] = run_trial(config, noise, n, adv, trial_seed(config, n, adv, t));
    });

    SettingReport setting;
    setting.n_sources = n;
    setting.n_adversaries = adv;

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      MethodStats stats;
      stats.method = config.methods[mi];
      for (const auto& trial : trials) {
        stats.trial_accuracy.push_back(round6(trial.accuracy[mi]));
        stats.trial_calls.push_back(round6(trial.mean_probes[mi]));
        if (!trial.probe_counts[mi].empty())
          stats.probe_counts.push_back(trial.probe_counts[mi]);
      }
      stats.accuracy_mean = round6(mean_of(stats.trial_accuracy));
      stats.accuracy_std = round6(sample_std(stats.trial_accuracy));
      stats.calls_per_query = round6(mean_of(stats.trial_calls));
      CostReport cost = cost_from_calls(stats.calls_per_query, config.cost);
      stats.tokens_per_query = round6(cost.tokens_per_query);
      stats.dollars_per_query = round6(cost.dollars_per_query);
      setting.methods.push_back(std::move(stats));
    }

    for (auto& trial : trials) {
      TrialDiagnostics diag = std::move(trial.diag);
      diag.true_p = round6_all(std::move(diag.true_p));
      diag.estimated_w = round6_all(std::move(diag.estimated_w));
      diag.estimated_v = round6_all(std::move(diag.estimated_v));
      diag.estimated_w_nofilter = round6_all(std::move(diag.estimated_w_nofilter));
      diag.estimated_v_nofilter = round6_all(std::move(diag.estimated_v_nofilter));
      if (diag.pcc) diag.pcc = round6(*diag.pcc);
      if (diag.srcc) diag.srcc = round6(*diag.srcc);
      setting.trials.push_back(std::move(diag));
    }
    report.settings.push_back(std::move(setting));
  }
  return report;
}

namespace {

json prior_to_json(const PriorSpec& prior) {
  json j;
  switch (prior.kind) {
    case PriorKind::Beta:
      j["kind"] = "beta";
      j["w_bar"] = prior.w_bar;
      j["coverage_r"] = prior.coverage_r;
      break;
    case PriorKind::AdversaryHammer:
      j["kind"] = "adversary_hammer";
      j["coverage_r"] = prior.coverage_r;
      break;
    case PriorKind::Explicit: {
      j["kind"] = "explicit";
      json rows = json::array();
      for (const auto& profile : prior.profiles)
        rows.push_back(json::array({profile.p, profile.r}));
      j["profiles"] = rows;
      break;
    }
  }
  return j;
}

PriorSpec prior_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "beta")
    return PriorSpec::beta(j.at("w_bar").get<double>(), j.at("coverage_r").get<double>());
  if (kind == "adversary_hammer") {
    PriorSpec spec;
    spec.kind = PriorKind::AdversaryHammer;
    spec.coverage_r = j.at("coverage_r").get<double>();
    return spec;
  }
  if (kind == "explicit") {
    std::vector<SourceProfile> profiles;
    int id = 0;
    for (const auto& row : j.at("profiles"))
      profiles.push_back({id++, row.at(0).get<double>(), row.at(1).get<double>()});
    return PriorSpec::explicit_profiles(std::move(profiles));
  }
  throw Error(ErrorCode::ConfigParse, "unknown prior kind '" + kind + "'");
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["seed"] = config.seed;
  j["n_trials"] = config.n_trials;
  j["m_est"] = config.m_est;
  j["m_test"] = config.m_test;
  json methods = json::array();
  for (Method m : config.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["kappa"] = config.kappa;
  j["tau"] = config.tau;
  j["eta_max"] = config.estimation.eta_max;
  j["eps_conv"] = config.estimation.eps_conv;
  j["scale"] = config.estimation.scale;
  j["n_sources"] = config.n_sources;
  j["prior"] = prior_to_json(config.prior);
  j["n_adversaries"] = config.n_adversaries;
  j["noise"] = config.noise;
  j["n_paraphrases"] = config.n_paraphrases;
  j["n_distractors"] = config.n_distractors;
  j["tokens_per_call"] = config.cost.tokens_per_call;
  j["price_per_token"] = config.cost.price_per_token;
  j["log_probe_counts"] = config.log_probe_counts;
  // max_threads is an execution knob, not an experiment parameter; echoing it
  // would make report bytes depend on the machine.
  j["out_dir"] = config.out_dir;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  config.seed = j.at("seed").get<std::uint64_t>();
  config.n_trials = j.at("n_trials").get<int>();
  config.m_est = j.at("m_est").get<int>();
  config.m_test = j.at("m_test").get<int>();
  config.methods.clear();
  for (const auto& name : j.at("methods")) {
    auto m = method_from_name(name.get<std::string>());
    if (!m) throw Error(ErrorCode::ConfigParse, "unknown method in report");
    config.methods.push_back(*m);
  }
  config.kappa = j.at("kappa").get<int>();
  config.tau = j.at("tau").get<double>();
  config.estimation.eta_max = j.at("eta_max").get<int>();
  config.estimation.eps_conv = j.at("eps_conv").get<double>();
  config.estimation.scale = j.at("scale").get<double>();
  config.n_sources = j.at("n_sources").get<std::vector<int>>();
  config.prior = prior_from_json(j.at("prior"));
  config.n_adversaries = j.at("n_adversaries").get<std::vector<int>>();
  config.noise = j.at("noise").get<std::string>();
  config.n_paraphrases = j.at("n_paraphrases").get<int>();
  config.n_distractors = j.at("n_distractors").get<int>();
  config.cost.tokens_per_call = j.at("tokens_per_call").get<double>();
  config.cost.price_per_token = j.at("price_per_token").get<double>();
  config.log_probe_counts = j.at("log_probe_counts").get<bool>();
  config.out_dir = j.at("out_dir").get<std::string>();
  return config;
}

json optional_to_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string report_to_json(const RunReport& report) {
  json j;
  j["tool_version"] = report.tool_version;
  j["seed"] = report.seed;
  j["config"] = config_to_json(report.config);
  json settings = json::array();
  for (const auto& setting : report.settings) {
    json s;
    s["n_sources"] = setting.n_sources;
    s["n_adversaries"] = setting.n_adversaries;
    json methods = json::array();
    for (const auto& stats : setting.methods) {
      json m;
      m["method"] = method_name(stats.method);
      m["trial_accuracy"] = stats.trial_accuracy;
      m["trial_calls"] = stats.trial_calls;
      m["accuracy_mean"] = stats.accuracy_mean;
      m["accuracy_std"] = stats.accuracy_std;
      m["calls_per_query"] = stats.calls_per_query;
      m["tokens_per_query"] = stats.tokens_per_query;
      m["dollars_per_query"] = stats.dollars_per_query;
      m["probe_counts"] = stats.probe_counts;
      methods.push_back(std::move(m));
    }
    s["methods"] = std::move(methods);
    json trials = json::array();
    for (const auto& diag : setting.trials) {
      json t;
      t["true_p"] = diag.true_p;
      t["estimated_w"] = diag.estimated_w;
      t["estimated_v"] = diag.estimated_v;
      t["estimated_w_nofilter"] = diag.estimated_w_nofilter;
      t["estimated_v_nofilter"] = diag.estimated_v_nofilter;
      t["pcc"] = optional_to_json(diag.pcc);
      t["srcc"] = optional_to_json(diag.srcc);
      t["converged"] = diag.converged;
      t["iterations"] = diag.iterations;
      trials.push_back(std::move(t));
    }
    s["trials"] = std::move(trials);
    settings.push_back(std::move(s));
  }
  j["settings"] = std::move(settings);
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, std::string("bad report JSON: ") + e.what());
  }
  RunReport report;
  report.tool_version = j.at("tool_version").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.config = config_from_json(j.at("config"));
  for (const auto& s : j.at("settings")) {
    SettingReport setting;
    setting.n_sources = s.at("n_sources").get<int>();
    setting.n_adversaries = s.at("n_adversaries").get<int>();
    for (const auto& m : s.at("methods")) {
      MethodStats stats;
      auto method = method_from_name(m.at("method").get<std::string>());
      if (!method) throw Error(ErrorCode::ConfigParse, "unknown method in report");
      stats.method = *method;
      stats.trial_accuracy = m.at("trial_accuracy").get<std::vector<double>>();
      stats.trial_calls = m.at("trial_calls").get<std::vector<double>>();
      stats.accuracy_mean = m.at("accuracy_mean").get<double>();
      stats.accuracy_std = m.at("accuracy_std").get<double>();
      stats.calls_per_query = m.at("calls_per_query").get<double>();
      stats.tokens_per_query = m.at("tokens_per_query").get<double>();
      stats.dollars_per_query = m.at("dollars_per_query").get<double>();
      stats.probe_counts = m.at("probe_counts").get<std::vector<std::vector<int>>>();
      setting.methods.push_back(std::move(stats));
    }
    for (const auto& t : s.at("trials")) {
      TrialDiagnostics diag;
      diag.true_p = t.at("true_p").get<std::vector<double>>();
      diag.estimated_w = t.at("estimated_w").get<std::vector<double>>();
      diag.estimated_v = t.at("estimated_v").get<std::vector<double>>();
      diag.estimated_w_nofilter = t.at("estimated_w_nofilter").get<std::vector<double>>();
      diag.estimated_v_nofilter = t.at("estimated_v_nofilter").get<std::vector<double>>();
      diag.pcc = optional_from_json(t.at("pcc"));
      diag.srcc = optional_from_json(t.at("srcc"));
      diag.converged = t.at("converged").get<bool>();
      diag.iterations = t.at("iterations").get<int>();
      setting.trials.push_back(std::move(diag));
    }
    report.settings.push_back(std::move(setting));
  }
  return report;
}

std::string report_to_sweep_csv(const RunReport& report) {
  std::string out =
      "method,n_sources,n_adversaries,trial,accuracy,calls_per_query,"
      "tokens_per_query,dollars_per_query\n";
  const CostModel& cost = report.config.cost;
  for (const auto& setting : report.settings) {
    for (const auto& stats : setting.methods) {
      for (std::size_t t = 0; t < stats.trial_accuracy.size(); ++t) {
        out += method_name(stats.method);
        out += ',';
        out += std::to_string(setting.n_sources);
        out += ',';
        if (setting.n_adversaries >= 0) out += std::to_string(setting.n_adversaries);
        out += ',';
        out += std::to_string(t);
        out += ',';
        out += format_double6(stats.trial_accuracy[t]);
        out += ',';
        const double calls = stats.trial_calls[t];
        CostReport c = cost_from_calls(calls, cost);
        out += format_double6(calls);
        out += ',';
        out += format_double6(c.tokens_per_query);
        out += ',';
        out += format_double6(c.dollars_per_query);
        out += '\n';
      }
    }
  }
  return out;
}

std::string report_to_markdown(const RunReport& report) {
  std::string out;
  out += "# ";
  out += report.tool_version;
  out += " run report (seed ";
  out += std::to_string(report.seed);
  out += ")\n";
  for (const auto& setting : report.settings) {
    out += "\n## n_sources = " + std::to_string(setting.n_sources);
    if (setting.n_adversaries >= 0)
      out += ", n_adversaries = " + std::to_string(setting.n_adversaries);
    out += "\n\n| method | accuracy (mean±std) | calls/query | tokens/query | $/query |\n";
    out += "|---|---|---|---|---|\n";
    for (const auto& stats : setting.methods) {
      out += "| ";
      out += method_name(stats.method);
      out += " | ";
      out += format_double6(stats.accuracy_mean);
      out += " ± ";
      out += format_double6(stats.accuracy_std);
      out += " | ";
      out += format_double6(stats.calls_per_query);
      out += " | ";
      out += format_double6(stats.tokens_per_query);
      out += " | ";
      out += format_double6(stats.dollars_per_query);
      out += " |\n";
    }
  }
  return out;
}

}  // namespace reliag
