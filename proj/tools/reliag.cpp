// reliag: multi-source aggregation experiments from the command line.
//
// Subcommands:
//   gen       materialize a simulated world to CSV (raw + filtered matrices,
//             gold answers, source profiles)
//   estimate  response matrix CSV -> per-source weights CSV/JSON
//   infer     answer one query through a provider with kappa-selection
//   sweep     run a full experiment and write the report
//   report    re-render a report JSON as sweep CSV or markdown tables
//   serve     expose a simulated world over the provider protocol
//
// Exit codes: 0 success, 2 config error, 3 provider failure, 4 internal.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "reliag/provider_protocol.hpp"
#include "reliag/runner.hpp"
#include "reliag/serialization.hpp"

using namespace reliag;

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "json";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_format = true) {
  cmd->add_option("--config", args.config_path, "experiment config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  if (with_format)
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

ExperimentConfig load_effective_config(const CommonArgs& args) {
  ExperimentConfig config =
      args.config_path.empty() ? ExperimentConfig{} : load_config(args.config_path);
  if (args.seed_set) config.seed = args.seed;
  return validate(config);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir);
}

WorldSpec world_from_config(const ExperimentConfig& config) {
  WorldSpec spec;
  spec.n_queries = config.m_est + config.m_test;
  spec.n_sources = config.n_sources.front();
  spec.prior = config.prior;
  if (spec.prior.kind == PriorKind::AdversaryHammer) {
    spec.prior.n_adversaries =
        config.n_adversaries.empty() ? 0 : config.n_adversaries.front();
    spec.prior.n_total = spec.n_sources;
  }
  spec.noise = resolve_noise(config);
  spec.n_paraphrases = config.n_paraphrases;
  spec.n_distractors = config.n_distractors;
  spec.seed = config.seed;
  return spec;
}

int cmd_gen(const CommonArgs& args) {
  ExperimentConfig config = load_effective_config(args);
  WorldSpec spec = world_from_config(config);
  auto gen = build_matrix(spec);

  MatrixCsv raw{gen.raw, {}}, filtered{gen.filtered, {}};
  for (int j = 0; j < spec.n_queries; ++j) {
    std::vector<double> scores;
    for (int i = 0; i < spec.n_sources; ++i)
      scores.push_back(generate_response(gen.world, i, j).alignment_score);
    raw.scores.push_back(scores);
    filtered.scores.push_back(std::move(scores));
  }

  ensure_dir(args.out_dir);
  write_file(args.out_dir + "/matrix_raw.csv", matrix_to_csv(raw));
  write_file(args.out_dir + "/matrix_filtered.csv", matrix_to_csv(filtered));

  std::string gold = "query_id,gold_canonical_id\n";
  for (int j = 0; j < spec.n_queries; ++j)
    gold += csv_escape(gen.raw.query_ids[j]) + "," + csv_escape(gen.gold[j]) + "\n";
  write_file(args.out_dir + "/gold.csv", gold);

  std::string profiles = "source_id,p,r\n";
  for (const auto& profile : gen.world.profiles)
    profiles += std::to_string(profile.source_id) + "," + format_double(profile.p) +
                "," + format_double(profile.r) + "\n";
  write_file(args.out_dir + "/profiles.csv", profiles);

  std::cerr << "wrote matrices for " << spec.n_queries << " queries x "
            << spec.n_sources << " sources to " << args.out_dir << "\n";
  return 0;
}

int cmd_estimate(const CommonArgs& args, const std::string& matrix_path,
                 double tau, bool apply_filter) {
  ExperimentConfig config =
      args.config_path.empty() ? ExperimentConfig{} : load_config(args.config_path);
  MatrixCsv data = matrix_from_csv(read_file(matrix_path));

  ResponseMatrix matrix = data.matrix;
  if (apply_filter) {
    for (int j = 0; j < matrix.n_queries(); ++j)
      for (int i = 0; i < matrix.n_sources; ++i)
        matrix.cells[j][i] =
            filter_response(matrix.cells[j][i], data.scores[j][i], tau);
  }

  auto [weights, trace] =
      estimate_reliability(matrix, config.estimation, canonical_oracle());

  ensure_dir(args.out_dir);
  if (args.format == "csv") {
    write_file(args.out_dir + "/weights.csv", weights_to_csv(weights));
  } else {
    nlohmann::json j;
    j["w_hat"] = weights.w_hat;
    j["v"] = weights.v;
    j["scale"] = weights.scale;
    j["converged"] = trace.converged;
    j["iterations"] = trace.iterations_run;
    write_file(args.out_dir + "/weights.json", j.dump(2) + "\n");
  }
  std::cerr << "estimated " << weights.size() << " sources in "
            << trace.iterations_run << " iterations ("
            << (trace.converged ? "converged" : "iteration cap hit") << ")\n";
  return 0;
}

int cmd_infer(const CommonArgs& args, const std::string& endpoint,
              const std::string& weights_path, const std::string& query_id,
              const std::string& query_text, int kappa, double tau,
              int timeout_ms) {
  WeightVector weights = weights_from_csv(read_file(weights_path));
  auto provider = make_protocol_provider(endpoint, timeout_ms);

  QueryRef query{-1, query_id, query_text};
  auto result = kappa_rrss(query, weights.v, kappa, *provider, tau);
  Answer answer = aggregate_kappa(result.responses, weights.v, canonical_oracle());

  nlohmann::json j;
  if (answer.is_idk()) {
    j["answer"] = nullptr;
  } else {
    j["answer"] = answer.surface();
    j["canonical_id"] = answer.canonical_id();
  }
  j["probes_made"] = result.log.probes_made;
  nlohmann::json log = nlohmann::json::array();
  for (const auto& entry : result.log.entries) {
    nlohmann::json e;
    e["source_id"] = entry.source_id;
    e["relevant"] = entry.was_selected;
    e["answer"] = entry.filtered.is_idk() ? nlohmann::json(nullptr)
                                          : nlohmann::json(entry.filtered.surface());
    log.push_back(std::move(e));
  }
  j["probe_log"] = std::move(log);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  ExperimentConfig config = load_effective_config(args);
  const std::string out_dir =
      !config.out_dir.empty() && args.out_dir == "." ? config.out_dir : args.out_dir;
  RunReport report = run_experiment(config);
  ensure_dir(out_dir);
  write_file(out_dir + "/report.json", report_to_json(report));
  if (args.format == "csv")
    write_file(out_dir + "/sweep.csv", report_to_sweep_csv(report));
  std::cerr << "wrote report.json"
            << (args.format == "csv" ? " and sweep.csv" : "") << " to " << out_dir
            << "\n";
  return 0;
}

int cmd_report(const CommonArgs& args, const std::string& report_path,
               const std::string& render) {
  RunReport report = report_from_json(read_file(report_path));
  ensure_dir(args.out_dir);
  if (render == "csv") {
    write_file(args.out_dir + "/sweep.csv", report_to_sweep_csv(report));
    std::cerr << "wrote sweep.csv to " << args.out_dir << "\n";
  } else {
    write_file(args.out_dir + "/report.md", report_to_markdown(report));
    std::cerr << "wrote report.md to " << args.out_dir << "\n";
  }
  return 0;
}

int cmd_serve(const CommonArgs& args, bool stdio, int port) {
  ExperimentConfig config = load_effective_config(args);
  WorldSpec spec = world_from_config(config);
  SourceWorld world = build_world(spec);
  SimulationProvider provider(world);

  if (stdio) {
    serve_stdio(provider, std::cin, std::cout);
    return 0;
  }
  HttpProviderServer server(provider);
  const int bound = server.start(port);
  std::cerr << "serving " << spec.n_sources << " sources on http://127.0.0.1:"
            << bound << "/probe\n";
  server.wait();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-source answer aggregation with estimated source reliability"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* gen = app.add_subcommand("gen", "materialize a simulated world to CSV");
  add_common(gen, args, false);

  auto* estimate = app.add_subcommand("estimate", "matrix CSV -> source weights");
  std::string matrix_path;
  double est_tau = -1.0;
  add_common(estimate, args);
  estimate->add_option("--matrix", matrix_path, "response matrix CSV")->required();
  estimate->add_option("--tau", est_tau,
                       "apply misalignment filtering at this threshold first");

  auto* infer = app.add_subcommand("infer", "answer one query through a provider");
  std::string endpoint, weights_path, query_id, query_text;
  int kappa = 4, timeout_ms = 30000;
  double infer_tau = 0.1;
  add_common(infer, args, false);
  infer->add_option("--provider", endpoint, "http://host:port or cmd:<command>")
      ->required();
  infer->add_option("--weights", weights_path, "weights CSV")->required();
  infer->add_option("--query-id", query_id)->required();
  infer->add_option("--query-text", query_text);
  infer->add_option("--kappa", kappa);
  infer->add_option("--tau", infer_tau);
  infer->add_option("--timeout-ms", timeout_ms);

  auto* sweep = app.add_subcommand("sweep", "run the configured experiment");
  add_common(sweep, args);

  auto* report = app.add_subcommand("report", "re-render a report JSON");
  std::string report_path, render = "md";
  add_common(report, args, false);
  report->add_option("--in", report_path, "report.json")->required();
  report->add_option("--render", render)->check(CLI::IsMember({"csv", "md"}));

  auto* serve = app.add_subcommand("serve", "serve a simulated world as a provider");
  bool serve_stdio_flag = false;
  int serve_port = 0;
  add_common(serve, args, false);
  serve->add_flag("--stdio", serve_stdio_flag, "speak JSON lines on stdio");
  serve->add_option("--port", serve_port, "HTTP port (0 = any)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(args);
    if (estimate->parsed())
      return cmd_estimate(args, matrix_path, est_tau, est_tau >= 0.0);
    if (infer->parsed())
      return cmd_infer(args, endpoint, weights_path, query_id, query_text, kappa,
                       infer_tau, timeout_ms);
    if (sweep->parsed()) return cmd_sweep(args);
    if (report->parsed()) return cmd_report(args, report_path, render);
    if (serve->parsed()) return cmd_serve(args, serve_stdio_flag, serve_port);
  } catch (const ProviderFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::ConfigParse:
      case ErrorCode::RejectRange:
      case ErrorCode::IoError:
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      default:
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
