// Python bindings for the aggregation core. Thin wrappers: answers, clusters,
// voting, reliability estimation, the simulator, selection against a Python
// provider callable, metrics, and the experiment runner.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reliag/provider_protocol.hpp"
#include "reliag/runner.hpp"
#include "reliag/serialization.hpp"

namespace py = pybind11;
using namespace reliag;

namespace {

using PyCluster = std::vector<std::pair<int, Answer>>;

std::vector<SourcedAnswer> to_sourced(const PyCluster& pairs) {
  std::vector<SourcedAnswer> out;
  out.reserve(pairs.size());
  for (const auto& [sid, answer] : pairs) out.push_back({sid, answer});
  return out;
}

std::vector<PyCluster> from_cluster_set(const ClusterSet& set) {
  std::vector<PyCluster> out;
  out.reserve(set.clusters.size());
  for (const auto& members : set.clusters) {
    PyCluster cluster;
    for (const auto& member : members)
      cluster.emplace_back(member.source_id, member.answer);
    out.push_back(std::move(cluster));
  }
  return out;
}

ClusterSet to_cluster_set(const std::vector<PyCluster>& clusters) {
  ClusterSet set;
  for (const auto& cluster : clusters) set.clusters.push_back(to_sourced(cluster));
  return set;
}

ResponseMatrix to_matrix(const std::vector<std::vector<Answer>>& rows) {
  ResponseMatrix m;
  if (rows.empty()) throw Error(ErrorCode::RejectRange, "matrix needs rows");
  m.n_sources = static_cast<int>(rows.front().size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    m.query_ids.push_back("q" + std::to_string(j));
    m.cells.push_back(rows[j]);
  }
  m.validate();
  return m;
}

// Python callable (query_id, source_id) -> (answer_text | None, score).
class CallableProvider : public ResponseProvider {
 public:
  explicit CallableProvider(py::function fn) : fn_(std::move(fn)) {}

  ProbeResult probe(const QueryRef& query, int source_id) override {
    py::gil_scoped_acquire gil;
    py::object out = fn_(query.id, source_id);
    auto [text, score] =
        out.cast<std::pair<std::optional<std::string>, double>>();
    ProbeResult result;
    result.alignment_score = score;
    result.raw = text ? external_answer(*text) : Answer::idk();
    return result;
  }

 private:
  py::function fn_;
};

WorldSpec make_world_spec(int n_queries, int n_sources, const PriorSpec& prior,
                          const std::optional<std::string>& noise,
                          int n_paraphrases, int n_distractors,
                          std::uint64_t seed) {
  WorldSpec spec;
  spec.n_queries = n_queries;
  spec.n_sources = n_sources;
  spec.prior = prior;
  if (noise && *noise != "exact") spec.noise = load_noise_preset(*noise);
  spec.n_paraphrases = n_paraphrases;
  spec.n_distractors = n_distractors;
  spec.seed = seed;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multi-source answer aggregation with estimated source reliability";

  py::register_exception<Error>(m, "ReliagError");

  py::class_<Answer>(m, "Answer")
      .def_static("idk", &Answer::idk)
      .def_static("text",
                  py::overload_cast<std::string, std::string>(&Answer::text),
                  py::arg("canonical_id"), py::arg("surface"))
      .def_static("text", py::overload_cast<const std::string&>(&Answer::text),
                  py::arg("canonical_id"))
      .def_property_readonly("is_idk", &Answer::is_idk)
      .def_property_readonly("canonical_id",
                             [](const Answer& a) -> std::optional<std::string> {
                               if (a.is_idk()) return std::nullopt;
                               return a.canonical_id();
                             })
      .def_property_readonly("surface",
                             [](const Answer& a) -> std::optional<std::string> {
                               if (a.is_idk()) return std::nullopt;
                               return a.surface();
                             })
      .def("__eq__", [](const Answer& a, const Answer& b) { return a == b; })
      .def("__repr__", [](const Answer& a) {
        return a.is_idk() ? std::string("Answer.idk()")
                          : "Answer(" + a.canonical_id() + ")";
      });

  py::class_<SourceProfile>(m, "SourceProfile")
      .def(py::init([](int source_id, double p, double r) {
             SourceProfile profile{source_id, p, r};
             validate_profile(profile);
             return profile;
           }),
           py::arg("source_id"), py::arg("p"), py::arg("r"))
      .def_readonly("source_id", &SourceProfile::source_id)
      .def_readonly("p", &SourceProfile::p)
      .def_readonly("r", &SourceProfile::r);

  py::class_<PriorSpec>(m, "PriorSpec")
      .def_static("beta", &PriorSpec::beta, py::arg("w_bar"), py::arg("coverage_r"))
      .def_static("adversary_hammer", &PriorSpec::adversary_hammer,
                  py::arg("n_adversaries"), py::arg("n_total"), py::arg("coverage_r"))
      .def_static("explicit", &PriorSpec::explicit_profiles, py::arg("profiles"));

  py::class_<WeightVector>(m, "WeightVector")
      .def_static("from_w_hat", &WeightVector::from_w_hat, py::arg("w_hat"),
                  py::arg("scale"))
      .def_readonly("w_hat", &WeightVector::w_hat)
      .def_readonly("v", &WeightVector::v)
      .def_readonly("scale", &WeightVector::scale);

  m.def("filter_response", &filter_response, py::arg("raw"),
        py::arg("alignment_score"), py::arg("tau"));

  m.def(
      "cluster",
      [](const PyCluster& responses) {
        return from_cluster_set(cluster(to_sourced(responses), canonical_oracle()));
      },
      py::arg("responses"), "Greedy clustering of (source_id, Answer) pairs");

  m.def(
      "weighted_majority_vote",
      [](const std::vector<PyCluster>& clusters, const std::vector<double>& v) {
        return weighted_majority_vote(to_cluster_set(clusters), v);
      },
      py::arg("clusters"), py::arg("v"));

  m.def(
      "majority_vote",
      [](const std::vector<PyCluster>& clusters, int n_sources) {
        return majority_vote(to_cluster_set(clusters), n_sources);
      },
      py::arg("clusters"), py::arg("n_sources"));

  m.def(
      "estimate_reliability",
      [](const std::vector<std::vector<Answer>>& rows, int eta_max,
         double eps_conv, double scale) {
        EstimationSettings settings;
        settings.eta_max = eta_max;
        settings.eps_conv = eps_conv;
        settings.scale = scale;
        auto [weights, trace] =
            estimate_reliability(to_matrix(rows), settings, canonical_oracle());
        py::dict out;
        out["w_hat"] = weights.w_hat;
        out["v"] = weights.v;
        out["scale"] = weights.scale;
        out["converged"] = trace.converged;
        out["iterations"] = trace.iterations_run;
        return out;
      },
      py::arg("matrix"), py::arg("eta_max") = 25, py::arg("eps_conv") = 1e-6,
      py::arg("scale") = 0.0,
      "Iterative reliability estimation over a filtered response matrix");

  m.def(
      "build_matrix",
      [](int n_queries, int n_sources, const PriorSpec& prior,
         const std::optional<std::string>& noise, int n_paraphrases,
         int n_distractors, std::uint64_t seed) {
        auto gen = build_matrix(make_world_spec(n_queries, n_sources, prior, noise,
                                                n_paraphrases, n_distractors, seed));
        py::dict out;
        out["raw"] = gen.raw.cells;
        out["filtered"] = gen.filtered.cells;
        out["gold"] = gen.gold;
        std::vector<std::pair<double, double>> profiles;
        for (const auto& profile : gen.world.profiles)
          profiles.emplace_back(profile.p, profile.r);
        out["profiles"] = profiles;
        return out;
      },
      py::arg("n_queries"), py::arg("n_sources"), py::arg("prior"),
      py::arg("noise") = std::nullopt, py::arg("n_paraphrases") = 9,
      py::arg("n_distractors") = 9, py::arg("seed") = 0);

  m.def(
      "kappa_rrss",
      [](const std::string& query_id, const std::vector<double>& v, int kappa,
         py::function provider, double tau) {
        CallableProvider wrapped(std::move(provider));
        QueryRef query{-1, query_id, ""};
        auto result = kappa_rrss(query, v, kappa, wrapped, tau);
        Answer answer = aggregate_kappa(result.responses, v, canonical_oracle());
        py::dict out;
        out["answer"] = answer;
        out["probes_made"] = result.log.probes_made;
        PyCluster selected;
        for (const auto& r : result.responses)
          selected.emplace_back(r.source_id, r.answer);
        out["selected"] = selected;
        return out;
      },
      py::arg("query_id"), py::arg("v"), py::arg("kappa"), py::arg("provider"),
      py::arg("tau") = 0.1,
      "Probe a provider callable (query_id, source_id) -> (text|None, score)");

  m.def(
      "accuracy",
      [](const std::vector<Answer>& predictions, const std::vector<std::string>& gold) {
        return accuracy_canonical(predictions, gold);
      },
      py::arg("predictions"), py::arg("gold"));

  m.def(
      "accuracy_containment",
      [](const std::vector<Answer>& predictions,
         const std::vector<std::vector<std::string>>& gold_aliases) {
        return accuracy_containment(predictions, gold_aliases);
      },
      py::arg("predictions"), py::arg("gold_aliases"));

  m.def(
      "correlation",
      [](const std::vector<double>& est, const std::vector<double>& truth) {
        Correlation c = correlation(est, truth);
        return std::make_pair(c.pcc, c.srcc);
      },
      py::arg("estimated"), py::arg("truth"), "Returns (pcc, srcc)");

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        py::gil_scoped_release release;
        return report_to_json(run_experiment(parse_config(config_text)));
      },
      py::arg("config_text"),
      "Run a full experiment from config-file text; returns the report JSON");

  m.def("list_noise_presets", &list_noise_presets);
  m.def("set_noise_preset_dir", &set_noise_preset_dir, py::arg("dir"));
  m.def("noise_preset_dir", &noise_preset_dir);
  m.def("tool_version", []() { return std::string(kToolVersion); });
}
