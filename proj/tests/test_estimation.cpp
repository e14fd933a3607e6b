#include "doctest.h"
#include "reliag/estimation.hpp"
#include "reliag/metrics.hpp"
#include "reliag/simulation.hpp"

#include <cmath>
#include <map>

using namespace reliag;

namespace {

ResponseMatrix matrix_from(const std::vector<std::vector<const char*>>& rows) {
  // nullptr stands for IDK
  ResponseMatrix m;
  m.n_sources = static_cast<int>(rows.front().size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    std::vector<Answer> row;
    for (const char* c : rows[j])
      row.push_back(c ? Answer::text(c) : Answer::idk());
    m.query_ids.push_back("q" + std::to_string(j));
    m.cells.push_back(std::move(row));
  }
  return m;
}

}  // namespace

TEST_CASE("consensus step is MV under the unit start") {
  auto m = matrix_from({{"gold", "gold", "d1"}});
  std::vector<double> v = {1.0, 1.0, 1.0};
  auto consensus = consensus_step(m, v, canonical_oracle());
  REQUIRE(consensus.size() == 1);
  CHECK(consensus[0].canonical_id() == "gold");
}

TEST_CASE("all-IDK rows yield IDK consensus") {
  auto m = matrix_from({{nullptr, nullptr, nullptr}});
  std::vector<double> v = {1.0, 1.0, 1.0};
  CHECK(consensus_step(m, v, canonical_oracle())[0].is_idk());
}

TEST_CASE("a heavy minority outvotes two light agreers") {
  auto m = matrix_from({{"d1", "d1", "gold"}});
  std::vector<double> v = {-0.5, -0.5, 2.0};
  CHECK(consensus_step(m, v, canonical_oracle())[0].canonical_id() == "gold");
}

TEST_CASE("consensus step rejects a mismatched weight vector") {
  auto m = matrix_from({{"a", "b"}});
  std::vector<double> v = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(consensus_step(m, v, canonical_oracle()), Error);
}

TEST_CASE("reliability step counts matches over answered rows") {
  // source 0: answers 4 rows (3 matching), IDK on the fifth
  auto m = matrix_from({
      {"gold", "gold", "gold"},
      {"gold", "gold", "gold"},
      {"gold", "gold", "gold"},
      {"d1", "gold", "gold"},
      {nullptr, "gold", "gold"},
  });
  std::vector<double> v = {1.0, 1.0, 1.0};
  auto consensus = consensus_step(m, v, canonical_oracle());
  auto w = reliability_step(m, consensus, canonical_oracle(), 3.0);
  CHECK(w[0] == doctest::Approx(0.75));
  CHECK(w[1] == doctest::Approx(1.0));
}

TEST_CASE("lone-voter rows are not evidence") {
  // source 0 answers two rows alone and one corroborated row it gets wrong;
  // the singletons must not certify it.
  auto m = matrix_from({
      {"x1", nullptr, nullptr},
      {"x2", nullptr, nullptr},
      {"d", "gold", "gold"},
  });
  std::vector<double> v = {1.0, 1.0, 1.0};
  auto consensus = consensus_step(m, v, canonical_oracle());
  CHECK(consensus[0].canonical_id() == "x1");  // lone voter still wins the row
  auto w = reliability_step(m, consensus, canonical_oracle(), 3.0);
  CHECK(w[0] == doctest::Approx(0.0));  // only the corroborated row counts
  CHECK(w[1] == doctest::Approx(1.0));
}

TEST_CASE("rows without a consensus judge nobody") {
  // one tied row (1v1) and one decided row; the tie must not dilute anyone
  auto m = matrix_from({
      {"a", "b", nullptr},
      {"gold", "gold", "gold"},
  });
  std::vector<double> v = {1.0, 1.0, 1.0};
  auto consensus = consensus_step(m, v, canonical_oracle());
  CHECK(consensus[0].is_idk());
  auto w = reliability_step(m, consensus, canonical_oracle(), 3.0);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(1.0));
}

TEST_CASE("an always-IDK source becomes a neutral non-voter") {
  auto m = matrix_from({{nullptr, "a", "a"}, {nullptr, "a", "a"}});
  auto [weights, trace] =
      estimate_reliability(m, EstimationSettings{}, canonical_oracle());
  CHECK(weights.w_hat[0] == doctest::Approx(1.0 / 3.0));
  CHECK(weights.v[0] == doctest::Approx(0.0));
  CHECK(weights.w_hat[1] == doctest::Approx(1.0));
}

TEST_CASE("two honest sources and a committed liar separate in two iterations") {
  std::vector<std::vector<const char*>> rows;
  for (int j = 0; j < 20; ++j) rows.push_back({"gold", "gold", "d7"});
  auto m = matrix_from(rows);
  auto [weights, trace] =
      estimate_reliability(m, EstimationSettings{}, canonical_oracle());
  CHECK(trace.converged);
  CHECK(trace.iterations_run <= 2);
  CHECK(weights.w_hat[0] == doctest::Approx(1.0));
  CHECK(weights.w_hat[1] == doctest::Approx(1.0));
  CHECK(weights.w_hat[2] == doctest::Approx(0.0));
  CHECK(weights.v[0] == doctest::Approx(2.0));
  CHECK(weights.v[2] == doctest::Approx(-1.0));
}

TEST_CASE("N=2 symmetric disagreement leaves both sources neutral") {
  // Every row is a 1-vs-1 tie, so no row ever has a consensus: there is no
  // evidence against (or for) either source and both end up as neutral
  // non-voters rather than one side winning by position.
  std::vector<std::vector<const char*>> rows;
  for (int j = 0; j < 10; ++j) rows.push_back({"a", "b"});
  auto m = matrix_from(rows);
  auto [weights, trace] =
      estimate_reliability(m, EstimationSettings{}, canonical_oracle());
  CHECK(trace.converged);
  CHECK(weights.v[0] == doctest::Approx(0.0));
  CHECK(weights.v[1] == doctest::Approx(0.0));
}

TEST_CASE("first iteration consensus is MV wherever the plurality is untied") {
  WorldSpec spec;
  spec.n_queries = 200;
  spec.n_sources = 6;
  spec.prior = PriorSpec::beta(0.6, 0.6);
  spec.seed = 99;
  auto gen = build_matrix(spec);

  std::vector<double> unit(6, 1.0);
  auto consensus = consensus_step(gen.filtered, unit, canonical_oracle());
  int untied_rows = 0;
  for (int j = 0; j < gen.filtered.n_queries(); ++j) {
    std::map<std::string, int> counts;
    for (int i = 0; i < 6; ++i)
      if (gen.filtered.cells[j][i].is_text())
        ++counts[gen.filtered.cells[j][i].canonical_id()];
    int top = 0, top_multiplicity = 0;
    for (const auto& [id, c] : counts) {
      if (c > top) { top = c; top_multiplicity = 1; }
      else if (c == top) ++top_multiplicity;
    }
    std::vector<SourcedAnswer> row;
    for (int i = 0; i < 6; ++i) row.push_back({i, gen.filtered.cells[j][i]});
    if (counts.empty() || top_multiplicity > 1) {
      CHECK(consensus[j].is_idk());  // no consensus on ties
    } else {
      ++untied_rows;
      CHECK(consensus[j] == majority_vote(cluster(row, canonical_oracle()), 6));
    }
  }
  CHECK(untied_rows > 100);  // the property is exercised on real rows
}

TEST_CASE("estimates always live in their documented ranges") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    WorldSpec spec;
    spec.n_queries = 40;
    spec.n_sources = 5;
    spec.prior = PriorSpec::beta(0.5, 0.5);
    spec.seed = seed;
    auto gen = build_matrix(spec);
    auto [weights, trace] =
        estimate_reliability(gen.filtered, EstimationSettings{}, canonical_oracle());
    for (int i = 0; i < weights.size(); ++i) {
      CHECK(weights.w_hat[i] >= 0.0);
      CHECK(weights.w_hat[i] <= 1.0);
      CHECK(weights.v[i] >= -1.0);
      CHECK(weights.v[i] <= weights.scale - 1.0);
    }
    CHECK(trace.iterations_run <= EstimationSettings{}.eta_max);
  }
}

TEST_CASE("monotone trust: more agreement, more weight") {
  // sources 0 and 1 both answer every row; 0 matches consensus strictly more
  std::vector<std::vector<const char*>> rows;
  for (int j = 0; j < 12; ++j) rows.push_back({"gold", "gold", "gold"});
  rows[0][1] = "dx";
  rows[1][1] = "dx";
  rows[2][1] = "dx";
  rows[3][0] = "dy";
  auto m = matrix_from(rows);
  auto [weights, trace] =
      estimate_reliability(m, EstimationSettings{}, canonical_oracle());
  CHECK(weights.w_hat[0] > weights.w_hat[1]);
}

TEST_CASE("estimation is deterministic bit for bit") {
  WorldSpec spec;
  spec.n_queries = 60;
  spec.n_sources = 7;
  spec.prior = PriorSpec::beta(0.6, 0.6);
  spec.seed = 1234;
  auto gen = build_matrix(spec);
  auto [w1, t1] = estimate_reliability(gen.filtered, EstimationSettings{}, canonical_oracle());
  auto [w2, t2] = estimate_reliability(gen.filtered, EstimationSettings{}, canonical_oracle());
  CHECK(w1.w_hat == w2.w_hat);
  CHECK(w1.v == w2.v);
  CHECK(t1.iterations_run == t2.iterations_run);
}

TEST_CASE("degenerate all-IDK matrix is rejected") {
  auto m = matrix_from({{nullptr, nullptr}, {nullptr, nullptr}});
  CHECK_THROWS_AS(estimate_reliability(m, EstimationSettings{}, canonical_oracle()),
                  Error);
}

TEST_CASE("published example reliabilities are recovered within 0.06") {
  // Eight sources with the example's true reliabilities, full coverage model
  // r = 0.6, 200 estimation queries.
  std::vector<SourceProfile> profiles;
  const std::vector<double> p = {0.83, 0.67, 0.47, 0.84, 0.57, 0.64, 0.47, 0.79};
  for (int i = 0; i < 8; ++i) profiles.push_back({i, p[i], 0.6});

  WorldSpec spec;
  spec.n_queries = 200;
  spec.n_sources = 8;
  spec.prior = PriorSpec::explicit_profiles(profiles);
  spec.seed = 47;
  auto gen = build_matrix(spec);
  auto [weights, trace] =
      estimate_reliability(gen.filtered, EstimationSettings{}, canonical_oracle());
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(weights.w_hat[i] - p[i]) <= 0.06);
}
