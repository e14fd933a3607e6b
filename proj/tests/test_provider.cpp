#include "doctest.h"
#include "reliag/provider_protocol.hpp"
#include "reliag/simulation.hpp"

#include <sstream>

using namespace reliag;

namespace {

SourceWorld perfect_world(int n_queries, int n_sources) {
  WorldSpec spec;
  spec.n_queries = n_queries;
  spec.n_sources = n_sources;
  spec.prior = PriorSpec::explicit_profiles(
      std::vector<SourceProfile>(n_sources, SourceProfile{0, 1.0, 1.0}));
  spec.seed = 2024;
  return build_world(spec);
}

}  // namespace

TEST_CASE("probe replies decode by the wire rules") {
  auto ok = decode_probe_reply(R"({"answer": "senators", "alignment_score": 0.9})", 3);
  REQUIRE(ok.raw.is_text());
  CHECK(ok.raw.canonical_id() == "senators");
  CHECK(ok.alignment_score == doctest::Approx(0.9));

  auto idk = decode_probe_reply(R"({"answer": null, "alignment_score": 0.0})", 3);
  CHECK(idk.raw.is_idk());

  CHECK_THROWS_AS(decode_probe_reply(R"({"answer": "x", "alignment_score": 1.4})", 3),
                  ProviderFailure);
  CHECK_THROWS_AS(decode_probe_reply("{ not json", 3), ProviderFailure);
  CHECK_THROWS_AS(decode_probe_reply(R"({"answer": "x"})", 3), ProviderFailure);
  CHECK_THROWS_AS(decode_probe_reply(R"({"answer": 7, "alignment_score": 0.5})", 3),
                  ProviderFailure);
  CHECK_THROWS_AS(decode_probe_reply(R"({"error": "backend down"})", 3),
                  ProviderFailure);
}

TEST_CASE("external answers are normalized into canonical ids") {
  Answer a = external_answer("  Robber Barons ");
  REQUIRE(a.is_text());
  CHECK(a.canonical_id() == "robber barons");
  CHECK(a.surface() == "Robber Barons");
  CHECK(external_answer("").is_idk());
  CHECK(external_answer("   ").is_idk());
}

TEST_CASE("request encoding carries query id, text, and source") {
  QueryRef query{-1, "q7", "who is elected?"};
  std::string line = encode_probe_request(query, 2);
  CHECK(line.find("\"query_id\":\"q7\"") != std::string::npos);
  CHECK(line.find("\"source_id\":2") != std::string::npos);
}

TEST_CASE("stdio serving answers valid lines and flags bad ones") {
  auto world = perfect_world(5, 3);
  SimulationProvider provider(world);

  std::istringstream in(
      R"({"query_id": "q1", "query_text": "", "source_id": 0})" "\n"
      "garbage\n"
      R"({"query_id": "q2", "source_id": 1})" "\n");
  std::ostringstream out;
  serve_stdio(provider, in, out);

  // The wire carries surfaces only; canonical ids are re-derived by
  // normalizing the text on the client side.
  std::istringstream replies(out.str());
  std::string line;
  REQUIRE(std::getline(replies, line));
  auto r1 = decode_probe_reply(line, 0);
  CHECK(r1.raw.surface() == provider.probe({-1, "q1", ""}, 0).raw.surface());
  CHECK(r1.raw.canonical_id().rfind("q1:gold", 0) == 0);

  REQUIRE(std::getline(replies, line));
  CHECK_THROWS_AS(decode_probe_reply(line, 0), ProviderFailure);

  REQUIRE(std::getline(replies, line));
  auto r3 = decode_probe_reply(line, 1);
  CHECK(r3.raw.canonical_id().rfind("q2:gold", 0) == 0);
}

TEST_CASE("http loopback probe equals the in-process probe") {
  auto world = perfect_world(4, 2);
  SimulationProvider provider(world);
  HttpProviderServer server(provider);
  const int port = server.start(0);
  REQUIRE(port > 0);

  HttpProviderClient client("http://127.0.0.1:" + std::to_string(port), 5000);
  QueryRef query{-1, "q2", ""};
  ProbeResult remote = client.probe(query, 1);
  ProbeResult local = provider.probe(query, 1);
  CHECK(remote.raw.surface() == local.raw.surface());
  CHECK(remote.alignment_score == doctest::Approx(local.alignment_score));

  // An unknown query id turns into a protocol-level error -> ProviderFailure.
  QueryRef bad{-1, "bogus", ""};
  CHECK_THROWS_AS(client.probe(bad, 0), ProviderFailure);
  server.stop();
}

TEST_CASE("stdio subprocess client speaks the protocol") {
  // A minimal provider: always answers "echo" with score 0.8.
  StdioProviderClient client(
      "python3 -u -c \"import sys, json\n"
      "for line in sys.stdin:\n"
      "    req = json.loads(line)\n"
      "    print(json.dumps({'answer': 'echo ' + req['query_id'],"
      " 'alignment_score': 0.8}))\n"
      "    sys.stdout.flush()\"",
      10000);
  QueryRef query{-1, "q5", "text"};
  ProbeResult result = client.probe(query, 0);
  REQUIRE(result.raw.is_text());
  CHECK(result.raw.canonical_id() == "echo q5");
  CHECK(result.alignment_score == doctest::Approx(0.8));
}

TEST_CASE("a subprocess that emits junk raises PROVIDER_FAILURE") {
  StdioProviderClient client("cat", 5000);  // echoes the request back
  QueryRef query{-1, "q0", ""};
  CHECK_THROWS_AS(client.probe(query, 0), ProviderFailure);
}

TEST_CASE("a provider that exits early fails loudly, repeatedly") {
  StdioProviderClient client("true", 5000);  // exits without answering
  QueryRef query{-1, "q0", ""};
  CHECK_THROWS_AS(client.probe(query, 0), ProviderFailure);
  // and the next probe must fail the same way, not crash on a dead pipe
  CHECK_THROWS_AS(client.probe(query, 1), ProviderFailure);
}

TEST_CASE("endpoint factory dispatches by scheme") {
  CHECK_THROWS_AS(make_protocol_provider("ftp://nope"), Error);
  auto cmd = make_protocol_provider("cmd:cat");
  CHECK(cmd != nullptr);
}
