#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "reliag/selection.hpp"

namespace reliag {

// Newline-delimited JSON protocol for external sources, over stdio or HTTP
// POST. One request per line/POST:
//   {"query_id": "...", "query_text": "...", "source_id": 3}
// and one reply:
//   {"answer": "..."|null, "alignment_score": 0.9}
// null (or an empty string) maps to IDK; the caller applies the misalignment
// filter locally with its configured tau. A malformed reply, a score outside
// [0,1], or a timeout is a PROVIDER_FAILURE, never an IDK.

std::string encode_probe_request(const QueryRef& query, int source_id);
std::string encode_probe_reply(const Answer& raw, double alignment_score);

// Throws ProviderFailure on malformed input.
ProbeResult decode_probe_reply(const std::string& line, int source_id);

// External answers are clustered by case-normalized, whitespace-trimmed text;
// the original string is kept as the surface form.
Answer external_answer(const std::string& text);

// Serve an in-process provider until EOF on `in`. Malformed requests get an
// {"error": ...} line and the loop continues.
void serve_stdio(ResponseProvider& provider, std::istream& in, std::ostream& out);

class StdioProviderClient : public ResponseProvider {
 public:
  // Spawns `command` via /bin/sh and speaks the protocol on its stdio.
  explicit StdioProviderClient(const std::string& command, int timeout_ms = 30000);
  ~StdioProviderClient() override;

  StdioProviderClient(const StdioProviderClient&) = delete;
  StdioProviderClient& operator=(const StdioProviderClient&) = delete;

  ProbeResult probe(const QueryRef& query, int source_id) override;

 private:
  void shutdown() noexcept;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

class HttpProviderClient : public ResponseProvider {
 public:
  // endpoint: "http://host:port" (path fixed to /probe).
  explicit HttpProviderClient(const std::string& endpoint, int timeout_ms = 30000);
  ~HttpProviderClient() override;

  ProbeResult probe(const QueryRef& query, int source_id) override;
  bool safe_for_concurrent_queries() const override { return true; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpProviderServer {
 public:
  explicit HttpProviderServer(ResponseProvider& provider);
  ~HttpProviderServer();

  // Binds 127.0.0.1 on `port` (0 = any free port); returns the bound port.
  int start(int port = 0);
  void wait();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "http://..." -> HTTP client, "cmd:<shell command>" -> stdio client.
std::unique_ptr<ResponseProvider> make_protocol_provider(const std::string& endpoint,
                                                         int timeout_ms = 30000);

}  // namespace reliag
