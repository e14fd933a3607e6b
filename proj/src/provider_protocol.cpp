#include "reliag/provider_protocol.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace reliag {

namespace {

using nlohmann::json;

std::string trim_copy(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Answer external_answer(const std::string& text) {
  std::string trimmed = trim_copy(text);
  if (trimmed.empty()) return Answer::idk();
  std::string canonical = trimmed;
  std::transform(canonical.begin(), canonical.end(), canonical.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return Answer::text(std::move(canonical), trimmed);
}

std::string encode_probe_request(const QueryRef& query, int source_id) {
  json j;
  j["query_id"] = query.id;
  j["query_text"] = query.text;
  j["source_id"] = source_id;
  return j.dump();
}

std::string encode_probe_reply(const Answer& raw, double alignment_score) {
  json j;
  if (raw.is_idk())
    j["answer"] = nullptr;
  else
    j["answer"] = raw.surface();
  j["alignment_score"] = alignment_score;
  return j.dump();
}

ProbeResult decode_probe_reply(const std::string& line, int source_id) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProviderFailure(source_id, std::string("malformed reply: ") + e.what());
  }
  if (j.contains("error"))
    throw ProviderFailure(source_id, "provider error: " + j["error"].dump());
  if (!j.contains("answer") || !j.contains("alignment_score"))
    throw ProviderFailure(source_id, "reply missing answer/alignment_score");
  if (!j["alignment_score"].is_number())
    throw ProviderFailure(source_id, "alignment_score is not a number");
  const double score = j["alignment_score"].get<double>();
  if (!(score >= 0.0 && score <= 1.0))
    throw ProviderFailure(source_id, "alignment_score outside [0,1]");

  ProbeResult result;
  result.alignment_score = score;
  if (j["answer"].is_null()) {
    result.raw = Answer::idk();
  } else if (j["answer"].is_string()) {
    result.raw = external_answer(j["answer"].get<std::string>());
  } else {
    throw ProviderFailure(source_id, "answer must be a string or null");
  }
  return result;
}

void serve_stdio(ResponseProvider& provider, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (trim_copy(line).empty()) continue;
    try {
      json j = json::parse(line);
      QueryRef query;
      query.index = -1;
      query.id = j.at("query_id").get<std::string>();
      query.text = j.value("query_text", std::string{});
      const int source_id = j.at("source_id").get<int>();
      ProbeResult result = provider.probe(query, source_id);
      out << encode_probe_reply(result.raw, result.alignment_score) << "\n";
    } catch (const std::exception& e) {
      json err;
      err["error"] = e.what();
      out << err.dump() << "\n";
    }
    out.flush();
  }
}

// ---------------------------------------------------------------------------
// Stdio client: child process wired up with two pipes.

StdioProviderClient::StdioProviderClient(const std::string& command, int timeout_ms)
    : timeout_ms_(timeout_ms) {
  // A provider that dies mid-conversation must surface as PROVIDER_FAILURE,
  // not kill the whole process through SIGPIPE on the next write.
  signal(SIGPIPE, SIG_IGN);
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw Error(ErrorCode::IoError, "pipe() failed");

  pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::IoError, "fork() failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  child_pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

StdioProviderClient::~StdioProviderClient() { shutdown(); }

void StdioProviderClient::shutdown() noexcept {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (child_pid_ > 0) {
    int status = 0;
    if (waitpid(child_pid_, &status, WNOHANG) == 0) {
      kill(child_pid_, SIGTERM);
      waitpid(child_pid_, &status, 0);
    }
    child_pid_ = -1;
  }
}

ProbeResult StdioProviderClient::probe(const QueryRef& query, int source_id) {
  if (child_pid_ <= 0)
    throw ProviderFailure(source_id, "stdio provider not running");
  std::string request = encode_probe_request(query, source_id) + "\n";
  std::size_t written = 0;
  while (written < request.size()) {
    ssize_t n = write(to_child_, request.data() + written, request.size() - written);
    if (n <= 0) throw ProviderFailure(source_id, "write to provider failed");
    written += static_cast<std::size_t>(n);
  }

  for (;;) {
    if (auto newline = buffer_.find('\n'); newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return decode_probe_reply(line, source_id);
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int ready = poll(&pfd, 1, timeout_ms_);
    if (ready == 0) throw ProviderFailure(source_id, "provider timed out");
    if (ready < 0) throw ProviderFailure(source_id, "poll() failed");
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n <= 0) throw ProviderFailure(source_id, "provider closed its pipe");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// ---------------------------------------------------------------------------
// HTTP client/server.

struct HttpProviderClient::Impl {
  httplib::Client client;
  explicit Impl(const std::string& endpoint) : client(endpoint) {}
};

HttpProviderClient::HttpProviderClient(const std::string& endpoint, int timeout_ms)
    : impl_(std::make_unique<Impl>(endpoint)) {
  impl_->client.set_connection_timeout(0, timeout_ms * 1000);
  impl_->client.set_read_timeout(0, timeout_ms * 1000);
  impl_->client.set_write_timeout(0, timeout_ms * 1000);
}

HttpProviderClient::~HttpProviderClient() = default;

ProbeResult HttpProviderClient::probe(const QueryRef& query, int source_id) {
  auto res = impl_->client.Post("/probe", encode_probe_request(query, source_id),
                                "application/json");
  if (!res)
    throw ProviderFailure(source_id, "HTTP transport error: " +
                                         httplib::to_string(res.error()));
  if (res->status != 200)
    throw ProviderFailure(source_id, "HTTP status " + std::to_string(res->status));
  return decode_probe_reply(res->body, source_id);
}

struct HttpProviderServer::Impl {
  explicit Impl(ResponseProvider& p) : provider(p) {}
  ResponseProvider& provider;
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

HttpProviderServer::HttpProviderServer(ResponseProvider& provider)
    : impl_(std::make_unique<Impl>(provider)) {
  impl_->server.Post("/probe", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    try {
      json j = json::parse(req.body);
      QueryRef query;
      query.index = -1;
      query.id = j.at("query_id").get<std::string>();
      query.text = j.value("query_text", std::string{});
      const int source_id = j.at("source_id").get<int>();
      ProbeResult result = impl_->provider.probe(query, source_id);
      res.set_content(encode_probe_reply(result.raw, result.alignment_score),
                      "application/json");
    } catch (const std::exception& e) {
      json err;
      err["error"] = e.what();
      res.status = 400;
      res.set_content(err.dump(), "application/json");
    }
  });
}

HttpProviderServer::~HttpProviderServer() { stop(); }

int HttpProviderServer::start(int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0)
      throw Error(ErrorCode::IoError, "cannot bind a loopback port");
  } else {
    if (!impl_->server.bind_to_port("127.0.0.1", port))
      throw Error(ErrorCode::IoError, "cannot bind port " + std::to_string(port));
    impl_->port = port;
  }
  impl_->thread = std::thread([this]() { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void HttpProviderServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpProviderServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::unique_ptr<ResponseProvider> make_protocol_provider(const std::string& endpoint,
                                                         int timeout_ms) {
  if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0)
    return std::make_unique<HttpProviderClient>(endpoint, timeout_ms);
  if (endpoint.rfind("cmd:", 0) == 0)
    return std::make_unique<StdioProviderClient>(endpoint.substr(4), timeout_ms);
  throw Error(ErrorCode::ConfigParse,
              "provider endpoint must start with http:// or cmd:");
}

}  // namespace reliag
