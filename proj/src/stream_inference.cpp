#include "httplib.h"
#include "json.hpp"
#include "lcbench/adapters.hpp"

namespace lcbench {
namespace {

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> SplitUrl(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error("endpoint must be an absolute URL: '" + url + "'");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/v1/completions"};
  return {url.substr(0, slash), url.substr(slash)};
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Incremental server-sent-event decoder for completion chunks.
class SseDecoder {
 public:
  explicit SseDecoder(const std::function<void(std::string_view)>& on_chunk) : on_chunk_(on_chunk) {}

  void feed(std::string_view bytes) {
    buffer_.append(bytes);
    std::size_t nl;
    while ((nl = buffer_.find('\n')) != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      handle(line);
    }
  }

  bool done() const { return done_; }

 private:
  void handle(std::string_view line) {
    if (line.substr(0, 5) != "data:") return;
    std::string_view payload = line.substr(5);
    while (!payload.empty() && payload.front() == ' ') payload.remove_prefix(1);
    if (payload == "[DONE]") {
      done_ = true;
      return;
    }
    auto j = nlohmann::json::parse(payload, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) return;
    const auto& choice = j["choices"][0];
    std::string text;
    if (choice.contains("text") && choice["text"].is_string()) {
      text = choice["text"].get<std::string>();
    } else if (choice.contains("delta") && choice["delta"].contains("content") &&
               choice["delta"]["content"].is_string()) {
      text = choice["delta"]["content"].get<std::string>();
    }
    if (!text.empty()) on_chunk_(text);
  }

  const std::function<void(std::string_view)>& on_chunk_;
  std::string buffer_;
  bool done_ = false;
};

}  // namespace

HttpCompletionTransport::HttpCompletionTransport(std::string endpoint_url, Millis timeout_ms)
    : timeout_ms_(timeout_ms) {
  std::tie(base_, path_) = SplitUrl(endpoint_url);
}

void HttpCompletionTransport::stream(const CompletionRequest& request,
                                     const std::function<void(std::string_view)>& on_chunk) {
  httplib::Client client(base_);
  const auto timeout = std::chrono::milliseconds(timeout_ms_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);

  nlohmann::json body{{"model", request.model}, {"max_tokens", request.max_tokens}, {"stream", true}};
  if (EndsWith(path_, "chat/completions")) {
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  } else {
    body["prompt"] = request.prompt;
  }

  bool not_streaming = false;
  int http_status = 0;
  SseDecoder decoder(on_chunk);
  httplib::Request req;
  req.method = "POST";
  req.path = path_;
  req.body = body.dump();
  req.set_header("Content-Type", "application/json");
  req.set_header("Accept", "text/event-stream");
  req.response_handler = [&](const httplib::Response& res) {
    http_status = res.status;
    if (res.status != 200) return false;
    if (res.get_header_value("Content-Type").find("text/event-stream") == std::string::npos) {
      not_streaming = true;
      return false;
    }
    return true;
  };
  req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
    decoder.feed(std::string_view(data, len));
    return !decoder.done();
  };

  auto result = client.send(req);
  if (not_streaming) throw StreamingRequiredError();
  if (http_status != 0 && http_status != 200) {
    throw Error("endpoint returned HTTP " + std::to_string(http_status));
  }
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::Canceled && decoder.done()) return;
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Connection) {
      throw RequestTimeoutError("request failed: " + httplib::to_string(err));
    }
    throw Error("request failed: " + httplib::to_string(err));
  }
}

ScriptedEndpoint::ScriptedEndpoint(VirtualClock& clock, Millis first_delay, Millis spacing, int chunks)
    : clock_(clock), first_delay_(first_delay), spacing_(spacing), chunks_(chunks) {}

void ScriptedEndpoint::stream(const CompletionRequest&, const std::function<void(std::string_view)>& on_chunk) {
  for (int i = 0; i < chunks_; ++i) {
    clock_.advance(i == 0 ? first_delay_ : spacing_);
    on_chunk("tok");
  }
}

StreamOutcome StreamInference(CompletionTransport& transport, const CompletionRequest& request, Clock& clock) {
  StreamOutcome out;
  out.timing.submit = clock.now();
  try {
    transport.stream(request, [&](std::string_view) {
      const Millis t = clock.now();
      if (out.timing.token_times.empty()) {
        out.timing.first_token = t;
      } else if (t <= out.timing.token_times.back()) {
        // Chunks delivered within the same millisecond collapse onto a
        // strictly increasing timeline.
        out.timing.token_times.push_back(out.timing.token_times.back() + 1);
        return;
      }
      out.timing.token_times.push_back(t);
    });
  } catch (const RequestTimeoutError& e) {
    out.failed = true;
    out.error = e.what();
    out.timing.tokens_out = static_cast<std::int64_t>(out.timing.token_times.size());
    if (out.timing.token_times.empty()) out.timing.first_token = out.timing.submit;
    return out;
  }
  if (out.timing.token_times.empty()) throw Error("empty generation");
  out.timing.tokens_out = static_cast<std::int64_t>(out.timing.token_times.size());
  return out;
}

StreamOutcome StreamInference(const std::string& endpoint, const std::string& prompt, int max_tokens, Clock& clock) {
  HttpCompletionTransport transport(endpoint);
  return StreamInference(transport, {"", prompt, max_tokens}, clock);
}

}  // namespace lcbench
