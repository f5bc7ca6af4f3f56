#include "lcbench/latency.hpp"

#include "lcbench/stats.hpp"
#include "lcbench/text.hpp"
#include "lcbench/trace_io.hpp"

namespace lcbench {
namespace {

LatencySummary Summarize(const std::vector<double>& xs) {
  LatencySummary s;
  if (xs.empty()) return s;
  s.median = stats::Median(xs);
  s.p95 = stats::NearestRank(xs, 0.95);
  s.mean = stats::Mean(xs);
  s.std = stats::SampleStd(xs);
  return s;
}

std::vector<double> Gaps(const RequestTiming& r) {
  if (r.token_times.size() < 2) throw Error("undefined ITL: fewer than 2 tokens");
  std::vector<double> gaps;
  gaps.reserve(r.token_times.size() - 1);
  for (std::size_t i = 1; i < r.token_times.size(); ++i) {
    gaps.push_back(static_cast<double>(r.token_times[i] - r.token_times[i - 1]));
  }
  return gaps;
}

}  // namespace

void CheckRequestTiming(const RequestTiming& r) {
  if (r.first_token < r.submit) throw Error("first_token precedes submit");
  if (r.tokens_out != static_cast<std::int64_t>(r.token_times.size())) {
    throw Error("tokens_out does not match token_times length");
  }
  for (std::size_t i = 0; i < r.token_times.size(); ++i) {
    if (r.token_times[i] < r.first_token) throw Error("token time precedes first_token");
    if (i > 0 && r.token_times[i] <= r.token_times[i - 1]) throw Error("token times must be strictly increasing");
  }
}

double Ttft(const RequestTiming& r) {
  CheckRequestTiming(r);
  return static_cast<double>(r.first_token - r.submit);
}

double Itl(const RequestTiming& r) {
  CheckRequestTiming(r);
  return stats::Median(Gaps(r));
}

double ItlMeanGap(const RequestTiming& r) {
  CheckRequestTiming(r);
  const auto gaps = Gaps(r);
  return stats::Mean(gaps);
}

double Throughput(std::span<const RequestTiming> batch, const StageSpan& window) {
  if (window.duration() <= 0) throw Error("throughput window has zero duration");
  std::int64_t tokens = 0;
  for (const auto& r : batch) tokens += r.tokens_out;
  return static_cast<double>(tokens) / (static_cast<double>(window.duration()) / 1000.0);
}

LatencyStats AggregateLatency(std::span<const RequestTiming> batch, const StageSpan& window) {
  if (batch.empty()) throw Error("latency aggregation over an empty batch");
  std::vector<double> ttft;
  std::vector<double> itl;
  std::vector<double> itl_mean;
  for (const auto& r : batch) {
    ttft.push_back(Ttft(r));
    if (r.tokens_out >= 2) {
      itl.push_back(Itl(r));
      itl_mean.push_back(ItlMeanGap(r));
    }
  }
  LatencyStats out;
  out.ttft_ms = Summarize(ttft);
  out.itl_ms = Summarize(itl);
  out.itl_mean_ms = Summarize(itl_mean);
  out.throughput_tok_s = Throughput(batch, window);
  out.n_requests = static_cast<int>(batch.size());
  out.n_itl = static_cast<int>(itl.size());
  return out;
}

std::string FormatRequestLine(const RequestTiming& r) {
  std::string out = "R " + std::to_string(r.submit) + " " + std::to_string(r.first_token) + " " +
                    std::to_string(r.tokens_out);
  for (Millis t : r.token_times) out.append(" ").append(std::to_string(t));
  return out;
}

RequestTiming ParseRequestLine(std::string_view line) {
  const auto tokens = SplitSpaces(line);
  if (tokens.size() < 4 || tokens[0] != "R") throw Error("malformed request line '" + std::string(line) + "'");
  RequestTiming r;
  r.submit = ParseInt(tokens[1]);
  r.first_token = ParseInt(tokens[2]);
  r.tokens_out = ParseInt(tokens[3]);
  if (r.tokens_out < 0 || tokens.size() != static_cast<std::size_t>(4 + r.tokens_out)) {
    throw Error("request line token count mismatch: '" + std::string(line) + "'");
  }
  for (std::size_t i = 4; i < tokens.size(); ++i) r.token_times.push_back(ParseInt(tokens[i]));
  CheckRequestTiming(r);
  return r;
}

std::string WriteRequests(std::span<const RequestTiming> batch) {
  std::string out;
  for (const auto& r : batch) out.append(FormatRequestLine(r)).push_back('\n');
  return out;
}

std::vector<RequestTiming> ParseRequests(std::string_view text) {
  std::vector<RequestTiming> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    try {
      out.push_back(ParseRequestLine(line));
    } catch (const Error& e) {
      throw Error("requests line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RequestTiming> LoadRequests(const std::filesystem::path& path) { return ParseRequests(ReadFile(path)); }

}  // namespace lcbench
