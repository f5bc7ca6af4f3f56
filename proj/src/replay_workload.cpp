#include <algorithm>
#include <sstream>

#include "lcbench/latency.hpp"
#include "lcbench/replay.hpp"
#include "lcbench/text.hpp"
#include "lcbench/trace_io.hpp"

namespace lcbench {
namespace {

std::filesystem::path Pick(const std::filesystem::path& dir, int run_index, const char* name) {
  const auto per_run = dir / ("run-" + std::to_string(run_index)) / name;
  if (std::filesystem::exists(per_run)) return per_run;
  return dir / name;
}

bool IsAdaptationStage(Stage s) { return s == Stage::Adaptation || s == Stage::Compression; }

}  // namespace

std::filesystem::path BundleDir(const std::filesystem::path& root, const Configuration& config) {
  std::string id = config.id();
  std::replace(id.begin(), id.end(), '/', '_');
  return root / id;
}

std::vector<MarkerMessage> ParseMarkerFile(std::string_view text) {
  std::vector<MarkerMessage> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(ParseMarker(line));
  }
  return out;
}

std::vector<double> ParseScores(std::string_view text) {
  std::vector<double> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string w;
    while (words >> w) out.push_back(ParseDouble(w));
  }
  return out;
}

ReplayBundle LoadBundle(const std::filesystem::path& root, const Configuration& config, int run_index) {
  const auto dir = BundleDir(root, config);
  if (!std::filesystem::is_directory(dir)) throw Error("no replay bundle for " + config.id() + " at " + dir.string());
  ReplayBundle b;
  b.trace = LoadTrace(Pick(dir, run_index, "trace.txt"));
  const auto markers = Pick(dir, run_index, "markers.txt");
  if (std::filesystem::exists(markers)) {
    b.markers = ParseMarkerFile(ReadFile(markers));
  } else {
    for (const auto& span : b.trace.spans) {
      b.markers.push_back({span.stage, Edge::Begin, span.start, {}});
      b.markers.push_back({span.stage, Edge::End, span.end, {}});
    }
  }
  // Markers are replayed by the workload, not carried by the provider.
  b.trace.spans.clear();
  b.requests = LoadRequests(Pick(dir, run_index, "requests.txt"));
  b.scores = ParseScores(ReadFile(Pick(dir, run_index, "scores.txt")));
  return b;
}

TelemetrySession ReplayProviderSource::open(const Configuration& config, int run_index, Millis period) {
  auto bundle = LoadBundle(root_, config, run_index);
  const Millis epoch = bundle.trace.samples.front().t - period;
  TelemetrySession s;
  s.provider = std::make_unique<ReplayProvider>(std::move(bundle.trace));
  s.clock = std::make_unique<VirtualClock>(epoch);
  return s;
}

ReplayWorkload::Cursor& ReplayWorkload::cursor(const Configuration& config, int run_index) {
  RunKey key{config.key(), run_index};
  auto it = cursors_.find(key);
  if (it == cursors_.end()) it = cursors_.emplace(key, Cursor{LoadBundle(root_, config, run_index), 0}).first;
  return it->second;
}

void ReplayWorkload::apply_through(Cursor& c, Stage until, bool include_adaptation, TraceRecorder& recorder) {
  const auto& markers = c.bundle.markers;
  while (c.next < markers.size()) {
    const auto& m = markers[c.next++];
    if (include_adaptation || !IsAdaptationStage(m.stage)) recorder.mark_stage(m.stage, m.edge, m.t);
    if (m.stage == until && m.edge == Edge::End) return;
  }
}

void ReplayWorkload::adapt(const Configuration& config, int run_index, TraceRecorder& recorder) {
  auto& c = cursor(config, run_index);
  // Through the last adaptation-stage end marker.
  std::size_t last = c.next;
  for (std::size_t i = c.next; i < c.bundle.markers.size(); ++i) {
    if (IsAdaptationStage(c.bundle.markers[i].stage) && c.bundle.markers[i].edge == Edge::End) last = i + 1;
  }
  if (last == c.next) throw Error("replay bundle for " + config.id() + " has no Adaptation markers");
  while (c.next < last) {
    const auto& m = c.bundle.markers[c.next++];
    recorder.mark_stage(m.stage, m.edge, m.t);
  }
}

void ReplayWorkload::load(const Configuration& config, int run_index, TraceRecorder& recorder) {
  apply_through(cursor(config, run_index), Stage::Load, false, recorder);
}

InferenceOutcome ReplayWorkload::infer(const Configuration& config, int run_index, int n_requests, int,
                                       TraceRecorder& recorder) {
  auto& c = cursor(config, run_index);
  while (c.next < c.bundle.markers.size()) {
    const auto& m = c.bundle.markers[c.next++];
    if (!IsAdaptationStage(m.stage)) recorder.mark_stage(m.stage, m.edge, m.t);
  }
  InferenceOutcome out;
  out.requests = c.bundle.requests;
  if (static_cast<int>(out.requests.size()) > n_requests) out.requests.resize(static_cast<std::size_t>(n_requests));
  out.pass_scores = c.bundle.scores;
  return out;
}

void ReplayWorkload::teardown(const Configuration& config, int run_index) {
  cursors_.erase(RunKey{config.key(), run_index});
}

}  // namespace lcbench
