#include "lcbench/run_store.hpp"

#include <fstream>
#include <mutex>

#include "lcbench/serialize.hpp"
#include "lcbench/text.hpp"
#include "lcbench/trace_io.hpp"

namespace lcbench {
namespace {

constexpr std::string_view kRecordType = "LifecycleRecord";

RunStatus ParseRunStatus(std::string_view s) {
  if (s == "pending") return RunStatus::Pending;
  if (s == "done") return RunStatus::Done;
  if (s == "failed") return RunStatus::Failed;
  throw Error("unknown run status '" + std::string(s) + "'");
}

// Complete lines of `text`, plus the byte length they cover.
std::pair<std::vector<std::string_view>, std::size_t> CompleteLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (true) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) break;
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return {lines, pos};
}

std::string SanitizeDiagnostic(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

std::string_view ToString(RunStatus s) {
  switch (s) {
    case RunStatus::Pending:
      return "pending";
    case RunStatus::Done:
      return "done";
    case RunStatus::Failed:
      return "failed";
  }
  return "?";
}

std::filesystem::path StatusSidecarPath(const std::filesystem::path& store_path) {
  auto p = store_path;
  p += ".status";
  return p;
}

RunStore::RunStore(RunStore&& other) noexcept {
  std::unique_lock lock(other.mu_);
  path_ = std::move(other.path_);
  records_ = std::move(other.records_);
  index_ = std::move(other.index_);
  status_ = std::move(other.status_);
}

RunStore& RunStore::operator=(RunStore&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    path_ = std::move(other.path_);
    records_ = std::move(other.records_);
    index_ = std::move(other.index_);
    status_ = std::move(other.status_);
  }
  return *this;
}

RunStore RunStore::Open(const std::filesystem::path& path) {
  RunStore store;
  store.path_ = path;
  if (std::filesystem::exists(path)) {
    store.load();
  } else {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    store.write_line(path, SchemaHeader(kRecordType));
  }
  return store;
}

void RunStore::load() {
  const std::string text = ReadFile(*path_);
  auto [lines, covered] = CompleteLines(text);
  if (covered != text.size()) std::filesystem::resize_file(*path_, covered);
  if (lines.empty()) {
    std::filesystem::resize_file(*path_, 0);
    write_line(*path_, SchemaHeader(kRecordType));
    return;
  }
  CheckSchemaHeader(lines.front(), kRecordType);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto record = Decode<LifecycleRecord>(lines[i]);
    RunKey key{record.config.key(), record.run_index};
    if (index_.contains(key)) throw StoreError("store contains duplicate run " + record.config.id());
    index_[key] = records_.size();
    status_[key] = {RunStatus::Done, ""};
    records_.push_back(std::move(record));
  }

  const auto sidecar = StatusSidecarPath(*path_);
  if (!std::filesystem::exists(sidecar)) return;
  const std::string status_text = ReadFile(sidecar);
  auto [status_lines, status_covered] = CompleteLines(status_text);
  if (status_covered != status_text.size()) std::filesystem::resize_file(sidecar, status_covered);
  for (auto line : status_lines) {
    if (line.empty()) continue;
    const auto first = line.find(' ');
    const auto second = line.find(' ', first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos) {
      throw StoreError("malformed status line '" + std::string(line) + "'");
    }
    const auto third = line.find(' ', second + 1);
    const auto config = ParseConfigId(line.substr(0, first));
    const int run = static_cast<int>(ParseInt(line.substr(first + 1, second - first - 1)));
    const auto status = ParseRunStatus(line.substr(second + 1, third == std::string_view::npos ? third : third - second - 1));
    std::string diag = third == std::string_view::npos ? "" : std::string(line.substr(third + 1));
    RunKey key{config.key(), run};
    // A record line is authoritative for done runs.
    if (index_.contains(key)) continue;
    if (status == RunStatus::Done) continue;
    status_[key] = {status, std::move(diag)};
  }
}

void RunStore::write_line(const std::filesystem::path& file, const std::string& line) {
  std::ofstream out(file, std::ios::binary | std::ios::app);
  if (!out) throw StoreError("cannot open " + file.string() + " for append");
  const std::string whole = line + "\n";
  out.write(whole.data(), static_cast<std::streamsize>(whole.size()));
  out.flush();
  if (!out) throw StoreError("write failed for " + file.string());
}

void RunStore::append(const LifecycleRecord& record) {
  const auto violations = ValidateRecord(record);
  if (!violations.empty()) {
    throw Error("record for " + record.config.id() + " run " + std::to_string(record.run_index) +
                " violates " + violations.front().rule);
  }
  std::unique_lock lock(mu_);
  RunKey key{record.config.key(), record.run_index};
  if (index_.contains(key)) {
    throw Error("duplicate run " + record.config.id() + " #" + std::to_string(record.run_index));
  }
  if (path_) {
    write_line(*path_, Encode(record));
    write_line(StatusSidecarPath(*path_),
               record.config.id() + " " + std::to_string(record.run_index) + " done");
  }
  index_[key] = records_.size();
  status_[key] = {RunStatus::Done, ""};
  records_.push_back(record);
}

void RunStore::mark_failed(const Configuration& config, int run_index, const std::string& diagnostic) {
  std::unique_lock lock(mu_);
  RunKey key{config.key(), run_index};
  if (index_.contains(key)) throw Error("cannot fail completed run " + config.id());
  const std::string diag = SanitizeDiagnostic(diagnostic);
  if (path_) {
    std::string line = config.id() + " " + std::to_string(run_index) + " failed";
    if (!diag.empty()) line += " " + diag;
    write_line(StatusSidecarPath(*path_), line);
  }
  status_[key] = {RunStatus::Failed, diag};
}

RunStatus RunStore::status(const ConfigKey& config, int run_index) const {
  std::shared_lock lock(mu_);
  if (auto it = status_.find({config, run_index}); it != status_.end()) return it->second.first;
  return RunStatus::Pending;
}

std::optional<std::string> RunStore::diagnostic(const ConfigKey& config, int run_index) const {
  std::shared_lock lock(mu_);
  if (auto it = status_.find({config, run_index}); it != status_.end() && it->second.first == RunStatus::Failed) {
    return it->second.second;
  }
  return std::nullopt;
}

std::vector<LifecycleRecord> RunStore::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

std::vector<LifecycleRecord> RunStore::records_for(const ConfigKey& config) const {
  std::shared_lock lock(mu_);
  std::vector<LifecycleRecord> out;
  for (const auto& [key, idx] : index_) {
    if (key.config == config) out.push_back(records_[idx]);
  }
  return out;
}

std::vector<Configuration> RunStore::configurations() const {
  std::shared_lock lock(mu_);
  std::vector<Configuration> out;
  std::optional<ConfigKey> last;
  for (const auto& [key, idx] : index_) {
    if (last && *last == key.config) continue;
    out.push_back(records_[idx].config);
    last = key.config;
  }
  return out;
}

std::size_t RunStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::size_t RunStore::failed_count() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& [key, s] : status_) n += s.first == RunStatus::Failed ? 1 : 0;
  return n;
}

}  // namespace lcbench
