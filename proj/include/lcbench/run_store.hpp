#pragma once

// Append-only store of LifecycleRecords keyed by (configuration, run index).
//
// On disk: a JSON-lines file (schema header, then one record per line) and
// a `<path>.status` sidecar with one `<config_id> <run_index> <status>
// [diagnostic]` line per status change; the last line for a key wins.
// Lines are written whole and flushed; a torn final line left by a crash
// is discarded when the store is reopened.

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lcbench/types.hpp"

namespace lcbench {

enum class RunStatus { Pending, Done, Failed };

std::string_view ToString(RunStatus s);

struct RunKey {
  ConfigKey config;
  int run_index = 0;

  auto operator<=>(const RunKey&) const = default;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class RunStore {
 public:
  // Purely in-memory store, for tests and dry runs.
  RunStore() = default;

  // Opens (creating if necessary) a file-backed store.
  static RunStore Open(const std::filesystem::path& path);

  RunStore(RunStore&& other) noexcept;
  RunStore& operator=(RunStore&& other) noexcept;

  /// Rejects duplicate keys and records with invariant violations; throws
  /// StoreError when the backing file cannot be written.
  void append(const LifecycleRecord& record);

  void mark_failed(const Configuration& config, int run_index, const std::string& diagnostic);

  RunStatus status(const ConfigKey& config, int run_index) const;
  std::optional<std::string> diagnostic(const ConfigKey& config, int run_index) const;

  std::vector<LifecycleRecord> records() const;
  std::vector<LifecycleRecord> records_for(const ConfigKey& config) const;

  // Distinct configurations with at least one done record, in key order.
  std::vector<Configuration> configurations() const;

  std::size_t size() const;
  std::size_t failed_count() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void load();
  void write_line(const std::filesystem::path& file, const std::string& line);

  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::vector<LifecycleRecord> records_;
  std::map<RunKey, std::size_t> index_;
  std::map<RunKey, std::pair<RunStatus, std::string>> status_;
};

std::filesystem::path StatusSidecarPath(const std::filesystem::path& store_path);

}  // namespace lcbench
