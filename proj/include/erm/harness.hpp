#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace erm::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Kind { bounds, train, mmc, decompose, overall, verify_special, covering };

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& name);

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  bool strict = false;                // hypothesis warnings count as failures
  unsigned threads = 0;               // 0 = worker_threads()
};

/// Everything a run produces. `config` is the effective configuration (seed
/// applied), so rerunning it reproduces the report byte for byte.
struct Report {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  json config;
  json result;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  json to_json() const;
  static Report from_json(const json& j);
  std::string to_csv() const;
};

// FNV-1a 64 over the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string config_hash(const json& config);

// Validates the config against the schema for `kind` and runs it. Throws
// SchemaError naming the offending field.
Report run(Kind kind, const json& config, const RunOptions& options = {});

json load_json(const std::filesystem::path& path);

// Writes <dir>/<kind>.json and <dir>/<kind>.csv.
void write_report(const Report& report, const std::filesystem::path& dir);

// Concatenates the tables of same-kind reports, prefixed with config_hash and
// seed columns. No inputs gives a header-only CSV.
std::string merge_reports(const std::vector<Report>& reports);
std::string merge_report_files(const std::vector<std::filesystem::path>& paths);

std::string format_csv_value(const json& value);

}  // namespace erm::harness
