#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rareips/chain_model.hpp"
#include "rareips/run_config.hpp"
#include "rareips/tail_report.hpp"

namespace rareips {

inline constexpr const char* kVersion = "0.1.0";

// Overrides RunConfig::output when set.
inline constexpr const char* kOutputDirEnv = "RAREIPS_OUTPUT_DIR";

std::unique_ptr<ChainModel> make_model(const ModelConfig& config);

// Seed used by replicate r.
std::uint64_t replicate_seed(const RunConfig& config, std::size_t replicate);

// Run coordinate for sweep entry `sweep` of the configured algorithm. Distinct
// algorithms never share a coordinate.
std::uint64_t run_coordinate(AlgorithmKind kind, std::size_t sweep);

// One replicate of one sweep entry, as a report.
TailReport run_single(const RunConfig& config, const ChainModel& model,
                      std::size_t sweep, std::size_t replicate);

struct ExecuteResult {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> report_files;
  std::filesystem::path combined_file;
  std::filesystem::path manifest_file;
  std::vector<TailReport> reports;
  TailReport combined;
};

/// Runs every (sweep value, replicate) pair, writing
///   <stem>.csv and <stem>.ci.csv per report,
///   combined.csv / combined.ci.csv,
///   manifest.json (config echo, seeds, version, wall time).
/// Files are written to a temporary name and renamed into place.
ExecuteResult execute(const RunConfig& config);

std::filesystem::path resolve_output_dir(const RunConfig& config);

// Writes `content` to `path` via a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace rareips
