#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rareips/tail_report.hpp"

namespace rareips {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModelChoice { kGaussian, kPmd };

enum class AlgorithmKind {
  kMc,
  kIsIncrement,
  kIsPosition,
  kIpsPotential,
  kIpsIncrement,
};

struct ModelConfig {
  ModelChoice kind = ModelChoice::kGaussian;
  std::size_t n = 0;
  std::optional<double> sigma;

  bool operator==(const ModelConfig&) const = default;
};

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::kMc;
  // Sweep over lambda, alpha or beta; a single value is a one-element sweep.
  // Empty for mc.
  std::vector<double> values;
  std::size_t selection_period = 1;
  double v0 = 0.0;

  bool operator==(const AlgorithmConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  AlgorithmConfig algorithm;
  std::size_t population = 0;
  BinSpec bins;
  std::size_t min_hits = 5;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  // When present, replicate r runs with replicate_seeds[r] instead of
  // master_seed + r.
  std::vector<std::uint64_t> replicate_seeds;
  std::string output;
  bool record_snapshots = false;
  bool dump_history = false;
  std::size_t workers = 1;

  bool operator==(const RunConfig& o) const;
};

std::string to_string(AlgorithmKind kind);
std::string to_string(ModelChoice kind);

// Name of the swept parameter ("lambda", "alpha", "beta"), empty for mc.
std::string parameter_name(AlgorithmKind kind);

RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json serialize_config(const RunConfig& config);

}  // namespace rareips
