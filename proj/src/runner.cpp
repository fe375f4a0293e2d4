#include "rareips/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rareips/baselines.hpp"
#include "rareips/estimators.hpp"
#include "rareips/ips_engine.hpp"
#include "rareips/rng.hpp"

namespace rareips {

namespace fs = std::filesystem;
using nlohmann::json;

std::unique_ptr<ChainModel> make_model(const ModelConfig& config) {
  if (config.kind == ModelChoice::kGaussian) {
    return std::make_unique<GaussianWalkModel>(config.n);
  }
  return std::make_unique<PmdModel>(config.n, config.sigma.value_or(0.0));
}

std::uint64_t replicate_seed(const RunConfig& config, std::size_t replicate) {
  if (!config.replicate_seeds.empty()) {
    return config.replicate_seeds.at(replicate);
  }
  return config.master_seed + replicate;
}

std::uint64_t run_coordinate(AlgorithmKind kind, std::size_t sweep) {
  return (static_cast<std::uint64_t>(kind) + 1) << 32 |
         static_cast<std::uint64_t>(sweep);
}

namespace {

std::string source_label(const RunConfig& config, std::size_t sweep,
                         std::size_t replicate) {
  std::ostringstream os;
  os << to_string(config.algorithm.kind);
  const std::string param = parameter_name(config.algorithm.kind);
  if (!param.empty()) {
    os << '(' << param << '=' << format_double(config.algorithm.values[sweep]);
    if (config.algorithm.selection_period != 1) {
      os << ";n0=" << config.algorithm.selection_period;
    }
    os << ')';
  }
  os << "/r" << replicate;
  return os.str();
}

std::string file_stem(const RunConfig& config, std::size_t sweep,
                      std::size_t replicate) {
  std::ostringstream os;
  os << to_string(config.algorithm.kind);
  if (!parameter_name(config.algorithm.kind).empty()) os << "_s" << sweep;
  os << "_r" << replicate;
  return os.str();
}

std::string report_text(const TailReport& report) {
  std::ostringstream os;
  write_report_csv(os, report);
  return os.str();
}

std::string intervals_text(const TailReport& report) {
  std::ostringstream os;
  write_intervals_csv(os, report);
  return os.str();
}

}  // namespace

TailReport run_single(const RunConfig& config, const ChainModel& model,
                      std::size_t sweep, std::size_t replicate) {
  const std::uint64_t seed = replicate_seed(config, replicate);
  CounterStreamFactory streams(seed, run_coordinate(config.algorithm.kind, sweep));
  const auto& alg = config.algorithm;

  ReportMetadata meta;
  meta.model = to_string(config.model.kind);
  meta.population = config.population;
  meta.horizon = model.n_steps();
  meta.seed = seed;

  WeightedSample sample;
  switch (alg.kind) {
    case AlgorithmKind::kMc:
      meta.scheme = "mc";
      sample = mc_sample(model, config.population, streams);
      break;
    case AlgorithmKind::kIsIncrement:
      meta.scheme = "is_increment";
      sample = is_sample(model, IncrementShift{alg.values[sweep]},
                         config.population, streams);
      break;
    case AlgorithmKind::kIsPosition:
      meta.scheme = "is_position";
      sample = is_sample(model, PositionTilt{alg.values[sweep]},
                         config.population, streams);
      break;
    case AlgorithmKind::kIpsPotential:
    case AlgorithmKind::kIpsIncrement: {
      const WeightScheme scheme =
          alg.kind == AlgorithmKind::kIpsPotential
              ? WeightScheme::potential(alg.values[sweep], alg.selection_period)
              : WeightScheme::increment(alg.values[sweep], alg.selection_period);
      meta.scheme = scheme.label();
      EngineOptions opts;
      opts.population = config.population;
      opts.record_genealogy = config.record_snapshots;
      opts.workers = config.workers;
      opts.v0 = alg.v0;
      const EnsembleHistory history = run_ips(model, scheme, opts, streams);
      if (config.dump_history) {
        std::ostringstream os;
        history.write_dump(os);
        write_file_atomic(resolve_output_dir(config) /
                              (file_stem(config, sweep, replicate) +
                               ".history.csv"),
                          os.str());
      }
      sample = final_sample(history);
      break;
    }
  }
  return build_report(sample, config.bins, meta,
                      source_label(config, sweep, replicate));
}

fs::path resolve_output_dir(const RunConfig& config) {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env) {
    return fs::path(env);
  }
  return fs::path(config.output);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

ExecuteResult execute(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const auto model = make_model(config.model);
  ExecuteResult result;
  result.output_dir = resolve_output_dir(config);
  fs::create_directories(result.output_dir);

  const std::size_t sweeps =
      config.algorithm.values.empty() ? 1 : config.algorithm.values.size();
  json runs = json::array();
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t r = 0; r < config.replicates; ++r) {
      TailReport report = run_single(config, *model, s, r);
      const std::string stem = file_stem(config, s, r);
      const fs::path path = result.output_dir / (stem + ".csv");
      write_file_atomic(path, report_text(report));
      write_file_atomic(result.output_dir / (stem + ".ci.csv"),
                        intervals_text(report));
      json entry = {{"file", path.filename().string()},
                    {"source", report.bins.empty() ? "" : report.bins.front().source},
                    {"scheme", report.metadata.scheme},
                    {"replicate", r},
                    {"sweep", s},
                    {"seed", replicate_seed(config, r)},
                    {"run_coordinate", run_coordinate(config.algorithm.kind, s)}};
      if (!config.algorithm.values.empty()) {
        entry[parameter_name(config.algorithm.kind)] = config.algorithm.values[s];
      }
      runs.push_back(std::move(entry));
      result.report_files.push_back(path);
      result.reports.push_back(std::move(report));
    }
  }

  result.combined = combine_reports(result.reports, config.min_hits);
  result.combined_file = result.output_dir / "combined.csv";
  write_file_atomic(result.combined_file, report_text(result.combined));
  write_file_atomic(result.output_dir / "combined.ci.csv",
                    intervals_text(result.combined));

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  const json manifest = {
      {"version", kVersion},
      {"config", serialize_config(config)},
      {"output_dir", result.output_dir.string()},
      {"rng",
       "splitmix64 counter streams keyed by (seed, run_coordinate, epoch, "
       "particle, purpose); normals by Box-Muller"},
      {"runs", runs},
      {"combined", {{"file", "combined.csv"}, {"min_hits", config.min_hits}}},
      {"wall_time_seconds", wall},
  };
  result.manifest_file = result.output_dir / "manifest.json";
  write_file_atomic(result.manifest_file, manifest.dump(2) + "\n");
  return result;
}

}  // namespace rareips
