#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace rareips {

// Source of the two primitive draws every model and resampler needs.
// Kept abstract so tests can script the exact values an algorithm consumes.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  // Uniform on [0, 1).
  virtual double uniform() = 0;

  // Standard normal.
  virtual double normal() = 0;
};

// What a stream is used for. Selection and mutation at the same
// (run, epoch, particle) coordinate must not share draws.
enum class StreamPurpose : std::uint32_t {
  kMutation = 1,
  kSelection = 2,
};

struct StreamCoordinates {
  std::uint64_t run = 0;
  std::uint64_t epoch = 0;
  std::uint64_t particle = 0;
  StreamPurpose purpose = StreamPurpose::kMutation;
};

/// Counter-based generator. The key is a SplitMix64 hash of the master seed
/// and the stream coordinates; the k-th raw word is the SplitMix64 output
/// for counter k. Any (seed, coordinates) pair therefore yields the same
/// sequence no matter which thread evaluates it or in which order.
///
/// Uniforms use the top 53 bits of a word. Normals use the trigonometric
/// Box-Muller transform on two consecutive uniforms; both outputs are used,
/// cosine branch first.
class CounterStream final : public RandomSource {
 public:
  CounterStream(std::uint64_t master_seed, const StreamCoordinates& coords);

  double uniform() override;
  double normal() override;

  std::uint64_t next_word();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Replays a fixed list of values. uniform() and normal() both consume the
// next entry verbatim; running past the end throws std::out_of_range.
class TapeSource final : public RandomSource {
 public:
  explicit TapeSource(std::vector<double> tape);

  double uniform() override;
  double normal() override;

  std::size_t consumed() const { return pos_; }
  std::size_t remaining() const { return tape_.size() - pos_; }

 private:
  double next();

  std::vector<double> tape_;
  std::size_t pos_ = 0;
};

// Hands out the stream for a coordinate. The engine and baselines ask for one
// stream per (epoch, particle, purpose); the factory owns the run coordinate.
class StreamFactory {
 public:
  virtual ~StreamFactory() = default;

  // Returned reference stays valid until the next call from the same thread.
  virtual RandomSource& stream(std::uint64_t epoch, std::uint64_t particle,
                               StreamPurpose purpose) = 0;

  // True when streams may be requested concurrently.
  virtual bool thread_safe() const = 0;
};

class CounterStreamFactory final : public StreamFactory {
 public:
  CounterStreamFactory(std::uint64_t master_seed, std::uint64_t run);

  RandomSource& stream(std::uint64_t epoch, std::uint64_t particle,
                       StreamPurpose purpose) override;
  bool thread_safe() const override { return true; }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t run() const { return run_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t run_;
};

// Every coordinate maps to the same shared tape, so draws are consumed in the
// order the caller requests them. Only meaningful for single-threaded runs.
class TapeStreamFactory final : public StreamFactory {
 public:
  explicit TapeStreamFactory(std::vector<double> tape);

  RandomSource& stream(std::uint64_t epoch, std::uint64_t particle,
                       StreamPurpose purpose) override;
  bool thread_safe() const override { return false; }

  const TapeSource& tape() const { return tape_; }

 private:
  TapeSource tape_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rareips
