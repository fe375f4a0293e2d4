#include "rareips/rng.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>

namespace rareips {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t derive_key(std::uint64_t seed, const StreamCoordinates& c) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ c.run);
  k = splitmix64(k ^ c.epoch);
  k = splitmix64(k ^ c.particle);
  k = splitmix64(k ^ static_cast<std::uint64_t>(c.purpose));
  return k;
}

}  // namespace

CounterStream::CounterStream(std::uint64_t master_seed,
                             const StreamCoordinates& coords)
    : key_(derive_key(master_seed, coords)) {}

std::uint64_t CounterStream::next_word() {
  return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
}

double CounterStream::uniform() {
  return static_cast<double>(next_word() >> 11) * 0x1.0p-53;
}

double CounterStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

TapeSource::TapeSource(std::vector<double> tape) : tape_(std::move(tape)) {}

double TapeSource::next() {
  if (pos_ >= tape_.size()) {
    throw std::out_of_range("random tape exhausted after " +
                            std::to_string(pos_) + " draws");
  }
  return tape_[pos_++];
}

double TapeSource::uniform() { return next(); }
double TapeSource::normal() { return next(); }

CounterStreamFactory::CounterStreamFactory(std::uint64_t master_seed,
                                           std::uint64_t run)
    : master_seed_(master_seed), run_(run) {}

RandomSource& CounterStreamFactory::stream(std::uint64_t epoch,
                                           std::uint64_t particle,
                                           StreamPurpose purpose) {
  thread_local std::optional<CounterStream> slot;
  slot.emplace(master_seed_, StreamCoordinates{run_, epoch, particle, purpose});
  return *slot;
}

TapeStreamFactory::TapeStreamFactory(std::vector<double> tape)
    : tape_(std::move(tape)) {}

RandomSource& TapeStreamFactory::stream(std::uint64_t, std::uint64_t,
                                        StreamPurpose) {
  return tape_;
}

}  // namespace rareips
