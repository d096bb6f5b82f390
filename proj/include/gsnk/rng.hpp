#pragma once

#include <cstdint>
#include <random>

namespace gsnk {

/// splitmix64 finalizer; used for every seed derivation in the project.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for run `run_index` of an experiment started from `base_seed`.
constexpr std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t run_index) noexcept {
  return mix64(base_seed ^ mix64(run_index + 0x5851f42d4c957f2dULL));
}

/// Well-known stream ids. Solver draws and harness draws never share a stream.
namespace streams {
inline constexpr std::uint64_t kSolver = 1;
inline constexpr std::uint64_t kProblem = 2;
inline constexpr std::uint64_t kDiagnostics = 3;
inline constexpr std::uint64_t kHarness = 4;
}  // namespace streams

/// A deterministic random stream identified by (seed, stream id).
///
/// The engine is seeded with mix64(seed ^ mix64(stream)); identical ids give
/// identical draw sequences within one build. Not thread-safe: each stream
/// is owned by exactly one run.
class RngStream {
 public:
  using result_type = std::mt19937_64::result_type;

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(mix64(seed ^ mix64(stream_id))) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }
  /// Uniform real in [lo, hi).
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace gsnk
