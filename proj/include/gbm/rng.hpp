#pragma once

#include <cstdint>
#include <random>

namespace gbm {

/// Reproducible stream keyed by (master seed, stream id, batch id). Streams
/// do not depend on the order in which they are created, so parallel
/// workers can each open their own.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t batch = 0;
};

/// Draws +-1 signs from the bits of a keyed mt19937_64. The engine and the
/// seed_seq mixing are fully specified by the standard, so the sign sequence
/// is portable across toolchains.
class SignStream {
 public:
  explicit SignStream(const StreamKey& key) {
    std::seed_seq seq{lo(key.seed), hi(key.seed), lo(key.stream), hi(key.stream), lo(key.batch), hi(key.batch)};
    engine_.seed(seq);
  }

  int next() {
    if (left_ == 0) {
      bits_ = engine_();
      left_ = 64;
    }
    const int sign = (bits_ & 1u) ? 1 : -1;
    bits_ >>= 1;
    --left_;
    return sign;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
  static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  std::mt19937_64 engine_;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

}  // namespace gbm
