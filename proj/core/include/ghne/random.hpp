#pragma once

#include <cstdint>
#include <random>

#include "ghne/bank.hpp"

namespace ghne {

struct RandomModelOptions {
  std::size_t max_layers = 3;
  std::size_t max_channels = 4;
  std::size_t max_kernel = 5;
  std::size_t rank = 2;
  bool allow_stride_two = true;
  // Weights in [-1.5, 1.5] instead of [0, 1].
  bool wide_weights = false;
};

/// Deterministic generators used by verification, the demo and tests.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  Scalar uniform(Scalar lo, Scalar hi);
  std::size_t index(std::size_t lo, std::size_t hi);  // inclusive

  std::vector<Scalar> values(std::size_t n, Scalar lo, Scalar hi);
  Epitome normalized_epitome(const Shape& shape, Scalar lo = 0.0, Scalar hi = 1.0);
  Epitome epitome(const Shape& shape, Scalar lo, Scalar hi, Count max_count);
  Bank normalized_bank(std::size_t filters, std::size_t channels, const Shape& shape,
                       Scalar lo = 0.0, Scalar hi = 1.0);
  Model model(const RandomModelOptions& options);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ghne
