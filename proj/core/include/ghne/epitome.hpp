#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ghne/ghd.hpp"
#include "ghne/shape.hpp"

namespace ghne {

using Count = std::uint64_t;

/// A dense grid of (g, s) pairs: g is a sum of GHD terms, s the number of
/// summands that went into it. Immutable once built.
///
/// Storage is structure-of-arrays in row-major order.
class Epitome {
 public:
  /// Validates sizes against the shape, s >= 1 and finite g.
  Epitome(Shape shape, std::vector<Scalar> g, std::vector<Count> s);

  /// Raw data (inputs, weights): g = value, s = 1 everywhere.
  static Epitome normalized(Shape shape, std::vector<Scalar> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return g_.size(); }

  std::span<const Scalar> g() const noexcept { return g_; }
  std::span<const Count> s() const noexcept { return s_; }

  // g/s at a flat offset.
  Scalar mean(std::size_t i) const { return g_[i] / static_cast<Scalar>(s_[i]); }
  bool is_normalized() const noexcept;

  friend bool operator==(const Epitome&, const Epitome&) = default;

 private:
  struct Unchecked {};
  Epitome(Unchecked, Shape shape, std::vector<Scalar> g, std::vector<Count> s);

  friend class EpitomeBuilder;

  Shape shape_;
  std::vector<Scalar> g_;
  std::vector<Count> s_;
};

/// Mutable accumulator used to build epitomes without per-entry validation.
/// Operations in this library produce results through it.
class EpitomeBuilder {
 public:
  explicit EpitomeBuilder(Shape shape);

  const Shape& shape() const noexcept { return shape_; }
  std::span<Scalar> g() noexcept { return g_; }
  std::span<Count> s() noexcept { return s_; }

  // Entrywise g += other.g, s += other.s (checked).
  void add(const Epitome& other);

  Epitome build() &&;

 private:
  Shape shape_;
  std::vector<Scalar> g_;
  std::vector<Count> s_;
};

/// (g/s, 1) at every entry. Idempotent.
Epitome normalize(const Epitome& e);

/// Merges two epitome entries: the sum of all sn*sm pairwise GHDs of any
/// split of gn into sn summands and gm into sm summands.
///   g = ghd(gn, gm) + (sm - 1) gn + (sn - 1) gm,  s = sn * sm
std::pair<Scalar, Count> merged_pair(Scalar gn, Count sn, Scalar gm, Count sm);

/// Epitome convolution: output entry c collects merged pairs (n, m) with
/// n + m = c per axis (0-based). Full extent a + b - 1. Associative and
/// commutative; this is how kernels of stacked layers compose.
Epitome convolve(const Epitome& a, const Epitome& b);

/// Hamming correlation of a signal with a kernel: output entry c collects
/// (n, m) with n + (M - 1 - m) = c per axis. This is the index set a layer
/// applies to its input. correlate(correlate(x, a), b) == correlate(x, convolve(a, b)).
Epitome correlate(const Epitome& signal, const Epitome& kernel);

/// Entrywise (g_a + g_b, s_a + s_b).
Epitome sum(const Epitome& a, const Epitome& b);

/// Fold of sum over a non-empty sequence.
Epitome sum(std::span<const Epitome> epitomes);

/// Mean over entries of fuzziness(g/s).
Scalar epitome_fuzziness(const Epitome& e);

struct Histogram {
  std::vector<Scalar> bin_edges;  // bins + 1 ascending edges
  std::vector<Count> counts;      // one per bin
  Count outside = 0;              // values outside an explicit range
};

/// Histogram of raw values. Bins are [lo, hi) with the last bin closed.
/// Default range is [min, max] of the data.
Histogram histogram_of(std::span<const Scalar> values, std::size_t bins,
                       std::optional<std::pair<Scalar, Scalar>> range = {});

/// Histogram of the normalized values g/s of an epitome.
Histogram histogram(const Epitome& e, std::size_t bins,
                    std::optional<std::pair<Scalar, Scalar>> range = {});

}  // namespace ghne
