#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ghne/bank.hpp"

// Slow reference implementations. They share nothing with the fast kernels
// in epitome.cpp / bank.cpp beyond the scalar ghd().

namespace ghne::oracle {

using Tuple = std::vector<Scalar>;

struct OuterProduct {
  std::vector<std::size_t> factor_lengths;
  std::vector<Scalar> entries;  // row-major, first factor slowest

  Scalar at(std::span<const std::size_t> index) const;
};

/// Dense grid of ghd_fold over one element per factor. Needs >= 2 factors.
OuterProduct outer_product(std::span<const Tuple> factors);

/// Outer-product entries grouped by index sum k + l + ... and summed.
Tuple raw_convolve(std::span<const Tuple> factors);

/// Outer-product entries grouped by the layered index set
/// k + (L - 1 - l) + (M - 1 - m) + ... (first factor is the signal).
Tuple raw_correlate(std::span<const Tuple> factors);

/// Number of index tuples per output position (same for both groupings).
std::vector<Count> index_set_sizes(std::span<const std::size_t> lengths);

/// Layer-by-layer evaluation straight from the raw weights: every layer
/// correlates the running (g, s) feature bank with its stride-resized kernels.
Bank layered_forward(const Model& model, const Bank& input,
                     StrideFill fill = StrideFill::kReplicate);

/// Sum over every channel path and spatial tuple of ghd_fold(x, w1, w2, ...).
/// Exponential; for tiny 1-D models.
Bank brute_force_forward(const Model& model, const Bank& input,
                         StrideFill fill = StrideFill::kReplicate);

struct EquivalenceReport {
  Scalar max_abs_error = 0.0;
  Scalar max_rel_error = 0.0;
  std::uint64_t count_mismatches = 0;
  std::uint64_t entries_compared = 0;
  Scalar tolerance = 0.0;
  bool pass = true;

  // Folds another report in (max of errors, sum of counters).
  void merge(const EquivalenceReport& other);
  void observe(Scalar reference, Scalar candidate);
  void finalize();
  std::string to_string() const;
};

/// Entrywise comparison; relative error uses max(1, |reference|).
/// Shape or bookkeeping differences count every entry as a mismatch.
EquivalenceReport compare(const Bank& reference, const Bank& candidate, Scalar tol);
EquivalenceReport compare(const Epitome& reference, const Epitome& candidate, Scalar tol);

/// layered_forward vs apply(input, collapse(model)).
EquivalenceReport check_equivalence(const Model& model, const Bank& input, Scalar tol,
                                    StrideFill fill = StrideFill::kReplicate);

struct NonAssocWitness {
  Tuple x, y, z;
  Scalar discrepancy = 0.0;           // raw tuples, counts dropped
  Scalar epitome_discrepancy = 0.0;   // same triple with counts carried
  std::size_t trials = 0;
};

/// Random search for x, y, z with
/// max |(x * y) * z - x * (y * z)| > 0.1 under raw tuple convolution.
/// Throws Error if none is found within max_trials.
NonAssocWitness find_nonassoc_witness(std::uint64_t seed, std::size_t max_trials = 1000);

}  // namespace ghne::oracle
