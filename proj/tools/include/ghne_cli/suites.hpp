#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghne/oracle.hpp"
#include "ghne/random.hpp"

namespace ghne::cli {

struct SuiteResult {
  std::string name;
  std::string detail;  // suite-specific summary, deterministic text
  oracle::EquivalenceReport report;
};

// Sum of all pairwise GHDs vs the merged-pair closed form.
SuiteResult merged_pair_suite(std::uint64_t seed, std::size_t pairs, Scalar tol);

// (a * b) * c vs a * (b * c) on random counted epitomes.
SuiteResult associativity_suite(std::uint64_t seed, std::size_t triples, Scalar tol);

// Layered evaluation vs one-step application of the collapsed bank, on
// random models or on `model` with random inputs of extent `input_size`.
SuiteResult collapse_suite(std::uint64_t seed, std::size_t trials, Scalar tol,
                           const RandomModelOptions& options, const Model* model,
                           std::size_t input_size, StrideFill fill);

// Raw tuple convolution loses counts and is not associative; the counted
// version of the same triple is.
SuiteResult witness_suite(std::uint64_t seed, Scalar tol);

}  // namespace ghne::cli
