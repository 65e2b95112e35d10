#include "ghne_cli/suites.hpp"

#include <cstdio>

#include "ghne/error.hpp"

namespace ghne::cli {
namespace {

std::string printf_string(const char* format, auto... args) {
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

Scalar total(const std::vector<Scalar>& values) {
  Scalar sum = 0.0;
  for (Scalar v : values) sum += v;
  return sum;
}

}  // namespace

SuiteResult merged_pair_suite(std::uint64_t seed, std::size_t pairs, Scalar tol) {
  RandomSource rng(seed);
  oracle::EquivalenceReport report;
  report.tolerance = tol;
  for (std::size_t t = 0; t < pairs; ++t) {
    const auto x = rng.values(rng.index(1, 8), 0.0, 1.0);
    const auto y = rng.values(rng.index(1, 8), 0.0, 1.0);
    Scalar pairwise = 0.0;
    for (Scalar xk : x) {
      for (Scalar yl : y) pairwise += ghd(xk, yl);
    }
    const auto [closed, count] = merged_pair(total(x), x.size(), total(y), y.size());
    if (count != x.size() * y.size()) ++report.count_mismatches;
    report.observe(pairwise, closed);
  }
  report.finalize();
  // Absolute tolerance for this identity.
  report.pass = report.count_mismatches == 0 && report.max_abs_error <= tol;
  return {"merged_pair", printf_string("pairs=%zu K,L<=8 entries in [0,1], absolute tolerance", pairs),
          report};
}

SuiteResult associativity_suite(std::uint64_t seed, std::size_t triples, Scalar tol) {
  RandomSource rng(seed);
  oracle::EquivalenceReport report;
  report.tolerance = tol;
  for (std::size_t t = 0; t < triples; ++t) {
    const Epitome a = rng.epitome(Shape{rng.index(1, 8)}, -2.0, 2.0, 5);
    const Epitome b = rng.epitome(Shape{rng.index(1, 8)}, -2.0, 2.0, 5);
    const Epitome c = rng.epitome(Shape{rng.index(1, 8)}, -2.0, 2.0, 5);
    report.merge(oracle::compare(convolve(convolve(a, b), c), convolve(a, convolve(b, c)), tol));
  }
  report.finalize();
  return {"associativity", printf_string("triples=%zu length<=8 counts<=5 g in [-2,2]", triples), report};
}

SuiteResult collapse_suite(std::uint64_t seed, std::size_t trials, Scalar tol,
                           const RandomModelOptions& options, const Model* model,
                           std::size_t input_size, StrideFill fill) {
  RandomSource rng(seed);
  oracle::EquivalenceReport report;
  report.tolerance = tol;
  for (std::size_t t = 0; t < trials; ++t) {
    if (model != nullptr) {
      const std::vector<std::size_t> extents(model->layer(0).kernel.rank(), input_size);
      const Bank input = rng.normalized_bank(model->layer(0).in_channels, 1, Shape(extents));
      report.merge(oracle::check_equivalence(*model, input, tol, fill));
      continue;
    }
    const Model random_model = rng.model(options);
    std::vector<std::size_t> extents(options.rank);
    for (auto& e : extents) e = rng.index(1, 16);
    const Bank input = rng.normalized_bank(random_model.layer(0).in_channels, rng.index(1, 2),
                                           Shape(extents));
    report.merge(oracle::check_equivalence(random_model, input, tol, fill));
  }
  report.finalize();
  const std::string detail =
      model != nullptr
          ? printf_string("model with %zu layers, trials=%zu input extent %zu", model->size(),
                          trials, input_size)
          : printf_string("random models=%zu layers<=%zu channels<=%zu kernels<=%zu%s", trials,
                          options.max_layers, options.max_channels, options.max_kernel,
                          options.wide_weights ? " weights in [-1.5,1.5]" : " weights in [0,1]");
  return {"collapse", detail, report};
}

SuiteResult witness_suite(std::uint64_t seed, Scalar tol) {
  oracle::EquivalenceReport report;
  report.tolerance = tol;
  std::string detail;
  try {
    const auto w = oracle::find_nonassoc_witness(seed);
    report.entries_compared = 1;
    report.max_abs_error = report.max_rel_error = w.epitome_discrepancy;
    report.finalize();
    report.pass = report.pass && w.discrepancy > 0.1;
    detail = printf_string("trials_used=%zu raw_discrepancy=%.6e (needs > 0.1)", w.trials,
                           w.discrepancy);
  } catch (const Error& e) {
    report.pass = false;
    detail = e.what();
  }
  return {"witness", detail, report};
}

}  // namespace ghne::cli
