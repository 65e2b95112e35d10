#include "ghne/ghd.hpp"

#include <string>

#include "ghne/error.hpp"

namespace ghne {
namespace {

void require_same_length(std::span<const Scalar> w, std::span<const Scalar> x) {
  if (w.size() != x.size()) {
    throw InvalidArgument("length mismatch: w has " + std::to_string(w.size()) +
                          " entries, x has " + std::to_string(x.size()));
  }
  if (w.empty()) throw InvalidArgument("mean GHD needs at least one entry");
}

}  // namespace

Scalar ghd_fold(std::span<const Scalar> values) {
  if (values.empty()) throw InvalidArgument("ghd_fold of an empty sequence");
  Scalar acc = values.front();
  for (Scalar v : values.subspan(1)) acc = ghd(acc, v);
  return acc;
}

Scalar mean_ghd(std::span<const Scalar> w, std::span<const Scalar> x) {
  require_same_length(w, x);
  Scalar total = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) total += ghd(w[l], x[l]);
  return total / static_cast<Scalar>(w.size());
}

Scalar analytic_bias(std::span<const Scalar> w, std::span<const Scalar> x) {
  require_same_length(w, x);
  Scalar sum_w = 0.0;
  Scalar sum_x = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    sum_w += w[l];
    sum_x += x[l];
  }
  return -0.5 * (sum_w + sum_x);
}

void require_finite(std::span<const Scalar> values, std::string_view what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidArgument(std::string(what) + ": non-finite value at index " +
                            std::to_string(i));
    }
  }
}

}  // namespace ghne
