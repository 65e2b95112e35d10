#include "ghne/epitome.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ghne/error.hpp"

namespace ghne {
namespace {

Count checked_mul(Count a, Count b) {
  Count out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw CountOverflow("summand count overflow");
  return out;
}

Count checked_add(Count a, Count b) {
  Count out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw CountOverflow("summand count overflow");
  return out;
}

// Flat output offset of every entry of `in` when placed into `out`, with
// each axis index reversed (extent - 1 - i) when `reversed` is set.
std::vector<std::size_t> placement(const Shape& in, const Shape& out, bool reversed) {
  const std::size_t rank = in.rank();
  std::vector<std::size_t> out_stride(rank, 1);
  for (std::size_t axis = rank - 1; axis > 0; --axis) {
    out_stride[axis - 1] = out_stride[axis] * out.extent(axis);
  }

  std::vector<std::size_t> result(in.size());
  std::vector<std::size_t> index(rank, 0);
  for (std::size_t flat = 0; flat < in.size(); ++flat) {
    std::size_t off = 0;
    for (std::size_t axis = 0; axis < rank; ++axis) {
      const std::size_t i = reversed ? in.extent(axis) - 1 - index[axis] : index[axis];
      off += i * out_stride[axis];
    }
    result[flat] = off;
    for (std::size_t axis = rank; axis-- > 0;) {
      if (++index[axis] < in.extent(axis)) break;
      index[axis] = 0;
    }
  }
  return result;
}

// Adds merged pairs of every (n, m) into out at placement(n) + placement(m).
void accumulate_pairs(const Epitome& a, const Epitome& b, bool reverse_b,
                      EpitomeBuilder& out) {
  const auto pa = placement(a.shape(), out.shape(), false);
  const auto pb = placement(b.shape(), out.shape(), reverse_b);
  auto g_out = out.g();
  auto s_out = out.s();
  const auto ga = a.g();
  const auto sa = a.s();
  const auto gb = b.g();
  const auto sb = b.s();

  for (std::size_t n = 0; n < a.size(); ++n) {
    const Scalar gn = ga[n];
    const Count sn = sa[n];
    const Scalar sn_real = static_cast<Scalar>(sn);
    const std::size_t base = pa[n];
    for (std::size_t m = 0; m < b.size(); ++m) {
      const Scalar gm = gb[m];
      const std::size_t o = base + pb[m];
      // ghd(gn, gm) + (sm - 1) gn + (sn - 1) gm, expanded.
      g_out[o] += static_cast<Scalar>(sb[m]) * gn + sn_real * gm - 2.0 * gn * gm;
      s_out[o] = checked_add(s_out[o], checked_mul(sn, sb[m]));
    }
  }
}

void require_same_rank(const Epitome& a, const Epitome& b) {
  if (a.shape().rank() != b.shape().rank()) {
    throw ShapeMismatch("epitome rank mismatch: " + a.shape().to_string() + " vs " +
                        b.shape().to_string());
  }
}

}  // namespace

Epitome::Epitome(Shape shape, std::vector<Scalar> g, std::vector<Count> s)
    : shape_(std::move(shape)), g_(std::move(g)), s_(std::move(s)) {
  if (g_.size() != shape_.size() || s_.size() != shape_.size()) {
    throw ShapeMismatch("epitome of shape " + shape_.to_string() + " needs " +
                        std::to_string(shape_.size()) + " entries, got g=" +
                        std::to_string(g_.size()) + " s=" + std::to_string(s_.size()));
  }
  require_finite(g_, "epitome g");
  if (std::find(s_.begin(), s_.end(), Count{0}) != s_.end()) {
    throw InvalidArgument("epitome counts must be >= 1");
  }
}

Epitome::Epitome(Unchecked, Shape shape, std::vector<Scalar> g, std::vector<Count> s)
    : shape_(std::move(shape)), g_(std::move(g)), s_(std::move(s)) {}

Epitome Epitome::normalized(Shape shape, std::vector<Scalar> values) {
  std::vector<Count> counts(values.size(), 1);
  return Epitome(std::move(shape), std::move(values), std::move(counts));
}

bool Epitome::is_normalized() const noexcept {
  return std::all_of(s_.begin(), s_.end(), [](Count c) { return c == 1; });
}

EpitomeBuilder::EpitomeBuilder(Shape shape)
    : shape_(std::move(shape)), g_(shape_.size(), 0.0), s_(shape_.size(), 0) {}

void EpitomeBuilder::add(const Epitome& other) {
  if (other.shape() != shape_) {
    throw ShapeMismatch("epitome sum needs identical shapes: " + shape_.to_string() +
                        " vs " + other.shape().to_string());
  }
  const auto g = other.g();
  const auto s = other.s();
  for (std::size_t i = 0; i < g_.size(); ++i) {
    g_[i] += g[i];
    s_[i] = checked_add(s_[i], s[i]);
  }
}

Epitome EpitomeBuilder::build() && {
  return Epitome(Epitome::Unchecked{}, std::move(shape_), std::move(g_), std::move(s_));
}

Epitome normalize(const Epitome& e) {
  std::vector<Scalar> values(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) values[i] = e.mean(i);
  return Epitome::normalized(e.shape(), std::move(values));
}

std::pair<Scalar, Count> merged_pair(Scalar gn, Count sn, Scalar gm, Count sm) {
  if (sn == 0 || sm == 0) throw InvalidArgument("merged_pair counts must be >= 1");
  const Scalar g = ghd(gn, gm) + static_cast<Scalar>(sm - 1) * gn +
                   static_cast<Scalar>(sn - 1) * gm;
  return {g, checked_mul(sn, sm)};
}

Epitome convolve(const Epitome& a, const Epitome& b) {
  require_same_rank(a, b);
  EpitomeBuilder out(full_shape(a.shape(), b.shape()));
  accumulate_pairs(a, b, false, out);
  return std::move(out).build();
}

Epitome correlate(const Epitome& signal, const Epitome& kernel) {
  require_same_rank(signal, kernel);
  EpitomeBuilder out(full_shape(signal.shape(), kernel.shape()));
  accumulate_pairs(signal, kernel, true, out);
  return std::move(out).build();
}

Epitome sum(const Epitome& a, const Epitome& b) {
  EpitomeBuilder out(a.shape());
  out.add(a);
  out.add(b);
  return std::move(out).build();
}

Epitome sum(std::span<const Epitome> epitomes) {
  if (epitomes.empty()) throw InvalidArgument("sum of an empty epitome sequence");
  EpitomeBuilder out(epitomes.front().shape());
  for (const auto& e : epitomes) out.add(e);
  return std::move(out).build();
}

Scalar epitome_fuzziness(const Epitome& e) {
  Scalar total = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) total += fuzziness(e.mean(i));
  return total / static_cast<Scalar>(e.size());
}

Histogram histogram_of(std::span<const Scalar> values, std::size_t bins,
                       std::optional<std::pair<Scalar, Scalar>> range) {
  if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
  if (values.empty()) throw InvalidArgument("histogram of an empty value set");
  require_finite(values, "histogram values");

  Scalar lo = 0.0;
  Scalar hi = 0.0;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw InvalidArgument("histogram range needs finite lo < hi");
    }
  } else {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }

  Histogram h;
  h.bin_edges.resize(bins + 1);
  const Scalar width = hi - lo;
  for (std::size_t i = 0; i < bins; ++i) {
    h.bin_edges[i] = lo + width * static_cast<Scalar>(i) / static_cast<Scalar>(bins);
  }
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);

  for (Scalar v : values) {
    if (v < lo || v > hi) {
      ++h.outside;
      continue;
    }
    auto bin = static_cast<std::size_t>((v - lo) / width * static_cast<Scalar>(bins));
    bin = std::min(bin, bins - 1);
    ++h.counts[bin];
  }
  return h;
}

Histogram histogram(const Epitome& e, std::size_t bins,
                    std::optional<std::pair<Scalar, Scalar>> range) {
  std::vector<Scalar> values(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) values[i] = e.mean(i);
  return histogram_of(values, bins, range);
}

}  // namespace ghne
