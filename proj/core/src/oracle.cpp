#include "ghne/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "ghne/error.hpp"
#include "ghne/random.hpp"

namespace ghne::oracle {
namespace {

void require_factors(std::span<const Tuple> factors) {
  if (factors.size() < 2) throw InvalidArgument("need at least two factors");
  for (const auto& f : factors) {
    if (f.empty()) throw InvalidArgument("factors must be non-empty");
  }
}

// Calls fn(index) for every multi-index of the given extents, last axis fastest.
void for_each_index(std::span<const std::size_t> extents,
                    const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> index(extents.size(), 0);
  while (true) {
    fn(index);
    std::size_t axis = extents.size();
    while (axis > 0) {
      --axis;
      if (++index[axis] < extents[axis]) break;
      index[axis] = 0;
      if (axis == 0) return;
    }
    if (extents.empty()) return;
  }
}

std::size_t flat_offset(std::span<const std::size_t> extents, std::span<const std::size_t> index) {
  std::size_t off = 0;
  for (std::size_t axis = 0; axis < extents.size(); ++axis) off = off * extents[axis] + index[axis];
  return off;
}

Tuple grouped_sum(std::span<const Tuple> factors, bool reverse_tail) {
  require_factors(factors);
  const OuterProduct product = outer_product(factors);
  std::size_t length = factors[0].size();
  for (std::size_t f = 1; f < factors.size(); ++f) length += factors[f].size() - 1;

  Tuple out(length, 0.0);
  for_each_index(product.factor_lengths, [&](const std::vector<std::size_t>& index) {
    std::size_t n = index[0];
    for (std::size_t f = 1; f < index.size(); ++f) {
      n += reverse_tail ? product.factor_lengths[f] - 1 - index[f] : index[f];
    }
    out[n] += product.at(index);
  });
  return out;
}

// A feature map with counts, stored without using Epitome.
struct Plane {
  std::vector<std::size_t> extents;
  std::vector<Scalar> g;
  std::vector<Count> s;
};

std::vector<Scalar> resized_kernel(const LayerSpec& layer, std::size_t filter,
                                   std::size_t channel, StrideFill fill,
                                   std::vector<std::size_t>& extents) {
  const std::size_t rank = layer.kernel.rank();
  extents.resize(rank);
  for (std::size_t axis = 0; axis < rank; ++axis) {
    extents[axis] = layer.kernel.extent(axis) * layer.stride[axis];
  }
  const std::size_t base = (filter * layer.in_channels + channel) * layer.kernel.size();
  std::vector<Scalar> out;
  std::vector<std::size_t> source(rank);
  for_each_index(extents, [&](const std::vector<std::size_t>& index) {
    bool origin = true;
    for (std::size_t axis = 0; axis < rank; ++axis) {
      source[axis] = index[axis] / layer.stride[axis];
      origin = origin && index[axis] % layer.stride[axis] == 0;
    }
    const Scalar w = layer.weights[base + flat_offset(layer.kernel.extents(), source)];
    out.push_back(fill == StrideFill::kFuzzy && !origin ? 0.5 : w);
  });
  return out;
}

Bank to_bank(std::size_t filters, std::size_t channels, std::vector<Plane>& planes) {
  std::vector<Epitome> members;
  for (auto& p : planes) {
    members.emplace_back(Shape(p.extents), std::move(p.g), std::move(p.s));
  }
  return Bank(filters, channels, std::move(members));
}

}  // namespace

Scalar OuterProduct::at(std::span<const std::size_t> index) const {
  return entries.at(flat_offset(factor_lengths, index));
}

OuterProduct outer_product(std::span<const Tuple> factors) {
  require_factors(factors);
  OuterProduct out;
  for (const auto& f : factors) out.factor_lengths.push_back(f.size());
  std::vector<Scalar> picked(factors.size());
  for_each_index(out.factor_lengths, [&](const std::vector<std::size_t>& index) {
    for (std::size_t f = 0; f < factors.size(); ++f) picked[f] = factors[f][index[f]];
    out.entries.push_back(ghd_fold(picked));
  });
  return out;
}

Tuple raw_convolve(std::span<const Tuple> factors) { return grouped_sum(factors, false); }

Tuple raw_correlate(std::span<const Tuple> factors) { return grouped_sum(factors, true); }

std::vector<Count> index_set_sizes(std::span<const std::size_t> lengths) {
  if (lengths.empty()) throw InvalidArgument("need at least one length");
  std::size_t out_length = lengths[0];
  for (std::size_t f = 1; f < lengths.size(); ++f) out_length += lengths[f] - 1;
  std::vector<Count> counts(out_length, 0);
  for_each_index(lengths, [&](const std::vector<std::size_t>& index) {
    std::size_t n = 0;
    for (std::size_t i : index) n += i;
    ++counts[n];
  });
  return counts;
}

Bank layered_forward(const Model& model, const Bank& input, StrideFill fill) {
  if (input.filters() != model.layer(0).in_channels) {
    throw ChannelMismatch("input has " + std::to_string(input.filters()) +
                          " planes, first layer expects " +
                          std::to_string(model.layer(0).in_channels));
  }
  const std::size_t channels = input.channels();
  std::size_t filters = input.filters();
  std::vector<Plane> features;
  for (const auto& e : input.members()) {
    const auto ext = e.shape().extents();
    features.push_back(Plane{{ext.begin(), ext.end()},
                             {e.g().begin(), e.g().end()},
                             {e.s().begin(), e.s().end()}});
  }

  for (const LayerSpec& layer : model.layers()) {
    std::vector<Plane> next(layer.out_filters * channels);
    std::vector<std::size_t> kext;
    for (std::size_t mb = 0; mb < layer.out_filters; ++mb) {
      for (std::size_t cx = 0; cx < channels; ++cx) {
        Plane& out = next[mb * channels + cx];
        for (std::size_t j = 0; j < filters; ++j) {
          const Plane& in = features[j * channels + cx];
          const auto kernel = resized_kernel(layer, mb, j, fill, kext);
          // Per-channel correlation into a fresh partial, then summed in
          // ascending j (the epitome sum across channels).
          Plane partial;
          for (std::size_t axis = 0; axis < in.extents.size(); ++axis) {
            partial.extents.push_back(in.extents[axis] + kext[axis] - 1);
          }
          std::size_t size = 1;
          for (std::size_t e : partial.extents) size *= e;
          partial.g.assign(size, 0.0);
          partial.s.assign(size, 0);

          std::vector<std::size_t> pos(in.extents.size());
          for_each_index(in.extents, [&](const std::vector<std::size_t>& n) {
            const std::size_t src = flat_offset(in.extents, n);
            const Scalar gn = in.g[src];
            const Count sn = in.s[src];
            for_each_index(kext, [&](const std::vector<std::size_t>& l) {
              for (std::size_t axis = 0; axis < n.size(); ++axis) {
                pos[axis] = n[axis] + (kext[axis] - 1 - l[axis]);
              }
              const Scalar w = kernel[flat_offset(kext, l)];
              // Sum over the sn summands behind gn of (x_k GHD w).
              const std::size_t dst = flat_offset(partial.extents, pos);
              partial.g[dst] += gn + static_cast<Scalar>(sn) * w - 2.0 * gn * w;
              partial.s[dst] += sn;
            });
          });

          if (out.extents.empty()) {
            out.extents = partial.extents;
            out.g.assign(size, 0.0);
            out.s.assign(size, 0);
          }
          for (std::size_t i = 0; i < size; ++i) {
            out.g[i] += partial.g[i];
            out.s[i] += partial.s[i];
          }
        }
      }
    }
    features = std::move(next);
    filters = layer.out_filters;
  }
  return to_bank(filters, channels, features);
}

Bank brute_force_forward(const Model& model, const Bank& input, StrideFill fill) {
  if (!input.is_normalized()) throw InvalidArgument("brute force needs a normalized input");
  if (input.filters() != model.layer(0).in_channels) {
    throw ChannelMismatch("input planes do not match the first layer's channels");
  }
  const std::size_t rank = input.shape().rank();
  const std::vector<std::size_t> in_ext(input.shape().extents().begin(),
                                        input.shape().extents().end());
  std::vector<std::size_t> out_ext = in_ext;

  // kernels[layer][filter * in_channels + channel]
  std::vector<std::vector<std::vector<Scalar>>> kernels(model.size());
  std::vector<std::vector<std::size_t>> kexts(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const LayerSpec& layer = model.layer(i);
    for (std::size_t m = 0; m < layer.out_filters; ++m) {
      for (std::size_t c = 0; c < layer.in_channels; ++c) {
        kernels[i].push_back(resized_kernel(layer, m, c, fill, kexts[i]));
      }
    }
    for (std::size_t axis = 0; axis < rank; ++axis) out_ext[axis] += kexts[i][axis] - 1;
  }

  const std::size_t last_filters = model.layer(model.size() - 1).out_filters;
  const std::size_t channels = input.channels();
  std::size_t out_size = 1;
  for (std::size_t e : out_ext) out_size *= e;
  std::vector<Plane> planes(last_filters * channels,
                            Plane{out_ext, std::vector<Scalar>(out_size, 0.0),
                                  std::vector<Count>(out_size, 0)});

  std::vector<Scalar> chain;
  std::function<void(std::size_t, std::size_t, std::size_t, std::vector<std::size_t>)> descend =
      [&](std::size_t layer, std::size_t channel, std::size_t cx, std::vector<std::size_t> pos) {
        if (layer == model.size()) {
          Plane& out = planes[channel * channels + cx];
          const std::size_t dst = flat_offset(out_ext, pos);
          out.g[dst] += ghd_fold(chain);
          out.s[dst] += 1;
          return;
        }
        const LayerSpec& spec = model.layer(layer);
        const auto& kext = kexts[layer];
        for (std::size_t f = 0; f < spec.out_filters; ++f) {
          const auto& kernel = kernels[layer][f * spec.in_channels + channel];
          for_each_index(kext, [&](const std::vector<std::size_t>& l) {
            std::vector<std::size_t> next = pos;
            for (std::size_t axis = 0; axis < rank; ++axis) next[axis] += kext[axis] - 1 - l[axis];
            chain.push_back(kernel[flat_offset(kext, l)]);
            descend(layer + 1, f, cx, next);
            chain.pop_back();
          });
        }
      };

  for (std::size_t cx = 0; cx < channels; ++cx) {
    for (std::size_t j = 0; j < input.filters(); ++j) {
      const Epitome& x = input.member(j, cx);
      for_each_index(in_ext, [&](const std::vector<std::size_t>& n) {
        chain.assign(1, x.g()[flat_offset(in_ext, n)]);
        descend(0, j, cx, n);
      });
    }
  }
  return to_bank(last_filters, channels, planes);
}

void EquivalenceReport::observe(Scalar reference, Scalar candidate) {
  Scalar abs_error = std::abs(reference - candidate);
  if (std::isnan(abs_error)) abs_error = std::numeric_limits<Scalar>::infinity();
  const Scalar rel_error = abs_error / std::max<Scalar>(1.0, std::abs(reference));
  max_abs_error = std::max(max_abs_error, abs_error);
  max_rel_error = std::max(max_rel_error, rel_error);
  ++entries_compared;
}

void EquivalenceReport::merge(const EquivalenceReport& other) {
  max_abs_error = std::max(max_abs_error, other.max_abs_error);
  max_rel_error = std::max(max_rel_error, other.max_rel_error);
  count_mismatches += other.count_mismatches;
  entries_compared += other.entries_compared;
  tolerance = std::max(tolerance, other.tolerance);
  pass = pass && other.pass;
}

void EquivalenceReport::finalize() {
  pass = count_mismatches == 0 && max_rel_error <= tolerance;
}

std::string EquivalenceReport::to_string() const {
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer),
                "entries=%llu count_mismatches=%llu max_abs_error=%.6e max_rel_error=%.6e "
                "tol=%.3e %s",
                static_cast<unsigned long long>(entries_compared),
                static_cast<unsigned long long>(count_mismatches), max_abs_error, max_rel_error,
                tolerance, pass ? "PASS" : "FAIL");
  return buffer;
}

EquivalenceReport compare(const Epitome& reference, const Epitome& candidate, Scalar tol) {
  EquivalenceReport report;
  report.tolerance = tol;
  if (reference.shape() != candidate.shape()) {
    report.count_mismatches = std::max(reference.size(), candidate.size());
    report.entries_compared = report.count_mismatches;
    report.max_abs_error = report.max_rel_error = std::numeric_limits<Scalar>::infinity();
    report.finalize();
    return report;
  }
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference.s()[i] != candidate.s()[i]) ++report.count_mismatches;
    report.observe(reference.g()[i], candidate.g()[i]);
  }
  report.finalize();
  return report;
}

EquivalenceReport compare(const Bank& reference, const Bank& candidate, Scalar tol) {
  EquivalenceReport report;
  report.tolerance = tol;
  if (reference.filters() != candidate.filters() ||
      reference.channels() != candidate.channels() || reference.shape() != candidate.shape()) {
    const std::size_t entries = reference.members().size() * reference.shape().size();
    report.count_mismatches = entries;
    report.entries_compared = entries;
    report.max_abs_error = report.max_rel_error = std::numeric_limits<Scalar>::infinity();
    report.finalize();
    return report;
  }
  for (std::size_t k = 0; k < reference.members().size(); ++k) {
    report.merge(compare(reference.members()[k], candidate.members()[k], tol));
  }
  report.finalize();
  return report;
}

EquivalenceReport check_equivalence(const Model& model, const Bank& input, Scalar tol,
                                    StrideFill fill) {
  if (!(tol > 0.0) && tol != 0.0) throw InvalidArgument("tolerance must be >= 0");
  const Bank layered = layered_forward(model, input, fill);
  const Bank one_step = apply(input, collapse(model, model.size(), fill), Crop::kFull);
  return compare(layered, one_step, tol);
}

namespace {

Tuple raw_pair(const Tuple& a, const Tuple& b) {
  const std::vector<Tuple> pair{a, b};
  return raw_convolve(pair);
}

Epitome as_epitome(const Tuple& t) { return Epitome::normalized(Shape{t.size()}, t); }

}  // namespace

NonAssocWitness find_nonassoc_witness(std::uint64_t seed, std::size_t max_trials) {
  RandomSource rng(seed);
  for (std::size_t trial = 1; trial <= max_trials; ++trial) {
    NonAssocWitness w;
    w.x = rng.values(rng.index(1, 4), 0.0, 1.0);
    w.y = rng.values(rng.index(1, 4), 0.0, 1.0);
    w.z = rng.values(rng.index(1, 4), 0.0, 1.0);

    const Tuple left = raw_pair(raw_pair(w.x, w.y), w.z);
    const Tuple right = raw_pair(w.x, raw_pair(w.y, w.z));
    for (std::size_t n = 0; n < left.size(); ++n) {
      w.discrepancy = std::max(w.discrepancy, std::abs(left[n] - right[n]));
    }
    if (!(w.discrepancy > 0.1)) continue;

    const Epitome ex = as_epitome(w.x);
    const Epitome ey = as_epitome(w.y);
    const Epitome ez = as_epitome(w.z);
    const EquivalenceReport counted =
        compare(convolve(convolve(ex, ey), ez), convolve(ex, convolve(ey, ez)), 0.0);
    w.epitome_discrepancy = counted.count_mismatches > 0
                                ? std::numeric_limits<Scalar>::infinity()
                                : counted.max_rel_error;
    w.trials = trial;
    return w;
  }
  throw Error("no raw non-associativity witness within " + std::to_string(max_trials) +
              " trials");
}

}  // namespace ghne::oracle
