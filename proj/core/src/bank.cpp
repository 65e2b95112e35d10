#include "ghne/bank.hpp"

#include <cstdlib>
#include <optional>
#include <string>

#include "ghne/error.hpp"
#include "ghne/parallel.hpp"

namespace ghne {
namespace {

std::string layer_label(const LayerSpec& layer, std::size_t index) {
  std::string label = "layer " + std::to_string(index + 1);
  if (!layer.name.empty()) label += " (" + layer.name + ")";
  return label;
}

void require_rank(const Bank& a, const Bank& b) {
  if (a.shape().rank() != b.shape().rank()) {
    throw ShapeMismatch("bank rank mismatch: " + a.shape().to_string() + " vs " +
                        b.shape().to_string());
  }
}

// Contracts a's filters against b's channels. `op` is convolve or correlate.
template <typename Op>
Bank contract(const Bank& a, const Bank& b, Op op) {
  const std::size_t filters = b.filters();
  const std::size_t channels = a.channels();
  const std::size_t inner = a.filters();
  const Shape out_shape = full_shape(a.shape(), b.shape());

  std::vector<std::optional<Epitome>> slots(filters * channels);
  parallel_for(slots.size(), [&](std::size_t slot) {
    const std::size_t mb = slot / channels;
    const std::size_t ca = slot % channels;
    EpitomeBuilder acc(out_shape);
    for (std::size_t j = 0; j < inner; ++j) acc.add(op(a.member(j, ca), b.member(mb, j)));
    slots[slot] = std::move(acc).build();
  });

  std::vector<Epitome> members;
  members.reserve(slots.size());
  for (auto& slot : slots) members.push_back(std::move(*slot));
  return Bank(filters, channels, std::move(members));
}

}  // namespace

Bank::Bank(std::size_t filters, std::size_t channels, std::vector<Epitome> members)
    : filters_(filters), channels_(channels), members_(std::move(members)) {
  if (filters_ == 0 || channels_ == 0) {
    throw InvalidArgument("bank needs at least one filter and one channel");
  }
  if (members_.size() != filters_ * channels_) {
    throw InvalidArgument("bank " + std::to_string(filters_) + "x" +
                          std::to_string(channels_) + " needs " +
                          std::to_string(filters_ * channels_) + " members, got " +
                          std::to_string(members_.size()));
  }
  for (const auto& e : members_) {
    if (e.shape() != members_.front().shape()) {
      throw ShapeMismatch("bank members must share one shape: " +
                          members_.front().shape().to_string() + " vs " +
                          e.shape().to_string());
    }
  }
}

const Epitome& Bank::member(std::size_t m, std::size_t c) const {
  if (m >= filters_ || c >= channels_) throw InvalidArgument("bank member out of range");
  return members_[m * channels_ + c];
}

bool Bank::is_normalized() const noexcept {
  for (const auto& e : members_) {
    if (!e.is_normalized()) return false;
  }
  return true;
}

void LayerSpec::validate() const {
  const std::string label = name.empty() ? std::string("layer") : "layer " + name;
  if (out_filters == 0) throw InvalidArgument(label + ": out_filters must be >= 1");
  if (in_channels == 0) throw InvalidArgument(label + ": in_channels must be >= 1");
  if (stride.size() != kernel.rank()) {
    throw InvalidArgument(label + ": stride has " + std::to_string(stride.size()) +
                          " axes, kernel has " + std::to_string(kernel.rank()));
  }
  for (std::size_t s : stride) {
    if (s == 0) throw InvalidArgument(label + ": stride must be >= 1");
  }
  const std::size_t expected = out_filters * in_channels * kernel.size();
  if (weights.size() != expected) {
    throw InvalidArgument(label + ": expected " + std::to_string(expected) +
                          " weights (" + std::to_string(out_filters) + " x " +
                          std::to_string(in_channels) + " x " + kernel.to_string() +
                          "), got " + std::to_string(weights.size()));
  }
  require_finite(weights, label + " weights");
}

Shape LayerSpec::resized_kernel() const {
  std::vector<std::size_t> extents(kernel.rank());
  for (std::size_t axis = 0; axis < kernel.rank(); ++axis) {
    extents[axis] = kernel.extent(axis) * stride.at(axis);
  }
  return Shape(std::move(extents));
}

Model::Model(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("model needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].validate();
    if (i == 0) continue;
    const auto& prev = layers_[i - 1];
    const auto& cur = layers_[i];
    if (cur.in_channels != prev.out_filters) {
      throw ChannelMismatch(layer_label(cur, i) + " has in_channels " +
                            std::to_string(cur.in_channels) + " but " +
                            layer_label(prev, i - 1) + " has out_filters " +
                            std::to_string(prev.out_filters));
    }
    if (cur.kernel.rank() != prev.kernel.rank()) {
      throw ShapeMismatch(layer_label(cur, i) + " kernel rank differs from " +
                          layer_label(prev, i - 1));
    }
  }
}

std::vector<Scalar> resize_strided(std::span<const Scalar> kernel, const Shape& shape,
                                   std::span<const std::size_t> stride, StrideFill fill) {
  if (kernel.size() != shape.size()) {
    throw ShapeMismatch("kernel has " + std::to_string(kernel.size()) +
                        " values, shape " + shape.to_string() + " needs " +
                        std::to_string(shape.size()));
  }
  if (stride.size() != shape.rank()) throw InvalidArgument("stride rank mismatch");
  std::vector<std::size_t> out_extents(shape.rank());
  for (std::size_t axis = 0; axis < shape.rank(); ++axis) {
    if (stride[axis] == 0) throw InvalidArgument("stride must be >= 1");
    out_extents[axis] = shape.extent(axis) * stride[axis];
  }
  const Shape out_shape(out_extents);

  std::vector<Scalar> out(out_shape.size());
  std::vector<std::size_t> index(shape.rank(), 0);
  std::vector<std::size_t> source(shape.rank(), 0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    bool origin = true;
    for (std::size_t axis = 0; axis < shape.rank(); ++axis) {
      source[axis] = index[axis] / stride[axis];
      origin = origin && index[axis] % stride[axis] == 0;
    }
    out[flat] = (fill == StrideFill::kFuzzy && !origin) ? 0.5 : kernel[shape.offset(source)];
    for (std::size_t axis = shape.rank(); axis-- > 0;) {
      if (++index[axis] < out_extents[axis]) break;
      index[axis] = 0;
    }
  }
  return out;
}

Bank layer_to_bank(const LayerSpec& layer, StrideFill fill) {
  layer.validate();
  const std::size_t per_kernel = layer.kernel.size();
  const Shape resized = layer.resized_kernel();
  std::vector<Epitome> members;
  members.reserve(layer.out_filters * layer.in_channels);
  for (std::size_t k = 0; k < layer.out_filters * layer.in_channels; ++k) {
    const std::span<const Scalar> kernel(layer.weights.data() + k * per_kernel, per_kernel);
    members.push_back(
        Epitome::normalized(resized, resize_strided(kernel, layer.kernel, layer.stride, fill)));
  }
  return Bank(layer.out_filters, layer.in_channels, std::move(members));
}

Bank composite_convolve(const Bank& a, const Bank& b) {
  if (a.filters() != b.channels()) {
    throw ChannelMismatch("composite convolution needs filters of the first bank (" +
                          std::to_string(a.filters()) +
                          ") == channels of the second bank (" +
                          std::to_string(b.channels()) + ")");
  }
  require_rank(a, b);
  return contract(a, b, [](const Epitome& x, const Epitome& y) { return convolve(x, y); });
}

Bank composite_correlate(const Bank& input, const Bank& kernels) {
  if (input.filters() != kernels.channels()) {
    throw ChannelMismatch("input bank has " + std::to_string(input.filters()) +
                          " filters but kernel bank has " +
                          std::to_string(kernels.channels()) + " channels");
  }
  require_rank(input, kernels);
  return contract(input, kernels,
                  [](const Epitome& x, const Epitome& k) { return correlate(x, k); });
}

Bank forward_layers(const std::vector<Bank>& layer_banks, const Bank& input) {
  if (layer_banks.empty()) throw InvalidArgument("no layers to evaluate");
  Bank features = composite_correlate(input, layer_banks.front());
  for (std::size_t i = 1; i < layer_banks.size(); ++i) {
    features = composite_correlate(features, layer_banks[i]);
  }
  return features;
}

Bank forward_layers(const Model& model, const Bank& input, StrideFill fill) {
  std::vector<Bank> banks;
  for (const auto& layer : model.layers()) banks.push_back(layer_to_bank(layer, fill));
  return forward_layers(banks, input);
}

namespace {

void require_range(const Model& model, std::size_t first, std::size_t last) {
  if (first < 1 || last < first || last > model.size()) {
    throw InvalidArgument("layer range " + std::to_string(first) + ".." +
                          std::to_string(last) + " outside 1.." +
                          std::to_string(model.size()));
  }
}

}  // namespace

DeepEpitome collapse(const Model& model, std::size_t first, std::size_t last,
                     StrideFill fill) {
  require_range(model, first, last);
  Bank bank = layer_to_bank(model.layer(first - 1), fill);
  for (std::size_t i = first; i < last; ++i) {
    bank = composite_convolve(bank, layer_to_bank(model.layer(i), fill));
  }
  return DeepEpitome{std::move(bank), first, last};
}

DeepEpitome collapse(const Model& model, std::size_t upto_layer, StrideFill fill) {
  return collapse(model, 1, upto_layer, fill);
}

Shape collapsed_shape(const Model& model, std::size_t first, std::size_t last) {
  require_range(model, first, last);
  Shape shape = model.layer(first - 1).resized_kernel();
  for (std::size_t i = first; i < last; ++i) {
    shape = full_shape(shape, model.layer(i).resized_kernel());
  }
  return shape;
}

Bank crop_bank(const Bank& bank, const Shape& target, Crop mode) {
  if (mode == Crop::kFull) return bank;
  const Shape& source = bank.shape();
  if (target.rank() != source.rank()) {
    throw ShapeMismatch("crop target " + target.to_string() + " has a different rank than " +
                        source.to_string());
  }
  std::vector<std::size_t> low(source.rank());
  for (std::size_t axis = 0; axis < source.rank(); ++axis) {
    if (target.extent(axis) > source.extent(axis)) {
      throw InvalidArgument("crop target " + target.to_string() + " larger than source " +
                            source.to_string());
    }
    low[axis] = (source.extent(axis) - target.extent(axis)) / 2;
  }

  std::vector<Epitome> members;
  members.reserve(bank.members().size());
  std::vector<std::size_t> index(target.rank());
  std::vector<std::size_t> src(target.rank());
  for (const auto& e : bank.members()) {
    std::vector<Scalar> g(target.size());
    std::vector<Count> s(target.size());
    std::fill(index.begin(), index.end(), 0);
    for (std::size_t flat = 0; flat < target.size(); ++flat) {
      for (std::size_t axis = 0; axis < target.rank(); ++axis) {
        src[axis] = index[axis] + low[axis];
      }
      const std::size_t off = source.offset(src);
      g[flat] = e.g()[off];
      s[flat] = e.s()[off];
      for (std::size_t axis = target.rank(); axis-- > 0;) {
        if (++index[axis] < target.extent(axis)) break;
        index[axis] = 0;
      }
    }
    members.emplace_back(target, std::move(g), std::move(s));
  }
  return Bank(bank.filters(), bank.channels(), std::move(members));
}

Bank apply(const Bank& input, const Bank& deep, Crop crop) {
  if (input.filters() != deep.channels()) {
    throw ChannelMismatch("input has " + std::to_string(input.filters()) +
                          " planes but the deep epitome expects " +
                          std::to_string(deep.channels()) + " channels");
  }
  Bank features = composite_correlate(input, deep);
  if (crop == Crop::kFull) return features;

  std::vector<std::size_t> target(input.shape().rank());
  for (std::size_t axis = 0; axis < target.size(); ++axis) {
    const std::size_t n = input.shape().extent(axis);
    const std::size_t m = deep.shape().extent(axis);
    target[axis] = crop == Crop::kSame ? n : (n > m ? n - m : m - n) + 1;
  }
  return crop_bank(features, Shape(std::move(target)), crop);
}

Bank apply(const Bank& input, const DeepEpitome& deep, Crop crop) {
  return apply(input, deep.bank, crop);
}

}  // namespace ghne
