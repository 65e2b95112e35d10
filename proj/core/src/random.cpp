#include "ghne/random.hpp"

namespace ghne {

Scalar RandomSource::uniform(Scalar lo, Scalar hi) {
  return std::uniform_real_distribution<Scalar>(lo, hi)(engine_);
}

std::size_t RandomSource::index(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
}

std::vector<Scalar> RandomSource::values(std::size_t n, Scalar lo, Scalar hi) {
  std::vector<Scalar> out(n);
  for (auto& v : out) v = uniform(lo, hi);
  return out;
}

Epitome RandomSource::normalized_epitome(const Shape& shape, Scalar lo, Scalar hi) {
  return Epitome::normalized(shape, values(shape.size(), lo, hi));
}

Epitome RandomSource::epitome(const Shape& shape, Scalar lo, Scalar hi, Count max_count) {
  std::vector<Scalar> g(shape.size());
  std::vector<Count> s(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    g[i] = uniform(lo, hi);
    s[i] = index(1, max_count);
  }
  return Epitome(shape, std::move(g), std::move(s));
}

Bank RandomSource::normalized_bank(std::size_t filters, std::size_t channels, const Shape& shape,
                                   Scalar lo, Scalar hi) {
  std::vector<Epitome> members;
  for (std::size_t k = 0; k < filters * channels; ++k) {
    members.push_back(normalized_epitome(shape, lo, hi));
  }
  return Bank(filters, channels, std::move(members));
}

Model RandomSource::model(const RandomModelOptions& options) {
  const Scalar lo = options.wide_weights ? -1.5 : 0.0;
  const Scalar hi = options.wide_weights ? 1.5 : 1.0;
  const std::size_t depth = index(1, options.max_layers);
  std::size_t channels = index(1, options.max_channels);

  std::vector<LayerSpec> layers;
  for (std::size_t i = 0; i < depth; ++i) {
    LayerSpec layer;
    layer.name = "conv" + std::to_string(i + 1);
    layer.in_channels = channels;
    layer.out_filters = index(1, options.max_channels);
    std::vector<std::size_t> extents(options.rank);
    for (auto& e : extents) e = index(1, options.max_kernel);
    layer.kernel = Shape(std::move(extents));
    layer.stride.assign(options.rank, options.allow_stride_two ? index(1, 2) : 1);
    layer.weights = values(layer.out_filters * layer.in_channels * layer.kernel.size(), lo, hi);
    channels = layer.out_filters;
    layers.push_back(std::move(layer));
  }
  return Model(std::move(layers));
}

}  // namespace ghne
