#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ghne/epitome.hpp"

namespace ghne {

/// An M x C grid of equally shaped epitomes: M filters, C channels.
/// Members are stored filter-major ([m][c]).
class Bank {
 public:
  Bank(std::size_t filters, std::size_t channels, std::vector<Epitome> members);

  std::size_t filters() const noexcept { return filters_; }
  std::size_t channels() const noexcept { return channels_; }
  const Shape& shape() const noexcept { return members_.front().shape(); }

  const Epitome& member(std::size_t m, std::size_t c) const;
  const std::vector<Epitome>& members() const noexcept { return members_; }

  bool is_normalized() const noexcept;

  friend bool operator==(const Bank&, const Bank&) = default;

 private:
  std::size_t filters_;
  std::size_t channels_;
  std::vector<Epitome> members_;
};

// How a stride-s kernel is expanded to its stride-1 effective size.
enum class StrideFill {
  kReplicate,  // each weight repeated into an s-sized block per axis
  kFuzzy,      // weight at block origin, 0.5 (GHD-neutral) elsewhere
};

/// Raw weights of one GHN convolution layer, indexed [filter][channel][spatial].
struct LayerSpec {
  std::string name;
  std::size_t out_filters = 0;
  std::size_t in_channels = 0;
  Shape kernel{1};
  std::vector<std::size_t> stride;  // one per kernel axis
  std::vector<Scalar> weights;

  // Throws InvalidArgument describing the first violated invariant.
  void validate() const;

  // Kernel extents after stride resizing.
  Shape resized_kernel() const;
};

/// Ordered stack of layers obeying the chain rule
/// layers[i + 1].in_channels == layers[i].out_filters.
class Model {
 public:
  explicit Model(std::vector<LayerSpec> layers);

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  std::size_t size() const noexcept { return layers_.size(); }
  const LayerSpec& layer(std::size_t index) const { return layers_.at(index); }

 private:
  std::vector<LayerSpec> layers_;
};

/// A bank equivalent to the layers first..last (1-based, inclusive).
struct DeepEpitome {
  Bank bank;
  std::size_t first_layer = 1;
  std::size_t last_layer = 1;

  const Shape& effective_shape() const noexcept { return bank.shape(); }
};

/// Stride resizing of a row-major kernel grid. Stride 1 is the identity.
std::vector<Scalar> resize_strided(std::span<const Scalar> kernel, const Shape& shape,
                                   std::span<const std::size_t> stride,
                                   StrideFill fill = StrideFill::kReplicate);

/// Bank of normalized epitomes of the (stride-resized) layer kernels.
Bank layer_to_bank(const LayerSpec& layer, StrideFill fill = StrideFill::kReplicate);

/// Composite convolution of two kernel banks (requires a.filters() == b.channels()).
/// Output member (mb, ca) = sum over j of convolve(a[j, ca], b[mb, j]), j ascending.
Bank composite_convolve(const Bank& a, const Bank& b);

/// Same contraction with correlate: input (or feature) bank against a kernel bank.
Bank composite_correlate(const Bank& input, const Bank& kernels);

/// Collapses layers first..last (1-based, inclusive) into one deep epitome.
DeepEpitome collapse(const Model& model, std::size_t first, std::size_t last,
                     StrideFill fill = StrideFill::kReplicate);

/// Collapses layers 1..upto_layer.
DeepEpitome collapse(const Model& model, std::size_t upto_layer,
                     StrideFill fill = StrideFill::kReplicate);

/// Closed-form deep epitome extents: L_first + sum (L_i - 1) over resized kernels.
Shape collapsed_shape(const Model& model, std::size_t first, std::size_t last);

/// Layer-by-layer evaluation with the fast kernels: folds composite_correlate
/// over the layer banks starting from the input, carrying (g, s) throughout.
Bank forward_layers(const std::vector<Bank>& layer_banks, const Bank& input);
Bank forward_layers(const Model& model, const Bank& input,
                    StrideFill fill = StrideFill::kReplicate);

enum class Crop { kFull, kSame, kValid };

/// Center crop of every member to `target` (ignored for kFull). For odd
/// margins the extra entry is dropped from the high-index side.
Bank crop_bank(const Bank& bank, const Shape& target, Crop mode);

/// One-step feature extraction: composite_correlate(input, deep) then crop.
/// kSame crops to the input extent, kValid to |N - M| + 1 per axis.
Bank apply(const Bank& input, const Bank& deep, Crop crop = Crop::kFull);
Bank apply(const Bank& input, const DeepEpitome& deep, Crop crop = Crop::kFull);

}  // namespace ghne
