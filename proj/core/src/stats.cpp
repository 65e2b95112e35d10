#include "ghne/stats.hpp"

#include <algorithm>

namespace ghne {

StatsReport bank_stats(const Bank& bank, std::size_t bins,
                       std::optional<std::pair<Scalar, Scalar>> range) {
  std::vector<Scalar> all;
  all.reserve(bank.members().size() * bank.shape().size());
  for (const auto& e : bank.members()) {
    for (std::size_t i = 0; i < e.size(); ++i) all.push_back(e.mean(i));
  }

  StatsReport report;
  report.aggregate = histogram_of(all, bins, range);
  // Members share the aggregate's edges so bins line up across rows.
  const std::pair<Scalar, Scalar> shared{report.aggregate.bin_edges.front(),
                                         report.aggregate.bin_edges.back()};

  for (std::size_t m = 0; m < bank.filters(); ++m) {
    for (std::size_t c = 0; c < bank.channels(); ++c) {
      const Epitome& e = bank.member(m, c);
      MemberStats stats{m, c, histogram(e, bins, shared), epitome_fuzziness(e)};
      report.members.push_back(std::move(stats));
    }
  }
  Scalar total = 0.0;
  for (Scalar v : all) total += fuzziness(v);
  report.aggregate_fuzziness = total / static_cast<Scalar>(all.size());
  return report;
}

std::vector<LayerFuzziness> fuzziness_by_layer(const Model& model, StrideFill fill) {
  std::vector<LayerFuzziness> series;
  Bank bank = layer_to_bank(model.layer(0), fill);
  for (std::size_t layer = 1; layer <= model.size(); ++layer) {
    if (layer > 1) bank = composite_convolve(bank, layer_to_bank(model.layer(layer - 1), fill));
    Scalar total = 0.0;
    std::size_t entries = 0;
    for (const auto& e : bank.members()) {
      total += epitome_fuzziness(e) * static_cast<Scalar>(e.size());
      entries += e.size();
    }
    series.push_back({layer, bank.shape(), total / static_cast<Scalar>(entries)});
  }
  return series;
}

}  // namespace ghne
