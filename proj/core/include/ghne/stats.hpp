#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ghne/bank.hpp"

namespace ghne {

struct MemberStats {
  std::size_t filter = 0;
  std::size_t channel = 0;
  Histogram histogram;
  Scalar fuzziness = 0.0;
};

/// Histograms and fuzziness of a bank's normalized members, plus the
/// aggregate over all members. All histograms share one range.
struct StatsReport {
  std::vector<MemberStats> members;
  Histogram aggregate;
  Scalar aggregate_fuzziness = 0.0;
};

StatsReport bank_stats(const Bank& bank, std::size_t bins,
                       std::optional<std::pair<Scalar, Scalar>> range = {});

struct LayerFuzziness {
  std::size_t layer = 0;  // 1-based; deep epitome of layers 1..layer
  Shape shape{1};
  Scalar fuzziness = 0.0;
};

/// Fuzziness of the normalized deep epitome at every depth of the model.
std::vector<LayerFuzziness> fuzziness_by_layer(const Model& model,
                                               StrideFill fill = StrideFill::kReplicate);

}  // namespace ghne
