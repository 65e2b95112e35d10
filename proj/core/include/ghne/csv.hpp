#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ghne/bank.hpp"
#include "ghne/stats.hpp"

namespace ghne {

// Shortest decimal that parses back to the same double.
std::string format_scalar(Scalar value);

std::string histogram_csv(const Histogram& histogram);
std::string stats_csv(const StatsReport& report);
std::string fuzziness_csv(const std::vector<LayerFuzziness>& series);

// One row per entry: filter,channel,i0..i{r-1},value with value = g/s
// (or -g/s when negate is set).
std::string features_csv(const Bank& bank, bool negate = false);

void write_csv(const Histogram& histogram, const std::filesystem::path& path);
void write_csv(const StatsReport& report, const std::filesystem::path& path);
void write_csv(const std::vector<LayerFuzziness>& series, const std::filesystem::path& path);

}  // namespace ghne
