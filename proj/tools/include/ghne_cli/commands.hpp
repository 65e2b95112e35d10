#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "ghne/bank.hpp"

namespace ghne::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

struct CollapseOptions {
  std::filesystem::path model;
  std::string layers;  // "A..B", "A", or empty for all
  std::filesystem::path out;
  StrideFill fill = StrideFill::kReplicate;
};

struct ApplyOptions {
  std::filesystem::path epitome;
  std::filesystem::path input;
  Crop crop = Crop::kSame;
  bool negate = false;
  std::filesystem::path out_dir;
};

struct VerifyOptions {
  std::optional<std::filesystem::path> model;
  std::size_t trials = 100;
  Scalar tol = 1e-9;
  std::uint64_t seed = 0;
  bool wide_weights = false;
  std::size_t input_size = 8;
  StrideFill fill = StrideFill::kReplicate;
};

struct StatsOptions {
  std::filesystem::path epitome;
  std::size_t bins = 32;
  std::optional<std::pair<Scalar, Scalar>> range;
  std::filesystem::path out;
};

struct RenderOptions {
  std::filesystem::path epitome;
  std::filesystem::path out_dir;
  bool pseudo_color = false;
};

struct BenchOptions {
  std::filesystem::path model;
  std::size_t input_size = 28;
  std::size_t reps = 10;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;  // CSV; stdout when empty
  StrideFill fill = StrideFill::kReplicate;
};

struct DemoOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

// Each command prints progress to `out`, diagnostics to `err`, and returns
// an exit code. Library errors map to kExitUsage.
int run_collapse(const CollapseOptions& options, std::ostream& out, std::ostream& err);
int run_apply(const ApplyOptions& options, std::ostream& out, std::ostream& err);
int run_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);
int run_stats(const StatsOptions& options, std::ostream& out, std::ostream& err);
int run_render(const RenderOptions& options, std::ostream& out, std::ostream& err);
int run_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);
int run_demo(const DemoOptions& options, std::ostream& out, std::ostream& err);

// "A..B" or "A" (1-based). Throws InvalidArgument.
std::pair<std::size_t, std::size_t> parse_layer_range(const std::string& text,
                                                      std::size_t layer_count);
Crop parse_crop(const std::string& text);
StrideFill parse_stride_fill(const std::string& text);

}  // namespace ghne::cli
