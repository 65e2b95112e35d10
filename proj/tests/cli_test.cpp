#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "ghne/epitome_file.hpp"
#include "ghne/error.hpp"
#include "ghne/file_io.hpp"
#include "ghne/model_file.hpp"
#include "ghne/netpbm.hpp"
#include "ghne_cli/commands.hpp"
#include "property.hpp"

namespace ghne::cli {
namespace {

namespace fs = std::filesystem;

LayerSpec layer(std::size_t filters, std::size_t channels, std::size_t kernel,
                std::size_t stride, RandomSource& rng) {
  LayerSpec spec;
  spec.name = "conv";
  spec.out_filters = filters;
  spec.in_channels = channels;
  spec.kernel = Shape{kernel, kernel};
  spec.stride = {stride, stride};
  spec.weights = rng.values(filters * channels * kernel * kernel, 0.0, 1.0);
  return spec;
}

std::string directory_listing(const fs::path& dir) {
  std::string out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), dir));
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out += f.string() + '\n' + read_file(dir / f) + '\n';
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ghne_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);

    RandomSource rng(11);
    // Small stand-in with the MNIST kernel and stride layout.
    save_model(Model({layer(2, 1, 5, 1, rng), layer(2, 2, 5, 2, rng), layer(3, 2, 5, 2, rng)}),
               dir_ / "mnist.json");
    Image image{28, 28, 1, std::vector<std::uint8_t>(28 * 28)};
    for (auto& p : image.pixels) p = static_cast<std::uint8_t>(rng.index(0, 255));
    write_file_atomic(dir_ / "input.pgm", encode_netpbm(image));
  }
  void TearDown() override { fs::remove_all(dir_); }

  int collapse(const std::string& layers, const fs::path& out_path) {
    return run_collapse({dir_ / "mnist.json", layers, out_path, StrideFill::kReplicate}, out_,
                        err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST(CliParse, LayerRange) {
  EXPECT_EQ(parse_layer_range("1..3", 3), (std::pair<std::size_t, std::size_t>{1, 3}));
  EXPECT_EQ(parse_layer_range("2", 3), (std::pair<std::size_t, std::size_t>{2, 2}));
  EXPECT_EQ(parse_layer_range("", 4), (std::pair<std::size_t, std::size_t>{1, 4}));
  EXPECT_THROW(parse_layer_range("0..2", 3), InvalidArgument);
  EXPECT_THROW(parse_layer_range("1..4", 3), InvalidArgument);
  EXPECT_THROW(parse_layer_range("3..1", 3), InvalidArgument);
  EXPECT_THROW(parse_layer_range("a..b", 3), InvalidArgument);
  EXPECT_EQ(parse_crop("valid"), Crop::kValid);
  EXPECT_THROW(parse_crop("middle"), InvalidArgument);
  EXPECT_EQ(parse_stride_fill("fuzzy"), StrideFill::kFuzzy);
  EXPECT_THROW(parse_stride_fill("zero"), InvalidArgument);
}

TEST_F(Cli, CollapsePrintsShape) {
  EXPECT_EQ(collapse("1..3", dir_ / "deep.ghne"), kExitOk);
  EXPECT_NE(out_.str().find("filters=3 channels=1 shape=23x23"), std::string::npos) << out_.str();
  EXPECT_EQ(load_epitome(dir_ / "deep.ghne").shape(), (Shape{23, 23}));

  EXPECT_EQ(collapse("1..1", dir_ / "first.ghne"), kExitOk);
  EXPECT_EQ(load_epitome(dir_ / "first.ghne"), layer_to_bank(load_model(dir_ / "mnist.json").layer(0)));
}

TEST_F(Cli, CollapseErrorsExitTwoWithoutOutput) {
  EXPECT_EQ(collapse("1..9", dir_ / "deep.ghne"), kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "deep.ghne"));
  write_file_atomic(dir_ / "broken.json", R"({"version": 1, "layers": [
    {"out_filters": 2, "in_channels": 1, "kernel": [1], "stride": 1, "weights": [0.1, 0.2]},
    {"out_filters": 1, "in_channels": 3, "kernel": [1], "stride": 1, "weights": [0.1, 0.2, 0.3]}]})");
  EXPECT_EQ(run_collapse({dir_ / "broken.json", "", dir_ / "x.ghne", {}}, out_, err_), kExitUsage);
  EXPECT_NE(err_.str().find("in_channels"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(dir_ / "x.ghne"));
}

TEST_F(Cli, ApplyCropsAndNegates) {
  ASSERT_EQ(collapse("1..3", dir_ / "deep.ghne"), kExitOk);
  EXPECT_EQ(run_apply({dir_ / "deep.ghne", dir_ / "input.pgm", Crop::kSame, false, dir_ / "same"},
                      out_, err_),
            kExitOk);
  const Image same = decode_netpbm(read_file(dir_ / "same" / "f000_c00.pgm"));
  EXPECT_EQ(same.width, 28u);
  EXPECT_TRUE(fs::exists(dir_ / "same" / "f002_c00.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "same" / "features.csv"));

  EXPECT_EQ(run_apply({dir_ / "deep.ghne", dir_ / "input.pgm", Crop::kFull, true, dir_ / "full"},
                      out_, err_),
            kExitOk);
  EXPECT_EQ(decode_netpbm(read_file(dir_ / "full" / "f000_c00.pgm")).width, 50u);

  EXPECT_EQ(run_apply({dir_ / "deep.ghne", dir_ / "input.pgm", Crop::kFull, false, dir_ / "pos"},
                      out_, err_),
            kExitOk);
  std::istringstream pos(read_file(dir_ / "pos" / "features.csv"));
  std::istringstream neg(read_file(dir_ / "full" / "features.csv"));
  std::string a, b;
  std::getline(pos, a);
  std::getline(neg, b);
  std::size_t rows = 0;
  while (std::getline(pos, a) && std::getline(neg, b)) {
    const double va = std::stod(a.substr(a.rfind(',') + 1));
    const double vb = std::stod(b.substr(b.rfind(',') + 1));
    ASSERT_EQ(va, -vb);
    ++rows;
  }
  EXPECT_EQ(rows, 3u * 50 * 50);
}

TEST_F(Cli, ApplyPairingMismatchExitsTwo) {
  RandomSource rng(1);
  save_epitome(rng.normalized_bank(2, 3, Shape{3, 3}), dir_ / "three.ghne");
  EXPECT_EQ(run_apply({dir_ / "three.ghne", dir_ / "input.pgm", Crop::kSame, false, dir_ / "o"},
                      out_, err_),
            kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(Cli, VerifyIsDeterministicAndHonest) {
  VerifyOptions options;
  options.trials = 5;
  options.seed = 42;
  std::ostringstream first, second, err;
  EXPECT_EQ(run_verify(options, first, err), kExitOk);
  EXPECT_EQ(run_verify(options, second, err), kExitOk);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_NE(first.str().find("result: PASS"), std::string::npos);

  options.tol = 0.0;
  std::ostringstream strict;
  EXPECT_EQ(run_verify(options, strict, err), kExitVerifyFailed);
  EXPECT_NE(strict.str().find("FAIL"), std::string::npos);

  VerifyOptions with_model;
  with_model.model = dir_ / "mnist.json";
  with_model.trials = 3;
  with_model.input_size = 12;
  std::ostringstream model_out;
  EXPECT_EQ(run_verify(with_model, model_out, err), kExitOk) << model_out.str();
}

TEST_F(Cli, StatsWritesCsv) {
  const Bank half(1, 2, {Epitome::normalized(Shape{2}, {0.5, 0.5}),
                         Epitome(Shape{2}, {1.0, 1.5}, {2, 3})});
  save_epitome(half, dir_ / "half.ghne");
  EXPECT_EQ(run_stats({dir_ / "half.ghne", 8, std::nullopt, dir_ / "stats.csv"}, out_, err_),
            kExitOk);
  EXPECT_NE(read_file(dir_ / "stats.csv").find("aggregate,,,fuzziness,,,,0.5"), std::string::npos);
  write_file_atomic(dir_ / "junk.ghne", "not an epitome");
  EXPECT_EQ(run_stats({dir_ / "junk.ghne", 8, std::nullopt, dir_ / "junk.csv"}, out_, err_),
            kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "junk.csv"));
}

TEST_F(Cli, RenderCountsAndPseudoColor) {
  RandomSource rng(2);
  save_epitome(rng.normalized_bank(4, 3, Shape{5, 5}), dir_ / "rgb.ghne");
  EXPECT_EQ(run_render({dir_ / "rgb.ghne", dir_ / "gray", false}, out_, err_), kExitOk);
  EXPECT_EQ(run_render({dir_ / "rgb.ghne", dir_ / "color", true}, out_, err_), kExitOk);
  auto count = [](const fs::path& d, const std::string& ext) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(d)) n += e.path().extension() == ext;
    return n;
  };
  EXPECT_EQ(count(dir_ / "gray", ".pgm"), 12u);
  EXPECT_EQ(count(dir_ / "color", ".ppm"), 4u);
  EXPECT_TRUE(fs::exists(dir_ / "color" / "scaling.txt"));

  save_epitome(rng.normalized_bank(4, 2, Shape{5, 5}), dir_ / "two.ghne");
  EXPECT_EQ(run_render({dir_ / "two.ghne", dir_ / "bad", true}, out_, err_), kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "bad"));
}

TEST_F(Cli, BenchChecksThenTimes) {
  BenchOptions options;
  options.model = dir_ / "mnist.json";
  options.input_size = 12;
  options.reps = 1;
  options.out = dir_ / "bench.csv";
  EXPECT_EQ(run_bench(options, out_, err_), kExitOk) << err_.str();
  std::istringstream csv(read_file(dir_ / "bench.csv"));
  std::vector<std::string> modes;
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "mode,rep,seconds");
  while (std::getline(csv, line)) modes.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(modes, (std::vector<std::string>{"collapse", "layered", "one_step"}));
}

TEST_F(Cli, DemoIsDeterministic) {
  std::ostringstream err;
  ASSERT_EQ(run_demo({7, dir_ / "a"}, out_, err), kExitOk) << err.str();
  ASSERT_EQ(run_demo({7, dir_ / "b"}, out_, err), kExitOk) << err.str();
  EXPECT_EQ(directory_listing(dir_ / "a"), directory_listing(dir_ / "b"));
  EXPECT_EQ(load_model(dir_ / "a" / "model.json").size(), 3u);
  EXPECT_NE(read_file(dir_ / "a" / "verify.txt").find("result: PASS"), std::string::npos);
  for (const char* name : {"deep.ghne", "stats.csv", "fuzziness_by_layer.csv", "input.ppm",
                           "features/features.csv", "render/scaling.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "a" / name)) << name;
  }
}

}  // namespace
}  // namespace ghne::cli
