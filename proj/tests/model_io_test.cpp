#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "ghne/csv.hpp"
#include "ghne/epitome_file.hpp"
#include "ghne/error.hpp"
#include "ghne/file_io.hpp"
#include "ghne/model_file.hpp"
#include "ghne/netpbm.hpp"
#include "property.hpp"

namespace ghne {
namespace {

namespace fs = std::filesystem;
using test::for_all;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("ghne_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

FormatError::Kind decode_error_kind(std::string_view bytes) {
  try {
    decode_epitome(bytes);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode accepted malformed bytes";
  return FormatError::Kind::kParse;
}

FormatError::Kind parse_error_kind(const std::string& text) {
  try {
    parse_model(text);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "parse accepted: " << text;
  return FormatError::Kind::kInvalidHeader;
}

std::string one_layer(const std::string& body) {
  return R"({"format": "ghn-model", "version": 1, "layers": [)" + body + "]}";
}

TEST(EpitomeFile, RoundTripIsBitwise) {
  for_all(100, 100, [](RandomSource& rng) {
    std::vector<std::size_t> extents(rng.index(1, 3));
    for (auto& e : extents) e = rng.index(1, 5);
    const std::size_t m = rng.index(1, 3);
    const std::size_t c = rng.index(1, 3);
    std::vector<Epitome> members;
    for (std::size_t i = 0; i < m * c; ++i) {
      members.push_back(rng.epitome(Shape(extents), -1e6, 1e6, 1u << 30));
    }
    const Bank bank(m, c, std::move(members));
    const std::string bytes = encode_epitome(bank);
    EXPECT_EQ(decode_epitome(bytes), bank);
    EXPECT_EQ(encode_epitome(decode_epitome(bytes)), bytes);
  });
}

TEST(EpitomeFile, DistinctErrors) {
  RandomSource rng(1);
  const std::string bytes = encode_epitome(rng.normalized_bank(2, 2, Shape{3, 3}));

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error_kind(bad_magic), FormatError::Kind::kBadMagic);
  EXPECT_EQ(decode_error_kind("PNG"), FormatError::Kind::kBadMagic);
  EXPECT_EQ(decode_error_kind(""), FormatError::Kind::kTruncated);
  EXPECT_EQ(decode_error_kind(bytes.substr(0, 2)), FormatError::Kind::kTruncated);
  EXPECT_EQ(decode_error_kind(bytes.substr(0, 10)), FormatError::Kind::kTruncated);
  EXPECT_EQ(decode_error_kind(bytes.substr(0, bytes.size() - 1)), FormatError::Kind::kTruncated);
  EXPECT_EQ(decode_error_kind(bytes + "x"), FormatError::Kind::kTrailingData);

  std::string version = bytes;
  version[4] = 9;
  EXPECT_EQ(decode_error_kind(version), FormatError::Kind::kUnsupportedVersion);

  std::string zero_count = bytes;
  const std::size_t header = 4 + 4 + 8 + 8 + 4 + 2 * 8;
  for (std::size_t i = 0; i < 8; ++i) zero_count[header + 8 + i] = 0;
  EXPECT_EQ(decode_error_kind(zero_count), FormatError::Kind::kInvalidValue);
}

TEST(EpitomeFile, HugeDeclaredSizeIsRejectedBeforeAllocation) {
  RandomSource rng(2);
  std::string bytes = encode_epitome(rng.normalized_bank(1, 1, Shape{2}));
  for (std::size_t i = 0; i < 8; ++i) bytes[8 + i] = static_cast<char>(0xff);
  const auto kind = decode_error_kind(bytes);
  EXPECT_TRUE(kind == FormatError::Kind::kInvalidHeader || kind == FormatError::Kind::kTruncated);
}

TEST_F(TempDir, EpitomeFileSaveLoad) {
  RandomSource rng(3);
  const Bank bank = rng.normalized_bank(2, 3, Shape{4});
  save_epitome(bank, dir_ / "bank.ghne");
  EXPECT_EQ(load_epitome(dir_ / "bank.ghne"), bank);
  EXPECT_FALSE(fs::exists(dir_ / "bank.ghne.partial"));
  EXPECT_THROW(load_epitome(dir_ / "missing.ghne"), IoError);
}

TEST(ModelFile, RoundTripIsExact) {
  for_all(200, 20, [](RandomSource& rng) {
    RandomModelOptions options;
    options.wide_weights = true;
    const Model model = rng.model(options);
    const Model back = parse_model(model_to_json(model));
    ASSERT_EQ(back.size(), model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
      EXPECT_EQ(back.layer(i).name, model.layer(i).name);
      EXPECT_EQ(back.layer(i).kernel, model.layer(i).kernel);
      EXPECT_EQ(back.layer(i).stride, model.layer(i).stride);
      EXPECT_EQ(back.layer(i).weights, model.layer(i).weights);
    }
  });
}

TEST(ModelFile, ScalarStrideAppliesToEveryAxis) {
  const Model model = parse_model(one_layer(
      R"({"name": "c", "out_filters": 1, "in_channels": 1, "kernel": [2, 2], "stride": 2,
          "weights": [0.1, 0.2, 0.3, 0.4]})"));
  EXPECT_EQ(model.layer(0).stride, (std::vector<std::size_t>{2, 2}));
}

TEST(ModelFile, ErrorsAreClassified) {
  EXPECT_EQ(parse_error_kind("{\"version\": 1,"), FormatError::Kind::kParse);
  EXPECT_EQ(parse_error_kind(R"({"format": "other", "version": 1, "layers": []})"),
            FormatError::Kind::kInvalidHeader);
  EXPECT_EQ(parse_error_kind(R"({"version": 2, "layers": []})"),
            FormatError::Kind::kUnsupportedVersion);
  EXPECT_EQ(parse_error_kind(one_layer(
                R"({"out_filters": 1, "in_channels": 1, "kernel": [2], "stride": 1,
                    "weights": [0.1]})")),
            FormatError::Kind::kInvalidValue);
  EXPECT_EQ(parse_error_kind(one_layer(
                R"({"out_filters": 0, "in_channels": 1, "kernel": [2], "stride": 1,
                    "weights": []})")),
            FormatError::Kind::kInvalidValue);
}

TEST(ModelFile, ParseErrorCarriesPosition) {
  try {
    parse_model("{\n  \"version\": 1,\n  \"layers\": [\n}");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(ModelFile, WeightMismatchNamesTheLayer) {
  try {
    parse_model(one_layer(R"({"name": "conv7", "out_filters": 2, "in_channels": 1,
                              "kernel": [2], "stride": 1, "weights": [0.1, 0.2, 0.3]})"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("conv7"), std::string::npos) << e.what();
  }
}

TEST(ModelFile, ChainViolation) {
  const std::string text = R"({"version": 1, "layers": [
    {"name": "a", "out_filters": 2, "in_channels": 1, "kernel": [1], "stride": 1,
     "weights": [0.1, 0.2]},
    {"name": "b", "out_filters": 1, "in_channels": 3, "kernel": [1], "stride": 1,
     "weights": [0.1, 0.2, 0.3]}]})";
  EXPECT_THROW(parse_model(text), ChannelMismatch);
}

TEST_F(TempDir, WeightsFileIsResolvedNextToTheModel) {
  std::string blob;
  for (double w : {0.25, 0.5, 0.75}) {
    blob.append(reinterpret_cast<const char*>(&w), sizeof(w));
  }
  write_file_atomic(dir_ / "w.f64", blob);
  write_file_atomic(dir_ / "model.json",
                    one_layer(R"({"name": "c", "out_filters": 1, "in_channels": 1,
                                 "kernel": [3], "stride": 1, "weights_file": "w.f64"})"));
  const Model model = load_model(dir_ / "model.json");
  EXPECT_EQ(model.layer(0).weights, (std::vector<Scalar>{0.25, 0.5, 0.75}));

  write_file_atomic(dir_ / "w.f64", blob.substr(0, 12));
  EXPECT_THROW(load_model(dir_ / "model.json"), FormatError);
}

TEST(Netpbm, RoundTripAndErrors) {
  using namespace std::string_literals;
  Image image{3, 2, 3, {}};
  for (std::size_t i = 0; i < 18; ++i) image.pixels.push_back(static_cast<std::uint8_t>(i * 14));
  const std::string bytes = encode_netpbm(image);
  const Image back = decode_netpbm(bytes);
  EXPECT_EQ(back.width, 3u);
  EXPECT_EQ(back.height, 2u);
  EXPECT_EQ(back.planes, 3u);
  EXPECT_EQ(back.pixels, image.pixels);

  const Image commented = decode_netpbm("P5\n# note\n2 1\n255\n\x00\xff"s);
  EXPECT_EQ(commented.pixels, (std::vector<std::uint8_t>{0, 255}));

  auto kind_of = [](const std::string& text) {
    try {
      decode_netpbm(text);
    } catch (const FormatError& e) {
      return e.kind();
    }
    return FormatError::Kind::kParse;
  };
  EXPECT_EQ(kind_of("P3\n1 1\n255\n0 0 0"), FormatError::Kind::kUnsupportedImage);
  EXPECT_EQ(kind_of("P5\n1 1\n65535\n\x00\x00"s), FormatError::Kind::kUnsupportedImage);
  EXPECT_EQ(kind_of("P5\n4 4\n255\n\x01"), FormatError::Kind::kTruncated);
}

TEST(Netpbm, ImageToBank) {
  const Image gray{2, 1, 1, {0, 255}};
  const Bank bank = image_to_bank(gray);
  EXPECT_EQ(bank.filters(), 1u);
  EXPECT_EQ(bank.channels(), 1u);
  EXPECT_EQ(bank.shape(), (Shape{1, 2}));
  EXPECT_EQ(bank.member(0, 0).g()[1], 1.0);

  const Image color{1, 1, 3, {255, 0, 51}};
  const Bank planes = image_to_bank(color);
  EXPECT_EQ(planes.filters(), 3u);
  EXPECT_EQ(planes.member(2, 0).g()[0], 0.2);
}

TEST(Render, DegenerateMembersAreMidGray) {
  const Bank bank(1, 1, {Epitome::normalized(Shape{2, 2}, {0.3, 0.3, 0.3, 0.3})});
  const auto images = render_bank(bank, {});
  ASSERT_EQ(images.size(), 1u);
  EXPECT_EQ(images[0].image.pixels, (std::vector<std::uint8_t>(4, 128)));
  EXPECT_TRUE(images[0].scales[0].degenerate);
}

TEST(Render, GrayscaleAndPseudoColorCounts) {
  RandomSource rng(4);
  const Bank bank = rng.normalized_bank(32, 3, Shape{5, 5});
  EXPECT_EQ(render_bank(bank, {}).size(), 96u);
  RenderOptions color;
  color.pseudo_color = true;
  const auto rgb = render_bank(bank, color);
  EXPECT_EQ(rgb.size(), 32u);
  EXPECT_EQ(rgb[0].image.planes, 3u);
  EXPECT_THROW(render_bank(rng.normalized_bank(2, 2, Shape{2, 2}), color), InvalidArgument);
  EXPECT_THROW(render_bank(rng.normalized_bank(1, 1, Shape{2, 2, 2}), {}), InvalidArgument);
}

TEST(Render, ScaleSpansMinToMax) {
  const Bank bank(1, 1, {Epitome::normalized(Shape{3}, {-1.0, 0.0, 1.0})});
  const auto images = render_bank(bank, {});
  EXPECT_EQ(images[0].image.pixels, (std::vector<std::uint8_t>{0, 128, 255}));
  RenderOptions negate;
  negate.negate = true;
  EXPECT_EQ(render_bank(bank, negate)[0].image.pixels, (std::vector<std::uint8_t>{255, 128, 0}));
}

TEST(Csv, FormatsRoundTrip) {
  EXPECT_EQ(format_scalar(0.1), "0.1");
  EXPECT_EQ(std::stod(format_scalar(1.0 / 3.0)), 1.0 / 3.0);

  const Bank bank(1, 1, {Epitome(Shape{2}, {1.0, 0.5}, {2, 1})});
  EXPECT_EQ(features_csv(bank), "filter,channel,i0,value\n0,0,0,0.5\n0,0,1,0.5\n");
  EXPECT_EQ(features_csv(bank, true), "filter,channel,i0,value\n0,0,0,-0.5\n0,0,1,-0.5\n");

  const std::vector<Scalar> values = {0.0, 1.0};
  EXPECT_EQ(histogram_csv(histogram_of(values, 2)), "bin,lo,hi,count\n0,0,0.5,1\n1,0.5,1,1\n");
}

TEST(Csv, StatsHasMemberAndAggregateRows) {
  RandomSource rng(5);
  const std::string csv = stats_csv(bank_stats(rng.normalized_bank(2, 1, Shape{3}), 4));
  EXPECT_EQ(csv.rfind("scope,filter,channel,metric,bin,lo,hi,value\n", 0), 0u);
  EXPECT_NE(csv.find("member,0,0,fuzziness"), std::string::npos);
  EXPECT_NE(csv.find("aggregate"), std::string::npos);
}

}  // namespace
}  // namespace ghne
