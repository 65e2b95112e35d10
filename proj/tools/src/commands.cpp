#include "ghne_cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "ghne/csv.hpp"
#include "ghne/epitome_file.hpp"
#include "ghne/error.hpp"
#include "ghne/file_io.hpp"
#include "ghne/model_file.hpp"
#include "ghne/netpbm.hpp"
#include "ghne/oracle.hpp"
#include "ghne/random.hpp"
#include "ghne/stats.hpp"
#include "ghne_cli/suites.hpp"

namespace ghne::cli {
namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

std::size_t parse_index(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("not a layer number: '" + std::string(text) + "'");
  }
  return value;
}

Bank random_input(RandomSource& rng, const Model& model, std::size_t extent) {
  const std::vector<std::size_t> extents(model.layer(0).kernel.rank(), extent);
  return rng.normalized_bank(model.layer(0).in_channels, 1, Shape(extents));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string verify_report(const VerifyOptions& options, const Model* model, bool& pass) {
  RandomModelOptions random_options;
  random_options.wide_weights = options.wide_weights;

  const std::vector<SuiteResult> results = {
      merged_pair_suite(options.seed, options.trials * 100, options.tol),
      associativity_suite(options.seed + 1, options.trials * 10, options.tol),
      collapse_suite(options.seed + 2, options.trials, options.tol, random_options, model,
                     options.input_size, options.fill),
      witness_suite(options.seed + 3, options.tol),
  };

  std::ostringstream text;
  text << "verify seed=" << options.seed << " trials=" << options.trials
       << " tol=" << format_scalar(options.tol) << '\n';
  pass = true;
  for (const auto& r : results) {
    text << r.name << ": " << r.detail << '\n' << "  " << r.report.to_string() << '\n';
    pass = pass && r.report.pass;
  }
  text << "result: " << (pass ? "PASS" : "FAIL") << '\n';
  return text.str();
}

LayerSpec demo_layer(RandomSource& rng, std::string name, std::size_t filters,
                     std::size_t channels, std::size_t stride) {
  LayerSpec layer;
  layer.name = std::move(name);
  layer.out_filters = filters;
  layer.in_channels = channels;
  layer.kernel = Shape{3, 3};
  layer.stride = {stride, stride};
  layer.weights = rng.values(filters * channels * 9, 0.0, 1.0);
  return layer;
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_layer_range(const std::string& text,
                                                      std::size_t layer_count) {
  std::size_t first = 1;
  std::size_t last = layer_count;
  if (!text.empty()) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      first = last = parse_index(text);
    } else {
      first = parse_index(std::string_view(text).substr(0, dots));
      last = parse_index(std::string_view(text).substr(dots + 2));
    }
  }
  if (first < 1 || first > last || last > layer_count) {
    throw InvalidArgument("layer range '" + text + "' outside 1.." + std::to_string(layer_count));
  }
  return {first, last};
}

Crop parse_crop(const std::string& text) {
  if (text == "full") return Crop::kFull;
  if (text == "same") return Crop::kSame;
  if (text == "valid") return Crop::kValid;
  throw InvalidArgument("crop must be full, same or valid, got '" + text + "'");
}

StrideFill parse_stride_fill(const std::string& text) {
  if (text == "replicate") return StrideFill::kReplicate;
  if (text == "fuzzy") return StrideFill::kFuzzy;
  throw InvalidArgument("stride fill must be replicate or fuzzy, got '" + text + "'");
}

int run_collapse(const CollapseOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Model model = load_model(options.model);
    const auto [first, last] = parse_layer_range(options.layers, model.size());
    const DeepEpitome deep = collapse(model, first, last, options.fill);
    save_epitome(deep, options.out);
    out << "layers=" << first << ".." << last << " filters=" << deep.bank.filters()
        << " channels=" << deep.bank.channels() << " shape=" << deep.effective_shape().to_string()
        << '\n';
    return kExitOk;
  });
}

int run_apply(const ApplyOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Bank deep = load_epitome(options.epitome);
    const Bank input = read_image(options.input);
    const Bank features = apply(input, deep, options.crop);

    ghne::RenderOptions render;
    render.negate = options.negate;
    // Render and format everything before touching the output directory.
    render_bank(features, render);
    const std::string csv = features_csv(features, options.negate);

    const auto images = write_images(features, options.out_dir, render);
    write_file_atomic(options.out_dir / "features.csv", csv);
    out << "features filters=" << features.filters() << " channels=" << features.channels()
        << " shape=" << features.shape().to_string() << " images=" << images.size() - 1 << '\n';
    return kExitOk;
  });
}

int run_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.trials == 0) throw InvalidArgument("--trials must be positive");
    if (!(options.tol >= 0.0)) throw InvalidArgument("--tol must be >= 0");
    std::optional<Model> model;
    if (options.model) model.emplace(load_model(*options.model));
    bool pass = false;
    out << verify_report(options, model ? &*model : nullptr, pass);
    return pass ? kExitOk : kExitVerifyFailed;
  });
}

int run_stats(const StatsOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Bank bank = load_epitome(options.epitome);
    const StatsReport report = bank_stats(bank, options.bins, options.range);
    write_csv(report, options.out);
    out << "members=" << report.members.size()
        << " aggregate_fuzziness=" << format_scalar(report.aggregate_fuzziness) << '\n';
    return kExitOk;
  });
}

int run_render(const RenderOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Bank bank = load_epitome(options.epitome);
    if (options.pseudo_color && bank.channels() != 3) {
      throw InvalidArgument("--pseudo-color needs 3 channels, bank has " +
                            std::to_string(bank.channels()));
    }
    ghne::RenderOptions render;
    render.pseudo_color = options.pseudo_color;
    const auto written = write_images(bank, options.out_dir, render);
    out << "images=" << written.size() - 1 << '\n';
    return kExitOk;
  });
}

int run_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.reps == 0) throw InvalidArgument("--reps must be positive");
    if (options.input_size == 0) throw InvalidArgument("--input-size must be positive");
    const Model model = load_model(options.model);
    RandomSource rng(options.seed);
    const Bank input = random_input(rng, model, options.input_size);

    std::vector<Bank> layer_banks;
    for (const auto& layer : model.layers()) layer_banks.push_back(layer_to_bank(layer, options.fill));

    const auto collapse_start = std::chrono::steady_clock::now();
    const DeepEpitome deep = collapse(model, model.size(), options.fill);
    const double collapse_seconds = seconds_since(collapse_start);

    const auto report = oracle::compare(forward_layers(layer_banks, input),
                                        apply(input, deep, Crop::kFull), 1e-9);
    if (!report.pass) {
      err << "bench: layered and one-step outputs disagree: " << report.to_string() << '\n';
      return kExitVerifyFailed;
    }

    std::string csv = "mode,rep,seconds\n";
    csv += "collapse,0," + format_scalar(collapse_seconds) + '\n';
    std::vector<double> layered(options.reps);
    std::vector<double> one_step(options.reps);
    for (std::size_t r = 0; r < options.reps; ++r) {
      auto start = std::chrono::steady_clock::now();
      const Bank a = forward_layers(layer_banks, input);
      layered[r] = seconds_since(start);
      start = std::chrono::steady_clock::now();
      const Bank b = apply(input, deep, Crop::kFull);
      one_step[r] = seconds_since(start);
    }
    for (std::size_t r = 0; r < options.reps; ++r) {
      csv += "layered," + std::to_string(r) + ',' + format_scalar(layered[r]) + '\n';
    }
    for (std::size_t r = 0; r < options.reps; ++r) {
      csv += "one_step," + std::to_string(r) + ',' + format_scalar(one_step[r]) + '\n';
    }

    if (options.out) {
      write_file_atomic(*options.out, csv);
      out << "outputs agree: " << report.to_string() << '\n';
    } else {
      out << csv;
    }
    return kExitOk;
  });
}

int run_demo(const DemoOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto& dir = options.out_dir;
    std::filesystem::create_directories(dir);
    RandomSource rng(options.seed);

    const Model model({demo_layer(rng, "conv1", 4, 3, 1), demo_layer(rng, "conv2", 4, 4, 2),
                       demo_layer(rng, "conv3", 2, 4, 1)});
    save_model(model, dir / "model.json");

    Image image{16, 16, 3, {}};
    image.pixels.resize(image.width * image.height * image.planes);
    for (auto& p : image.pixels) p = static_cast<std::uint8_t>(rng.index(0, 255));
    write_file_atomic(dir / "input.ppm", encode_netpbm(image));

    std::ostringstream log;
    int code = run_collapse({dir / "model.json", "", dir / "deep.ghne", StrideFill::kReplicate},
                            log, err);
    if (code == kExitOk) {
      code = run_apply({dir / "deep.ghne", dir / "input.ppm", Crop::kSame, false, dir / "features"},
                       log, err);
    }
    if (code == kExitOk) {
      VerifyOptions verify;
      verify.model = dir / "model.json";
      verify.trials = 10;
      verify.seed = options.seed;
      std::ostringstream report;
      code = run_verify(verify, report, err);
      write_file_atomic(dir / "verify.txt", report.str());
      log << report.str();
    }
    if (code == kExitOk) {
      code = run_stats({dir / "deep.ghne", 32, std::nullopt, dir / "stats.csv"}, log, err);
    }
    if (code == kExitOk) {
      write_csv(fuzziness_by_layer(model), dir / "fuzziness_by_layer.csv");
      code = run_render({dir / "deep.ghne", dir / "render", true}, log, err);
    }
    out << log.str();
    if (code == kExitOk) out << "demo written to " << dir.string() << '\n';
    return code;
  });
}

}  // namespace ghne::cli
