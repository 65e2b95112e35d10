#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ghne/error.hpp"
#include "ghne_cli/commands.hpp"

using namespace ghne::cli;

namespace {

struct Flags {
  std::string crop = "same";
  std::string fill = "replicate";
  std::string model;
  bool random = false;
  std::vector<double> range;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GHD epitome algebra: collapse, apply and verify GHN layer stacks"};
  app.require_subcommand(1);
  Flags flags;

  CollapseOptions collapse_options;
  auto* collapse = app.add_subcommand("collapse", "Collapse a layer range into a deep epitome");
  collapse->add_option("--model", collapse_options.model, "Model file (JSON)")->required();
  collapse->add_option("--layers", collapse_options.layers, "Layer range A..B (1-based)");
  collapse->add_option("--out", collapse_options.out, "Output epitome file")->required();
  collapse->add_option("--stride-fill", flags.fill, "replicate or fuzzy");

  ApplyOptions apply_options;
  auto* apply = app.add_subcommand("apply", "Extract features in one step");
  apply->add_option("--epitome", apply_options.epitome, "Deep epitome file")->required();
  apply->add_option("--input", apply_options.input, "P5/P6 input image")->required();
  apply->add_option("--crop", flags.crop, "full, same or valid");
  apply->add_flag("--negate", apply_options.negate, "Emit -g/s");
  apply->add_option("--out", apply_options.out_dir, "Output directory")->required();

  VerifyOptions verify_options;
  auto* verify = app.add_subcommand("verify", "Run the oracle suites");
  auto* model_opt = verify->add_option("--model", flags.model, "Model file (JSON)");
  verify->add_flag("--random", flags.random, "Synthesize random models")->excludes(model_opt);
  verify->add_option("--trials", verify_options.trials, "Trials (default 100)");
  verify->add_option("--tol", verify_options.tol, "Relative tolerance (default 1e-9)");
  verify->add_option("--seed", verify_options.seed, "Seed (default 0)");
  verify->add_flag("--wide-weights", verify_options.wide_weights,
                   "Random weights in [-1.5, 1.5]");
  verify->add_option("--input-size", verify_options.input_size,
                     "Input extent for --model (default 8)");
  verify->add_option("--stride-fill", flags.fill, "replicate or fuzzy");

  StatsOptions stats_options;
  auto* stats = app.add_subcommand("stats", "Histograms and fuzziness of a bank");
  stats->add_option("--epitome", stats_options.epitome, "Epitome file")->required();
  stats->add_option("--bins", stats_options.bins, "Histogram bins (default 32)");
  stats->add_option("--range", flags.range, "Fixed histogram range LO HI")->expected(2);
  stats->add_option("--out", stats_options.out, "Output CSV")->required();

  RenderOptions render_options;
  auto* render = app.add_subcommand("render", "Render members as images");
  render->add_option("--epitome", render_options.epitome, "Epitome file")->required();
  render->add_option("--out", render_options.out_dir, "Output directory")->required();
  render->add_flag("--pseudo-color", render_options.pseudo_color,
                   "One colour image per filter (needs 3 channels)");

  BenchOptions bench_options;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time layered vs one-step evaluation");
  bench->add_option("--model", bench_options.model, "Model file (JSON)")->required();
  bench->add_option("--input-size", bench_options.input_size, "Input extent (default 28)");
  bench->add_option("--reps", bench_options.reps, "Repetitions (default 10)");
  bench->add_option("--seed", bench_options.seed, "Seed (default 0)");
  bench->add_option("--out", bench_out, "CSV path (stdout when omitted)");
  bench->add_option("--stride-fill", flags.fill, "replicate or fuzzy");

  DemoOptions demo_options;
  auto* demo = app.add_subcommand("demo", "End-to-end run on a random 3-layer model");
  demo->add_option("--seed", demo_options.seed, "Seed (default 0)");
  demo->add_option("--out", demo_options.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  ghne::StrideFill fill{};
  ghne::Crop crop{};
  try {
    fill = parse_stride_fill(flags.fill);
    crop = parse_crop(flags.crop);
    if (!flags.range.empty()) stats_options.range = std::pair{flags.range[0], flags.range[1]};
  } catch (const ghne::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (collapse->parsed()) {
    collapse_options.fill = fill;
    return run_collapse(collapse_options, std::cout, std::cerr);
  }
  if (apply->parsed()) {
    apply_options.crop = crop;
    return run_apply(apply_options, std::cout, std::cerr);
  }
  if (verify->parsed()) {
    if (flags.model.empty() && !flags.random) {
      std::cerr << "error: verify needs --model PATH or --random\n";
      return kExitUsage;
    }
    if (!flags.model.empty()) verify_options.model = flags.model;
    verify_options.fill = fill;
    return run_verify(verify_options, std::cout, std::cerr);
  }
  if (stats->parsed()) return run_stats(stats_options, std::cout, std::cerr);
  if (render->parsed()) return run_render(render_options, std::cout, std::cerr);
  if (bench->parsed()) {
    if (!bench_out.empty()) bench_options.out = bench_out;
    bench_options.fill = fill;
    return run_bench(bench_options, std::cout, std::cerr);
  }
  return run_demo(demo_options, std::cout, std::cerr);
}
