#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "speechdfa/audio.hpp"
#include "speechdfa/classify.hpp"
#include "speechdfa/errors.hpp"
#include "speechdfa/pipeline.hpp"
#include "speechdfa/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct AnalyzeArgs {
  std::vector<std::string> paths;
  double window_seconds = 30.0;
  int grid_min = 16;
  int grid_max = 0;  // 0 = default floor(N/4)
  int grid_count = 20;
  int crossover = 0;  // 0 = no split
  double threshold = 0.3;
  bool recitation_above = false;
  bool both_ends = false;
  double envelope_ms = 0.0;  // 0 = off
  std::string format = "csv";
  int workers = 0;  // 0 = hardware concurrency
  std::string bands_file;
  std::string curves_dir;
};

struct SynthArgs {
  std::string kind;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  double hurst = -1.0;  // <0 = unset
  bool raw = false;
};

struct ClassifyArgs {
  std::string input;  // empty = stdin
  double threshold = 0.3;
  bool recitation_above = false;
  std::string bands_file;
  std::string format = "csv";
  std::string phase_table;
};

struct ValidateArgs {
  int trials = 50;
  std::uint64_t seed = 0x5eed5eedULL;
  std::size_t length = std::size_t{1} << 16;
  bool no_detrend = false;
};

std::string sanitize_for_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return out.empty() ? std::string("clip") : out;
}

void write_raw_doubles(const std::vector<double>& samples, std::FILE* out) {
  for (double v : samples) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(std::begin(bytes), std::end(bytes));
    }
    std::fwrite(bytes, 1, sizeof(double), out);
  }
}

int command_analyze(const AnalyzeArgs& args) {
  if (args.grid_min < 4 || args.grid_max < 0 || args.grid_count < 1 ||
      args.crossover < 0 || args.workers < 0 || args.envelope_ms < 0.0 ||
      !(args.window_seconds > 0.0)) {
    std::cerr << "speechdfa: invalid analysis options\n";
    return kExitUsage;
  }
  speechdfa::AnalyzeOptions options;
  options.window_seconds = args.window_seconds;
  options.grid_min = args.grid_min;
  if (args.grid_max > 0) options.grid_max = args.grid_max;
  options.grid_count = args.grid_count;
  if (args.crossover > 0) options.crossover = args.crossover;
  options.mode_rule.threshold = args.threshold;
  options.mode_rule.recitation_below = !args.recitation_above;
  options.both_ends = args.both_ends;
  if (args.envelope_ms > 0.0) options.envelope_ms = args.envelope_ms;
  options.workers = args.workers > 0
                        ? args.workers
                        : std::max(1u, std::thread::hardware_concurrency());
  if (!args.bands_file.empty()) {
    options.bands = speechdfa::load_band_table(args.bands_file);
  }
  options.keep_curves = !args.curves_dir.empty();

  const speechdfa::AnalyzeResult result =
      speechdfa::run_analyze(args.paths, options);

  for (const auto& diag : result.diagnostics) {
    std::cerr << "speechdfa: " << diag.path << ": " << diag.message << "\n";
  }
  if (args.format == "json") {
    std::cout << speechdfa::records_to_json(result.records);
  } else {
    std::cout << speechdfa::records_to_csv(result.records);
  }

  if (!args.curves_dir.empty()) {
    std::filesystem::create_directories(args.curves_dir);
    std::map<std::string, int> name_uses;  // inputs may share a basename
    for (std::size_t i = 0; i < result.curves.size(); ++i) {
      const auto& record = result.records[i];
      const std::string stem = sanitize_for_filename(
          std::filesystem::path(record.clip_id).filename().string());
      const std::string label =
          record.segment_label.empty() ? std::to_string(i)
                                       : record.segment_label.substr(1);
      std::string name = stem + "_seg" + label;
      const int uses = name_uses[name]++;
      if (uses > 0) {
        name += "_" + std::to_string(uses + 1);
      }
      const auto path =
          std::filesystem::path(args.curves_dir) / (name + ".tsv");
      std::ofstream out(path);
      if (!out) {
        std::cerr << "speechdfa: cannot write " << path.string() << "\n";
        return kExitFailure;
      }
      speechdfa::emit_plot_data(result.curves[i], out);
    }
  }
  return result.any_failure ? kExitFailure : kExitOk;
}

int command_synth(const SynthArgs& args) {
  speechdfa::GeneratorSpec spec;
  spec.kind = speechdfa::parse_generator_kind(args.kind);
  spec.length = args.length;
  spec.seed = args.seed;
  if (args.hurst >= 0.0) {
    spec.hurst = args.hurst;
  }
  if (spec.kind == speechdfa::GeneratorKind::kFgn && !spec.hurst) {
    std::cerr << "speechdfa: --hurst is required for fgn\n";
    return kExitUsage;
  }
  if (spec.kind != speechdfa::GeneratorKind::kFgn && spec.hurst) {
    std::cerr << "speechdfa: --hurst is only meaningful for fgn\n";
    return kExitUsage;
  }
  const speechdfa::TimeSeries series = speechdfa::generate(spec);
  if (args.raw) {
    write_raw_doubles(series.samples(), stdout);
  } else {
    std::string out;
    char buf[40];
    for (double v : series.samples()) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", v);
      out += buf;
    }
    std::fputs(out.c_str(), stdout);
  }
  return kExitOk;
}

int command_classify(const ClassifyArgs& args) {
  if (!args.phase_table.empty()) {
    const auto rows = speechdfa::load_phase_table(args.phase_table);
    const auto deltas = speechdfa::phase_differences(rows);
    speechdfa::emit_plot_data(deltas, std::cout);
    return kExitOk;
  }

  std::vector<speechdfa::EmotionBand> bands =
      args.bands_file.empty() ? speechdfa::emotion_bands()
                              : speechdfa::load_band_table(args.bands_file);
  speechdfa::ModeRule rule{args.threshold, !args.recitation_above};

  std::istream* in = &std::cin;
  std::ifstream file;
  if (!args.input.empty()) {
    file.open(args.input);
    if (!file) {
      std::cerr << "speechdfa: cannot open " << args.input << "\n";
      return kExitFailure;
    }
    in = &file;
  }

  std::vector<double> alphas;
  std::string token;
  while (*in >> token) {
    try {
      std::size_t used = 0;
      const double alpha = std::stod(token, &used);
      if (used != token.size()) {
        throw std::invalid_argument(token);
      }
      alphas.push_back(alpha);
    } catch (const std::exception&) {
      std::cerr << "speechdfa: bad alpha value '" << token << "'\n";
      return kExitFailure;
    }
  }
  if (alphas.empty()) {
    std::cerr << "speechdfa: no alpha values supplied\n";
    return kExitFailure;
  }

  if (args.format == "json") {
    std::cout << "[\n";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto mode = speechdfa::classify_mode(alphas[i], rule);
      const auto emotion = speechdfa::classify_emotion(alphas[i], bands);
      char buf[200];
      std::snprintf(buf, sizeof(buf),
                    "  {\"alpha\": %.17g, \"mode\": \"%s\", \"emotion\": "
                    "\"%s\"}%s\n",
                    alphas[i], speechdfa::to_string(mode.value).c_str(),
                    emotion.name.c_str(),
                    i + 1 < alphas.size() ? "," : "");
      std::cout << buf;
    }
    std::cout << "]\n";
  } else {
    std::cout << "alpha,mode,emotion\n";
    for (double alpha : alphas) {
      const auto mode = speechdfa::classify_mode(alpha, rule);
      const auto emotion = speechdfa::classify_emotion(alpha, bands);
      char buf[120];
      std::snprintf(buf, sizeof(buf), "%.17g,%s,%s\n", alpha,
                    speechdfa::to_string(mode.value).c_str(),
                    emotion.name.c_str());
      std::cout << buf;
    }
  }
  return kExitOk;
}

int command_validate(const ValidateArgs& args) {
  speechdfa::ValidateOptions options;
  options.trials = args.trials;
  options.seed = args.seed;
  options.length = args.length;
  options.detrend = args.no_detrend ? speechdfa::Detrend::kNone
                                    : speechdfa::Detrend::kLinear;
  const speechdfa::ValidateResult result = speechdfa::run_validate(options);
  speechdfa::print_validate_report(result, std::cout);
  return result.all_pass ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DFA scaling-exponent analysis of audio and synthetic signals"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Analyze WAV clips: per-segment DFA exponent plus labels");
  analyze->add_option("paths", analyze_args.paths, "WAV files to analyze")
      ->required();
  analyze->add_option("--window-seconds", analyze_args.window_seconds,
                      "Segment window in seconds (default 30)");
  analyze->add_option("--grid-min", analyze_args.grid_min,
                      "Smallest box size in samples (default 16)");
  analyze->add_option("--grid-max", analyze_args.grid_max,
                      "Largest box size (default floor(N/4))");
  analyze->add_option("--grid-count", analyze_args.grid_count,
                      "Number of log-spaced box sizes (default 20)");
  analyze->add_option("--crossover", analyze_args.crossover,
                      "Crossover scale for the fast/slow exponent split");
  analyze->add_option("--threshold", analyze_args.threshold,
                      "Mode threshold on alpha (default 0.3)");
  analyze->add_flag("--recitation-above", analyze_args.recitation_above,
                    "Label recitation above the threshold instead of below");
  analyze->add_flag("--both-ends", analyze_args.both_ends,
                    "Tile boxes from both ends and average the passes");
  analyze->add_option("--envelope", analyze_args.envelope_ms,
                      "Preprocess with RMS envelope frames of this many ms");
  analyze->add_option("--format", analyze_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  analyze->add_option("--workers", analyze_args.workers,
                      "Worker threads (default: hardware concurrency)");
  analyze->add_option("--bands", analyze_args.bands_file,
                      "Emotion band table file (name = centroid lines)");
  analyze->add_option("--curves-dir", analyze_args.curves_dir,
                      "Write per-segment log-log plot data into this dir");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a seeded synthetic series with known exponent");
  synth->add_option("--kind", synth_args.kind,
                    "white, random_walk, one_over_f or fgn")
      ->required();
  synth->add_option("--length", synth_args.length, "Number of samples")
      ->required();
  synth->add_option("--seed", synth_args.seed, "64-bit seed (default 0)");
  synth->add_option("--hurst", synth_args.hurst,
                    "Hurst parameter in (0,1); fgn only");
  synth->add_flag("--raw", synth_args.raw,
                  "Emit raw little-endian 64-bit floats instead of CSV");

  ClassifyArgs classify_args;
  CLI::App* classify = app.add_subcommand(
      "classify", "Label alpha values (stdin or file), no audio involved");
  classify->add_option("input", classify_args.input,
                       "File of whitespace-separated alphas (default stdin)");
  classify->add_option("--threshold", classify_args.threshold,
                       "Mode threshold on alpha (default 0.3)");
  classify->add_flag("--recitation-above", classify_args.recitation_above,
                     "Label recitation above the threshold instead of below");
  classify->add_option("--bands", classify_args.bands_file,
                       "Emotion band table file (name = centroid lines)");
  classify->add_option("--format", classify_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  classify->add_option(
      "--phase-table", classify_args.phase_table,
      "Emit per-clip reading-recitation deltas from a phase table CSV");

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check the engine against synthetic known-exponent targets");
  validate->add_option("--trials", validate_args.trials,
                       "Realizations per target (default 50; <5 widens "
                       "tolerances)");
  validate->add_option("--seed", validate_args.seed,
                       "Base seed for the trial streams");
  validate->add_option("--length", validate_args.length,
                       "Samples per realization (default 65536)");
  validate->add_flag("--no-detrend", validate_args.no_detrend,
                     "Negative control: skip detrending (targets must fail)")
      ->group("");

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

  try {
    if (*analyze) return command_analyze(analyze_args);
    if (*synth) return command_synth(synth_args);
    if (*classify) return command_classify(classify_args);
    if (*validate) return command_validate(validate_args);
  } catch (const std::exception& e) {
    std::cerr << "speechdfa: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
