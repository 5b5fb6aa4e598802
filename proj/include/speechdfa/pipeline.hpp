#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "speechdfa/classify.hpp"
#include "speechdfa/dfa.hpp"

namespace speechdfa {

// One segment's end-to-end result. Serializes losslessly to CSV and JSON;
// the crossover fields are empty/null unless a crossover split was requested.
struct AnalysisRecord {
  std::string clip_id;
  std::string segment_label;
  double alpha = 0.0;
  double r_squared = 0.0;
  ModeLabel mode;
  EmotionBand emotion;
  int grid_min = 0;
  int grid_max = 0;
  int scales_used = 0;
  std::optional<double> alpha_fast;
  std::optional<double> alpha_slow;
  std::optional<int> crossover_scale;
};

struct AnalyzeOptions {
  double window_seconds = 30.0;
  int grid_min = 16;
  std::optional<int> grid_max;  // default: floor(segment length / 4)
  int grid_count = 20;
  std::optional<int> crossover;
  ModeRule mode_rule;
  std::vector<EmotionBand> bands = emotion_bands();
  bool both_ends = false;
  std::optional<double> envelope_ms;
  int workers = 1;
  bool keep_curves = false;  // retain per-segment fluctuation curves
};

struct FileDiagnostic {
  std::string path;
  std::string message;
  bool failure = false;  // false for non-fatal notes (e.g. zero segments)
};

struct AnalyzeResult {
  std::vector<AnalysisRecord> records;
  std::vector<FileDiagnostic> diagnostics;
  // Parallel to records when AnalyzeOptions::keep_curves is set, else empty.
  std::vector<FluctuationCurve> curves;
  bool any_failure = false;
};

// Batch front end: for each path, ingest -> per-segment DFA -> classify.
// Records come out in deterministic order (path order, then segment ordinal)
// regardless of the worker count. Per-file errors become diagnostics and do
// not abort the batch. Throws Error when `paths` is empty.
AnalyzeResult run_analyze(const std::vector<std::string>& paths,
                          const AnalyzeOptions& options);

struct ValidateOptions {
  int trials = 50;
  std::size_t length = std::size_t{1} << 16;
  std::uint64_t seed = 0x5eed5eedULL;
  // Negative-control hook: run the suite with detrending disabled to confirm
  // the targets actually fail when the engine is broken.
  Detrend detrend = Detrend::kLinear;
};

struct ValidateTargetResult {
  std::string name;
  double target = 0.0;
  double tolerance = 0.0;
  double observed_median = 0.0;
  bool pass = false;
};

struct ValidateResult {
  std::vector<ValidateTargetResult> targets;
  int trials = 0;
  bool all_pass = false;
};

// Synthetic-oracle suite: white -> 0.5, random walk -> 1.5, 1/f -> 1.0,
// fGn(0.3) -> 0.3, fGn(0.8) -> 0.8, comparing the median DFA exponent over
// `trials` seeded realizations. Quick mode (trials < 5) widens tolerances;
// the values are documented in the README.
ValidateResult run_validate(const ValidateOptions& options);
void print_validate_report(const ValidateResult& result, std::ostream& out);

// Two-column plot data with a single header row. Curve points with F = 0 are
// skipped (log undefined); an empty input (or a curve with no usable points)
// is an error.
void emit_plot_data(const FluctuationCurve& curve, std::ostream& out);
void emit_plot_data(const std::vector<PhaseDifference>& deltas,
                    std::ostream& out);

// Lossless record serialization (doubles round-trip exactly).
std::string records_to_csv(const std::vector<AnalysisRecord>& records);
std::vector<AnalysisRecord> records_from_csv(const std::string& csv);
std::string records_to_json(const std::vector<AnalysisRecord>& records);
std::vector<AnalysisRecord> records_from_json(const std::string& json);

// Reference-table rows: clip_id, emotion, segment ordinal, reading and
// recitation exponents (the bundled fixtures/table2.csv layout).
struct PhaseTableRow {
  std::string clip_id;
  std::string emotion;
  int segment = 0;
  double reading_alpha = 0.0;
  double recitation_alpha = 0.0;
};

std::vector<PhaseTableRow> load_phase_table(const std::string& path);

// Group rows by clip (first-appearance order) and compare phases per clip.
std::vector<PhaseDifference> phase_differences(
    const std::vector<PhaseTableRow>& rows);

}  // namespace speechdfa
