#include "speechdfa/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "speechdfa/audio.hpp"
#include "speechdfa/errors.hpp"
#include "speechdfa/numeric.hpp"
#include "speechdfa/rng.hpp"
#include "speechdfa/synth.hpp"

namespace speechdfa {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_plot(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error("pipeline: bad " + what + " value '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error("pipeline: bad " + what + " value '" + s + "'");
  }
  return static_cast<int>(v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Minimal RFC4180 reader: quoted fields may contain commas, quotes and
// newlines.
std::vector<std::vector<std::string>> csv_parse(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
          any = false;
        }
        break;
      default:
        field += c;
        any = true;
        break;
    }
  }
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

constexpr const char* kRecordHeader =
    "clip_id,segment_label,alpha,r_squared,mode,threshold,emotion,"
    "emotion_centroid,grid_min,grid_max,scales_used,alpha_fast,alpha_slow,"
    "crossover_scale";

struct FileOutcome {
  std::vector<AnalysisRecord> records;
  std::vector<FluctuationCurve> curves;
  std::string error;
  bool failed = false;
  bool zero_segments = false;
};

// ingest, with the optional RMS-envelope preprocessing spliced in between
// mixdown and segmentation.
std::vector<std::pair<Segment, TimeSeries>> ingest_preprocessed(
    const std::string& path, const AnalyzeOptions& options) {
  if (!options.envelope_ms) {
    return ingest(path, options.window_seconds);
  }
  const DecodedWav decoded = decode_wav_file(path);
  TimeSeries series(mixdown(decoded.channels),
                    static_cast<double>(decoded.info.sample_rate_hz), path);
  series = envelope(series, *options.envelope_ms);
  std::vector<std::pair<Segment, TimeSeries>> pieces;
  for (const Segment& seg : segment(series, options.window_seconds)) {
    pieces.emplace_back(seg, extract(series, seg));
  }
  return pieces;
}

FileOutcome analyze_one_file(const std::string& path,
                             const AnalyzeOptions& options) {
  FileOutcome outcome;
  const auto pieces = ingest_preprocessed(path, options);
  if (pieces.empty()) {
    outcome.zero_segments = true;
    return outcome;
  }

  DfaOptions dfa_options;
  dfa_options.tiling =
      options.both_ends ? Tiling::kBothEnds : Tiling::kStartOnly;
  dfa_options.crossover_scale = options.crossover;

  for (const auto& [seg, piece] : pieces) {
    const std::vector<double> profile = integrate_profile(piece);
    const ScaleGrid grid = default_scale_grid(
        piece.size(), options.grid_min, options.grid_max, options.grid_count);
    const FluctuationCurve curve =
        fluctuation_function(profile, grid, dfa_options.tiling);
    const ScalingReport report =
        options.crossover ? split_scaling_exponents(curve, *options.crossover)
                          : fit_scaling_exponent(curve);

    AnalysisRecord record;
    record.clip_id = path;
    record.segment_label = "#" + std::to_string(seg.label);
    record.alpha = report.alpha;
    record.r_squared = report.r_squared;
    record.mode = classify_mode(report.alpha, options.mode_rule);
    record.emotion = classify_emotion(report.alpha, options.bands);
    record.grid_min = grid.min_scale();
    record.grid_max = grid.max_scale();
    int usable = 0;
    for (const auto& p : curve.points) {
      if (p.f > 0.0) ++usable;
    }
    record.scales_used = usable;
    record.alpha_fast = report.alpha_fast;
    record.alpha_slow = report.alpha_slow;
    record.crossover_scale = report.crossover_scale;
    outcome.records.push_back(std::move(record));
    if (options.keep_curves) {
      outcome.curves.push_back(curve);
    }
  }
  return outcome;
}

}  // namespace

AnalyzeResult run_analyze(const std::vector<std::string>& paths,
                          const AnalyzeOptions& options) {
  if (paths.empty()) {
    throw Error("analyze: no input files");
  }
  if (options.workers < 1) {
    throw Error("analyze: worker count must be at least 1");
  }
  if (options.bands.empty()) {
    throw Error("analyze: band table is empty");
  }

  std::vector<FileOutcome> outcomes(paths.size());
  auto process = [&](std::size_t idx) {
    try {
      outcomes[idx] = analyze_one_file(paths[idx], options);
    } catch (const std::exception& e) {
      outcomes[idx].failed = true;
      outcomes[idx].error = e.what();
    }
  };

  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(options.workers), paths.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      process(i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < paths.size();
             i = next.fetch_add(1)) {
          process(i);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  // Flush per-file results in input order so output is byte-identical
  // regardless of the worker count.
  AnalyzeResult result;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    FileOutcome& outcome = outcomes[i];
    if (outcome.failed) {
      result.diagnostics.push_back(FileDiagnostic{paths[i], outcome.error,
                                                  true});
      result.any_failure = true;
      continue;
    }
    if (outcome.zero_segments) {
      result.diagnostics.push_back(FileDiagnostic{
          paths[i],
          "no segments: clip is shorter than the analysis window", false});
      continue;
    }
    for (auto& record : outcome.records) {
      result.records.push_back(std::move(record));
    }
    for (auto& curve : outcome.curves) {
      result.curves.push_back(std::move(curve));
    }
  }
  return result;
}

namespace {

struct ValidateTarget {
  std::string name;
  GeneratorKind kind;
  std::optional<double> hurst;
  double target;
  double tolerance_full;
  double tolerance_quick;
};

// Quick-mode tolerances reflect the measured single-realization spread at
// N = 2^16 (see README); the full tolerances are the acceptance windows.
const ValidateTarget kValidateTargets[] = {
    {"white", GeneratorKind::kWhite, std::nullopt, 0.5, 0.05, 0.10},
    {"random_walk", GeneratorKind::kRandomWalk, std::nullopt, 1.5, 0.10, 0.15},
    {"one_over_f", GeneratorKind::kOneOverF, std::nullopt, 1.0, 0.10, 0.15},
    {"fgn(H=0.3)", GeneratorKind::kFgn, 0.3, 0.3, 0.05, 0.10},
    {"fgn(H=0.8)", GeneratorKind::kFgn, 0.8, 0.8, 0.05, 0.10},
};

constexpr int kQuickModeTrials = 5;  // below this, quick tolerances apply

// Per-trial stream seed: documented in the README so runs are replayable.
std::uint64_t trial_seed(std::uint64_t base, std::size_t target_index,
                         int trial) {
  SplitMix64 rng(base + 0x100000001B3ull * target_index +
                 static_cast<std::uint64_t>(trial));
  return rng.next_u64();
}

}  // namespace

ValidateResult run_validate(const ValidateOptions& options) {
  if (options.trials < 1) {
    throw Error("validate: trial count must be at least 1");
  }
  if (options.length < 64) {
    throw Error("validate: series length too short for the default grid");
  }

  ValidateResult result;
  result.trials = options.trials;
  const bool quick = options.trials < kQuickModeTrials;

  std::size_t index = 0;
  for (const ValidateTarget& target : kValidateTargets) {
    std::vector<double> alphas;
    alphas.reserve(static_cast<std::size_t>(options.trials));
    for (int trial = 0; trial < options.trials; ++trial) {
      GeneratorSpec spec;
      spec.kind = target.kind;
      spec.length = options.length;
      spec.seed = trial_seed(options.seed, index, trial);
      spec.hurst = target.hurst;
      const TimeSeries series = generate(spec);
      const ScaleGrid grid = default_scale_grid(series.size());
      DfaOptions dfa_options;
      dfa_options.detrend = options.detrend;
      alphas.push_back(dfa(series, grid, dfa_options).alpha);
    }
    ValidateTargetResult entry;
    entry.name = target.name;
    entry.target = target.target;
    entry.tolerance = quick ? target.tolerance_quick : target.tolerance_full;
    entry.observed_median = median(std::move(alphas));
    entry.pass = std::abs(entry.observed_median - entry.target) <=
                 entry.tolerance;
    result.targets.push_back(std::move(entry));
    ++index;
  }
  result.all_pass = true;
  for (const auto& t : result.targets) {
    result.all_pass = result.all_pass && t.pass;
  }
  return result;
}

void print_validate_report(const ValidateResult& result, std::ostream& out) {
  int passed = 0;
  for (const auto& t : result.targets) {
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%-12s observed median %+.4f  target %+.2f +/- %.2f  %s",
                  t.name.c_str(), t.observed_median, t.target, t.tolerance,
                  t.pass ? "PASS" : "FAIL");
    out << line << "\n";
    if (t.pass) ++passed;
  }
  out << passed << "/" << result.targets.size()
      << " targets within tolerance over " << result.trials
      << " trial(s) each\n";
}

void emit_plot_data(const FluctuationCurve& curve, std::ostream& out) {
  if (curve.points.empty()) {
    throw Error("plot: fluctuation curve is empty");
  }
  std::string body;
  std::size_t usable = 0;
  for (const auto& p : curve.points) {
    if (p.f <= 0.0) continue;
    body += fmt_plot(std::log10(static_cast<double>(p.n)));
    body += '\t';
    body += fmt_plot(std::log10(p.f));
    body += '\n';
    ++usable;
  }
  if (usable == 0) {
    throw Error("plot: curve has no positive fluctuation values");
  }
  out << "log10_n\tlog10_F\n" << body;
}

void emit_plot_data(const std::vector<PhaseDifference>& deltas,
                    std::ostream& out) {
  if (deltas.empty()) {
    throw Error("plot: no phase differences to emit");
  }
  out << "clip_id\tdelta\n";
  for (const auto& d : deltas) {
    out << d.clip_id << '\t' << fmt_plot(d.delta) << '\n';
  }
}

std::string records_to_csv(const std::vector<AnalysisRecord>& records) {
  std::string out = kRecordHeader;
  out += '\n';
  for (const auto& r : records) {
    out += csv_escape(r.clip_id);
    out += ',';
    out += csv_escape(r.segment_label);
    out += ',';
    out += fmt_double(r.alpha);
    out += ',';
    out += fmt_double(r.r_squared);
    out += ',';
    out += to_string(r.mode.value);
    out += ',';
    out += fmt_double(r.mode.threshold_used);
    out += ',';
    out += csv_escape(r.emotion.name);
    out += ',';
    out += fmt_double(r.emotion.centroid);
    out += ',';
    out += std::to_string(r.grid_min);
    out += ',';
    out += std::to_string(r.grid_max);
    out += ',';
    out += std::to_string(r.scales_used);
    out += ',';
    out += r.alpha_fast ? fmt_double(*r.alpha_fast) : "";
    out += ',';
    out += r.alpha_slow ? fmt_double(*r.alpha_slow) : "";
    out += ',';
    out += r.crossover_scale ? std::to_string(*r.crossover_scale) : "";
    out += '\n';
  }
  return out;
}

std::vector<AnalysisRecord> records_from_csv(const std::string& csv) {
  const auto rows = csv_parse(csv);
  if (rows.empty()) {
    throw Error("pipeline: empty record CSV");
  }
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    if (i) header += ',';
    header += rows[0][i];
  }
  if (header != kRecordHeader) {
    throw Error("pipeline: unexpected record CSV header: " + header);
  }
  std::vector<AnalysisRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 14) {
      throw Error("pipeline: record CSV row " + std::to_string(i) + " has " +
                  std::to_string(row.size()) + " fields, expected 14");
    }
    AnalysisRecord r;
    r.clip_id = row[0];
    r.segment_label = row[1];
    r.alpha = parse_double(row[2], "alpha");
    r.r_squared = parse_double(row[3], "r_squared");
    r.mode.value = parse_speech_mode(row[4]);
    r.mode.threshold_used = parse_double(row[5], "threshold");
    r.emotion.name = row[6];
    r.emotion.centroid = parse_double(row[7], "emotion_centroid");
    r.grid_min = parse_int(row[8], "grid_min");
    r.grid_max = parse_int(row[9], "grid_max");
    r.scales_used = parse_int(row[10], "scales_used");
    if (!row[11].empty()) r.alpha_fast = parse_double(row[11], "alpha_fast");
    if (!row[12].empty()) r.alpha_slow = parse_double(row[12], "alpha_slow");
    if (!row[13].empty()) {
      r.crossover_scale = parse_int(row[13], "crossover_scale");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string records_to_json(const std::vector<AnalysisRecord>& records) {
  nlohmann::json array = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json obj;
    obj["clip_id"] = r.clip_id;
    obj["segment_label"] = r.segment_label;
    obj["alpha"] = r.alpha;
    obj["r_squared"] = r.r_squared;
    obj["mode"] = to_string(r.mode.value);
    obj["threshold"] = r.mode.threshold_used;
    obj["emotion"] = r.emotion.name;
    obj["emotion_centroid"] = r.emotion.centroid;
    obj["grid_min"] = r.grid_min;
    obj["grid_max"] = r.grid_max;
    obj["scales_used"] = r.scales_used;
    obj["alpha_fast"] =
        r.alpha_fast ? nlohmann::json(*r.alpha_fast) : nlohmann::json();
    obj["alpha_slow"] =
        r.alpha_slow ? nlohmann::json(*r.alpha_slow) : nlohmann::json();
    obj["crossover_scale"] = r.crossover_scale
                                 ? nlohmann::json(*r.crossover_scale)
                                 : nlohmann::json();
    array.push_back(std::move(obj));
  }
  return array.dump(2) + "\n";
}

std::vector<AnalysisRecord> records_from_json(const std::string& json) {
  nlohmann::json array;
  try {
    array = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("pipeline: bad record JSON: ") + e.what());
  }
  if (!array.is_array()) {
    throw Error("pipeline: record JSON must be an array");
  }
  std::vector<AnalysisRecord> records;
  records.reserve(array.size());
  for (const auto& obj : array) {
    AnalysisRecord r;
    r.clip_id = obj.at("clip_id").get<std::string>();
    r.segment_label = obj.at("segment_label").get<std::string>();
    r.alpha = obj.at("alpha").get<double>();
    r.r_squared = obj.at("r_squared").get<double>();
    r.mode.value = parse_speech_mode(obj.at("mode").get<std::string>());
    r.mode.threshold_used = obj.at("threshold").get<double>();
    r.emotion.name = obj.at("emotion").get<std::string>();
    r.emotion.centroid = obj.at("emotion_centroid").get<double>();
    r.grid_min = obj.at("grid_min").get<int>();
    r.grid_max = obj.at("grid_max").get<int>();
    r.scales_used = obj.at("scales_used").get<int>();
    if (!obj.at("alpha_fast").is_null()) {
      r.alpha_fast = obj.at("alpha_fast").get<double>();
    }
    if (!obj.at("alpha_slow").is_null()) {
      r.alpha_slow = obj.at("alpha_slow").get<double>();
    }
    if (!obj.at("crossover_scale").is_null()) {
      r.crossover_scale = obj.at("crossover_scale").get<int>();
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PhaseTableRow> load_phase_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("pipeline: cannot open phase table: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text;
  // Strip comment lines before CSV parsing.
  std::istringstream lines(buffer.str());
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] == '#') continue;
    text += line;
    text += '\n';
  }

  const auto rows = csv_parse(text);
  if (rows.empty()) {
    throw Error("pipeline: phase table " + path + " is empty");
  }
  const std::vector<std::string> expected = {
      "clip_id", "emotion", "segment", "reading_alpha", "recitation_alpha"};
  if (rows[0] != expected) {
    throw Error("pipeline: phase table " + path +
                " must start with header clip_id,emotion,segment,"
                "reading_alpha,recitation_alpha");
  }
  std::vector<PhaseTableRow> table;
  table.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 5) {
      throw Error("pipeline: phase table row " + std::to_string(i) + " has " +
                  std::to_string(row.size()) + " fields, expected 5");
    }
    PhaseTableRow entry;
    entry.clip_id = row[0];
    entry.emotion = row[1];
    entry.segment = parse_int(row[2], "segment");
    entry.reading_alpha = parse_double(row[3], "reading_alpha");
    entry.recitation_alpha = parse_double(row[4], "recitation_alpha");
    table.push_back(std::move(entry));
  }
  return table;
}

std::vector<PhaseDifference> phase_differences(
    const std::vector<PhaseTableRow>& rows) {
  std::vector<std::string> order;
  for (const auto& row : rows) {
    bool seen = false;
    for (const auto& id : order) {
      if (id == row.clip_id) {
        seen = true;
        break;
      }
    }
    if (!seen) order.push_back(row.clip_id);
  }
  std::vector<PhaseDifference> deltas;
  deltas.reserve(order.size());
  for (const auto& id : order) {
    std::vector<double> reading, recitation;
    for (const auto& row : rows) {
      if (row.clip_id != id) continue;
      reading.push_back(row.reading_alpha);
      recitation.push_back(row.recitation_alpha);
    }
    deltas.push_back(compare_phases(reading, recitation, id));
  }
  return deltas;
}

}  // namespace speechdfa
