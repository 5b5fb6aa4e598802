// Acceptance suite: every release gate in one binary, one PASS/FAIL line per
// criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "speechdfa/audio.hpp"
#include "speechdfa/classify.hpp"
#include "speechdfa/dfa.hpp"
#include "speechdfa/errors.hpp"
#include "speechdfa/pipeline.hpp"
#include "speechdfa/rng.hpp"
#include "speechdfa/synth.hpp"
#include "support/naive_dfa.hpp"
#include "support/wav_builder.hpp"

using namespace speechdfa;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("%s  %d. %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fixture_path(const std::string& name) {
  return std::string(SPEECHDFA_FIXTURE_DIR) + "/" + name;
}

// ---------------------------------------------------------------------------
// 1. Synthetic-exponent recovery: median over 50 realizations at N = 2^16.
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  ValidateOptions options;  // trials 50, length 2^16, full tolerances
  const ValidateResult result = run_validate(options);
  const double elapsed = seconds_since(start);

  std::ostringstream detail;
  bool pass = result.all_pass;
  for (const auto& t : result.targets) {
    detail << t.name << " " << std::fixed << t.observed_median << " in "
           << t.target - t.tolerance << ".." << t.target + t.tolerance << "; ";
  }
  detail << "elapsed " << elapsed << " s (target < 60)";
  pass = pass && elapsed < 60.0;
  report(1, "synthetic-exponent recovery", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 2. Oracle equivalence on 200 random series of length <= 512, every valid
//    scale, 1e-9 relative.
void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(0xACCE57);
  bool pass = true;
  std::string first_mismatch;
  for (int trial = 0; trial < 200 && pass; ++trial) {
    const std::size_t n = 40 + (rng.next_u64() % 473);  // up to 512
    std::vector<double> samples(n);
    for (double& v : samples) v = rng.next_unit() * 6.0 - 3.0;

    std::vector<int> scales;
    for (int s = 4; s <= static_cast<int>(n / 4); ++s) scales.push_back(s);
    const ScaleGrid grid(scales);

    const auto profile =
        integrate_profile(TimeSeries(samples, 1.0, "oracle"));
    const auto got = fluctuation_function(profile, grid);
    const auto expected = naive::fluctuation(samples, scales);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const double rel = std::abs(got.points[i].f - expected[i].second) /
                         std::max(expected[i].second, 1e-300);
      if (rel > 1e-9) {
        pass = false;
        first_mismatch = "trial " + std::to_string(trial) + " scale " +
                         std::to_string(expected[i].first) + " rel " +
                         std::to_string(rel);
        break;
      }
    }
  }
  const double elapsed = seconds_since(start);
  pass = pass && elapsed < 5.0;
  std::ostringstream detail;
  detail << "200 series, every scale in [4, N/4], 1e-9 relative; elapsed "
         << elapsed << " s (target < 5)";
  if (!first_mismatch.empty()) detail << "; mismatch: " << first_mismatch;
  report(2, "oracle equivalence", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 3. Affine invariance of alpha under x -> a*x + b.
void criterion_3() {
  SplitMix64 rng(0xAFF1E);
  bool pass = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 512 + (rng.next_u64() % 1537);
    std::vector<double> samples(n), mapped(n);
    for (double& v : samples) v = rng.next_unit() * 2.0 - 1.0;
    const double a = 0.1 + rng.next_unit() * 9.9;
    const double b = -5.0 + rng.next_unit() * 10.0;
    for (std::size_t k = 0; k < n; ++k) mapped[k] = a * samples[k] + b;

    const ScaleGrid grid = default_scale_grid(n);
    const double alpha = dfa(TimeSeries(samples, 1.0, "x"), grid).alpha;
    const double alpha_mapped =
        dfa(TimeSeries(mapped, 1.0, "ax+b"), grid).alpha;
    worst = std::max(worst, std::abs(alpha - alpha_mapped));
  }
  pass = worst <= 1e-9;
  std::ostringstream detail;
  detail << "100 series, a in [0.1,10], b in [-5,5]; max |d alpha| "
         << std::scientific << worst << " (limit 1e-9)";
  report(3, "affine invariance", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 4. Exact power-law fit: F = 3 n^0.7.
void criterion_4() {
  FluctuationCurve curve;
  curve.series_length = 1 << 16;
  for (int n : {16, 23, 34, 50, 73, 107, 157, 230, 337, 494, 724, 1061,
                1556, 2281, 3344, 4902, 7186, 10534, 15442, 16384}) {
    curve.points.push_back(
        {n, 3.0 * std::pow(static_cast<double>(n), 0.7)});
  }
  const ScalingReport report_fit = fit_scaling_exponent(curve);
  const bool pass = std::abs(report_fit.alpha - 0.7) <= 1e-9 &&
                    report_fit.r_squared >= 1.0 - 1e-12;
  std::ostringstream detail;
  detail << "alpha " << std::setprecision(12) << report_fit.alpha << ", r^2 "
         << report_fit.r_squared;
  report(4, "exact power-law fit", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 5. Classifier regression over the 30 transcribed exponents: exactly 26/30
//    with the four known misses.
void criterion_5() {
  const auto rows = load_phase_table(fixture_path("table2.csv"));
  bool pass = rows.size() == 15;
  int correct = 0;
  std::vector<std::string> misses;
  for (const auto& row : rows) {
    const auto reading = classify_mode(row.reading_alpha, 0.3);
    if (reading.value == SpeechMode::kFreeReading) {
      ++correct;
    } else {
      misses.push_back(row.clip_id + "#" + std::to_string(row.segment) +
                       " reading " + std::to_string(row.reading_alpha));
    }
    const auto recitation = classify_mode(row.recitation_alpha, 0.3);
    if (recitation.value == SpeechMode::kRecitation) {
      ++correct;
    } else {
      misses.push_back(row.clip_id + "#" + std::to_string(row.segment) +
                       " recitation " + std::to_string(row.recitation_alpha));
    }
  }
  pass = pass && correct == 26 && misses.size() == 4;
  // The four expected misses, by identity.
  auto has_miss = [&](const std::string& frag) {
    for (const auto& m : misses) {
      if (m.find(frag) != std::string::npos) return true;
    }
    return false;
  };
  pass = pass && has_miss("clip1#3 reading") &&
         has_miss("clip5#1 recitation") && has_miss("clip5#2 recitation") &&
         has_miss("clip5#3 recitation");
  std::ostringstream detail;
  detail << correct << "/30 correct; misses:";
  for (const auto& m : misses) detail << " [" << m << "]";
  report(5, "reference-table classifier regression", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 6. Phase-delta reproduction from the fixture.
void criterion_6() {
  const auto deltas =
      phase_differences(load_phase_table(fixture_path("table2.csv")));
  const double expected[] = {0.0910, 0.0823, 0.0690, 0.0687, -0.0430};
  bool pass = deltas.size() == 5;
  std::ostringstream detail;
  for (std::size_t i = 0; pass && i < 5; ++i) {
    pass = std::abs(deltas[i].delta - expected[i]) <= 5e-4;
  }
  for (const auto& d : deltas) {
    detail << d.clip_id << " " << std::showpos << std::fixed
           << std::setprecision(4) << d.delta << " ";
  }
  if (pass) {
    // Ordering claims: clip1 maximum, clips 3-4 almost equal, clip5 negative.
    pass = deltas[0].delta > deltas[1].delta &&
           deltas[1].delta > deltas[2].delta &&
           std::abs(deltas[2].delta - deltas[3].delta) < 0.01 &&
           deltas[3].delta > 0.0 && deltas[4].delta < 0.0;
  }
  report(6, "phase-delta reproduction", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 7. Emotion ordering: recitation-mean centroids strictly increase.
void criterion_7() {
  const auto rows = load_phase_table(fixture_path("table2.csv"));
  std::vector<std::string> order;
  std::vector<double> means;
  for (const auto& row : rows) {
    bool seen = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i] == row.emotion) seen = true;
    }
    if (!seen) {
      order.push_back(row.emotion);
      double sum = 0.0;
      int count = 0;
      for (const auto& other : rows) {
        if (other.emotion == row.emotion) {
          sum += other.recitation_alpha;
          ++count;
        }
      }
      means.push_back(sum / count);
    }
  }
  bool pass = order.size() == 5;
  for (std::size_t i = 1; pass && i < means.size(); ++i) {
    pass = means[i] > means[i - 1];
  }
  // The built-in band table matches those means to transcription precision.
  const auto bands = emotion_bands();
  pass = pass && bands.size() == 5;
  for (std::size_t i = 0; pass && i < 5; ++i) {
    pass = bands[i].name == order[i] &&
           std::abs(bands[i].centroid - means[i]) < 5e-5;
  }
  std::ostringstream detail;
  for (std::size_t i = 0; i < order.size(); ++i) {
    detail << order[i] << " " << std::fixed << std::setprecision(4)
           << means[i] << " ";
  }
  report(7, "emotion centroid ordering", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 8. WAV decoding: exact values and distinct failures.
void criterion_8() {
  bool pass = true;
  std::string detail = "mono/stereo exact values; 5 distinct failures";

  try {
    const auto mono =
        decode_wav(wavfix::build_wav(1, 22050, {0x7FFF, 0x7FFF, 0x7FFF,
                                                0x7FFF}));
    pass = pass && mono.channels[0][0] == 32767.0 / 32768.0 &&
           mono.channels[0].size() == 4;
    const auto neg = decode_wav(
        wavfix::build_wav(1, 22050, {static_cast<std::int16_t>(0x8000)}));
    pass = pass && neg.channels[0][0] == -1.0;
    const auto stereo = decode_wav(wavfix::build_wav(
        2, 22050, {0x4000, static_cast<std::int16_t>(0xC000), 0x4000,
                   static_cast<std::int16_t>(0xC000)}));
    pass = pass && stereo.channels[0][0] == 0.5 &&
           stereo.channels[1][0] == -0.5;

    // Round trip: decoded values re-encode to the original data chunk.
    SplitMix64 rng(88);
    std::vector<std::int16_t> payload(256);
    for (auto& v : payload) {
      v = static_cast<std::int16_t>(rng.next_u64() & 0xFFFF);
    }
    const auto bytes = wavfix::build_wav(1, 22050, payload);
    const auto decoded = decode_wav(bytes);
    for (std::size_t i = 0; i < payload.size(); ++i) {
      const auto code =
          static_cast<std::int16_t>(decoded.channels[0][i] * 32768.0);
      pass = pass && code == payload[i];
    }
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("decode threw: ") + e.what();
  }

  // Each malformed fixture must raise a WavDecodeError whose message and
  // offset identify the defect.
  struct Case {
    std::string name;
    std::function<std::vector<std::uint8_t>()> make;
    std::string fragment;
    std::size_t offset;
  };
  const auto good = wavfix::build_wav(1, 8000, {1, 2, 3, 4});
  std::vector<Case> cases;
  cases.push_back({"bad magic",
                   [&] {
                     auto b = good;
                     b[0] = 'J';
                     return b;
                   },
                   "RIFF", 0});
  cases.push_back({"missing data",
                   [&] {
                     return std::vector<std::uint8_t>(good.begin(),
                                                      good.begin() + 36);
                   },
                   "missing data chunk", 36});
  cases.push_back({"truncated data",
                   [&] {
                     auto b = good;
                     b.resize(b.size() - 2);
                     return b;
                   },
                   "truncated data chunk", 40});
  cases.push_back({"float encoding",
                   [&] { return wavfix::build_wav(1, 8000, {1, 2}, 3); },
                   "unsupported encoding", 20});
  cases.push_back({"8-bit depth",
                   [&] { return wavfix::build_wav(1, 8000, {1, 2}, 1, 8); },
                   "unsupported bit depth", 34});
  for (const auto& c : cases) {
    bool raised = false;
    try {
      decode_wav(c.make());
    } catch (const WavDecodeError& e) {
      raised = std::string(e.what()).find(c.fragment) != std::string::npos &&
               e.offset() == c.offset;
    } catch (const std::exception&) {
      raised = false;
    }
    if (!raised) {
      pass = false;
      detail += "; wrong error for " + c.name;
    }
  }
  report(8, "WAV decode exactness and error taxonomy", pass, detail);
}

// ---------------------------------------------------------------------------
// 9. Determinism of the real CLI across worker counts.
int run_cli(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = std::string("\"") + SPEECHDFA_CLI_PATH + "\" " +
                          args + " > " + stdout_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion_9() {
  const fs::path dir = fs::temp_directory_path() /
                       ("speechdfa_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  bool pass = true;
  std::string detail;
  try {
    std::vector<std::string> clips;
    for (int i = 0; i < 2; ++i) {
      SplitMix64 rng(4000 + i);
      std::vector<std::int16_t> payload(8000 * (65 + 30 * i));
      for (auto& f : payload) {
        f = static_cast<std::int16_t>(rng.next_u64() & 0xFFFF);
      }
      const std::string path =
          (dir / ("fixture" + std::to_string(i) + ".wav")).string();
      wavfix::write_file(path, wavfix::build_wav(1, 8000, payload));
      clips.push_back(path);
    }
    const std::string inputs = "\"" + clips[0] + "\" \"" + clips[1] + "\"";

    for (const std::string format : {"csv", "json"}) {
      const std::string out1 = (dir / ("w1." + format)).string();
      const std::string out8 = (dir / ("w8." + format)).string();
      const int rc1 = run_cli(
          "analyze --workers 1 --format " + format + " " + inputs, out1);
      const int rc8 = run_cli(
          "analyze --workers 8 --format " + format + " " + inputs, out8);
      const std::string a = slurp(out1);
      const std::string b = slurp(out8);
      if (rc1 != 0 || rc8 != 0) {
        pass = false;
        detail += format + ": nonzero exit; ";
      } else if (a.empty() || a != b) {
        pass = false;
        detail += format + ": outputs differ; ";
      } else {
        detail += format + ": " + std::to_string(a.size()) +
                  " bytes identical; ";
      }
    }
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  fs::remove_all(dir);
  report(9, "CLI determinism across worker counts", pass, detail);
}

}  // namespace

int main() {
  std::printf("speechdfa acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
