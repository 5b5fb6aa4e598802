#include "speechdfa/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "speechdfa/errors.hpp"

namespace speechdfa {

namespace {

void require_finite_alpha(double alpha) {
  if (!std::isfinite(alpha)) {
    throw Error("classify: alpha must be finite");
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string to_string(SpeechMode mode) {
  return mode == SpeechMode::kRecitation ? "recitation" : "free_reading";
}

SpeechMode parse_speech_mode(const std::string& name) {
  if (name == "recitation") return SpeechMode::kRecitation;
  if (name == "free_reading") return SpeechMode::kFreeReading;
  throw Error("classify: unknown speech mode '" + name + "'");
}

ModeLabel classify_mode(double alpha, const ModeRule& rule) {
  require_finite_alpha(alpha);
  if (!std::isfinite(rule.threshold)) {
    throw Error("classify: threshold must be finite");
  }
  // The boundary alpha == threshold is assigned to free reading in either
  // direction.
  const bool recitation = rule.recitation_below ? alpha < rule.threshold
                                                : alpha > rule.threshold;
  return ModeLabel{recitation ? SpeechMode::kRecitation
                              : SpeechMode::kFreeReading,
                   rule.threshold};
}

ModeLabel classify_mode(double alpha, double threshold) {
  return classify_mode(alpha, ModeRule{threshold, true});
}

std::vector<EmotionBand> emotion_bands() {
  return {
      {"fun", 0.2193},
      {"happy", 0.2313},
      {"romance_slow", 0.2580},
      {"romance_fast", 0.2890},
      {"sorrow", 0.4177},
  };
}

EmotionBand classify_emotion(double alpha,
                             const std::vector<EmotionBand>& bands) {
  require_finite_alpha(alpha);
  if (bands.empty()) {
    throw Error("classify: band table is empty");
  }
  // Scan in centroid order with a strict improvement test, so an exact tie
  // keeps the lower centroid.
  std::size_t best = 0;
  double best_dist = std::abs(alpha - bands[0].centroid);
  for (std::size_t i = 1; i < bands.size(); ++i) {
    const double dist = std::abs(alpha - bands[i].centroid);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return bands[best];
}

EmotionBand classify_emotion(double alpha) {
  return classify_emotion(alpha, emotion_bands());
}

std::vector<EmotionBand> load_band_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("classify: cannot open band table: " + path);
  }
  std::vector<EmotionBand> bands;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("classify: " + path + ":" + std::to_string(line_no) +
                  ": expected 'name = centroid'");
    }
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (name.empty() || value.empty()) {
      throw Error("classify: " + path + ":" + std::to_string(line_no) +
                  ": expected 'name = centroid'");
    }
    char* end = nullptr;
    const double centroid = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || !std::isfinite(centroid)) {
      throw Error("classify: " + path + ":" + std::to_string(line_no) +
                  ": bad centroid '" + value + "'");
    }
    bands.push_back(EmotionBand{name, centroid});
  }
  if (bands.empty()) {
    throw Error("classify: band table " + path + " defines no bands");
  }
  std::sort(bands.begin(), bands.end(),
            [](const EmotionBand& a, const EmotionBand& b) {
              return a.centroid < b.centroid;
            });
  for (std::size_t i = 1; i < bands.size(); ++i) {
    if (!(bands[i].centroid > bands[i - 1].centroid)) {
      throw Error("classify: band table " + path +
                  ": centroids must be strictly increasing ('" +
                  bands[i - 1].name + "' and '" + bands[i].name +
                  "' coincide)");
    }
  }
  return bands;
}

PhaseDifference compare_phases(const std::vector<double>& reading_alphas,
                               const std::vector<double>& recitation_alphas,
                               const std::string& clip_id) {
  if (reading_alphas.empty() || recitation_alphas.empty()) {
    throw Error("classify: compare_phases needs alphas for both phases (" +
                clip_id + ")");
  }
  auto avg = [](const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) {
      sum += x;
    }
    return sum / static_cast<double>(xs.size());
  };
  PhaseDifference diff;
  diff.clip_id = clip_id;
  diff.mean_reading_alpha = avg(reading_alphas);
  diff.mean_recitation_alpha = avg(recitation_alphas);
  diff.delta = diff.mean_reading_alpha - diff.mean_recitation_alpha;
  return diff;
}

}  // namespace speechdfa
