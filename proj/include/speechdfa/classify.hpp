#pragma once

#include <string>
#include <vector>

namespace speechdfa {

enum class SpeechMode { kRecitation, kFreeReading };

std::string to_string(SpeechMode mode);
SpeechMode parse_speech_mode(const std::string& name);

struct ModeLabel {
  SpeechMode value = SpeechMode::kFreeReading;
  double threshold_used = 0.3;
};

// Threshold rule for the mode decision. With recitation_below (the default,
// matching the calibration data) alpha < threshold labels recitation; the
// boundary alpha == threshold is always assigned to free reading.
struct ModeRule {
  double threshold = 0.3;
  bool recitation_below = true;
};

ModeLabel classify_mode(double alpha, const ModeRule& rule);
ModeLabel classify_mode(double alpha, double threshold = 0.3);

struct EmotionBand {
  std::string name;
  double centroid = 0.0;
};

// The built-in band table: fun 0.2193, happy 0.2313, romance_slow 0.2580,
// romance_fast 0.2890, sorrow 0.4177 (per-clip recitation means of the
// bundled reference table, strictly increasing).
std::vector<EmotionBand> emotion_bands();

// Nearest-centroid assignment over `bands` (must be sorted by centroid,
// strictly increasing). Exact ties go to the lower centroid.
EmotionBand classify_emotion(double alpha);
EmotionBand classify_emotion(double alpha,
                             const std::vector<EmotionBand>& bands);

// "name = centroid" lines, '#' comments. The result is sorted by centroid
// and must be strictly increasing; names are free-form so the classifier can
// be re-centered on a new corpus.
std::vector<EmotionBand> load_band_table(const std::string& path);

struct PhaseDifference {
  std::string clip_id;
  double mean_reading_alpha = 0.0;
  double mean_recitation_alpha = 0.0;
  double delta = 0.0;  // mean_reading_alpha - mean_recitation_alpha
};

// Per-clip reading-vs-recitation contrast; both lists must be non-empty.
PhaseDifference compare_phases(const std::vector<double>& reading_alphas,
                               const std::vector<double>& recitation_alphas,
                               const std::string& clip_id);

}  // namespace speechdfa
