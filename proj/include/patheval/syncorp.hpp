#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "patheval/corpus.hpp"

namespace patheval {

// Parametric test corpus: harmonic-complex "speakers" whose spectral tilt,
// tempo and posteriorgram noise grow with a severity level.
struct SynthSpec
{
  int n_speakers_per_class = 3;  // per gender
  int n_words = 5;
  int sample_rate_hz = 16000;
  std::vector<double> severity_levels{0.0, 3.0, 6.0};  // dB/octave
  std::vector<double> tempo_factors{1.0, 1.25, 1.5};
  std::vector<double> ppg_noise_levels{0.0, 0.3, 0.6};
  std::vector<Gender> genders{Gender::M, Gender::F};
  // Emit converted samples from one source control per gender.
  bool converted = true;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthSpeaker
{
  std::string speaker_id;
  Gender gender = Gender::M;
  Group group = Group::control;
  int level = -1;  // index into the per-level vectors; -1 for controls
  double severity_tilt = 0.0;
  double tempo_factor = 1.0;
  double ppg_noise = 0.0;
  double f0_hz = 120.0;
  double formant_scale = 1.0;
  double tilt_jitter = 0.0;
  std::optional<std::string> paired_control_id;
  std::optional<double> subjective_score;
  Band band = Band::control;
};

// Speaker table for a spec; deterministic in spec.seed.
std::vector<SynthSpeaker> plan_speakers(const SynthSpec& spec);

// Writes wav/, ppg/, manifest.csv, transcripts.csv and speakers.csv under
// out_dir and returns the manifest (root_dir = out_dir).
Manifest generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace patheval
