#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patheval/corpus.hpp"
#include "patheval/detector.hpp"
#include "patheval/lasso.hpp"
#include "patheval/ppgdtw.hpp"
#include "patheval/spectral.hpp"
#include "patheval/stats.hpp"
#include "patheval/syncorp.hpp"
#include "patheval/tempo.hpp"
#include "patheval/vendor_json.hpp"

namespace patheval {

enum class LtasPreset { detector, skl };

struct RunConfig
{
  std::filesystem::path manifest_path;
  std::filesystem::path output_dir;
  // Unset: the subcommand's own preset (detect -> detector, skl -> skl).
  std::optional<LtasPreset> ltas_preset;
  LassoConfig lasso;
  VadConfig vad;
  bool apply_vad = true;
  FeatureScale feature_scale = FeatureScale::db;
  std::optional<LogisticParams> logistic;
  std::optional<std::string> reference_speaker;
  std::uint64_t seed = 1;

  LtasConfig ltas_for(LtasPreset fallback) const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

struct RunSummary
{
  std::size_t warnings = 0;  // utterances listed in skipped.csv
  std::vector<std::filesystem::path> outputs;
};

// Trims non-speech from every utterance; writes trimmed/*.wav, segments.csv,
// skipped.csv and a manifest.csv pointing at the trimmed audio.
RunSummary run_vad(const RunConfig& cfg);

// Voice-quality detector: detection.json, detection.csv, models/fold_*.json.
RunSummary run_detect(const RunConfig& cfg);

// Intelligibility-decrease measure: skl_entries.csv and skl_summary.json.
RunSummary run_skl(const RunConfig& cfg);

struct SpeakerEstimate
{
  std::string speaker_id;
  Kind kind = Kind::gt;
  Gender gender = Gender::M;
  Group group = Group::control;
  Band band = Band::control;
  std::optional<double> subjective_score;
  double intelligibility = 0.0;  // percent
  std::size_t n_utterances = 0;
};

struct VerificationRun
{
  std::string reference_speaker;
  LogisticParams logistic;
  bool calibrated = false;
  std::vector<VerificationResult> results;   // sorted by utterance_id
  std::vector<SpeakerEstimate> speakers;     // sorted by (speaker_id, kind)
  std::map<std::string, std::string> skipped;
  // kind -> grouping ("all", "M", "F") -> {"spearman", "pearson"}
  std::map<std::string, std::map<std::string, std::map<std::string, std::optional<CorrelationResult>>>>
      correlations;
};

// Matches every utterance with a posteriorgram against the reference
// speaker's utterance of the same word.
VerificationRun verify_corpus(const Manifest& m,
                              const std::optional<std::string>& reference_speaker,
                              const std::optional<LogisticParams>& logistic);
nlohmann::json to_json(const VerificationRun& v);

// PPG-DTW verification: verification.csv and intelligibility.json.
RunSummary run_verify(const RunConfig& cfg);

// Single stretch (factor) or augmentation triple (triple_target) of one file.
// For the triple, `out` is a prefix receiving .orig.wav, .half.wav and
// .target.wav.
RunSummary run_tempo(const std::filesystem::path& in,
                     const std::filesystem::path& out,
                     std::optional<double> factor,
                     std::optional<double> triple_target);

struct PairsSource
{
  std::filesystem::path path;
  std::optional<std::string> condition;
};

// WER per utterance and mean WER per (condition, intelligibility band):
// wer.json and wer_utterances.csv.
RunSummary run_wer(const RunConfig& cfg, const std::vector<PairsSource>& pairs);

RunSummary run_synth(const SynthSpec& spec, const std::filesystem::path& out);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace patheval
