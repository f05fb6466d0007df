#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patheval/corpus.hpp"
#include "patheval/lasso.hpp"
#include "patheval/spectral.hpp"
#include "patheval/stats.hpp"
#include "patheval/vendor_json.hpp"

namespace patheval {

struct SpeakerPair
{
  std::string dysarthric_id;
  std::string control_id;
  Gender gender = Gender::M;

  bool operator==(const SpeakerPair&) const = default;
};

struct Fold
{
  SpeakerPair held_out;
  std::vector<SpeakerPair> train_pairs;
};

struct FoldPlan
{
  std::vector<Fold> folds;
  // Dysarthric speakers marked paired_control_id = "excluded".
  std::vector<std::string> excluded_speakers;
  // One per gender at most: the voice-conversion source control and its
  // dysarthric partner. They train every fold and are never evaluated.
  std::vector<SpeakerPair> conversion_pairs;
};

// Leave-one-pair-out folds, built separately for each gender.
FoldPlan build_folds(const Manifest& m);

enum class FeatureScale { db, linear };

struct DetectionOptions
{
  VadConfig vad;
  bool apply_vad = true;
  FeatureScale feature_scale = FeatureScale::db;
  // When set, training labels of every fold are randomly permuted; used as a
  // chance-level control.
  std::optional<std::uint64_t> label_shuffle_seed;
};

struct UtteranceScore
{
  std::string utterance_id;
  std::string speaker_id;
  Kind kind = Kind::gt;
  int label = 1;  // 0 control, 1 dysarthric
  double score = 0.0;
  bool correct = false;
};

struct AccuracySummary
{
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // std of per-utterance 0/1 correctness
  double mean_score = 0.0;
  std::size_t n_utterances = 0;
};

struct SpeakerDetection
{
  std::string speaker_id;
  Kind kind = Kind::gt;
  Gender gender = Gender::M;
  AccuracySummary summary;
  // Ground-truth entries also carry the held-out paired control's accuracy.
  std::optional<std::string> paired_control_id;
  std::optional<AccuracySummary> paired_control;
};

struct FoldOutcome
{
  Fold fold;
  LassoModel model;
  std::vector<std::string> train_utterances;
};

struct DetectionReport
{
  std::vector<SpeakerDetection> per_speaker;  // sorted by (speaker_id, kind)
  std::vector<FoldOutcome> folds;
  std::vector<UtteranceScore> utterances;     // sorted by utterance_id
  std::map<std::string, std::string> skipped;  // utterance_id -> reason
  // Keys "M", "F", "all"; empty optional = not computable.
  std::map<std::string, std::optional<CorrelationResult>> correlation_with_subjective;

  // Pooled fraction correct over held-out ground-truth utterances (dysarthric
  // and paired control).
  double pooled_gt_accuracy() const;
};

// A score >= 0.5 is classified as dysarthric.
inline constexpr double kDetectionThreshold = 0.5;

AccuracySummary summarize(const std::vector<UtteranceScore>& scores);

DetectionReport run_detection(const Manifest& m, const FoldPlan& plan,
                              const LtasConfig& ltas_cfg,
                              const LassoConfig& lasso_cfg,
                              const DetectionOptions& options = {});

// Pearson r between per-speaker subjective scores and the mean detection
// score of converted samples, per gender and pooled. Groups with fewer than
// three scored speakers (or zero variance) are not computable.
std::map<std::string, std::optional<CorrelationResult>> correlate_intelligibility(
    const DetectionReport& report, const Manifest& m);

nlohmann::json to_json(const CorrelationResult& r);
nlohmann::json to_json(const DetectionReport& r);
void write_detection_csv(const DetectionReport& r,
                         const std::filesystem::path& path);

}  // namespace patheval
