#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patheval/types.hpp"

namespace patheval {

// Mono audio, samples in [-1, 1].
struct Waveform
{
  VectorXd samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return static_cast<std::size_t>(samples.size()); }
  double duration_s() const
  {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

enum class Gender { M, F };
enum class Group { control, dysarthric, converted };
enum class Band { high, mid, low, control };
// Ground-truth recording vs voice-converted sample.
enum class Kind { gt, vc };

std::string_view to_string(Gender g);
std::string_view to_string(Group g);
std::string_view to_string(Band b);
std::string_view to_string(Kind k);
Gender parse_gender(std::string_view s);
Group parse_group(std::string_view s);
// Accepts "very_low" / "very low" / "verylow" and merges them into Band::low.
Band parse_band(std::string_view s);

// Marker in paired_control_id for dysarthric speakers deliberately left out of
// the detector folds because they have no control partner.
inline constexpr std::string_view kExcludedPair = "excluded";

struct UtteranceRecord
{
  std::string utterance_id;
  std::string speaker_id;
  Gender gender = Gender::M;
  Group group = Group::control;
  Band intelligibility_band = Band::control;
  std::optional<double> subjective_score;  // fraction in [0, 1]
  std::string word_id;
  std::string wav_path;
  std::optional<std::string> ppg_path;
  std::optional<std::string> paired_control_id;

  bool is_ground_truth() const { return group != Group::converted; }
  Kind kind() const { return is_ground_truth() ? Kind::gt : Kind::vc; }
};

struct Manifest
{
  std::vector<UtteranceRecord> records;
  std::filesystem::path root_dir;

  // Relative paths in the manifest are resolved against root_dir.
  std::filesystem::path resolve(const std::string& path) const;
  const UtteranceRecord* find(std::string_view utterance_id) const;
};

inline constexpr std::string_view kManifestHeader =
    "utterance_id,speaker_id,gender,group,intelligibility_band,"
    "subjective_score,word_id,wav_path,ppg_path,paired_control_id";

Manifest load_manifest(const std::filesystem::path& path);
// Validates and parses manifest text; `source` names the origin in errors.
Manifest parse_manifest(std::string_view text, std::filesystem::path root_dir,
                        std::string_view source = "<memory>");
void write_manifest(const Manifest& m, const std::filesystem::path& path);

Waveform read_wav(const std::filesystem::path& path);
Waveform decode_wav(std::string_view bytes);

enum class WavEncoding { pcm16, float32 };
void write_wav(const Waveform& w, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::float32);
std::string encode_wav(const Waveform& w, WavEncoding encoding);

struct VadConfig
{
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  double threshold_db_below_peak = 30.0;
  double min_speech_ms = 100.0;
  double hangover_ms = 50.0;

  void validate() const;
};

// Half-open sample range [start, end).
struct Segment
{
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

std::vector<Segment> detect_voice_activity(const Waveform& w,
                                           const VadConfig& cfg = {});

// Throws NoSpeechError when `segments` is empty.
Waveform trim_silence(const Waveform& w, const std::vector<Segment>& segments);

}  // namespace patheval
