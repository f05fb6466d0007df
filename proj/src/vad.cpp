#include <algorithm>
#include <cmath>
#include <limits>

#include "patheval/corpus.hpp"
#include "patheval/error.hpp"

namespace patheval {

namespace {

std::size_t ms_to_samples(double ms, int rate)
{
  return static_cast<std::size_t>(std::lround(ms * rate / 1000.0));
}

}  // namespace

void VadConfig::validate() const
{
  if (!(hop_ms > 0.0) || frame_ms < hop_ms)
    throw Error("VAD config requires frame_ms >= hop_ms > 0");
  if (!(threshold_db_below_peak > 0.0))
    throw Error("VAD config requires threshold_db_below_peak > 0");
  if (min_speech_ms < 0.0 || hangover_ms < 0.0)
    throw Error("VAD durations must be non-negative");
}

std::vector<Segment> detect_voice_activity(const Waveform& w,
                                           const VadConfig& cfg)
{
  cfg.validate();
  const std::size_t n = w.size();
  const std::size_t frame = std::max<std::size_t>(1, ms_to_samples(cfg.frame_ms, w.sample_rate_hz));
  const std::size_t hop = std::max<std::size_t>(1, ms_to_samples(cfg.hop_ms, w.sample_rate_hz));
  if (n < frame)
    throw Error("waveform shorter than one VAD frame (" + std::to_string(n) +
                " < " + std::to_string(frame) + " samples)");

  const std::size_t n_frames = 1 + (n - frame) / hop;
  std::vector<double> db(n_frames);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < n_frames; ++f) {
    const double energy =
        w.samples.segment(static_cast<Eigen::Index>(f * hop),
                          static_cast<Eigen::Index>(frame))
            .squaredNorm() /
        static_cast<double>(frame);
    db[f] = energy > 0.0 ? 10.0 * std::log10(energy)
                         : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, db[f]);
  }
  if (!std::isfinite(peak)) return {};

  const double floor_db = peak - cfg.threshold_db_below_peak;

  // A sample is speech only when every frame covering it is speech, so a run
  // of speech frames [a, b] maps to the samples not reached by frames a-1 and
  // b+1. This keeps boundaries within one hop of the true onset even though a
  // frame barely touching speech already clears the energy floor.
  std::vector<Segment> raw;
  std::size_t f = 0;
  while (f < n_frames) {
    if (!(db[f] >= floor_db)) {
      ++f;
      continue;
    }
    const std::size_t a = f;
    while (f + 1 < n_frames && db[f + 1] >= floor_db) ++f;
    const std::size_t b = f;
    ++f;
    const std::size_t start = a == 0 ? 0 : (a - 1) * hop + frame;
    const std::size_t end = b + 1 == n_frames ? n : (b + 1) * hop;
    if (end > start) raw.push_back({start, end});
  }

  const std::size_t hangover = ms_to_samples(cfg.hangover_ms, w.sample_rate_hz);
  std::vector<Segment> merged;
  for (auto s : raw) {
    s.end = std::min(n, s.end + hangover);
    if (!merged.empty() && s.start <= merged.back().end)
      merged.back().end = std::max(merged.back().end, s.end);
    else
      merged.push_back(s);
  }

  const std::size_t min_len = ms_to_samples(cfg.min_speech_ms, w.sample_rate_hz);
  std::vector<Segment> out;
  for (const auto& s : merged)
    if (s.length() >= min_len) out.push_back(s);
  return out;
}

Waveform trim_silence(const Waveform& w, const std::vector<Segment>& segments)
{
  if (segments.empty()) throw NoSpeechError("no speech detected");
  std::size_t total = 0;
  std::size_t last_end = 0;
  for (const auto& s : segments) {
    if (s.start < last_end || s.end < s.start || s.end > w.size())
      throw Error("segments must be ordered, non-overlapping and in range");
    total += s.length();
    last_end = s.end;
  }
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(static_cast<Eigen::Index>(total));
  Eigen::Index pos = 0;
  for (const auto& s : segments) {
    const auto len = static_cast<Eigen::Index>(s.length());
    out.samples.segment(pos, len) =
        w.samples.segment(static_cast<Eigen::Index>(s.start), len);
    pos += len;
  }
  return out;
}

}  // namespace patheval
