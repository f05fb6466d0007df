#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "patheval/corpus.hpp"
#include "patheval/types.hpp"

namespace patheval {

struct PitchConfig
{
  double f0_min_hz = 75.0;
  double f0_max_hz = 500.0;
  double frame_ms = 40.0;
  double hop_ms = 10.0;
  double voicing_threshold = 0.45;

  void validate(int sample_rate_hz) const;
};

struct PitchTrack
{
  VectorXd times_s;  // frame centers
  VectorXd f0_hz;    // 0 marks an unvoiced frame
  int sample_rate_hz = 16000;

  Eigen::Index size() const { return f0_hz.size(); }
  // f0 of the frame whose center is nearest to `sample`.
  double f0_at_sample(double sample) const;
};

struct F0Stats
{
  double mean_hz = 0.0;
  double std_hz = 0.0;
};

// Normalized-autocorrelation pitch tracker with parabolic lag refinement. The
// smallest-lag peak within 10% of the best one is taken to avoid reporting a
// subharmonic.
PitchTrack estimate_pitch(const Waveform& w, const PitchConfig& cfg = {});

// Mean and population standard deviation over voiced frames.
F0Stats f0_statistics(const PitchTrack& track);

// Analysis marks: local maxima one period (+-20%) apart in voiced regions, a
// 10 ms grid elsewhere. Strictly increasing.
std::vector<std::size_t> place_pitch_marks(const Waveform& w,
                                           const PitchTrack& track);

inline constexpr double kMinTempoFactor = 0.25;
inline constexpr double kMaxTempoFactor = 4.0;

// TD-PSOLA time-scale modification. factor > 1 lengthens (slower speech);
// pitch is preserved.
Waveform psola_stretch(const Waveform& w, double factor,
                       const PitchConfig& cfg = {});

struct TempoVariant
{
  double factor = 1.0;
  Waveform wave;
};

// Original, halfway and target-rate versions of one recording. The first entry
// is the unmodified input.
std::array<TempoVariant, 3> augmentation_triple(const Waveform& w,
                                                double target_factor,
                                                const PitchConfig& cfg = {});

// Voiced frames: (f0 - source.mean) * target.std / source.std + target.mean,
// clamped to [1, rate/2). Unvoiced frames stay 0.
PitchTrack f0_transform(const PitchTrack& f0, const F0Stats& source,
                        const F0Stats& target);

}  // namespace patheval
