#include "patheval/tempo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "patheval/error.hpp"

namespace patheval {

void PitchConfig::validate(int sample_rate_hz) const
{
  if (!(f0_min_hz > 0.0) || !(f0_min_hz < f0_max_hz) ||
      !(f0_max_hz < 0.5 * sample_rate_hz))
    throw Error("pitch config requires 0 < f0_min < f0_max < rate/2");
  if (!(hop_ms > 0.0) || !(frame_ms > 0.0))
    throw Error("pitch frame and hop must be positive");
  if (frame_ms * 1e-3 * f0_min_hz < 1.0)
    throw Error("pitch frame must span at least one period of f0_min");
}

double PitchTrack::f0_at_sample(double sample) const
{
  if (size() == 0) return 0.0;
  const double t = sample / sample_rate_hz;
  const auto* begin = times_s.data();
  const auto* end = begin + times_s.size();
  const auto* it = std::lower_bound(begin, end, t);
  if (it == end) return f0_hz[size() - 1];
  if (it == begin) return f0_hz[0];
  const auto hi = it - begin;
  return (t - times_s[hi - 1] <= times_s[hi] - t) ? f0_hz[hi - 1] : f0_hz[hi];
}

PitchTrack estimate_pitch(const Waveform& w, const PitchConfig& cfg)
{
  cfg.validate(w.sample_rate_hz);
  const double rate = w.sample_rate_hz;
  const auto frame = static_cast<Eigen::Index>(std::lround(cfg.frame_ms * rate / 1000.0));
  const auto hop = std::max<Eigen::Index>(1, std::lround(cfg.hop_ms * rate / 1000.0));
  const Eigen::Index n = w.samples.size();
  if (n < frame)
    throw Error("waveform too short for pitch analysis (" + std::to_string(n) +
                " < " + std::to_string(frame) + " samples)");

  const auto lag_min = std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::floor(rate / cfg.f0_max_hz)));
  const auto lag_max = std::min<Eigen::Index>(frame - 2, static_cast<Eigen::Index>(std::ceil(rate / cfg.f0_min_hz)));

  const Eigen::Index n_frames = 1 + (n - frame) / hop;
  PitchTrack track;
  track.sample_rate_hz = w.sample_rate_hz;
  track.times_s.resize(n_frames);
  track.f0_hz.setZero(n_frames);

  VectorXd r(lag_max + 2);
  for (Eigen::Index f = 0; f < n_frames; ++f) {
    track.times_s[f] = (static_cast<double>(f * hop) + 0.5 * frame) / rate;
    VectorXd x = w.samples.segment(f * hop, frame);
    x.array() -= x.mean();
    if (x.squaredNorm() < 1e-20) continue;

    r.setZero();
    for (Eigen::Index lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
      const Eigen::Index len = frame - lag;
      const auto head = x.head(len);
      const auto tail = x.segment(lag, len);
      const double denom = std::sqrt(head.squaredNorm() * tail.squaredNorm());
      r[lag] = denom > 0.0 ? head.dot(tail) / denom : 0.0;
    }

    double best = -1.0;
    for (Eigen::Index lag = lag_min; lag <= lag_max; ++lag)
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) best = std::max(best, r[lag]);
    if (best < cfg.voicing_threshold) continue;

    Eigen::Index pick = -1;
    for (Eigen::Index lag = lag_min; lag <= lag_max; ++lag)
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= 0.9 * best) {
        pick = lag;
        break;
      }

    const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
    const double curvature = a - 2.0 * b + c;
    double offset = curvature < 0.0 ? 0.5 * (a - c) / curvature : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double f0 = rate / (static_cast<double>(pick) + offset);
    if (f0 >= cfg.f0_min_hz && f0 <= cfg.f0_max_hz) track.f0_hz[f] = f0;
  }
  return track;
}

F0Stats f0_statistics(const PitchTrack& track)
{
  std::vector<double> voiced;
  for (Eigen::Index i = 0; i < track.size(); ++i)
    if (track.f0_hz[i] > 0.0) voiced.push_back(track.f0_hz[i]);
  if (voiced.size() < 2) throw Error("F0 statistics need at least 2 voiced frames");
  const Eigen::Map<const VectorXd> v(voiced.data(), static_cast<Eigen::Index>(voiced.size()));
  F0Stats s;
  s.mean_hz = v.mean();
  s.std_hz = std::sqrt((v.array() - s.mean_hz).square().mean());
  if (!(s.std_hz > 0.0)) throw Error("F0 statistics: zero standard deviation");
  return s;
}

std::vector<std::size_t> place_pitch_marks(const Waveform& w,
                                           const PitchTrack& track)
{
  const auto n = static_cast<std::size_t>(w.samples.size());
  const double rate = w.sample_rate_hz;
  const auto grid = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.01 * rate)));

  std::vector<std::size_t> marks;
  bool have_last = false;
  bool last_voiced = false;
  std::size_t last = 0;

  auto argmax = [&](std::size_t lo, std::size_t hi) {
    std::size_t best = lo;
    for (std::size_t i = lo + 1; i <= hi; ++i)
      if (w.samples[static_cast<Eigen::Index>(i)] > w.samples[static_cast<Eigen::Index>(best)]) best = i;
    return best;
  };

  while (true) {
    const std::size_t probe = have_last ? last + 1 : 0;
    if (probe >= n) break;
    const double f0 = track.f0_at_sample(static_cast<double>(probe));
    std::size_t mark;
    if (f0 > 0.0) {
      const double period = rate / f0;
      std::size_t lo, hi;
      if (have_last && last_voiced) {
        lo = last + std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.8 * period)));
        hi = last + static_cast<std::size_t>(std::lround(1.2 * period));
      } else {
        lo = probe;
        hi = probe + std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(period))) - 1;
      }
      if (lo >= n) break;
      mark = argmax(lo, std::min(hi, n - 1));
      last_voiced = true;
    } else {
      mark = have_last ? last + grid : 0;
      if (mark >= n) break;
      last_voiced = false;
    }
    marks.push_back(mark);
    last = mark;
    have_last = true;
  }
  return marks;
}

Waveform psola_stretch(const Waveform& w, double factor, const PitchConfig& cfg)
{
  if (!(factor >= kMinTempoFactor && factor <= kMaxTempoFactor))
    throw Error("tempo factor must be in [0.25, 4]");
  const PitchTrack track = estimate_pitch(w, cfg);
  const auto marks = place_pitch_marks(w, track);
  const double rate = w.sample_rate_hz;
  const Eigen::Index n = w.samples.size();
  const auto n_out = static_cast<Eigen::Index>(std::lround(static_cast<double>(n) * factor));

  std::vector<double> periods(marks.size());
  for (std::size_t k = 0; k < marks.size(); ++k) {
    const double f0 = track.f0_at_sample(static_cast<double>(marks[k]));
    periods[k] = f0 > 0.0 ? rate / f0 : 0.01 * rate;
  }

  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.setZero(n_out);
  VectorXd weight = VectorXd::Zero(n_out);
  if (marks.empty() || n_out == 0) return out;

  double s = static_cast<double>(marks.front()) * factor;
  while (s < static_cast<double>(n_out)) {
    // Nearest analysis mark under the inverse time map.
    const double src_time = s / factor;
    auto it = std::lower_bound(marks.begin(), marks.end(), src_time,
                               [](std::size_t m, double t) { return static_cast<double>(m) < t; });
    std::size_t k = static_cast<std::size_t>(it - marks.begin());
    if (k == marks.size() ||
        (k > 0 && src_time - static_cast<double>(marks[k - 1]) <=
                      static_cast<double>(marks[k]) - src_time))
      k = k == 0 ? 0 : k - 1;

    const double period = periods[k];
    const auto half = std::max<Eigen::Index>(1, std::lround(period));
    const auto center = static_cast<Eigen::Index>(std::lround(s));
    const auto src0 = static_cast<Eigen::Index>(marks[k]) - half;
    const auto dst0 = center - half;
    for (Eigen::Index i = 0; i <= 2 * half; ++i) {
      const Eigen::Index src = src0 + i;
      const Eigen::Index dst = dst0 + i;
      if (src < 0 || src >= n || dst < 0 || dst >= n_out) continue;
      const double win =
          0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(half)));
      out.samples[dst] += win * w.samples[src];
      weight[dst] += win;
    }
    s += period;
  }
  out.samples.array() /= weight.array().max(0.1);
  out.samples = out.samples.cwiseMax(-1.0).cwiseMin(1.0);
  return out;
}

std::array<TempoVariant, 3> augmentation_triple(const Waveform& w,
                                                double target_factor,
                                                const PitchConfig& cfg)
{
  if (!(target_factor >= kMinTempoFactor && target_factor <= kMaxTempoFactor))
    throw Error("tempo factor must be in [0.25, 4]");
  const double halfway = 0.5 * (1.0 + target_factor);
  return {TempoVariant{1.0, w},
          TempoVariant{halfway, psola_stretch(w, halfway, cfg)},
          TempoVariant{target_factor, psola_stretch(w, target_factor, cfg)}};
}

PitchTrack f0_transform(const PitchTrack& f0, const F0Stats& source,
                        const F0Stats& target)
{
  if (!(source.std_hz > 0.0)) throw Error("f0_transform: source std must be > 0");
  PitchTrack out = f0;
  const double gain = target.std_hz / source.std_hz;
  const double upper = std::nextafter(0.5 * f0.sample_rate_hz, 0.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (f0.f0_hz[i] <= 0.0) continue;
    const double v = (f0.f0_hz[i] - source.mean_hz) * gain + target.mean_hz;
    out.f0_hz[i] = std::clamp(v, 1.0, upper);
  }
  return out;
}

}  // namespace patheval
