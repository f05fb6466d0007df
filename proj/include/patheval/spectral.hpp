#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string_view>

#include "patheval/corpus.hpp"
#include "patheval/error.hpp"
#include "patheval/types.hpp"

namespace patheval {

enum class WindowKind { hann };

struct LtasConfig
{
  int fft_size = 512;
  int hop = 128;
  WindowKind window = WindowKind::hann;

  int n_bins() const { return fft_size / 2 + 1; }
  void validate() const;

  // Voice-quality detector features: 512-point FFT, 128-sample shift.
  static LtasConfig detector() { return {512, 128, WindowKind::hann}; }
  // Intelligibility-decrease measure: 1024-point FFT, 256-sample shift.
  static LtasConfig skl() { return {1024, 256, WindowKind::hann}; }
};

enum class LtasScale { linear_power, db, normalized };

std::string_view to_string(LtasScale s);

struct Ltas
{
  VectorXd bins;
  LtasConfig config;
  LtasScale scale = LtasScale::linear_power;
  int sample_rate_hz = 16000;

  double bin_frequency_hz(Eigen::Index k) const
  {
    return static_cast<double>(k) * sample_rate_hz / config.fft_size;
  }
};

// Periodic Hann window, w[k] = 0.5 (1 - cos(2 pi k / n)).
template <typename Scalar = double>
Vector<Scalar> hann_window(Eigen::Index n)
{
  if (n < 2) throw Error("hann_window requires n >= 2");
  Vector<Scalar> w(n);
  for (Eigen::Index k = 0; k < n; ++k)
    w[k] = Scalar(0.5) *
           (Scalar(1) - std::cos(Scalar(2) * std::numbers::pi_v<Scalar> *
                                 Scalar(k) / Scalar(n)));
  return w;
}

// |FFT|^2 of each windowed frame over non-negative frequencies. Frame f covers
// samples [f*hop, f*hop + fft_size); a trailing partial frame is dropped.
FrameMatrixXd stft_power_frames(const Waveform& w, const LtasConfig& cfg);

// Per-bin mean of the short-time power spectra.
Ltas compute_ltas(const Waveform& w, const LtasConfig& cfg);

Ltas to_db(const Ltas& l, double floor_db = -120.0);
Ltas normalize(const Ltas& l);

// One row per bin: bin_index,frequency_hz,value,scale
void write_ltas_csv(const Ltas& l, const std::filesystem::path& path);

}  // namespace patheval
