#include "patheval/spectral.hpp"

#include <complex>
#include <fstream>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "patheval/csv.hpp"

namespace patheval {

void LtasConfig::validate() const
{
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0)
    throw Error("fft_size must be a power of two >= 2");
  if (hop <= 0 || hop > fft_size) throw Error("hop must be in (0, fft_size]");
}

std::string_view to_string(LtasScale s)
{
  switch (s) {
    case LtasScale::linear_power: return "linear_power";
    case LtasScale::db: return "db";
    case LtasScale::normalized: return "normalized";
  }
  return "?";
}

FrameMatrixXd stft_power_frames(const Waveform& w, const LtasConfig& cfg)
{
  cfg.validate();
  const Eigen::Index n = w.samples.size();
  const Eigen::Index size = cfg.fft_size;
  if (n < size)
    throw Error("waveform shorter than fft_size (" + std::to_string(n) +
                " < " + std::to_string(size) + " samples)");

  const Eigen::Index n_frames = 1 + (n - size) / cfg.hop;
  const Eigen::Index n_bins = cfg.n_bins();
  const VectorXd window = hann_window(size);

  FrameMatrixXd power(n_frames, n_bins);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<std::size_t>(size));
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index f = 0; f < n_frames; ++f) {
    Eigen::Map<VectorXd>(frame.data(), size) =
        w.samples.segment(f * cfg.hop, size).cwiseProduct(window);
    fft.fwd(spectrum, frame);
    for (Eigen::Index k = 0; k < n_bins; ++k)
      power(f, k) = std::norm(spectrum[static_cast<std::size_t>(k)]);
  }
  return power;
}

Ltas compute_ltas(const Waveform& w, const LtasConfig& cfg)
{
  const FrameMatrixXd power = stft_power_frames(w, cfg);
  Ltas l;
  l.bins = power.colwise().mean().transpose();
  l.config = cfg;
  l.scale = LtasScale::linear_power;
  l.sample_rate_hz = w.sample_rate_hz;
  return l;
}

Ltas to_db(const Ltas& l, double floor_db)
{
  if (l.scale != LtasScale::linear_power)
    throw Error("to_db requires a linear_power LTAS");
  Ltas out = l;
  out.bins = l.bins.unaryExpr([floor_db](double v) {
    return v > 0.0 ? std::max(10.0 * std::log10(v), floor_db) : floor_db;
  });
  out.scale = LtasScale::db;
  return out;
}

Ltas normalize(const Ltas& l)
{
  if (l.scale != LtasScale::linear_power && l.scale != LtasScale::normalized)
    throw Error("normalize requires a linear_power LTAS");
  const double total = l.bins.sum();
  if (!(total > 0.0)) throw Error("cannot normalize LTAS: silent utterance");
  Ltas out = l;
  out.bins = l.bins / total;
  out.scale = LtasScale::normalized;
  return out;
}

void write_ltas_csv(const Ltas& l, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "bin_index,frequency_hz,value,scale\n";
  for (Eigen::Index k = 0; k < l.bins.size(); ++k)
    out << k << ',' << csv::format_double(l.bin_frequency_hz(k)) << ','
        << csv::format_double(l.bins[k]) << ',' << to_string(l.scale) << '\n';
}

}  // namespace patheval
