#include "patheval/syncorp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "patheval/csv.hpp"
#include "patheval/error.hpp"
#include "patheval/ppgdtw.hpp"

namespace patheval {

namespace {

constexpr double kPadSeconds = 0.15;
constexpr double kBaseTiltDbPerOctave = 6.0;
constexpr double kTiltReferenceHz = 200.0;
constexpr double kVoicedRms = 0.1;
constexpr double kNoiseFloor = 1e-4;
constexpr double kBasePpgNoise = 0.03;
constexpr double kVcPpgNoise = 0.05;
constexpr double kPpgHopMs = 10.0;

std::uint64_t splitmix64(std::uint64_t& x)
{
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Self-contained generator so that corpora are identical across standard
// library implementations.
class Rng
{
public:
  Rng(std::uint64_t seed, std::string_view stream)
      : state_(seed ^ (fnv1a(stream) * 0x9E3779B97F4A7C15ULL))
  {
    splitmix64(state_);
  }

  std::uint64_t next() { return splitmix64(state_); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  double exponential() { return -std::log(1.0 - uniform()); }
  double normal()
  {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t state_;
};

struct Phone
{
  double formants[3];
};

struct Word
{
  std::string id;
  std::vector<int> phones;
  std::vector<double> durations_ms;
};

std::string two_digits(int i)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

std::vector<Phone> phone_table(std::uint64_t seed)
{
  std::vector<Phone> table(kDefaultPhoneCount);
  for (int k = 0; k < kDefaultPhoneCount; ++k) {
    Rng rng(seed, "phone:" + std::to_string(k));
    table[static_cast<std::size_t>(k)] = {
        {rng.uniform(300, 800), rng.uniform(900, 2300), rng.uniform(2400, 3100)}};
  }
  return table;
}

std::vector<Word> word_list(const SynthSpec& spec)
{
  std::vector<Word> words;
  for (int i = 0; i < spec.n_words; ++i) {
    Rng rng(spec.seed, "word:" + std::to_string(i));
    Word w;
    w.id = "w" + two_digits(i + 1);
    const int n = 2 + rng.below(3);
    for (int k = 0; k < n; ++k) {
      w.phones.push_back(rng.below(kDefaultPhoneCount));
      w.durations_ms.push_back(rng.uniform(80, 140));
    }
    words.push_back(std::move(w));
  }
  return words;
}

struct VoiceParams
{
  double f0_hz;
  double formant_scale;
  double tilt_db_per_octave;
  double tempo;
  double artifact_noise;  // RMS of additive noise relative to the voice RMS
};

double harmonic_gain(const Phone& p, double f, const VoiceParams& v)
{
  static constexpr double kBandwidth[3] = {90.0, 110.0, 170.0};
  static constexpr double kGain[3] = {1.0, 0.6, 0.3};
  double a = 0.01;
  for (int i = 0; i < 3; ++i) {
    const double d = (f - p.formants[i] * v.formant_scale) / kBandwidth[i];
    a += kGain[i] / (1.0 + d * d);
  }
  const double octaves = std::log2(std::max(f, 50.0) / kTiltReferenceHz);
  return a * std::pow(10.0, -v.tilt_db_per_octave * octaves / 20.0);
}

// Returns the waveform and the realised phone durations in milliseconds.
std::pair<Waveform, std::vector<double>> synthesize(
    const SynthSpec& spec, const std::vector<Phone>& phones, const Word& word,
    const VoiceParams& v, Rng& rng)
{
  const double rate = spec.sample_rate_hz;
  std::vector<double> dur_ms;
  std::vector<Eigen::Index> lengths;
  Eigen::Index voiced_len = 0;
  for (double d : word.durations_ms) {
    const double ms = d * v.tempo * rng.uniform(0.95, 1.05);
    dur_ms.push_back(ms);
    lengths.push_back(std::max<Eigen::Index>(1, std::lround(ms * rate / 1000.0)));
    voiced_len += lengths.back();
  }

  const auto n_harm = std::max(1, static_cast<int>(0.45 * rate / (v.f0_hz * 1.2)));
  const std::size_t n_phones = word.phones.size();
  std::vector<double> centers(n_phones);
  std::vector<VectorXd> amps(n_phones, VectorXd(n_harm));
  Eigen::Index start = 0;
  for (std::size_t k = 0; k < n_phones; ++k) {
    centers[k] = static_cast<double>(start) + 0.5 * static_cast<double>(lengths[k]);
    start += lengths[k];
    const Phone& p = phones[static_cast<std::size_t>(word.phones[k])];
    for (int h = 0; h < n_harm; ++h)
      amps[k][h] = harmonic_gain(p, (h + 1) * v.f0_hz, v);
  }

  VectorXd voiced(voiced_len);
  VectorXd a(n_harm);
  double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  // Slow intonation contour; a steady f0 would give a line-spectrum LTAS.
  const double depth = rng.uniform(0.08, 0.15);
  const double contour_hz = rng.uniform(1.5, 3.0);
  const double contour_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double ramp = 0.02 * rate;
  std::size_t seg = 0;
  for (Eigen::Index n = 0; n < voiced_len; ++n) {
    const double t = static_cast<double>(n);
    while (seg + 1 < n_phones && t >= centers[seg + 1]) ++seg;
    if (t <= centers.front()) {
      a = amps.front();
    } else if (seg + 1 >= n_phones) {
      a = amps.back();
    } else {
      const double x = (t - centers[seg]) / (centers[seg + 1] - centers[seg]);
      a = (1.0 - x) * amps[seg] + x * amps[seg + 1];
    }
    const double f0 = v.f0_hz * (1.0 + 0.04 * (0.5 - t / static_cast<double>(voiced_len)) +
                                 depth * std::sin(2.0 * std::numbers::pi * contour_hz * t / rate + contour_phase));
    phase += 2.0 * std::numbers::pi * f0 / rate;
    // sin(h * phase) by the Chebyshev recurrence.
    const double s1 = std::sin(phase);
    const double two_cos = 2.0 * std::cos(phase);
    double prev = 0.0, cur = s1, sum = a[0] * s1;
    for (int h = 1; h < n_harm; ++h) {
      const double next = two_cos * cur - prev;
      prev = cur;
      cur = next;
      sum += a[h] * cur;
    }
    const double env = std::min({1.0, (t + 1.0) / ramp,
                                 (static_cast<double>(voiced_len) - t) / ramp});
    voiced[n] = sum * env;
  }
  const double rms = std::sqrt(voiced.squaredNorm() / static_cast<double>(voiced_len));
  if (rms > 0.0) voiced *= kVoicedRms / rms;
  if (v.artifact_noise > 0.0)
    for (Eigen::Index n = 0; n < voiced_len; ++n)
      voiced[n] += kVoicedRms * v.artifact_noise * rng.normal();

  const auto pad = static_cast<Eigen::Index>(std::lround(kPadSeconds * rate));
  Waveform w;
  w.sample_rate_hz = spec.sample_rate_hz;
  w.samples.resize(voiced_len + 2 * pad);
  for (Eigen::Index n = 0; n < w.samples.size(); ++n)
    w.samples[n] = kNoiseFloor * rng.normal();
  w.samples.segment(pad, voiced_len) += voiced;
  w.samples = w.samples.cwiseMax(-0.99).cwiseMin(0.99);
  return {std::move(w), std::move(dur_ms)};
}

Posteriorgram synthesize_ppg(const Word& word, const std::vector<double>& dur_ms,
                             double noise, Rng& rng)
{
  const int dim = kDefaultPhoneCount;
  std::vector<int> frame_phone;
  std::vector<std::size_t> frame_seg;
  for (std::size_t k = 0; k < word.phones.size(); ++k) {
    const auto n = std::max<long>(1, std::lround(dur_ms[k] / kPpgHopMs));
    for (long i = 0; i < n; ++i) {
      frame_phone.push_back(word.phones[k]);
      frame_seg.push_back(k);
    }
  }
  const auto T = static_cast<Eigen::Index>(frame_phone.size());
  auto clean_row = [&](int phone) {
    VectorXd r = VectorXd::Constant(dim, 0.15 / (dim - 1));
    r[phone] = 0.85;
    return r;
  };

  Posteriorgram p;
  p.frame_hop_ms = kPpgHopMs;
  p.frames.resize(T, dim);
  for (Eigen::Index t = 0; t < T; ++t) {
    VectorXd row = clean_row(frame_phone[static_cast<std::size_t>(t)]);
    // Soften phone boundaries.
    if (t > 0 && frame_seg[static_cast<std::size_t>(t - 1)] != frame_seg[static_cast<std::size_t>(t)])
      row = 0.7 * row + 0.3 * clean_row(frame_phone[static_cast<std::size_t>(t - 1)]);
    else if (t + 1 < T && frame_seg[static_cast<std::size_t>(t + 1)] != frame_seg[static_cast<std::size_t>(t)])
      row = 0.7 * row + 0.3 * clean_row(frame_phone[static_cast<std::size_t>(t + 1)]);

    VectorXd dirichlet(dim);
    for (int d = 0; d < dim; ++d) dirichlet[d] = rng.exponential();
    dirichlet /= dirichlet.sum();
    row = (1.0 - noise) * row + noise * dirichlet;
    p.frames.row(t) = (row / row.sum()).transpose();
  }
  return p;
}

}  // namespace

void SynthSpec::validate() const
{
  if (n_speakers_per_class < 1) throw Error("synth: n_speakers_per_class must be >= 1");
  if (n_words < 1) throw Error("synth: n_words must be >= 1");
  if (sample_rate_hz < 8000) throw Error("synth: sample rate must be >= 8000 Hz");
  if (severity_levels.empty()) throw Error("synth: at least one severity level required");
  if (tempo_factors.size() != severity_levels.size() ||
      ppg_noise_levels.size() != severity_levels.size())
    throw Error("synth: tempo_factors and ppg_noise_levels need one entry per severity level");
  for (std::size_t i = 0; i < severity_levels.size(); ++i) {
    if (severity_levels[i] < 0.0) throw Error("synth: severity levels must be non-negative");
    if (i > 0 && !(severity_levels[i] > severity_levels[i - 1]))
      throw Error("synth: severity levels must be strictly increasing");
    if (!(tempo_factors[i] > 0.0)) throw Error("synth: tempo factors must be positive");
    if (!(ppg_noise_levels[i] >= 0.0 && ppg_noise_levels[i] < 1.0))
      throw Error("synth: ppg noise levels must be in [0, 1)");
  }
  if (genders.empty()) throw Error("synth: at least one gender required");
}

std::vector<SynthSpeaker> plan_speakers(const SynthSpec& spec)
{
  spec.validate();
  const int n_levels = static_cast<int>(spec.severity_levels.size());
  std::vector<SynthSpeaker> out;
  for (Gender g : spec.genders) {
    const std::string gs(to_string(g));
    const bool male = g == Gender::M;
    auto base = [&](const std::string& id) {
      Rng rng(spec.seed, "speaker:" + id);
      SynthSpeaker s;
      s.speaker_id = id;
      s.gender = g;
      s.f0_hz = male ? rng.uniform(100, 140) : rng.uniform(180, 240);
      s.formant_scale = (male ? 1.0 : 1.15) * rng.uniform(0.96, 1.04);
      s.tilt_jitter = std::clamp(0.2 * rng.normal(), -0.4, 0.4);
      s.tempo_factor = rng.uniform(0.97, 1.03);
      return s;
    };
    for (int i = 0; i < spec.n_speakers_per_class; ++i) {
      SynthSpeaker c = base("C" + gs + two_digits(i + 1));
      c.group = Group::control;
      out.push_back(std::move(c));
    }
    for (int i = 0; i < spec.n_speakers_per_class; ++i) {
      SynthSpeaker d = base(gs + two_digits(i + 1));
      const int level = i % n_levels;
      const auto li = static_cast<std::size_t>(level);
      d.group = Group::dysarthric;
      d.level = level;
      d.severity_tilt = spec.severity_levels[li];
      d.tempo_factor *= spec.tempo_factors[li];
      d.ppg_noise = spec.ppg_noise_levels[li];
      d.paired_control_id = "C" + gs + two_digits(i + 1);
      d.subjective_score = 1.0 / (1.0 + level);
      d.band = level == 0 ? Band::high : level == 1 ? Band::mid : Band::low;
      out.push_back(std::move(d));
    }
  }
  return out;
}

Manifest generate(const SynthSpec& spec, const std::filesystem::path& out_dir)
{
  const auto speakers = plan_speakers(spec);
  const auto phones = phone_table(spec.seed);
  const auto words = word_list(spec);

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "wav", ec);
  std::filesystem::create_directories(out_dir / "ppg", ec);
  if (ec) throw Error("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  Manifest m;
  m.root_dir = out_dir;
  std::ofstream transcripts(out_dir / "transcripts.csv", std::ios::binary);
  if (!transcripts) throw Error("cannot write transcripts in '" + out_dir.string() + "'");
  transcripts << "utterance_id,reference,hypothesis\n";

  auto emit = [&](const SynthSpeaker& s, const Word& word, bool vc,
                  const std::string& utt_id, const VoiceParams& voice,
                  double base_noise, double ppg_noise, double error_rate) {
    Rng rng(spec.seed, "utt:" + utt_id);
    auto [wave, dur_ms] = synthesize(spec, phones, word, voice, rng);
    // Degradation varies word to word; the level sets its mean.
    const double lambda = base_noise + ppg_noise * rng.uniform(0.5, 1.5);
    const auto ppg = synthesize_ppg(word, dur_ms, std::min(0.95, lambda), rng);
    write_wav(wave, out_dir / "wav" / (utt_id + ".wav"), WavEncoding::pcm16);
    write_posteriorgram(ppg, out_dir / "ppg" / (utt_id + ".csv"));

    std::string hyp = word.id;
    if (rng.uniform() < error_rate) {
      const auto& pick = words[static_cast<std::size_t>(rng.below(spec.n_words))].id;
      hyp = pick == word.id ? "unk" : pick;
    }
    if (rng.uniform() < 0.25 * error_rate) hyp += " uh";
    transcripts << utt_id << ',' << word.id << ',' << hyp << '\n';

    UtteranceRecord r;
    r.utterance_id = utt_id;
    r.speaker_id = s.speaker_id;
    r.gender = s.gender;
    r.group = vc ? Group::converted : s.group;
    r.intelligibility_band = s.band;
    r.subjective_score = s.subjective_score;
    r.word_id = word.id;
    r.wav_path = "wav/" + utt_id + ".wav";
    r.ppg_path = "ppg/" + utt_id + ".csv";
    if (vc)
      r.paired_control_id = "C" + std::string(to_string(s.gender)) + "01";
    else
      r.paired_control_id = s.paired_control_id;
    m.records.push_back(std::move(r));
  };

  for (const auto& s : speakers) {
    const VoiceParams voice{s.f0_hz, s.formant_scale,
                            kBaseTiltDbPerOctave + s.severity_tilt + s.tilt_jitter,
                            s.tempo_factor, 0.0};
    const double err = 0.05 + s.ppg_noise;
    for (const auto& word : words)
      emit(s, word, false, s.speaker_id + "_" + word.id, voice, kBasePpgNoise, s.ppg_noise, err);
  }

  if (spec.converted) {
    for (const auto& s : speakers) {
      if (s.group != Group::dysarthric) continue;
      const std::string source = "C" + std::string(to_string(s.gender)) + "01";
      if (s.paired_control_id == source) continue;  // conversion pair target
      Rng rng(spec.seed, "vc:" + s.speaker_id);
      const VoiceParams voice{
          s.f0_hz * rng.uniform(0.98, 1.02), s.formant_scale * rng.uniform(0.98, 1.02),
          kBaseTiltDbPerOctave + s.severity_tilt + s.tilt_jitter + 0.3 * rng.normal(),
          s.tempo_factor, 0.02};
      const double err = 0.08 + s.ppg_noise;
      for (const auto& word : words)
        emit(s, word, true, "VC_" + s.speaker_id + "_" + word.id, voice,
             kBasePpgNoise + kVcPpgNoise, s.ppg_noise, err);
    }
  }

  write_manifest(m, out_dir / "manifest.csv");

  std::ofstream table(out_dir / "speakers.csv", std::ios::binary);
  table << "speaker_id,gender,group,level,severity_tilt,tempo_factor,ppg_noise,f0_hz,paired_control_id\n";
  for (const auto& s : speakers)
    table << s.speaker_id << ',' << to_string(s.gender) << ',' << to_string(s.group)
          << ',' << s.level << ',' << csv::format_double(s.severity_tilt) << ','
          << csv::format_double(s.tempo_factor) << ','
          << csv::format_double(s.ppg_noise) << ',' << csv::format_double(s.f0_hz)
          << ',' << s.paired_control_id.value_or("") << '\n';
  return m;
}

}  // namespace patheval
