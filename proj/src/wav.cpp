#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "patheval/corpus.hpp"
#include "patheval/error.hpp"

namespace patheval {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const char* p)
{
  const auto* u = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint16_t>(u[0] | (u[1] << 8));
}

std::uint32_t le32(const char* p)
{
  const auto* u = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint32_t>(u[0]) |
         (static_cast<std::uint32_t>(u[1]) << 8) |
         (static_cast<std::uint32_t>(u[2]) << 16) |
         (static_cast<std::uint32_t>(u[3]) << 24);
}

void put16(std::string& s, std::uint16_t v)
{
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put32(std::string& s, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

Waveform decode_wav(std::string_view bytes)
{
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE")
    throw Error("not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::string_view data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto id = bytes.substr(pos, 4);
    const std::uint32_t size = le32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      if (id == "data") throw Error("truncated WAV data chunk");
      throw Error("truncated WAV chunk '" + std::string(id) + "'");
    }
    if (id == "fmt ") {
      if (size < 16) throw Error("malformed fmt chunk");
      const char* p = bytes.data() + body;
      format = le16(p);
      channels = le16(p + 2);
      rate = le32(p + 4);
      bits = le16(p + 14);
      if (format == kFormatExtensible && size >= 40)
        format = le16(p + 24);  // first two bytes of the SubFormat GUID
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.substr(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw Error("WAV file has no fmt chunk");
  if (!have_data) throw Error("WAV file has no data chunk (truncated?)");
  if (channels != 1)
    throw Error("mono required, file has " + std::to_string(channels) +
                " channels");
  if (rate == 0) throw Error("WAV sample rate is zero");

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    if (data.size() % 2 != 0) throw Error("truncated 16-bit sample data");
    const auto n = static_cast<Eigen::Index>(data.size() / 2);
    w.samples.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(le16(data.data() + 2 * i));
      w.samples[i] = v / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    if (data.size() % 4 != 0) throw Error("truncated float sample data");
    const auto n = static_cast<Eigen::Index>(data.size() / 4);
    w.samples.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::uint32_t bitsv = le32(data.data() + 4 * i);
      float f;
      std::memcpy(&f, &bitsv, sizeof f);
      if (!std::isfinite(f)) throw Error("non-finite float sample");
      w.samples[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
    }
  } else {
    throw Error("unsupported WAV codec (format " + std::to_string(format) +
                ", " + std::to_string(bits) +
                " bits); PCM16 or float32 required");
  }
  return w;
}

Waveform read_wav(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open WAV '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return decode_wav(ss.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string encode_wav(const Waveform& w, WavEncoding encoding)
{
  const bool pcm = encoding == WavEncoding::pcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block = bits / 8;
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_bytes = n * block;

  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  put32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, pcm ? kFormatPcm : kFormatFloat);
  put16(s, 1);
  put32(s, static_cast<std::uint32_t>(w.sample_rate_hz));
  put32(s, static_cast<std::uint32_t>(w.sample_rate_hz) * block);
  put16(s, block);
  put16(s, bits);
  s += "data";
  put32(s, data_bytes);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double x = std::clamp(w.samples[i], -1.0, 1.0);
    if (pcm) {
      const long q = std::lround(x * 32768.0);
      put16(s, static_cast<std::uint16_t>(
                   static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
    } else {
      const float f = static_cast<float>(x);
      std::uint32_t u;
      std::memcpy(&u, &f, sizeof u);
      put32(s, u);
    }
  }
  return s;
}

void write_wav(const Waveform& w, const std::filesystem::path& path,
               WavEncoding encoding)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write WAV '" + path.string() + "'");
  const auto bytes = encode_wav(w, encoding);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace patheval
