#include "patheval/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "patheval/csv.hpp"
#include "patheval/error.hpp"

namespace patheval {

namespace csv {

std::vector<std::string> split_line(std::string_view line)
{
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error("unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string escape(std::string_view field)
{
  if (field.find_first_of(",\"\n") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double value)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

std::string trim(std::string_view s)
{
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  auto b = std::find_if(s.begin(), s.end(), not_space);
  auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string(b, e) : std::string();
}

}  // namespace csv

namespace {

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<std::string> optional_field(const std::string& s)
{
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

std::string_view to_string(Gender g) { return g == Gender::M ? "M" : "F"; }

std::string_view to_string(Group g)
{
  switch (g) {
    case Group::control: return "control";
    case Group::dysarthric: return "dysarthric";
    case Group::converted: return "converted";
  }
  return "?";
}

std::string_view to_string(Band b)
{
  switch (b) {
    case Band::high: return "high";
    case Band::mid: return "mid";
    case Band::low: return "low";
    case Band::control: return "control";
  }
  return "?";
}

std::string_view to_string(Kind k) { return k == Kind::gt ? "gt" : "vc"; }

Gender parse_gender(std::string_view s)
{
  if (s == "M" || s == "m") return Gender::M;
  if (s == "F" || s == "f") return Gender::F;
  throw Error("invalid gender '" + std::string(s) + "'");
}

Group parse_group(std::string_view s)
{
  const auto v = lower(s);
  if (v == "control") return Group::control;
  if (v == "dysarthric") return Group::dysarthric;
  if (v == "converted") return Group::converted;
  throw Error("invalid group '" + std::string(s) + "'");
}

Band parse_band(std::string_view s)
{
  const auto v = lower(s);
  if (v == "high") return Band::high;
  if (v == "mid") return Band::mid;
  if (v == "low" || v == "very_low" || v == "very low" || v == "verylow")
    return Band::low;
  if (v == "control") return Band::control;
  throw Error("invalid intelligibility_band '" + std::string(s) + "'");
}

std::filesystem::path Manifest::resolve(const std::string& path) const
{
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  return root_dir / p;
}

const UtteranceRecord* Manifest::find(std::string_view utterance_id) const
{
  for (const auto& r : records)
    if (r.utterance_id == utterance_id) return &r;
  return nullptr;
}

Manifest parse_manifest(std::string_view text, std::filesystem::path root_dir,
                        std::string_view source)
{
  Manifest m;
  m.root_dir = std::move(root_dir);

  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line))
    throw Error(std::string(source) + ": empty manifest");
  if (csv::trim(line) != kManifestHeader)
    throw Error(std::string(source) + ": unexpected header, expected '" +
                std::string(kManifestHeader) + "'");

  std::unordered_set<std::string> seen;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto where = std::string(source) + " row " + std::to_string(row);

    std::vector<std::string> f;
    try {
      f = csv::split_line(line);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    if (f.size() != 10)
      throw Error(where + ": expected 10 fields, got " +
                  std::to_string(f.size()));

    UtteranceRecord r;
    r.utterance_id = f[0];
    r.speaker_id = f[1];
    auto field = [&](const char* name, auto parse, const std::string& v) {
      try {
        return parse(v);
      } catch (const Error& e) {
        throw Error(where + ", field " + name + ": " + e.what());
      }
    };
    r.gender = field("gender", parse_gender, f[2]);
    r.group = field("group", parse_group, f[3]);
    r.intelligibility_band =
        field("intelligibility_band", parse_band, f[4]);

    if (!f[5].empty()) {
      double v = 0.0;
      const auto* b = f[5].data();
      auto [ptr, ec] = std::from_chars(b, b + f[5].size(), v);
      if (ec != std::errc() || ptr != b + f[5].size() || !std::isfinite(v))
        throw Error(where + ", field subjective_score: not a number '" +
                    f[5] + "'");
      // UASpeech reports percentages; anything above 1 is taken as one.
      if (v > 1.0) v /= 100.0;
      if (v < 0.0 || v > 1.0)
        throw Error(where + ", field subjective_score: out of range '" +
                    f[5] + "'");
      r.subjective_score = v;
    }
    r.word_id = f[6];
    r.wav_path = f[7];
    r.ppg_path = optional_field(f[8]);
    r.paired_control_id = optional_field(f[9]);

    if (r.utterance_id.empty())
      throw Error(where + ", field utterance_id: empty");
    if (r.speaker_id.empty()) throw Error(where + ", field speaker_id: empty");
    if (r.wav_path.empty()) throw Error(where + ", field wav_path: empty");
    if (r.group == Group::control && r.intelligibility_band != Band::control)
      throw Error(where +
                  ", field intelligibility_band: control speakers must use "
                  "band 'control'");
    if (r.group != Group::control && r.intelligibility_band == Band::control)
      throw Error(where +
                  ", field intelligibility_band: band 'control' is reserved "
                  "for control speakers");
    if (!seen.insert(r.utterance_id).second)
      throw Error(where + ": duplicate utterance_id '" + r.utterance_id + "'");

    m.records.push_back(std::move(r));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto root = path.parent_path();
  if (root.empty()) root = ".";
  return parse_manifest(ss.str(), root, path.string());
}

void write_manifest(const Manifest& m, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest '" + path.string() + "'");
  out << kManifestHeader << '\n';
  for (const auto& r : m.records) {
    out << csv::escape(r.utterance_id) << ',' << csv::escape(r.speaker_id)
        << ',' << to_string(r.gender) << ',' << to_string(r.group) << ','
        << to_string(r.intelligibility_band) << ','
        << (r.subjective_score ? csv::format_double(*r.subjective_score) : "")
        << ',' << csv::escape(r.word_id) << ',' << csv::escape(r.wav_path)
        << ',' << csv::escape(r.ppg_path.value_or("")) << ','
        << csv::escape(r.paired_control_id.value_or("")) << '\n';
  }
}

}  // namespace patheval
