#include "patheval/sklmeasure.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "patheval/csv.hpp"

namespace patheval {

double skl_divergence(const Ltas& p, const Ltas& q)
{
  if (p.scale != LtasScale::normalized || q.scale != LtasScale::normalized)
    throw Error("skl_divergence: both LTAS must be normalized");
  return skl_divergence(p.bins, q.bins);
}

namespace {

using SpeakerKey = std::pair<std::string, Kind>;

// word_id -> record with the smallest utterance_id for that word.
using WordIndex = std::map<std::string, const UtteranceRecord*>;

void index_word(WordIndex& idx, const UtteranceRecord& r)
{
  auto [it, inserted] = idx.emplace(r.word_id, &r);
  if (!inserted && r.utterance_id < it->second->utterance_id) it->second = &r;
}

}  // namespace

PairwiseSkl pairwise_word_skl(const Manifest& m,
                              const std::string& reference_speaker,
                              LtasCache& cache)
{
  WordIndex ref_words;
  std::map<SpeakerKey, WordIndex> others;
  for (const auto& r : m.records) {
    if (r.speaker_id == reference_speaker) {
      if (r.is_ground_truth()) index_word(ref_words, r);
      continue;
    }
    index_word(others[{r.speaker_id, r.kind()}], r);
  }
  if (ref_words.empty())
    throw Error("unknown reference speaker '" + reference_speaker + "'");

  std::vector<const UtteranceRecord*> needed;
  for (const auto& [w, r] : ref_words) needed.push_back(r);
  for (const auto& [key, words] : others)
    for (const auto& [w, r] : words)
      if (ref_words.count(w)) needed.push_back(r);
  cache.compute(needed);

  PairwiseSkl out;
  for (const auto& [key, words] : others) {
    const auto& [speaker, kind] = key;
    std::set<std::string> all_words;
    for (const auto& [w, r] : ref_words) all_words.insert(w);
    for (const auto& [w, r] : words) all_words.insert(w);

    for (const auto& word : all_words) {
      auto skip = [&](std::string reason) {
        out.skipped.push_back(
            {reference_speaker, speaker, kind, word, std::move(reason)});
      };
      const auto ref_it = ref_words.find(word);
      const auto other_it = words.find(word);
      if (ref_it == ref_words.end()) {
        skip("word missing for reference speaker");
        continue;
      }
      if (other_it == words.end()) {
        skip("word missing for other speaker");
        continue;
      }
      const Ltas* a = cache.get(ref_it->second->utterance_id);
      const Ltas* b = cache.get(other_it->second->utterance_id);
      if (!a || !b) {
        skip("analysis failed for utterance '" +
             (a ? other_it->second->utterance_id : ref_it->second->utterance_id) +
             "'");
        continue;
      }
      if (a->bins.sum() <= 0.0 || b->bins.sum() <= 0.0) {
        skip("silent utterance");
        continue;
      }
      out.entries.push_back({reference_speaker, speaker, word,
                             skl_divergence(normalize(*a), normalize(*b)),
                             other_it->second->intelligibility_band, kind});
    }
  }
  return out;
}

SklAnalysis group_and_test(const std::vector<SklEntry>& entries,
                           const std::vector<Band>& bands_order)
{
  std::map<std::pair<Kind, Band>, std::vector<double>> groups;
  for (const auto& e : entries) groups[{e.other_kind, e.other_band}].push_back(e.skl);

  auto as_vector = [](const std::vector<double>& v) {
    return VectorXd(Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };

  SklAnalysis a;
  for (Kind kind : {Kind::gt, Kind::vc})
    for (Band band : bands_order) {
      auto it = groups.find({kind, band});
      if (it == groups.end()) continue;
      const VectorXd v = as_vector(it->second);
      a.summaries.push_back({band, kind, quantile(v, 0.5), quantile(v, 0.25),
                             quantile(v, 0.75),
                             static_cast<std::size_t>(v.size())});
    }

  for (Kind kind : {Kind::gt, Kind::vc}) {
    std::vector<std::pair<Band, Kind>> chain;
    for (Band band : bands_order) {
      if (groups.count({kind, band}))
        chain.emplace_back(band, kind);
      else if (kind == Kind::vc && band == Band::control &&
               groups.count({Kind::gt, Band::control}))
        chain.emplace_back(band, Kind::gt);
    }
    // A chain consisting only of the borrowed control group has nothing to test.
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      BandTest t;
      t.kind = kind;
      std::tie(t.band_a, t.kind_a) = chain[i];
      std::tie(t.band_b, t.kind_b) = chain[i + 1];
      const auto& ga = groups.at({t.kind_a, t.band_a});
      const auto& gb = groups.at({t.kind_b, t.band_b});
      if (ga.size() < 2 || gb.size() < 2) {
        t.status = "insufficient";
      } else {
        try {
          t.result = welch_ttest(as_vector(ga), as_vector(gb));
          t.status = "ok";
        } catch (const Error&) {
          t.status = "degenerate";
        }
      }
      a.tests.push_back(std::move(t));
    }
  }
  return a;
}

nlohmann::json to_json(const SklAnalysis& a)
{
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : a.summaries)
    summaries.push_back({{"band", to_string(s.band)},
                         {"kind", to_string(s.kind)},
                         {"median", s.median},
                         {"q1", s.q1},
                         {"q3", s.q3},
                         {"n", s.n}});
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : a.tests) {
    nlohmann::json j{{"panel", to_string(t.kind)},
                     {"band_a", to_string(t.band_a)},
                     {"kind_a", to_string(t.kind_a)},
                     {"band_b", to_string(t.band_b)},
                     {"kind_b", to_string(t.kind_b)},
                     {"status", t.status}};
    if (t.result) {
      j["t_statistic"] = t.result->t_statistic;
      j["degrees_of_freedom"] = t.result->degrees_of_freedom;
      j["p_value"] = t.result->p_value;
      j["stars"] = to_string(t.result->stars);
    }
    tests.push_back(std::move(j));
  }
  return {{"summaries", summaries}, {"tests", tests}};
}

void write_skl_entries_csv(const std::vector<SklEntry>& entries,
                           const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "reference_speaker,other_speaker,word_id,skl,other_band,other_kind\n";
  for (const auto& e : entries)
    out << csv::escape(e.reference_speaker) << ','
        << csv::escape(e.other_speaker) << ',' << csv::escape(e.word_id) << ','
        << csv::format_double(e.skl) << ',' << to_string(e.other_band) << ','
        << to_string(e.other_kind) << '\n';
}

}  // namespace patheval
