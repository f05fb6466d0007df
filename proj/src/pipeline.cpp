#include "patheval/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "patheval/csv.hpp"
#include "patheval/error.hpp"
#include "patheval/features.hpp"
#include "patheval/sklmeasure.hpp"
#include "patheval/tempo.hpp"

namespace patheval {

namespace fs = std::filesystem;

LtasConfig RunConfig::ltas_for(LtasPreset fallback) const
{
  return ltas_preset.value_or(fallback) == LtasPreset::detector ? LtasConfig::detector()
                                                                : LtasConfig::skl();
}

RunConfig run_config_from_json(const nlohmann::json& j)
{
  RunConfig c;
  try {
    if (j.contains("manifest_path")) c.manifest_path = j.at("manifest_path").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("ltas_preset")) {
      const auto p = j.at("ltas_preset").get<std::string>();
      if (p == "detector")
        c.ltas_preset = LtasPreset::detector;
      else if (p == "skl")
        c.ltas_preset = LtasPreset::skl;
      else
        throw Error("ltas_preset must be 'detector' or 'skl'");
    }
    if (j.contains("lasso")) {
      const auto& l = j.at("lasso");
      c.lasso.alpha = l.value("alpha", c.lasso.alpha);
      c.lasso.max_iter = l.value("max_iter", c.lasso.max_iter);
      c.lasso.tol = l.value("tol", c.lasso.tol);
    }
    if (j.contains("vad")) {
      const auto& v = j.at("vad");
      c.vad.frame_ms = v.value("frame_ms", c.vad.frame_ms);
      c.vad.hop_ms = v.value("hop_ms", c.vad.hop_ms);
      c.vad.threshold_db_below_peak = v.value("threshold_db_below_peak", c.vad.threshold_db_below_peak);
      c.vad.min_speech_ms = v.value("min_speech_ms", c.vad.min_speech_ms);
      c.vad.hangover_ms = v.value("hangover_ms", c.vad.hangover_ms);
    }
    c.apply_vad = j.value("apply_vad", c.apply_vad);
    if (j.contains("feature_scale")) {
      const auto s = j.at("feature_scale").get<std::string>();
      if (s == "db")
        c.feature_scale = FeatureScale::db;
      else if (s == "linear")
        c.feature_scale = FeatureScale::linear;
      else
        throw Error("feature_scale must be 'db' or 'linear'");
    }
    if (j.contains("logistic") && !j.at("logistic").is_null()) {
      const auto& l = j.at("logistic");
      c.logistic = LogisticParams{l.at("slope").get<double>(), l.at("midpoint").get<double>()};
      if (!(c.logistic->slope > 0.0)) throw Error("logistic slope must be > 0");
    }
    if (j.contains("reference_speaker") && !j.at("reference_speaker").is_null())
      c.reference_speaker = j.at("reference_speaker").get<std::string>();
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed run config: ") + e.what());
  }
  c.lasso.validate();
  c.vad.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  try {
    return run_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

nlohmann::json to_json(const RunConfig& c)
{
  nlohmann::json j{
      {"manifest_path", c.manifest_path.string()},
      {"output_dir", c.output_dir.string()},
      {"lasso", {{"alpha", c.lasso.alpha}, {"max_iter", c.lasso.max_iter}, {"tol", c.lasso.tol}}},
      {"vad",
       {{"frame_ms", c.vad.frame_ms},
        {"hop_ms", c.vad.hop_ms},
        {"threshold_db_below_peak", c.vad.threshold_db_below_peak},
        {"min_speech_ms", c.vad.min_speech_ms},
        {"hangover_ms", c.vad.hangover_ms}}},
      {"apply_vad", c.apply_vad},
      {"feature_scale", c.feature_scale == FeatureScale::db ? "db" : "linear"},
      {"seed", c.seed},
  };
  if (c.ltas_preset)
    j["ltas_preset"] = *c.ltas_preset == LtasPreset::detector ? "detector" : "skl";
  if (c.logistic)
    j["logistic"] = {{"slope", c.logistic->slope}, {"midpoint", c.logistic->midpoint}};
  if (c.reference_speaker) j["reference_speaker"] = *c.reference_speaker;
  return j;
}

void write_json(const nlohmann::json& j, const fs::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

namespace {

Manifest open_manifest(const RunConfig& cfg)
{
  if (cfg.manifest_path.empty()) throw Error("no manifest given (--manifest)");
  return load_manifest(cfg.manifest_path);
}

fs::path prepare_output(const RunConfig& cfg)
{
  if (cfg.output_dir.empty()) throw Error("no output directory given (--out)");
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error("cannot create '" + cfg.output_dir.string() + "': " + ec.message());
  return cfg.output_dir;
}

void write_skipped(const std::map<std::string, std::string>& skipped, const fs::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "utterance_id,reason\n";
  for (const auto& [id, reason] : skipped)
    out << csv::escape(id) << ',' << csv::escape(reason) << '\n';
}

std::string file_stem_for(const std::string& utterance_id)
{
  std::string s = utterance_id;
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '/' || c == '\\'; }, '_');
  return s;
}

VectorXd as_vector(const std::vector<double>& v)
{
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

RunSummary run_vad(const RunConfig& cfg)
{
  cfg.vad.validate();
  const Manifest m = open_manifest(cfg);
  const fs::path out = prepare_output(cfg);
  fs::create_directories(out / "trimmed");

  const std::size_t n = m.records.size();
  std::vector<std::vector<Segment>> segments(n);
  std::vector<std::string> errors(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& r = m.records[i];
    try {
      const Waveform w = read_wav(m.resolve(r.wav_path));
      segments[i] = detect_voice_activity(w, cfg.vad);
      const Waveform trimmed = trim_silence(w, segments[i]);
      write_wav(trimmed, out / "trimmed" / (file_stem_for(r.utterance_id) + ".wav"));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  Manifest trimmed;
  trimmed.root_dir = out;
  std::map<std::string, std::string> skipped;
  std::ofstream seg_out(out / "segments.csv", std::ios::binary);
  seg_out << "utterance_id,start_sample,end_sample\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = m.records[i];
    if (!errors[i].empty()) {
      skipped[r.utterance_id] = errors[i];
      continue;
    }
    for (const auto& s : segments[i])
      seg_out << csv::escape(r.utterance_id) << ',' << s.start << ',' << s.end << '\n';
    UtteranceRecord t = r;
    t.wav_path = "trimmed/" + file_stem_for(r.utterance_id) + ".wav";
    if (t.ppg_path) t.ppg_path = fs::absolute(m.resolve(*t.ppg_path)).lexically_normal().string();
    trimmed.records.push_back(std::move(t));
  }
  write_manifest(trimmed, out / "manifest.csv");
  write_skipped(skipped, out / "skipped.csv");
  return {skipped.size(), {out / "segments.csv", out / "manifest.csv", out / "skipped.csv"}};
}

RunSummary run_detect(const RunConfig& cfg)
{
  const Manifest m = open_manifest(cfg);
  const FoldPlan plan = build_folds(m);
  DetectionOptions opts;
  opts.vad = cfg.vad;
  opts.apply_vad = cfg.apply_vad;
  opts.feature_scale = cfg.feature_scale;
  const DetectionReport report =
      run_detection(m, plan, cfg.ltas_for(LtasPreset::detector), cfg.lasso, opts);

  const fs::path out = prepare_output(cfg);
  fs::create_directories(out / "models");
  RunSummary summary;
  nlohmann::json j = to_json(report);
  nlohmann::json excluded = plan.excluded_speakers;
  j["excluded_speakers"] = excluded;
  nlohmann::json conv = nlohmann::json::array();
  for (const auto& p : plan.conversion_pairs)
    conv.push_back({{"source_control", p.control_id}, {"dysarthric", p.dysarthric_id},
                    {"gender", to_string(p.gender)}});
  j["conversion_pairs"] = conv;
  write_json(j, out / "detection.json");
  write_detection_csv(report, out / "detection.csv");
  for (const auto& f : report.folds) {
    const auto path = out / "models" / ("fold_" + file_stem_for(f.fold.held_out.dysarthric_id) + ".json");
    write_json(to_json(f.model), path);
    summary.outputs.push_back(path);
  }
  write_skipped(report.skipped, out / "skipped.csv");
  summary.warnings = report.skipped.size();
  summary.outputs.insert(summary.outputs.begin(),
                         {out / "detection.json", out / "detection.csv", out / "skipped.csv"});
  return summary;
}

RunSummary run_skl(const RunConfig& cfg)
{
  const Manifest m = open_manifest(cfg);
  std::vector<std::string> references;
  if (cfg.reference_speaker) {
    references.push_back(*cfg.reference_speaker);
  } else {
    std::set<std::string> controls;
    for (const auto& r : m.records)
      if (r.group == Group::control) controls.insert(r.speaker_id);
    references.assign(controls.begin(), controls.end());
  }
  if (references.empty()) throw Error("skl: manifest has no control speakers to use as references");

  LtasCache cache(m, cfg.ltas_for(LtasPreset::skl), cfg.vad, cfg.apply_vad);
  std::vector<SklEntry> entries;
  std::vector<SklSkip> skipped_words;
  for (const auto& ref : references) {
    auto pw = pairwise_word_skl(m, ref, cache);
    entries.insert(entries.end(), pw.entries.begin(), pw.entries.end());
    skipped_words.insert(skipped_words.end(), pw.skipped.begin(), pw.skipped.end());
  }
  const SklAnalysis analysis = group_and_test(entries);

  const fs::path out = prepare_output(cfg);
  write_skl_entries_csv(entries, out / "skl_entries.csv");
  nlohmann::json j = to_json(analysis);
  j["reference_speakers"] = references;
  nlohmann::json skips = nlohmann::json::array();
  for (const auto& s : skipped_words)
    skips.push_back({{"reference_speaker", s.reference_speaker},
                     {"other_speaker", s.other_speaker},
                     {"other_kind", to_string(s.other_kind)},
                     {"word_id", s.word_id},
                     {"reason", s.reason}});
  j["skipped_words"] = skips;
  j["unit"] = "nats";
  write_json(j, out / "skl_summary.json");
  write_skipped(cache.failures(), out / "skipped.csv");
  return {cache.failures().size(),
          {out / "skl_entries.csv", out / "skl_summary.json", out / "skipped.csv"}};
}

VerificationRun verify_corpus(const Manifest& m,
                              const std::optional<std::string>& reference_speaker,
                              const std::optional<LogisticParams>& logistic)
{
  VerificationRun run;
  if (reference_speaker) {
    run.reference_speaker = *reference_speaker;
  } else {
    std::set<std::string> controls;
    for (const auto& r : m.records)
      if (r.group == Group::control && r.ppg_path) controls.insert(r.speaker_id);
    if (controls.empty()) throw Error("verify: no control speaker with posteriorgrams");
    run.reference_speaker = *controls.begin();
  }

  std::map<std::string, const UtteranceRecord*> ref_by_word;
  for (const auto& r : m.records)
    if (r.speaker_id == run.reference_speaker && r.is_ground_truth() && r.ppg_path) {
      auto [it, fresh] = ref_by_word.emplace(r.word_id, &r);
      if (!fresh && r.utterance_id < it->second->utterance_id) it->second = &r;
    }
  if (ref_by_word.empty())
    throw Error("verify: reference speaker '" + run.reference_speaker + "' has no posteriorgrams");

  std::map<std::string, Posteriorgram> refs;
  for (const auto& [word, r] : ref_by_word) {
    try {
      refs.emplace(word, load_posteriorgram(m.resolve(*r->ppg_path)));
    } catch (const Error& e) {
      run.skipped[r->utterance_id] = e.what();
    }
  }

  std::vector<const UtteranceRecord*> todo;
  for (const auto& r : m.records) {
    if (r.speaker_id == run.reference_speaker && r.is_ground_truth()) continue;
    if (!r.ppg_path) continue;
    if (!refs.count(r.word_id)) {
      run.skipped[r.utterance_id] = "no reference utterance for word '" + r.word_id + "'";
      continue;
    }
    todo.push_back(&r);
  }
  std::sort(todo.begin(), todo.end(),
            [](const auto* a, const auto* b) { return a->utterance_id < b->utterance_id; });

  std::vector<std::optional<double>> scores(todo.size());
  std::vector<std::string> errors(todo.size());
  parallel_for(todo.size(), [&](std::size_t i) {
    try {
      const auto ppg = load_posteriorgram(m.resolve(*todo[i]->ppg_path));
      scores[i] = dtw_align(ppg, refs.at(todo[i]->word_id)).normalized_cost;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  if (logistic) {
    run.logistic = *logistic;
  } else {
    std::vector<double> control, patho;
    for (std::size_t i = 0; i < todo.size(); ++i) {
      if (!scores[i] || !todo[i]->is_ground_truth()) continue;
      (todo[i]->group == Group::control ? control : patho).push_back(*scores[i]);
    }
    run.logistic = calibrate_logistic(control, patho);
    run.calibrated = true;
  }

  std::map<std::pair<std::string, Kind>, std::vector<VerificationResult>> per_speaker;
  std::map<std::pair<std::string, Kind>, const UtteranceRecord*> speaker_record;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    const auto& r = *todo[i];
    if (!scores[i]) {
      run.skipped[r.utterance_id] = errors[i];
      continue;
    }
    const auto v = verify_utterance(*scores[i], run.logistic);
    VerificationResult res{r.utterance_id, *scores[i], v.p_c, v.verified};
    run.results.push_back(res);
    per_speaker[{r.speaker_id, r.kind()}].push_back(res);
    speaker_record.emplace(std::make_pair(r.speaker_id, r.kind()), &r);
  }

  std::map<std::string, double> subjective;
  for (const auto& r : m.records)
    if (r.subjective_score && r.is_ground_truth()) subjective.emplace(r.speaker_id, *r.subjective_score);

  for (const auto& [key, results] : per_speaker) {
    const auto* r = speaker_record.at(key);
    SpeakerEstimate e;
    e.speaker_id = key.first;
    e.kind = key.second;
    e.gender = r->gender;
    e.group = r->group;
    e.band = r->intelligibility_band;
    if (auto it = subjective.find(key.first); it != subjective.end())
      e.subjective_score = it->second;
    else
      e.subjective_score = r->subjective_score;
    e.intelligibility = speaker_intelligibility(results);
    e.n_utterances = results.size();
    run.speakers.push_back(std::move(e));
  }

  for (Kind kind : {Kind::gt, Kind::vc}) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& e : run.speakers) {
      if (e.kind != kind || e.group == Group::control || !e.subjective_score) continue;
      for (const char* g : {"all", to_string(e.gender).data()}) {
        groups[g].first.push_back(*e.subjective_score);
        groups[g].second.push_back(e.intelligibility);
      }
    }
    auto& block = run.correlations[std::string(to_string(kind))];
    for (const std::string g : {"all", "M", "F"}) {
      auto& cell = block[g];
      cell["spearman"] = std::nullopt;
      cell["pearson"] = std::nullopt;
      auto it = groups.find(g);
      if (it == groups.end() || it->second.first.size() < 3) continue;
      const VectorXd x = as_vector(it->second.first);
      const VectorXd y = as_vector(it->second.second);
      try {
        cell["spearman"] = spearman(x, y);
      } catch (const Error&) {
      }
      try {
        cell["pearson"] = pearson(x, y);
      } catch (const Error&) {
      }
    }
  }
  return run;
}

nlohmann::json to_json(const VerificationRun& v)
{
  nlohmann::json speakers = nlohmann::json::array();
  for (const auto& e : v.speakers) {
    nlohmann::json j{{"speaker_id", e.speaker_id},
                     {"kind", to_string(e.kind)},
                     {"gender", to_string(e.gender)},
                     {"group", to_string(e.group)},
                     {"band", to_string(e.band)},
                     {"intelligibility", e.intelligibility},
                     {"n_utterances", e.n_utterances}};
    j["subjective_score"] = e.subjective_score ? nlohmann::json(*e.subjective_score) : nlohmann::json();
    speakers.push_back(std::move(j));
  }
  nlohmann::json corr = nlohmann::json::object();
  for (const auto& [kind, groups] : v.correlations)
    for (const auto& [g, cells] : groups)
      for (const auto& [name, r] : cells)
        corr[kind][g][name] = r ? to_json(*r) : nlohmann::json("not computable");
  nlohmann::json skipped = nlohmann::json::object();
  for (const auto& [k, reason] : v.skipped) skipped[k] = reason;
  return {{"reference_speaker", v.reference_speaker},
          {"logistic", {{"slope", v.logistic.slope}, {"midpoint", v.logistic.midpoint},
                        {"calibrated", v.calibrated}}},
          {"speakers", speakers},
          {"correlations", corr},
          {"skipped", skipped}};
}

RunSummary run_verify(const RunConfig& cfg)
{
  const Manifest m = open_manifest(cfg);
  const VerificationRun run = verify_corpus(m, cfg.reference_speaker, cfg.logistic);
  const fs::path out = prepare_output(cfg);
  write_verification_csv(run.results, out / "verification.csv");
  write_json(to_json(run), out / "intelligibility.json");
  write_skipped(run.skipped, out / "skipped.csv");
  return {run.skipped.size(),
          {out / "verification.csv", out / "intelligibility.json", out / "skipped.csv"}};
}

RunSummary run_tempo(const fs::path& in, const fs::path& out,
                     std::optional<double> factor, std::optional<double> triple_target)
{
  if (factor.has_value() == triple_target.has_value())
    throw Error("tempo: give exactly one of a factor or a triple target");
  const double f = factor ? *factor : *triple_target;
  if (!(f >= kMinTempoFactor && f <= kMaxTempoFactor))
    throw Error("tempo factor must be in [0.25, 4]");
  const Waveform w = read_wav(in);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());

  RunSummary summary;
  if (factor) {
    write_wav(psola_stretch(w, *factor), out);
    summary.outputs.push_back(out);
    return summary;
  }
  fs::path prefix = out;
  if (prefix.extension() == ".wav") prefix.replace_extension();
  const auto variants = augmentation_triple(w, *triple_target);
  static constexpr const char* kSuffix[3] = {".orig.wav", ".half.wav", ".target.wav"};
  for (std::size_t i = 0; i < 3; ++i) {
    const fs::path p = prefix.string() + kSuffix[i];
    write_wav(variants[i].wave, p);
    summary.outputs.push_back(p);
  }
  return summary;
}

RunSummary run_wer(const RunConfig& cfg, const std::vector<PairsSource>& pairs)
{
  if (pairs.empty()) throw Error("wer: no transcript pair files given");
  const Manifest m = open_manifest(cfg);
  std::map<std::string, const UtteranceRecord*> by_id;
  for (const auto& r : m.records) by_id.emplace(r.utterance_id, &r);

  struct Row
  {
    std::string utterance_id, condition;
    Band band;
    WerResult wer;
  };
  std::vector<Row> rows;
  std::map<std::string, std::string> skipped;

  for (const auto& src : pairs) {
    std::ifstream in(src.path, std::ios::binary);
    if (!in) throw Error("cannot open transcript pairs '" + src.path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || csv::trim(line) != "utterance_id,reference,hypothesis")
      throw Error(src.path.string() + ": expected header 'utterance_id,reference,hypothesis'");
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
      ++row_no;
      if (csv::trim(line).empty()) continue;
      const auto f = csv::split_line(line);
      if (f.size() != 3)
        throw Error(src.path.string() + " row " + std::to_string(row_no) + ": expected 3 fields");
      auto it = by_id.find(f[0]);
      if (it == by_id.end()) {
        skipped[f[0]] = "utterance not in manifest";
        continue;
      }
      const auto ref = tokenize(f[1]);
      if (ref.empty()) {
        skipped[f[0]] = "empty reference transcript";
        continue;
      }
      const auto& r = *it->second;
      const std::string cond =
          src.condition.value_or(std::string(r.is_ground_truth() ? "gt" : "vc"));
      rows.push_back({r.utterance_id, cond, r.intelligibility_band,
                      word_error_rate(ref, tokenize(f[2]))});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.condition, a.utterance_id) < std::tie(b.condition, b.utterance_id);
  });

  const fs::path out = prepare_output(cfg);
  std::ofstream per(out / "wer_utterances.csv", std::ios::binary);
  per << "utterance_id,condition,band,substitutions,deletions,insertions,n_reference_words,wer\n";
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> groups;
  for (const auto& r : rows) {
    per << csv::escape(r.utterance_id) << ',' << csv::escape(r.condition) << ','
        << to_string(r.band) << ',' << r.wer.substitutions << ',' << r.wer.deletions << ','
        << r.wer.insertions << ',' << r.wer.n_reference_words << ','
        << csv::format_double(r.wer.wer) << '\n';
    auto& g = groups[r.condition][std::string(to_string(r.band))];
    g.first += r.wer.wer;
    g.second += 1;
  }
  nlohmann::json conditions = nlohmann::json::object();
  for (const auto& [cond, bands] : groups)
    for (const auto& [band, acc] : bands) {
      const double mean_wer = acc.first / static_cast<double>(acc.second);
      conditions[cond][band] = {{"mean_wer", mean_wer},
                                {"mean_wer_percent", 100.0 * mean_wer},
                                {"n_utterances", acc.second}};
    }
  write_json({{"conditions", conditions}}, out / "wer.json");
  write_skipped(skipped, out / "skipped.csv");
  return {skipped.size(), {out / "wer.json", out / "wer_utterances.csv", out / "skipped.csv"}};
}

RunSummary run_synth(const SynthSpec& spec, const fs::path& out)
{
  generate(spec, out);
  return {0, {out / "manifest.csv", out / "transcripts.csv", out / "speakers.csv"}};
}

}  // namespace patheval
