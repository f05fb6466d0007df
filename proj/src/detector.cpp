#include "patheval/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "patheval/csv.hpp"
#include "patheval/error.hpp"
#include "patheval/features.hpp"

namespace patheval {

namespace {

struct SpeakerInfo
{
  Gender gender = Gender::M;
  Group group = Group::control;
  std::optional<std::string> paired;
};

std::map<std::string, SpeakerInfo> ground_truth_speakers(const Manifest& m)
{
  std::map<std::string, SpeakerInfo> speakers;
  for (const auto& r : m.records) {
    if (!r.is_ground_truth()) continue;
    auto [it, inserted] =
        speakers.emplace(r.speaker_id, SpeakerInfo{r.gender, r.group, r.paired_control_id});
    auto& s = it->second;
    if (inserted) continue;
    if (s.gender != r.gender || s.group != r.group)
      throw Error("speaker '" + r.speaker_id +
                  "' has inconsistent gender or group across records");
    if (r.paired_control_id) {
      if (s.paired && *s.paired != *r.paired_control_id)
        throw Error("speaker '" + r.speaker_id +
                    "' has conflicting paired_control_id values");
      s.paired = r.paired_control_id;
    }
  }
  return speakers;
}

}  // namespace

FoldPlan build_folds(const Manifest& m)
{
  const auto speakers = ground_truth_speakers(m);
  FoldPlan plan;
  std::vector<SpeakerPair> pairs;
  std::map<std::string, std::string> control_owner;

  for (const auto& [id, s] : speakers) {
    if (s.group != Group::dysarthric) continue;
    if (s.paired && *s.paired == kExcludedPair) {
      plan.excluded_speakers.push_back(id);
      continue;
    }
    if (!s.paired)
      throw Error("dysarthric speaker '" + id +
                  "' has no paired control and is not marked excluded");
    auto c = speakers.find(*s.paired);
    if (c == speakers.end() || c->second.group != Group::control)
      throw Error("dysarthric speaker '" + id + "' is paired with '" +
                  *s.paired + "', which is not a control speaker");
    if (c->second.gender != s.gender)
      throw Error("dysarthric speaker '" + id + "' is paired with control '" +
                  *s.paired + "' of a different gender");
    auto [owner, fresh] = control_owner.emplace(*s.paired, id);
    if (!fresh)
      throw Error("control speaker '" + *s.paired + "' is paired with both '" +
                  owner->second + "' and '" + id + "'");
    pairs.push_back({id, *s.paired, s.gender});
  }

  std::set<std::string> sources;
  for (const auto& r : m.records)
    if (r.group == Group::converted && r.paired_control_id)
      sources.insert(*r.paired_control_id);
  for (const auto& src : sources) {
    auto owner = control_owner.find(src);
    if (owner == control_owner.end())
      throw Error("conversion pair not found: source control '" + src +
                  "' is not paired with any dysarthric speaker");
    const auto& p = *std::find_if(pairs.begin(), pairs.end(),
                                  [&](const SpeakerPair& q) { return q.control_id == src; });
    plan.conversion_pairs.push_back(p);
  }

  for (Gender g : {Gender::F, Gender::M}) {
    std::vector<SpeakerPair> same;
    for (const auto& p : pairs)
      if (p.gender == g) same.push_back(p);
    for (const auto& held : same) {
      if (std::find(plan.conversion_pairs.begin(), plan.conversion_pairs.end(),
                    held) != plan.conversion_pairs.end())
        continue;
      Fold f;
      f.held_out = held;
      for (const auto& p : same)
        if (!(p == held)) f.train_pairs.push_back(p);
      plan.folds.push_back(std::move(f));
    }
  }
  return plan;
}

AccuracySummary summarize(const std::vector<UtteranceScore>& scores)
{
  AccuracySummary s;
  s.n_utterances = scores.size();
  if (scores.empty()) return s;
  double correct = 0.0, total_score = 0.0;
  for (const auto& u : scores) {
    correct += u.correct ? 1.0 : 0.0;
    total_score += u.score;
  }
  const double n = static_cast<double>(scores.size());
  s.accuracy_mean = correct / n;
  s.accuracy_std = std::sqrt(std::max(0.0, s.accuracy_mean * (1.0 - s.accuracy_mean)));
  s.mean_score = total_score / n;
  return s;
}

double DetectionReport::pooled_gt_accuracy() const
{
  double correct = 0.0, total = 0.0;
  for (const auto& e : per_speaker) {
    if (e.kind != Kind::gt) continue;
    correct += e.summary.accuracy_mean * static_cast<double>(e.summary.n_utterances);
    total += static_cast<double>(e.summary.n_utterances);
    if (e.paired_control) {
      correct += e.paired_control->accuracy_mean *
                 static_cast<double>(e.paired_control->n_utterances);
      total += static_cast<double>(e.paired_control->n_utterances);
    }
  }
  return total > 0.0 ? correct / total : 0.0;
}

DetectionReport run_detection(const Manifest& m, const FoldPlan& plan,
                              const LtasConfig& ltas_cfg,
                              const LassoConfig& lasso_cfg,
                              const DetectionOptions& options)
{
  ltas_cfg.validate();
  lasso_cfg.validate();

  std::set<std::string> involved;
  std::set<std::string> held_dysarthric;
  for (const auto& f : plan.folds) {
    involved.insert(f.held_out.dysarthric_id);
    involved.insert(f.held_out.control_id);
    held_dysarthric.insert(f.held_out.dysarthric_id);
    for (const auto& p : f.train_pairs) {
      involved.insert(p.dysarthric_id);
      involved.insert(p.control_id);
    }
  }

  std::vector<const UtteranceRecord*> needed;
  for (const auto& r : m.records) {
    if (r.is_ground_truth() ? involved.count(r.speaker_id) > 0
                            : held_dysarthric.count(r.speaker_id) > 0)
      needed.push_back(&r);
  }
  std::sort(needed.begin(), needed.end(), [](const auto* a, const auto* b) {
    return a->utterance_id < b->utterance_id;
  });

  LtasCache cache(m, ltas_cfg, options.vad, options.apply_vad);
  cache.compute(needed);

  DetectionReport report;
  report.skipped = cache.failures();

  auto features = [&](const UtteranceRecord& r) -> std::optional<VectorXd> {
    const Ltas* l = cache.get(r.utterance_id);
    if (!l) return std::nullopt;
    if (options.feature_scale == FeatureScale::linear) return l->bins;
    return to_db(*l).bins;
  };

  for (std::size_t fi = 0; fi < plan.folds.size(); ++fi) {
    const Fold& fold = plan.folds[fi];
    std::map<std::string, int> train_label;
    for (const auto& p : fold.train_pairs) {
      train_label[p.control_id] = 0;
      train_label[p.dysarthric_id] = 1;
    }

    std::vector<VectorXd> rows;
    std::vector<double> labels;
    FoldOutcome outcome;
    outcome.fold = fold;
    std::set<std::string> speakers_with_data[2];
    for (const auto* r : needed) {
      if (!r->is_ground_truth()) continue;
      auto it = train_label.find(r->speaker_id);
      if (it == train_label.end()) continue;
      auto x = features(*r);
      if (!x) continue;
      rows.push_back(std::move(*x));
      labels.push_back(it->second);
      outcome.train_utterances.push_back(r->utterance_id);
      speakers_with_data[it->second].insert(r->speaker_id);
    }
    if (speakers_with_data[0].size() < 2 || speakers_with_data[1].size() < 2)
      throw Error("fold holding out '" + fold.held_out.dysarthric_id +
                  "' has fewer than 2 training speakers per class");

    MatrixXd X(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      X.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    VectorXd y = Eigen::Map<VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
    if (options.label_shuffle_seed) {
      std::mt19937_64 rng(*options.label_shuffle_seed + 7919 * fi);
      std::shuffle(y.begin(), y.end(), rng);
    }
    outcome.model = fit_lasso(X, y, lasso_cfg);

    std::vector<UtteranceScore> dys_gt, ctl_gt, dys_vc;
    for (const auto* r : needed) {
      const bool is_dys = r->speaker_id == fold.held_out.dysarthric_id;
      const bool is_ctl = r->speaker_id == fold.held_out.control_id && r->is_ground_truth();
      if (!is_dys && !is_ctl) continue;
      auto x = features(*r);
      if (!x) continue;
      UtteranceScore u;
      u.utterance_id = r->utterance_id;
      u.speaker_id = r->speaker_id;
      u.kind = r->kind();
      u.label = is_dys ? 1 : 0;
      u.score = predict(outcome.model, *x);
      u.correct = (u.score >= kDetectionThreshold) == (u.label == 1);
      (is_ctl ? ctl_gt : (u.kind == Kind::gt ? dys_gt : dys_vc)).push_back(u);
      report.utterances.push_back(u);
    }

    if (!dys_gt.empty()) {
      SpeakerDetection e;
      e.speaker_id = fold.held_out.dysarthric_id;
      e.kind = Kind::gt;
      e.gender = fold.held_out.gender;
      e.summary = summarize(dys_gt);
      e.paired_control_id = fold.held_out.control_id;
      if (!ctl_gt.empty()) e.paired_control = summarize(ctl_gt);
      report.per_speaker.push_back(std::move(e));
    }
    if (!dys_vc.empty()) {
      SpeakerDetection e;
      e.speaker_id = fold.held_out.dysarthric_id;
      e.kind = Kind::vc;
      e.gender = fold.held_out.gender;
      e.summary = summarize(dys_vc);
      report.per_speaker.push_back(std::move(e));
    }
    report.folds.push_back(std::move(outcome));
  }

  std::sort(report.per_speaker.begin(), report.per_speaker.end(),
            [](const auto& a, const auto& b) {
              return std::tie(a.speaker_id, a.kind) < std::tie(b.speaker_id, b.kind);
            });
  std::sort(report.utterances.begin(), report.utterances.end(),
            [](const auto& a, const auto& b) { return a.utterance_id < b.utterance_id; });
  report.correlation_with_subjective = correlate_intelligibility(report, m);
  return report;
}

std::map<std::string, std::optional<CorrelationResult>> correlate_intelligibility(
    const DetectionReport& report, const Manifest& m)
{
  std::map<std::string, double> subjective;
  for (const auto& r : m.records)
    if (r.group == Group::dysarthric && r.subjective_score)
      subjective.emplace(r.speaker_id, *r.subjective_score);

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& e : report.per_speaker) {
    if (e.kind != Kind::vc) continue;
    auto it = subjective.find(e.speaker_id);
    if (it == subjective.end()) continue;
    for (const char* key : {to_string(e.gender).data(), "all"}) {
      groups[key].first.push_back(it->second);
      groups[key].second.push_back(e.summary.mean_score);
    }
  }

  std::map<std::string, std::optional<CorrelationResult>> out;
  for (const std::string key : {"F", "M", "all"}) {
    out[key] = std::nullopt;
    auto it = groups.find(key);
    if (it == groups.end() || it->second.first.size() < 3) continue;
    const auto& [xs, ys] = it->second;
    try {
      out[key] = pearson(Eigen::Map<const VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                         Eigen::Map<const VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
    } catch (const Error&) {
      // zero variance: leave as not computable
    }
  }
  return out;
}

nlohmann::json to_json(const CorrelationResult& r)
{
  return {{"kind", to_string(r.kind)},
          {"coefficient", r.coefficient},
          {"p_value", r.p_value},
          {"n", r.n}};
}

namespace {

nlohmann::json to_json(const AccuracySummary& s)
{
  return {{"accuracy_mean", s.accuracy_mean},
          {"accuracy_std", s.accuracy_std},
          {"mean_score", s.mean_score},
          {"n_utterances", s.n_utterances}};
}

nlohmann::json to_json(const SpeakerPair& p)
{
  return {{"dysarthric", p.dysarthric_id},
          {"control", p.control_id},
          {"gender", to_string(p.gender)}};
}

}  // namespace

nlohmann::json to_json(const DetectionReport& r)
{
  nlohmann::json speakers = nlohmann::json::array();
  for (const auto& e : r.per_speaker) {
    nlohmann::json j = to_json(e.summary);
    j["speaker_id"] = e.speaker_id;
    j["kind"] = to_string(e.kind);
    j["gender"] = to_string(e.gender);
    if (e.paired_control_id) j["paired_control_id"] = *e.paired_control_id;
    if (e.paired_control) j["paired_control"] = to_json(*e.paired_control);
    speakers.push_back(std::move(j));
  }
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    nlohmann::json train = nlohmann::json::array();
    for (const auto& p : f.fold.train_pairs) train.push_back(to_json(p));
    folds.push_back({{"held_out", to_json(f.fold.held_out)},
                     {"train_pairs", train},
                     {"n_train_utterances", f.train_utterances.size()},
                     {"converged", f.model.converged},
                     {"n_iter_run", f.model.n_iter_run}});
  }
  nlohmann::json corr = nlohmann::json::object();
  for (const auto& [k, v] : r.correlation_with_subjective)
    corr[k] = v ? to_json(*v) : nlohmann::json("not computable");
  nlohmann::json skipped = nlohmann::json::object();
  for (const auto& [k, v] : r.skipped) skipped[k] = v;
  return {{"per_speaker", speakers},
          {"folds", folds},
          {"pooled_gt_accuracy", r.pooled_gt_accuracy()},
          {"correlation_with_subjective", corr},
          {"skipped", skipped}};
}

void write_detection_csv(const DetectionReport& r,
                         const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "speaker_id,kind,accuracy_mean,accuracy_std,mean_score,n_utterances\n";
  for (const auto& e : r.per_speaker)
    out << csv::escape(e.speaker_id) << ',' << to_string(e.kind) << ','
        << csv::format_double(e.summary.accuracy_mean) << ','
        << csv::format_double(e.summary.accuracy_std) << ','
        << csv::format_double(e.summary.mean_score) << ','
        << e.summary.n_utterances << '\n';
}

}  // namespace patheval
