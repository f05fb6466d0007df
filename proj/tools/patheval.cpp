#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "patheval/error.hpp"
#include "patheval/pipeline.hpp"

namespace {

using namespace patheval;

int report(const RunSummary& s)
{
  for (const auto& p : s.outputs) std::cout << p.string() << '\n';
  if (s.warnings > 0)
    std::cerr << "warning: " << s.warnings << " utterance(s) skipped, see skipped.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Objective evaluation toolkit for synthetic pathological speech"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, manifest, out;
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
  app.add_option("--manifest", manifest, "Corpus manifest CSV");
  app.add_option("--out", out, "Output directory (or file for tempo)");
  app.add_option("--seed", seed, "Random seed");

  // Command-line values override the config file.
  auto make_config = [&] {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (!manifest.empty()) c.manifest_path = manifest;
    if (!out.empty()) c.output_dir = out;
    if (app.count("--seed")) c.seed = seed;
    return c;
  };

  auto* vad = app.add_subcommand("vad", "Trim non-speech from every utterance");

  auto* detect = app.add_subcommand("detect", "LTAS-LASSO voice-quality detector");
  std::optional<double> alpha;
  std::optional<int> max_iter;
  std::string feature_scale;
  detect->add_option("--alpha", alpha, "LASSO penalty")->check(CLI::NonNegativeNumber);
  detect->add_option("--max-iter", max_iter, "Coordinate-descent sweep cap")->check(CLI::PositiveNumber);
  detect->add_option("--feature-scale", feature_scale, "db or linear")
      ->check(CLI::IsMember({"db", "linear"}));

  auto* skl = app.add_subcommand("skl", "LTAS-SKL intelligibility-decrease measure");
  std::string reference;
  skl->add_option("--reference-speaker", reference, "Single reference speaker (default: all controls)");

  auto* verify = app.add_subcommand("verify", "PPG-DTW utterance verification");
  std::optional<double> slope, midpoint;
  verify->add_option("--reference-speaker", reference, "Healthy reference speaker");
  verify->add_option("--slope", slope, "Logistic slope (skips calibration)")->check(CLI::PositiveNumber);
  verify->add_option("--midpoint", midpoint, "Logistic midpoint (skips calibration)");

  auto* tempo = app.add_subcommand("tempo", "PSOLA tempo modification");
  std::string tempo_in;
  std::optional<double> factor, triple;
  tempo->add_option("--in", tempo_in, "Input WAV")->required()->check(CLI::ExistingFile);
  auto* factor_opt = tempo->add_option("--factor", factor, "Duration factor (>1 slows down)")
                         ->check(CLI::Range(kMinTempoFactor, kMaxTempoFactor));
  auto* triple_opt = tempo->add_option("--triple", triple, "Write original, halfway and target versions")
                         ->check(CLI::Range(kMinTempoFactor, kMaxTempoFactor));
  factor_opt->excludes(triple_opt);
  tempo->callback([&] {
    if (!factor && !triple) throw CLI::RequiredError("--factor or --triple");
  });

  auto* wer = app.add_subcommand("wer", "Word error rate grouped by intelligibility band");
  std::vector<std::string> pairs, labels;
  wer->add_option("--pairs", pairs, "Transcript pairs CSV (repeatable)")->required();
  wer->add_option("--label", labels, "Condition label per --pairs file (e.g. vc-adjusted)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic evaluation corpus");
  SynthSpec spec;
  std::vector<std::string> genders;
  bool no_converted = false;
  synth->add_option("--speakers-per-class", spec.n_speakers_per_class)->check(CLI::PositiveNumber);
  synth->add_option("--words", spec.n_words)->check(CLI::PositiveNumber);
  synth->add_option("--rate", spec.sample_rate_hz);
  synth->add_option("--severity", spec.severity_levels, "Tilt per level, dB/octave");
  synth->add_option("--tempo", spec.tempo_factors, "Tempo factor per level");
  synth->add_option("--ppg-noise", spec.ppg_noise_levels, "Posteriorgram noise per level");
  synth->add_option("--genders", genders)->check(CLI::IsMember({"M", "F"}));
  synth->add_flag("--no-converted", no_converted, "Do not emit converted samples");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vad) return report(run_vad(make_config()));
    if (*detect) {
      RunConfig c = make_config();
      if (alpha) c.lasso.alpha = *alpha;
      if (max_iter) c.lasso.max_iter = *max_iter;
      if (feature_scale == "linear") c.feature_scale = FeatureScale::linear;
      if (feature_scale == "db") c.feature_scale = FeatureScale::db;
      return report(run_detect(c));
    }
    if (*skl) {
      RunConfig c = make_config();
      if (!reference.empty()) c.reference_speaker = reference;
      return report(run_skl(c));
    }
    if (*verify) {
      RunConfig c = make_config();
      if (!reference.empty()) c.reference_speaker = reference;
      if (slope.has_value() != midpoint.has_value())
        throw Error("--slope and --midpoint must be given together");
      if (slope) c.logistic = LogisticParams{*slope, *midpoint};
      return report(run_verify(c));
    }
    if (*tempo) {
      if (out.empty()) throw Error("tempo: --out is required");
      return report(run_tempo(tempo_in, out, factor, triple));
    }
    if (*wer) {
      if (!labels.empty() && labels.size() != pairs.size())
        throw Error("wer: give one --label per --pairs file or none");
      std::vector<PairsSource> sources;
      for (std::size_t i = 0; i < pairs.size(); ++i)
        sources.push_back({pairs[i], labels.empty() ? std::nullopt
                                                     : std::optional<std::string>(labels[i])});
      return report(run_wer(make_config(), sources));
    }
    if (*synth) {
      const RunConfig c = make_config();
      if (c.output_dir.empty()) throw Error("synth: --out is required");
      spec.seed = c.seed;
      spec.converted = !no_converted;
      if (!genders.empty()) {
        spec.genders.clear();
        for (const auto& g : genders) spec.genders.push_back(parse_gender(g));
      }
      return report(run_synth(spec, c.output_dir));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
