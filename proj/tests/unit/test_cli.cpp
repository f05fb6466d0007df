#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "patheval/corpus.hpp"
#include "support/signals.hpp"

using namespace patheval;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  int code = -1;
  std::string err;
};

Outcome cli(const std::string& args)
{
  static int counter = 0;
  const fs::path err = testsupport::scratch_dir("cli_stderr") / ("e" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + PATHEVAL_CLI + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err);
  std::stringstream s;
  s << in.rdbuf();
  o.err = s.str();
  return o;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const fs::path& corpus()
{
  static const fs::path root = [] {
    const auto dir = testsupport::scratch_dir("cli_corpus");
    const Outcome o = cli("synth --words 3 --seed 5 --out " + q(dir));
    REQUIRE(o.code == 0);
    return dir;
  }();
  return root;
}

// Copy of the corpus manifest with absolute audio paths, filtered.
fs::path rewritten(const std::string& name, auto keep, std::vector<UtteranceRecord> extra = {})
{
  Manifest m = load_manifest(corpus() / "manifest.csv");
  Manifest out;
  for (auto r : m.records) {
    if (!keep(r)) continue;
    r.wav_path = m.resolve(r.wav_path).string();
    if (r.ppg_path) r.ppg_path = m.resolve(*r.ppg_path).string();
    out.records.push_back(r);
  }
  for (auto& r : extra) out.records.push_back(r);
  const auto path = testsupport::scratch_dir(name) / "manifest.csv";
  write_manifest(out, path);
  return path;
}

}  // namespace

TEST_CASE("every subcommand runs on a synthetic corpus")
{
  const auto manifest = q(corpus() / "manifest.csv");
  const auto out = [](const std::string& n) { return q(testsupport::scratch_dir("cli_" + n)); };

  CHECK(fs::exists(corpus() / "transcripts.csv"));
  CHECK(cli("vad --manifest " + manifest + " --out " + out("vad")).code == 0);
  CHECK(cli("detect --manifest " + manifest + " --out " + out("detect") + " --alpha 1e-3").code == 0);
  CHECK(cli("skl --manifest " + manifest + " --out " + out("skl")).code == 0);
  CHECK(cli("verify --manifest " + manifest + " --out " + out("verify")).code == 0);
  CHECK(cli("wer --manifest " + manifest + " --out " + out("wer") + " --pairs " + q(corpus() / "transcripts.csv")).code == 0);

  const auto dir = testsupport::scratch_dir("cli_tempo");
  write_wav(testsupport::tone(200.0, 0.4), dir / "in.wav");
  CHECK(cli("tempo --in " + q(dir / "in.wav") + " --out " + q(dir / "t") + " --triple 1.5").code == 0);
  CHECK(fs::exists(dir / "t.orig.wav"));
  CHECK(fs::exists(dir / "t.half.wav"));
  CHECK(fs::exists(dir / "t.target.wav"));
}

TEST_CASE("argument errors exit non-zero")
{
  const auto dir = testsupport::scratch_dir("cli_bad");
  write_wav(testsupport::tone(200.0, 0.4), dir / "in.wav");
  CHECK(cli("tempo --in " + q(dir / "in.wav") + " --out " + q(dir / "x.wav") + " --factor 10").code != 0);
  CHECK(cli("tempo --in " + q(dir / "in.wav") + " --out " + q(dir / "x.wav")).code != 0);
  CHECK(cli("verify --manifest " + q(corpus() / "manifest.csv") + " --out " + q(dir) + " --slope 2").code != 0);
  CHECK(cli("").code != 0);
}

TEST_CASE("missing control pair names the speaker")
{
  const auto manifest = rewritten("cli_unpaired", [](const UtteranceRecord& r) { return r.speaker_id != "CM02"; });
  const Outcome o = cli("detect --manifest " + q(manifest) + " --out " + q(testsupport::scratch_dir("cli_unpaired_out")));
  CHECK(o.code != 0);
  CHECK(o.err.find("M02") != std::string::npos);
}

TEST_CASE("partial failure still succeeds with a warning count")
{
  const auto dir = testsupport::scratch_dir("cli_partial_src");
  UtteranceRecord quiet = load_manifest(corpus() / "manifest.csv").records.front();
  quiet.utterance_id = "ZZ_silent";
  quiet.wav_path = (dir / "silent.wav").string();
  write_wav(testsupport::silence(0.5), quiet.wav_path);
  const auto manifest = rewritten("cli_partial", [](const UtteranceRecord&) { return true; }, {quiet});
  const Outcome o = cli("vad --manifest " + q(manifest) + " --out " + q(testsupport::scratch_dir("cli_partial_out")));
  CHECK(o.code == 0);
  CHECK(o.err.find("warning: 1 utterance") != std::string::npos);
}
