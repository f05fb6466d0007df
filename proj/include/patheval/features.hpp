#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "patheval/corpus.hpp"
#include "patheval/spectral.hpp"

namespace patheval {

// Worker count for batch loops: PATHEVAL_THREADS if set (>= 1), otherwise the
// hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
// processed exactly once; exceptions from body are rethrown after all workers
// finish (the one with the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Loads an utterance, trims non-speech and computes its power LTAS. Throws
// NoSpeechError for silent recordings.
Ltas utterance_ltas(const Manifest& m, const UtteranceRecord& r,
                    const LtasConfig& ltas_cfg, const VadConfig& vad_cfg,
                    bool apply_vad = true);

// Power LTAS for many utterances, computed once. Failures are kept per
// utterance id instead of aborting the batch; a sample rate differing from the
// first loaded utterance is a hard error.
class LtasCache
{
public:
  LtasCache(const Manifest& m, LtasConfig ltas_cfg, VadConfig vad_cfg,
            bool apply_vad = true);

  void compute(const std::vector<const UtteranceRecord*>& records);
  void compute_all();

  // nullptr when the utterance failed or was never computed.
  const Ltas* get(const std::string& utterance_id) const;
  const std::map<std::string, std::string>& failures() const { return failures_; }
  const LtasConfig& ltas_config() const { return ltas_cfg_; }

private:
  const Manifest& manifest_;
  LtasConfig ltas_cfg_;
  VadConfig vad_cfg_;
  bool apply_vad_;
  std::map<std::string, Ltas> ltas_;
  std::map<std::string, std::string> failures_;
  int sample_rate_hz_ = 0;
};

}  // namespace patheval
