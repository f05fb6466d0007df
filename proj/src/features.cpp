#include "patheval/features.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "patheval/error.hpp"

namespace patheval {

std::size_t worker_count()
{
  if (const char* env = std::getenv("PATHEVAL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = n;
  std::exception_ptr err;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(err_mutex);
            if (i < err_index) {
              err_index = i;
              err = std::current_exception();
            }
          }
        }
      });
  }
  if (err) std::rethrow_exception(err);
}

Ltas utterance_ltas(const Manifest& m, const UtteranceRecord& r,
                    const LtasConfig& ltas_cfg, const VadConfig& vad_cfg,
                    bool apply_vad)
{
  Waveform w = read_wav(m.resolve(r.wav_path));
  if (apply_vad) w = trim_silence(w, detect_voice_activity(w, vad_cfg));
  return compute_ltas(w, ltas_cfg);
}

LtasCache::LtasCache(const Manifest& m, LtasConfig ltas_cfg, VadConfig vad_cfg,
                     bool apply_vad)
    : manifest_(m),
      ltas_cfg_(ltas_cfg),
      vad_cfg_(vad_cfg),
      apply_vad_(apply_vad)
{
}

void LtasCache::compute(const std::vector<const UtteranceRecord*>& records)
{
  std::vector<const UtteranceRecord*> todo;
  for (const auto* r : records)
    if (!ltas_.count(r->utterance_id) && !failures_.count(r->utterance_id))
      todo.push_back(r);

  std::vector<std::optional<Ltas>> results(todo.size());
  std::vector<std::string> errors(todo.size());
  parallel_for(todo.size(), [&](std::size_t i) {
    try {
      results[i] = utterance_ltas(manifest_, *todo[i], ltas_cfg_, vad_cfg_,
                                  apply_vad_);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (results[i]) {
      if (sample_rate_hz_ == 0) sample_rate_hz_ = results[i]->sample_rate_hz;
      if (results[i]->sample_rate_hz != sample_rate_hz_)
        throw Error("utterance '" + todo[i]->utterance_id + "' has sample rate " +
                    std::to_string(results[i]->sample_rate_hz) +
                    " Hz, corpus rate is " + std::to_string(sample_rate_hz_) +
                    " Hz");
      ltas_.emplace(todo[i]->utterance_id, std::move(*results[i]));
    } else {
      failures_.emplace(todo[i]->utterance_id, errors[i]);
    }
  }
}

void LtasCache::compute_all()
{
  std::vector<const UtteranceRecord*> all;
  for (const auto& r : manifest_.records) all.push_back(&r);
  compute(all);
}

const Ltas* LtasCache::get(const std::string& utterance_id) const
{
  auto it = ltas_.find(utterance_id);
  return it == ltas_.end() ? nullptr : &it->second;
}

}  // namespace patheval
