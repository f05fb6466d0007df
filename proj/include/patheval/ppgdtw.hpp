#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "patheval/types.hpp"

namespace patheval {

inline constexpr int kDefaultPhoneCount = 45;

// T x D phone posteriors, one frame per row.
struct Posteriorgram
{
  FrameMatrixXd frames;
  double frame_hop_ms = 10.0;

  Eigen::Index n_frames() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
};

// Header `D=<dim>,hop_ms=<hop>` followed by T rows of D floats. Rows must sum
// to 1 within 1e-3 and are renormalized exactly on load.
Posteriorgram load_posteriorgram(const std::filesystem::path& path);
Posteriorgram parse_posteriorgram(std::string_view text,
                                  std::string_view source = "<memory>");
void write_posteriorgram(const Posteriorgram& p,
                         const std::filesystem::path& path);

struct DtwResult
{
  double total_cost = 0.0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> path;
  double normalized_cost = 0.0;
};

// Symmetric KL between every frame of `a` and every frame of `b`.
MatrixXd skl_cost_matrix(const Posteriorgram& a, const Posteriorgram& b);

// Minimum-cost monotonic alignment over steps (1,0), (0,1), (1,1). Ties in the
// backtrace prefer the diagonal, then (1,0).
DtwResult dtw_align(const Posteriorgram& a, const Posteriorgram& b);
DtwResult dtw_align(const MatrixXd& local_cost);

struct LogisticParams
{
  double slope = 1.0;
  double midpoint = 0.0;
};

struct Verification
{
  double p_c = 0.5;
  bool verified = true;
};

struct VerificationResult
{
  std::string utterance_id;
  double matching_score = 0.0;
  double p_c = 0.5;
  bool verified = true;
};

// p_c = 1 / (1 + exp(slope (score - midpoint))); lower cost means more
// control-like.
Verification verify_utterance(double score, const LogisticParams& params);

// Midpoint halfway between the class means; slope places p_c = 0.9 at the
// control mean.
LogisticParams calibrate_logistic(const std::vector<double>& control_scores,
                                  const std::vector<double>& pathological_scores);

// Percentage of verified utterances.
double speaker_intelligibility(const std::vector<VerificationResult>& results);

void write_verification_csv(const std::vector<VerificationResult>& results,
                            const std::filesystem::path& path);

}  // namespace patheval
