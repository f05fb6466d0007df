#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "patheval/corpus.hpp"
#include "patheval/error.hpp"
#include "patheval/features.hpp"
#include "patheval/spectral.hpp"
#include "patheval/stats.hpp"
#include "patheval/vendor_json.hpp"

namespace patheval {

// Probabilities below this are raised to it before renormalizing, which keeps
// the divergence finite on empty bins.
inline constexpr double kSklFloor = 1e-12;

template <typename Derived>
VectorXd floor_and_renormalize(const Eigen::MatrixBase<Derived>& p,
                               double eps = kSklFloor)
{
  VectorXd v = p.derived().template cast<double>().reshaped().cwiseMax(eps);
  return v / v.sum();
}

// KL(p||q) + KL(q||p) in nats, written as sum (p - q)(ln p - ln q).
template <typename DerivedP, typename DerivedQ>
double skl_divergence(const Eigen::MatrixBase<DerivedP>& p,
                      const Eigen::MatrixBase<DerivedQ>& q)
{
  if (p.size() != q.size())
    throw Error("skl_divergence: bin counts differ (" +
                std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                ")");
  const VectorXd a = floor_and_renormalize(p);
  const VectorXd b = floor_and_renormalize(q);
  return ((a - b).array() * (a.array().log() - b.array().log())).sum();
}

double skl_divergence(const Ltas& p, const Ltas& q);

struct SklEntry
{
  std::string reference_speaker;
  std::string other_speaker;
  std::string word_id;
  double skl = 0.0;
  Band other_band = Band::control;
  Kind other_kind = Kind::gt;
};

struct SklSkip
{
  std::string reference_speaker;
  std::string other_speaker;
  Kind other_kind = Kind::gt;
  std::string word_id;
  std::string reason;
};

struct PairwiseSkl
{
  std::vector<SklEntry> entries;
  std::vector<SklSkip> skipped;
};

// Compares every word of `reference_speaker` (ground truth) with the same word
// of each other speaker, ground truth and converted. LTAS come from `cache`,
// which must use the configuration the comparison should run at.
PairwiseSkl pairwise_word_skl(const Manifest& m,
                              const std::string& reference_speaker,
                              LtasCache& cache);

struct GroupSummary
{
  Band band = Band::control;
  Kind kind = Kind::gt;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t n = 0;
};

struct BandTest
{
  Kind kind = Kind::gt;  // panel the comparison belongs to
  Band band_a = Band::control;
  Kind kind_a = Kind::gt;
  Band band_b = Band::control;
  Kind kind_b = Kind::gt;
  // Empty when either group is too small or both are constant and equal.
  std::optional<TTestResult> result;
  std::string status;  // "ok", "insufficient", "degenerate"
};

struct SklAnalysis
{
  std::vector<GroupSummary> summaries;
  std::vector<BandTest> tests;
};

inline const std::vector<Band>& default_band_order()
{
  static const std::vector<Band> order{Band::control, Band::high, Band::mid,
                                       Band::low};
  return order;
}

// Box-plot statistics per (band, kind) and Welch tests between adjacent bands
// of `bands_order` within each kind. The converted panel borrows the ground
// truth control group as its first rung when it has none of its own.
SklAnalysis group_and_test(const std::vector<SklEntry>& entries,
                           const std::vector<Band>& bands_order =
                               default_band_order());

nlohmann::json to_json(const SklAnalysis& a);
void write_skl_entries_csv(const std::vector<SklEntry>& entries,
                           const std::filesystem::path& path);

}  // namespace patheval
