#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "patheval/types.hpp"

namespace patheval {

enum class CorrelationKind { pearson, spearman };

struct CorrelationResult
{
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  CorrelationKind kind = CorrelationKind::pearson;
};

enum class Stars { ns, one, two, three };

std::string_view to_string(CorrelationKind k);
// "ns", "*", "**", "***"
std::string_view to_string(Stars s);
// *** p < .001, ** p < .01, * p < .05
Stars significance_stars(double p_value);

struct TTestResult
{
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  Stars stars = Stars::ns;
};

struct WerResult
{
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t n_reference_words = 0;
  double wer = 0.0;

  std::size_t edits() const { return substitutions + deletions + insertions; }
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);
// Student t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);
// Two-sided p-value of a t statistic.
double student_t_two_sided_p(double t, double df);

CorrelationResult pearson(const VectorXd& x, const VectorXd& y);
CorrelationResult spearman(const VectorXd& x, const VectorXd& y);
// Ranks starting at 1; tied values share their average rank.
VectorXd average_ranks(const VectorXd& v);

TTestResult welch_ttest(const VectorXd& a, const VectorXd& b);

double mean(const VectorXd& v);
// Unbiased (n-1) sample variance.
double sample_variance(const VectorXd& v);
// Linear-interpolation quantile (numpy "linear" / type 7). q in [0, 1].
double quantile(const VectorXd& v, double q);

std::vector<std::string> tokenize(std::string_view text);

WerResult word_error_rate(const std::vector<std::string>& reference,
                          const std::vector<std::string>& hypothesis);

}  // namespace patheval
