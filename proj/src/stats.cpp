#include "patheval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "patheval/error.hpp"

namespace patheval {

std::string_view to_string(CorrelationKind k)
{
  return k == CorrelationKind::pearson ? "pearson" : "spearman";
}

std::string_view to_string(Stars s)
{
  switch (s) {
    case Stars::ns: return "ns";
    case Stars::one: return "*";
    case Stars::two: return "**";
    case Stars::three: return "***";
  }
  return "?";
}

Stars significance_stars(double p)
{
  if (p < 0.001) return Stars::three;
  if (p < 0.01) return Stars::two;
  if (p < 0.05) return Stars::one;
  return Stars::ns;
}

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x)
{
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x)
{
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df)
{
  if (!(df > 0.0)) throw Error("student_t_cdf: df must be > 0");
  if (std::isnan(t)) throw Error("student_t_cdf: t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df)
{
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

double mean(const VectorXd& v)
{
  if (v.size() == 0) throw Error("mean of empty sample");
  return v.mean();
}

double sample_variance(const VectorXd& v)
{
  if (v.size() < 2) throw Error("variance needs at least 2 values");
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

double quantile(const VectorXd& v, double q)
{
  if (v.size() == 0) throw Error("quantile of empty sample");
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

CorrelationResult pearson(const VectorXd& x, const VectorXd& y)
{
  if (x.size() != y.size())
    throw Error("correlation: vectors differ in length");
  const auto n = x.size();
  if (n < 3) throw Error("correlation: at least 3 pairs required");
  const VectorXd dx = x.array() - x.mean();
  const VectorXd dy = y.array() - y.mean();
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw Error("undefined correlation: zero variance");

  CorrelationResult r;
  r.n = static_cast<std::size_t>(n);
  r.coefficient = std::clamp(dx.dot(dy) / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double one_minus = 1.0 - r.coefficient * r.coefficient;
  if (one_minus <= 0.0) {
    r.p_value = 0.0;
  } else {
    const double t = r.coefficient * std::sqrt(df / one_minus);
    r.p_value = student_t_two_sided_p(t, df);
  }
  return r;
}

VectorXd average_ranks(const VectorXd& v)
{
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  VectorXd ranks(v.size());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

CorrelationResult spearman(const VectorXd& x, const VectorXd& y)
{
  if (x.size() != y.size())
    throw Error("correlation: vectors differ in length");
  auto r = pearson(average_ranks(x), average_ranks(y));
  r.kind = CorrelationKind::spearman;
  return r;
}

TTestResult welch_ttest(const VectorXd& a, const VectorXd& b)
{
  if (a.size() < 2 || b.size() < 2)
    throw Error("welch t-test: both samples need at least 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = a.mean();
  const double mb = b.mean();
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;

  TTestResult r;
  const double se2 = va + vb;
  if (se2 == 0.0) {
    if (ma == mb) throw Error("welch t-test: degenerate (constant, equal samples)");
    r.t_statistic = ma > mb ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
    r.degrees_of_freedom = na + nb - 2.0;
    r.p_value = 0.0;
    r.stars = significance_stars(r.p_value);
    return r;
  }
  r.t_statistic = (ma - mb) / std::sqrt(se2);
  r.degrees_of_freedom =
      se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
  r.stars = significance_stars(r.p_value);
  return r;
}

std::vector<std::string> tokenize(std::string_view text)
{
  std::istringstream in{std::string(text)};
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

WerResult word_error_rate(const std::vector<std::string>& ref,
                          const std::vector<std::string>& hyp)
{
  if (ref.empty()) throw Error("word_error_rate: empty reference");
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  // cost(i, j): edits aligning ref[0, i) with hyp[0, j).
  Matrix<std::size_t> cost(n + 1, m + 1);
  for (std::size_t i = 0; i <= n; ++i) cost(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) cost(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = cost(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost(i, j) = std::min({diag, cost(i - 1, j) + 1, cost(i, j - 1) + 1});
    }

  WerResult r;
  r.n_reference_words = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool match = ref[i - 1] == hyp[j - 1];
      if (cost(i, j) == cost(i - 1, j - 1) + (match ? 0 : 1)) {
        if (!match) ++r.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && cost(i, j) == cost(i - 1, j) + 1) {
      ++r.deletions;
      --i;
    } else {
      ++r.insertions;
      --j;
    }
  }
  r.wer = static_cast<double>(r.edits()) / static_cast<double>(n);
  return r;
}

}  // namespace patheval
