#include "patheval/ppgdtw.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "patheval/csv.hpp"
#include "patheval/error.hpp"
#include "patheval/sklmeasure.hpp"

namespace patheval {

namespace {

double parse_number(const std::string& s, const std::string& where)
{
  const auto t = csv::trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() ||
      !std::isfinite(v))
    throw Error(where + ": non-numeric cell '" + s + "'");
  return v;
}

}  // namespace

Posteriorgram parse_posteriorgram(std::string_view text, std::string_view source)
{
  std::istringstream in{std::string(text)};
  std::string line;
  const std::string src(source);
  if (!std::getline(in, line)) throw Error(src + ": empty posteriorgram file");

  long dim = -1;
  double hop = -1.0;
  for (const auto& field : csv::split_line(line)) {
    const auto eq = field.find('=');
    if (eq == std::string::npos)
      throw Error(src + ": malformed header field '" + field + "'");
    const auto key = csv::trim(field.substr(0, eq));
    const auto value = field.substr(eq + 1);
    if (key == "D")
      dim = static_cast<long>(parse_number(value, src + " header"));
    else if (key == "hop_ms")
      hop = parse_number(value, src + " header");
    else
      throw Error(src + ": unknown header key '" + key + "'");
  }
  if (dim < 1) throw Error(src + ": header must declare D=<dim> with dim >= 1");
  if (!(hop > 0.0)) throw Error(src + ": header must declare hop_ms > 0");

  std::vector<double> values;
  Eigen::Index rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto where = src + " row " + std::to_string(rows + 1);
    const auto cells = csv::split_line(line);
    if (static_cast<long>(cells.size()) != dim)
      throw Error(where + ": expected " + std::to_string(dim) +
                  " values, got " + std::to_string(cells.size()));
    double sum = 0.0;
    for (const auto& c : cells) {
      const double v = parse_number(c, where);
      if (v < 0.0) throw Error(where + ": negative posterior");
      values.push_back(v);
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-3)
      throw Error(where + ": row sums to " + csv::format_double(sum) +
                  ", expected 1 within 1e-3");
    ++rows;
  }
  if (rows == 0) throw Error(src + ": no frames");

  Posteriorgram p;
  p.frame_hop_ms = hop;
  p.frames = Eigen::Map<FrameMatrixXd>(values.data(), rows, dim);
  p.frames.array().colwise() /= p.frames.rowwise().sum().array();
  return p;
}

Posteriorgram load_posteriorgram(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open posteriorgram '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_posteriorgram(ss.str(), path.string());
}

void write_posteriorgram(const Posteriorgram& p,
                         const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "D=" << p.dim() << ",hop_ms=" << csv::format_double(p.frame_hop_ms)
      << '\n';
  for (Eigen::Index t = 0; t < p.n_frames(); ++t) {
    for (Eigen::Index d = 0; d < p.dim(); ++d) {
      if (d) out << ',';
      out << csv::format_double(p.frames(t, d));
    }
    out << '\n';
  }
}

MatrixXd skl_cost_matrix(const Posteriorgram& a, const Posteriorgram& b)
{
  if (a.dim() != b.dim())
    throw Error("dtw: posteriorgram dimensions differ (" +
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  if (a.n_frames() < 1 || b.n_frames() < 1)
    throw Error("dtw: empty posteriorgram");

  auto prepare = [](const Posteriorgram& p) {
    FrameMatrixXd rows(p.n_frames(), p.dim());
    for (Eigen::Index t = 0; t < p.n_frames(); ++t)
      rows.row(t) = floor_and_renormalize(p.frames.row(t)).transpose();
    return rows;
  };
  const FrameMatrixXd pa = prepare(a);
  const FrameMatrixXd pb = prepare(b);
  const FrameMatrixXd la = pa.array().log();
  const FrameMatrixXd lb = pb.array().log();

  MatrixXd cost(pa.rows(), pb.rows());
  for (Eigen::Index i = 0; i < pa.rows(); ++i)
    for (Eigen::Index j = 0; j < pb.rows(); ++j)
      cost(i, j) = ((pa.row(i) - pb.row(j)).array() *
                    (la.row(i) - lb.row(j)).array())
                       .sum();
  return cost;
}

DtwResult dtw_align(const MatrixXd& local)
{
  const Eigen::Index n = local.rows();
  const Eigen::Index m = local.cols();
  if (n < 1 || m < 1) throw Error("dtw: empty cost matrix");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  MatrixXd acc = MatrixXd::Constant(n, m, kInf);
  acc(0, 0) = local(0, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == 0 && j == 0) continue;
      double best = kInf;
      if (i > 0 && j > 0) best = acc(i - 1, j - 1);
      if (i > 0) best = std::min(best, acc(i - 1, j));
      if (j > 0) best = std::min(best, acc(i, j - 1));
      acc(i, j) = best + local(i, j);
    }

  DtwResult r;
  r.total_cost = acc(n - 1, m - 1);
  Eigen::Index i = n - 1, j = m - 1;
  r.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    const double diag = (i > 0 && j > 0) ? acc(i - 1, j - 1) : kInf;
    const double up = i > 0 ? acc(i - 1, j) : kInf;
    const double left = j > 0 ? acc(i, j - 1) : kInf;
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    r.path.emplace_back(i, j);
  }
  std::reverse(r.path.begin(), r.path.end());
  r.normalized_cost = r.total_cost / static_cast<double>(r.path.size());
  return r;
}

DtwResult dtw_align(const Posteriorgram& a, const Posteriorgram& b)
{
  return dtw_align(skl_cost_matrix(a, b));
}

Verification verify_utterance(double score, const LogisticParams& params)
{
  const double z = params.slope * (score - params.midpoint);
  Verification v;
  v.p_c = 1.0 / (1.0 + std::exp(z));
  v.verified = v.p_c >= 0.5;
  return v;
}

LogisticParams calibrate_logistic(const std::vector<double>& control_scores,
                                  const std::vector<double>& pathological_scores)
{
  if (control_scores.empty() || pathological_scores.empty())
    throw Error("logistic calibration needs scores from both classes");
  auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const double mc = mean_of(control_scores);
  const double mp = mean_of(pathological_scores);
  if (!(mp > mc))
    throw Error("degenerate logistic calibration: control mean must be below "
                "pathological mean");
  return {2.0 * std::log(9.0) / (mp - mc), 0.5 * (mc + mp)};
}

double speaker_intelligibility(const std::vector<VerificationResult>& results)
{
  if (results.empty()) throw Error("speaker_intelligibility: no utterances");
  const auto verified = std::count_if(results.begin(), results.end(),
                                      [](const auto& r) { return r.verified; });
  return 100.0 * static_cast<double>(verified) / static_cast<double>(results.size());
}

void write_verification_csv(const std::vector<VerificationResult>& results,
                            const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "utterance_id,matching_score,p_c,verified\n";
  for (const auto& r : results)
    out << csv::escape(r.utterance_id) << ','
        << csv::format_double(r.matching_score) << ','
        << csv::format_double(r.p_c) << ',' << (r.verified ? 1 : 0) << '\n';
}

}  // namespace patheval
