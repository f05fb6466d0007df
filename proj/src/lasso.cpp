#include "patheval/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "patheval/error.hpp"

namespace patheval {

void LassoConfig::validate() const
{
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw Error("lasso alpha must be a finite non-negative number");
  if (max_iter < 1) throw Error("lasso max_iter must be >= 1");
  if (!(tol >= 0.0)) throw Error("lasso tol must be non-negative");
}

VectorXd LassoModel::raw_coefficients() const
{
  return weights.cwiseQuotient(feature_scales);
}

double LassoModel::raw_intercept() const
{
  return intercept - raw_coefficients().dot(feature_means);
}

LassoModel fit_lasso(const MatrixXd& X, const VectorXd& y,
                     const LassoConfig& cfg,
                     std::vector<double>* objective_trace)
{
  cfg.validate();
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n)
    throw Error("lasso: X has " + std::to_string(n) + " rows but y has " +
                std::to_string(y.size()) + " entries");
  if (n < 2) throw Error("lasso: at least 2 samples required");
  if (p < 1) throw Error("lasso: at least 1 feature required");
  if (!X.allFinite() || !y.allFinite())
    throw Error("lasso: non-finite values in inputs");

  const double inv_n = 1.0 / static_cast<double>(n);
  LassoModel m;
  m.config = cfg;
  m.feature_means = X.colwise().mean().transpose();
  m.feature_scales.resize(p);

  MatrixXd Z = X.rowwise() - m.feature_means.transpose();
  VectorXd col_sq(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sd = std::sqrt(Z.col(j).squaredNorm() * inv_n);
    if (sd <= 1e-12 * std::max(1.0, std::abs(m.feature_means[j]))) {
      // Constant feature: it can never enter the model.
      m.feature_scales[j] = 1.0;
      Z.col(j).setZero();
      col_sq[j] = 0.0;
    } else {
      m.feature_scales[j] = sd;
      Z.col(j) /= sd;
      col_sq[j] = Z.col(j).squaredNorm() * inv_n;
    }
  }

  m.intercept = y.mean();
  m.weights = VectorXd::Zero(p);
  VectorXd residual = y.array() - m.intercept;

  auto objective = [&] {
    return 0.5 * inv_n * residual.squaredNorm() +
           cfg.alpha * m.weights.lpNorm<1>();
  };

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double old = m.weights[j];
      const double rho = Z.col(j).dot(residual) * inv_n + col_sq[j] * old;
      const double updated = soft_threshold(rho, cfg.alpha) / col_sq[j];
      const double delta = updated - old;
      if (delta != 0.0) {
        residual.noalias() -= delta * Z.col(j);
        m.weights[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    m.n_iter_run = iter + 1;
    if (objective_trace) objective_trace->push_back(objective());
    if (max_change < cfg.tol) {
      m.converged = true;
      break;
    }
  }
  return m;
}

VectorXd predict_rows(const LassoModel& m, const MatrixXd& X)
{
  if (X.cols() != m.n_features())
    throw Error("predict: expected " + std::to_string(m.n_features()) +
                " features, got " + std::to_string(X.cols()));
  const MatrixXd Z =
      (X.rowwise() - m.feature_means.transpose()).array().rowwise() /
      m.feature_scales.transpose().array();
  return (Z * m.weights).array() + m.intercept;
}

namespace {

std::vector<double> to_std(const VectorXd& v)
{
  return {v.data(), v.data() + v.size()};
}

VectorXd from_std(const std::vector<double>& v)
{
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const LassoModel& m)
{
  return {
      {"weights", to_std(m.weights)},
      {"intercept", m.intercept},
      {"feature_means", to_std(m.feature_means)},
      {"feature_scales", to_std(m.feature_scales)},
      {"config",
       {{"alpha", m.config.alpha},
        {"max_iter", m.config.max_iter},
        {"tol", m.config.tol}}},
      {"n_iter_run", m.n_iter_run},
      {"converged", m.converged},
  };
}

LassoModel lasso_model_from_json(const nlohmann::json& j)
{
  LassoModel m;
  try {
    m.weights = from_std(j.at("weights").get<std::vector<double>>());
    m.intercept = j.at("intercept").get<double>();
    m.feature_means = from_std(j.at("feature_means").get<std::vector<double>>());
    m.feature_scales =
        from_std(j.at("feature_scales").get<std::vector<double>>());
    const auto& c = j.at("config");
    m.config.alpha = c.at("alpha").get<double>();
    m.config.max_iter = c.at("max_iter").get<int>();
    m.config.tol = c.at("tol").get<double>();
    m.n_iter_run = j.at("n_iter_run").get<int>();
    m.converged = j.at("converged").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed lasso model JSON: ") + e.what());
  }
  if (m.feature_means.size() != m.weights.size() ||
      m.feature_scales.size() != m.weights.size())
    throw Error("malformed lasso model JSON: vector lengths differ");
  if ((m.feature_scales.array() <= 0.0).any())
    throw Error("malformed lasso model JSON: feature scales must be > 0");
  return m;
}

}  // namespace patheval
