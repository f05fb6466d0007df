#pragma once

#include <cmath>
#include <vector>

#include "patheval/types.hpp"
#include "vendor_json.hpp"

namespace patheval {

struct LassoConfig
{
  double alpha = 1e-5;
  int max_iter = 1000;
  double tol = 1e-7;

  void validate() const;
};

// Weights live in the standardized feature space; predict() applies the
// stored standardization so callers pass raw features.
struct LassoModel
{
  VectorXd weights;
  double intercept = 0.0;
  VectorXd feature_means;
  VectorXd feature_scales;
  int n_iter_run = 0;
  bool converged = false;
  LassoConfig config;

  Eigen::Index n_features() const { return weights.size(); }
  // Coefficients and intercept expressed on the raw (unstandardized) features.
  VectorXd raw_coefficients() const;
  double raw_intercept() const;
};

template <typename Scalar>
Scalar soft_threshold(Scalar z, Scalar t)
{
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return Scalar(0);
}

// Minimizes (1/2n) ||y - Xw - b||^2 + alpha ||w||_1 by cyclic coordinate
// descent on standardized columns. When `objective_trace` is given, the
// objective after every sweep is appended to it.
LassoModel fit_lasso(const MatrixXd& X, const VectorXd& y,
                     const LassoConfig& cfg = {},
                     std::vector<double>* objective_trace = nullptr);

template <typename Derived>
double predict(const LassoModel& m, const Eigen::MatrixBase<Derived>& x);

VectorXd predict_rows(const LassoModel& m, const MatrixXd& X);

nlohmann::json to_json(const LassoModel& m);
LassoModel lasso_model_from_json(const nlohmann::json& j);

}  // namespace patheval

#include "patheval/lasso_impl.hpp"
