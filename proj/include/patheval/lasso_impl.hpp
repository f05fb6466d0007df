#pragma once

#include "patheval/error.hpp"

namespace patheval {

template <typename Derived>
double predict(const LassoModel& m, const Eigen::MatrixBase<Derived>& x)
{
  if (x.size() != m.n_features())
    throw Error("predict: expected " + std::to_string(m.n_features()) +
                " features, got " + std::to_string(x.size()));
  const VectorXd z = (x.derived().template cast<double>().reshaped() -
                      m.feature_means)
                         .cwiseQuotient(m.feature_scales);
  return m.intercept + m.weights.dot(z);
}

}  // namespace patheval
