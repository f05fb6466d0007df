#include <doctest.h>

#include <random>

#include "patheval/error.hpp"
#include "patheval/lasso.hpp"

using namespace patheval;

namespace {

struct Problem
{
  MatrixXd X;
  VectorXd y;
};

Problem random_problem(std::uint64_t seed, int n = 20, int p = 5)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Problem pr{MatrixXd::NullaryExpr(n, p, [&] { return N(rng); }), VectorXd(n)};
  const VectorXd beta = VectorXd::LinSpaced(p, 1.0, -1.0);
  pr.y = pr.X * beta + 0.2 * VectorXd::NullaryExpr(n, [&] { return N(rng); });
  pr.y.array() += 0.7;
  return pr;
}

// Least squares with intercept via the normal equations.
VectorXd ols_with_intercept(const MatrixXd& X, const VectorXd& y)
{
  MatrixXd A(X.rows(), X.cols() + 1);
  A << VectorXd::Ones(X.rows()), X;
  return (A.transpose() * A).ldlt().solve(A.transpose() * y);
}

}  // namespace

TEST_CASE("soft threshold")
{
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0f, 1.0f) == 0.0f);
}

TEST_CASE("large alpha shrinks everything to the mean")
{
  const auto pr = random_problem(1);
  LassoConfig cfg;
  cfg.alpha = 100.0;
  const LassoModel m = fit_lasso(pr.X, pr.y, cfg);
  CHECK(m.weights.isZero(0.0));
  CHECK(m.intercept == doctest::Approx(pr.y.mean()).epsilon(1e-12));
  CHECK(m.converged);
  CHECK(predict(m, pr.X.row(3)) == doctest::Approx(pr.y.mean()));
  CHECK(predict(m, VectorXd::Constant(5, 1e6)) == doctest::Approx(pr.y.mean()));
}

TEST_CASE("alpha = 0 reproduces least squares fits")
{
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const auto pr = random_problem(seed);
    LassoConfig cfg;
    cfg.alpha = 0.0;
    const LassoModel m = fit_lasso(pr.X, pr.y, cfg);
    const VectorXd theta = ols_with_intercept(pr.X, pr.y);
    CHECK((m.raw_coefficients() - theta.tail(5)).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(std::abs(m.raw_intercept() - theta[0]) <= 1e-6);
    MatrixXd A(20, 6);
    A << VectorXd::Ones(20), pr.X;
    CHECK((predict_rows(m, pr.X) - A * theta).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("orthonormal design gives soft-thresholded least squares")
{
  // Hadamard columns: mean 0, population std 1, orthogonal.
  MatrixXd X(4, 3);
  X << 1, 1, 1,
      -1, 1, -1,
       1, -1, -1,
      -1, -1, 1;
  VectorXd y(4);
  y << 2.0, -0.5, 0.25, 1.0;
  const VectorXd ols = X.transpose() * (y.array() - y.mean()).matrix() / 4.0;
  for (double alpha : {0.01, 0.1, 0.5}) {
    LassoConfig cfg;
    cfg.alpha = alpha;
    const LassoModel m = fit_lasso(X, y, cfg);
    for (int j = 0; j < 3; ++j) CHECK(m.weights[j] == doctest::Approx(soft_threshold(ols[j], alpha)).epsilon(1e-9));
  }
}

TEST_CASE("objective never increases across sweeps")
{
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto pr = random_problem(seed, 30, 40);
    LassoConfig cfg;
    cfg.alpha = 0.01;
    std::vector<double> trace;
    fit_lasso(pr.X, pr.y, cfg, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
  }
}

TEST_CASE("l1 norm shrinks as alpha grows")
{
  const auto pr = random_problem(8, 25, 10);
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {0.0, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.5, 1.0}) {
    LassoConfig cfg;
    cfg.alpha = alpha;
    cfg.max_iter = 20000;
    cfg.tol = 1e-10;
    const double l1 = fit_lasso(pr.X, pr.y, cfg).weights.lpNorm<1>();
    CHECK(l1 <= prev + 1e-9);
    prev = l1;
  }
}

TEST_CASE("constant features get zero weight")
{
  auto pr = random_problem(2);
  pr.X.col(2).setConstant(4.2);
  LassoConfig cfg;
  cfg.alpha = 0.0;
  const LassoModel m = fit_lasso(pr.X, pr.y, cfg);
  CHECK(m.weights[2] == 0.0);
  CHECK(m.feature_scales[2] == 1.0);
  CHECK((m.feature_scales.array() > 0).all());
}

TEST_CASE("predict is affine")
{
  const auto pr = random_problem(4);
  const LassoModel m = fit_lasso(pr.X, pr.y);
  const VectorXd a = pr.X.row(0), b = pr.X.row(1), d = VectorXd::Constant(5, 0.3);
  CHECK(predict(m, a + d) - predict(m, b + d) == doctest::Approx(predict(m, a) - predict(m, b)).epsilon(1e-12));
  CHECK_THROWS_AS(predict(m, VectorXd::Zero(4)), Error);
}

TEST_CASE("fit rejects bad input")
{
  const auto pr = random_problem(6);
  CHECK_THROWS_AS(fit_lasso(pr.X, pr.y.head(10)), Error);
  CHECK_THROWS_AS(fit_lasso(pr.X.topRows(1), pr.y.head(1)), Error);
  MatrixXd bad = pr.X;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(fit_lasso(bad, pr.y), Error);
  LassoConfig cfg;
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(fit_lasso(pr.X, pr.y, cfg), Error);
  cfg.alpha = 0.1;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(fit_lasso(pr.X, pr.y, cfg), Error);
}

TEST_CASE("max_iter caps the sweeps and clears converged")
{
  const auto pr = random_problem(7, 20, 30);
  LassoConfig cfg;
  cfg.alpha = 1e-6;
  cfg.max_iter = 3;
  cfg.tol = 0.0;
  const LassoModel m = fit_lasso(pr.X, pr.y, cfg);
  CHECK(m.n_iter_run == 3);
  CHECK_FALSE(m.converged);
}

TEST_CASE("json round trip")
{
  const auto pr = random_problem(9);
  const LassoModel m = fit_lasso(pr.X, pr.y);
  const LassoModel back = lasso_model_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.weights == m.weights);
  CHECK(back.intercept == m.intercept);
  CHECK(back.feature_means == m.feature_means);
  CHECK(back.feature_scales == m.feature_scales);
  CHECK(back.n_iter_run == m.n_iter_run);
  CHECK(back.converged == m.converged);
  CHECK(back.config.alpha == m.config.alpha);
  CHECK(predict(back, pr.X.row(5)) == predict(m, pr.X.row(5)));
}
