#pragma once

// Small numerical helpers shared by the estimation modules.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pricelab::stats {

/// Upper-tail probabilities.
double chi2_sf(double x, double dof);
double f_sf(double x, double dof1, double dof2);

struct LeastSquares {
  Eigen::MatrixXd coef;       // k x m
  Eigen::MatrixXd residuals;  // T x m
};

/// Multi-response least squares of `y` on `x`. Throws SingularMoments when
/// `x` is rank deficient.
LeastSquares ols(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Sample autocorrelations for lags 0..max_lag (lag 0 is 1).
std::vector<double> acf(std::span<const double> series, int max_lag);

struct LjungBox {
  double q = 0.0;
  double p_value = 1.0;
};
LjungBox ljung_box(std::span<const double> series, int max_lag);

}  // namespace pricelab::stats
