#include "pricelab/stats.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "pricelab/error.hpp"

namespace pricelab::stats {

double chi2_sf(double x, double dof) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

double f_sf(double x, double dof1, double dof2) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(dof1, dof2), x));
}

LeastSquares ols(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.cols() == 0) return {Eigen::MatrixXd(0, y.cols()), y};
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) {
    throw Error(Errc::SingularMoments, "regressor matrix is rank deficient");
  }
  LeastSquares out;
  out.coef = qr.solve(y);
  out.residuals = y - x * out.coef;
  return out;
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
  const auto n = static_cast<int>(series.size());
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);

  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
  out[0] = 1.0;
  if (denom == 0.0) return out;
  for (int k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (int t = k; t < n; ++t) num += (series[t] - mean) * (series[t - k] - mean);
    out[k] = num / denom;
  }
  return out;
}

LjungBox ljung_box(std::span<const double> series, int max_lag) {
  const auto n = static_cast<double>(series.size());
  const auto rho = acf(series, max_lag);
  double sum = 0.0;
  for (int k = 1; k <= max_lag; ++k) sum += rho[k] * rho[k] / (n - k);
  LjungBox lb;
  lb.q = n * (n + 2.0) * sum;
  lb.p_value = chi2_sf(lb.q, max_lag);
  return lb;
}

}  // namespace pricelab::stats
