#include "pricelab/vecm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pricelab/error.hpp"
#include "pricelab/stats.hpp"

namespace pricelab::vecm {
namespace {

constexpr double kEigenCeiling = 1.0 - 1e-12;
/// 5% Dickey-Fuller critical value for the regression with a constant.
constexpr double kDickeyFuller5 = -2.86;

void require_two_columns(const Eigen::MatrixXd& levels) {
  if (levels.cols() != 2) throw Error(Errc::RankMismatch, "expected exactly two price columns");
}

void require_positive_definite(const Eigen::Matrix2d& s, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top) {
    throw Error(Errc::SingularMoments, std::string(what) + " is singular");
  }
}

/// t-statistic of phi in dy_t = c + phi * y_{t-1}.
double dickey_fuller_t(const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size() - 1;
  Eigen::MatrixXd x(n, 2);
  x.col(0).setOnes();
  x.col(1) = y.head(n);
  const Eigen::VectorXd dy = y.tail(n) - y.head(n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 2) return 0.0;
  const Eigen::VectorXd b = qr.solve(dy);
  const Eigen::VectorXd e = dy - x * b;
  const double s2 = e.squaredNorm() / static_cast<double>(n - 2);
  const Eigen::Matrix2d xtx_inv = (x.transpose() * x).inverse();
  const double se = std::sqrt(s2 * xtx_inv(1, 1));
  return se > 0.0 ? b(1) / se : 0.0;
}

double gaussian_loglik(double t_eff, const Eigen::Matrix2d& omega) {
  constexpr double n = 2.0;
  return -0.5 * t_eff * (n * (1.0 + std::log(2.0 * std::numbers::pi)) + std::log(omega.determinant()));
}

}  // namespace

const char* to_string(DetSpec spec) {
  return spec == DetSpec::UnrestrictedConstant ? "unrestricted-constant" : "none";
}

DetSpec det_spec_from_string(const std::string& name) {
  if (name == "none") return DetSpec::None;
  if (name == "unrestricted-constant" || name == "constant") return DetSpec::UnrestrictedConstant;
  throw Error(Errc::ConfigError, "unknown deterministic spec '" + name + "'");
}

Eigen::MatrixXd levels_matrix(const marketdata::AlignedPair& pair) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(pair.size()), 2);
  for (std::size_t i = 0; i < pair.size(); ++i) {
    y(static_cast<Eigen::Index>(i), 0) = pair.a[i];
    y(static_cast<Eigen::Index>(i), 1) = pair.b[i];
  }
  return y;
}

Eigen::Matrix2d VecmFit::gamma_sum() const {
  Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
  for (const auto& g : gamma) sum += g;
  return sum;
}

ReducedRankMoments reduced_rank_moments(const Eigen::MatrixXd& levels, int p, DetSpec det) {
  require_two_columns(levels);
  if (p < 1) throw Error(Errc::SampleTooShort, "VAR order must be at least 1");
  const Eigen::Index t_total = levels.rows();
  if (t_total < 20 + 4 * p) {
    throw Error(Errc::SampleTooShort, "need at least 20 + 4p observations");
  }
  const Eigen::Index t_eff = t_total - p;
  const Eigen::Index k2 = 2 * (p - 1) + (det == DetSpec::UnrestrictedConstant ? 1 : 0);

  ReducedRankMoments m;
  m.z0.resize(t_eff, 2);
  m.z1.resize(t_eff, 2);
  m.z2.resize(t_eff, k2);
  for (Eigen::Index k = 0; k < t_eff; ++k) {
    const Eigen::Index t = p + k;
    m.z0.row(k) = levels.row(t) - levels.row(t - 1);
    m.z1.row(k) = levels.row(t - 1);
    for (int i = 1; i < p; ++i) {
      m.z2.block(k, 2 * (i - 1), 1, 2) = levels.row(t - i) - levels.row(t - i - 1);
    }
    if (det == DetSpec::UnrestrictedConstant) m.z2(k, k2 - 1) = 1.0;
  }

  if (k2 > 0) {
    m.r0 = stats::ols(m.z2, m.z0).residuals;
    m.r1 = stats::ols(m.z2, m.z1).residuals;
  } else {
    m.r0 = m.z0;
    m.r1 = m.z1;
  }
  const double inv_t = 1.0 / static_cast<double>(t_eff);
  m.s00 = m.r0.transpose() * m.r0 * inv_t;
  m.s01 = m.r0.transpose() * m.r1 * inv_t;
  m.s11 = m.r1.transpose() * m.r1 * inv_t;
  require_positive_definite(m.s00, "S00");
  require_positive_definite(m.s11, "S11");
  return m;
}

EigenPairs johansen_eigen(const ReducedRankMoments& m) {
  const Eigen::LLT<Eigen::Matrix2d> llt(m.s11);
  if (llt.info() != Eigen::Success) throw Error(Errc::SingularMoments, "S11 not positive definite");
  const Eigen::Matrix2d l = llt.matrixL();
  const Eigen::Matrix2d l_inv = l.inverse();
  const Eigen::Matrix2d s00_inv = m.s00.inverse();
  Eigen::Matrix2d c = l_inv * m.s01.transpose() * s00_inv * m.s01 * l_inv.transpose();
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c);

  EigenPairs out;
  // Eigen sorts ascending.
  for (int k = 0; k < 2; ++k) {
    out.values(k) = std::clamp(es.eigenvalues()(1 - k), 0.0, kEigenCeiling);
    out.vectors.col(k) = l_inv.transpose() * es.eigenvectors().col(1 - k);
  }
  return out;
}

VecmFit estimate_vecm(const Eigen::MatrixXd& levels, int p, int r, DetSpec det) {
  if (r != 1) throw Error(Errc::RankMismatch, "only cointegrating rank 1 is supported");
  const ReducedRankMoments m = reduced_rank_moments(levels, p, det);
  const EigenPairs eig = johansen_eigen(m);

  VecmFit fit;
  fit.lags_p = p;
  fit.rank = r;
  fit.det_spec = det;
  fit.eigenvalues = eig.values;

  const Eigen::Vector2d v = eig.vectors.col(0);
  if (std::abs(v(0)) <= 1e-12 * v.norm()) {
    throw Error(Errc::SingularMoments, "cointegrating vector has no weight on market 1");
  }
  fit.beta = v / v(0);
  fit.alpha = m.s01 * fit.beta / fit.beta.dot(m.s11 * fit.beta);

  const Eigen::MatrixXd ect_fit = m.z1 * fit.beta * fit.alpha.transpose();
  Eigen::MatrixXd y = m.z0 - ect_fit;
  if (m.z2.cols() > 0) {
    const stats::LeastSquares ls = stats::ols(m.z2, y);
    for (int i = 1; i < p; ++i) {
      fit.gamma.push_back(ls.coef.block(2 * (i - 1), 0, 2, 2).transpose());
    }
    if (det == DetSpec::UnrestrictedConstant) fit.constant = ls.coef.row(ls.coef.rows() - 1).transpose();
    fit.residuals = ls.residuals;
  } else {
    fit.residuals = std::move(y);
  }
  const double t_eff = static_cast<double>(fit.residuals.rows());
  fit.omega = fit.residuals.transpose() * fit.residuals / t_eff;
  fit.omega = 0.5 * (fit.omega + fit.omega.transpose());
  fit.loglik = gaussian_loglik(t_eff, fit.omega);

  for (int c = 0; c < 2; ++c) {
    if (dickey_fuller_t(levels.col(c)) < kDickeyFuller5) {
      fit.warnings.push_back("column " + std::to_string(c + 1) +
                             " rejects a unit root at 5%; levels may be stationary");
    }
  }
  return fit;
}

double trace_critical_value(DetSpec det, int n_minus_r, int level) {
  // MacKinnon-Haug-Michelis (1999) trace critical values.
  static constexpr std::array<std::array<double, 3>, 2> kNone{{
      {2.9762, 4.1296, 6.9406},     // n - r = 1
      {10.4741, 12.3212, 16.3640},  // n - r = 2
  }};
  static constexpr std::array<std::array<double, 3>, 2> kConstant{{
      {2.7055, 3.8415, 6.6349},
      {13.4294, 15.4943, 19.9349},
  }};
  if (n_minus_r < 1 || n_minus_r > 2) {
    throw Error(Errc::RankMismatch, "critical values tabulated for n - r in {1, 2}");
  }
  int column = 0;
  switch (level) {
    case 90: column = 0; break;
    case 95: column = 1; break;
    case 99: column = 2; break;
    default: throw Error(Errc::ConfigError, "level must be 90, 95 or 99");
  }
  const auto& table = det == DetSpec::None ? kNone : kConstant;
  return table[n_minus_r - 1][column];
}

JohansenResult johansen_trace(const Eigen::MatrixXd& levels, int p, DetSpec det, int level) {
  const ReducedRankMoments m = reduced_rank_moments(levels, p, det);
  const EigenPairs eig = johansen_eigen(m);
  const double t_eff = static_cast<double>(m.r0.rows());

  JohansenResult res;
  res.eigenvalues = eig.values;
  res.det_spec = det;
  res.level = level;
  res.trace_stats[0] = -t_eff * (std::log(1.0 - eig.values(0)) + std::log(1.0 - eig.values(1)));
  res.trace_stats[1] = -t_eff * std::log(1.0 - eig.values(1));
  res.selected_rank = 2;
  for (int r = 0; r < 2; ++r) {
    res.critical_values[r] = trace_critical_value(det, 2 - r, level);
  }
  for (int r = 0; r < 2; ++r) {
    if (res.trace_stats[r] <= res.critical_values[r]) {
      res.selected_rank = r;
      break;
    }
  }
  return res;
}

std::array<SeriesDiagnostics, 2> residual_diagnostics(const VecmFit& fit, int max_lag) {
  const Eigen::Index t = fit.residuals.rows();
  if (max_lag < 1 || static_cast<double>(max_lag) >= static_cast<double>(t) / 4.0) {
    throw Error(Errc::LagTooLarge, "max_lag must satisfy 1 <= max_lag < T/4");
  }
  std::array<SeriesDiagnostics, 2> out;
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd col = fit.residuals.col(c);
    const std::span<const double> series(col.data(), static_cast<std::size_t>(col.size()));
    out[c].acf = stats::acf(series, max_lag);
    const auto lb = stats::ljung_box(series, max_lag);
    out[c].ljung_box = lb.q;
    out[c].p_value = lb.p_value;
  }
  return out;
}

ReturnPair ReturnPair::from_returns(Eigen::MatrixXd returns) {
  if (returns.cols() != 2) throw Error(Errc::RankMismatch, "expected two return columns");
  return ReturnPair(std::move(returns));
}

ReturnPair ReturnPair::log_differences(const Eigen::MatrixXd& levels) {
  require_two_columns(levels);
  if (levels.rows() < 2) throw Error(Errc::EmptyInput, "need at least two rows to difference");
  if (!(levels.array() > 0.0).all()) {
    throw Error(Errc::NonPositivePrice, "log differences need positive prices");
  }
  const Eigen::MatrixXd logs = levels.array().log().matrix();
  const Eigen::Index n = levels.rows() - 1;
  return ReturnPair(logs.bottomRows(n) - logs.topRows(n));
}

std::vector<GrangerResult> granger_f_test(const ReturnPair& returns, int max_lag) {
  const Eigen::MatrixXd& d = returns.data();
  const Eigen::Index t_total = d.rows();
  if (max_lag < 1 || t_total <= 10 * max_lag) {
    throw Error(Errc::SampleTooShort, "need more than 10 * max_lag observations");
  }

  auto one_direction = [&](int cause, int effect, int k) -> std::pair<double, double> {
    const Eigen::Index n = t_total - k;
    Eigen::MatrixXd xr(n, 1 + k);
    Eigen::MatrixXd xu(n, 1 + 2 * k);
    Eigen::VectorXd y(n);
    for (Eigen::Index row = 0; row < n; ++row) {
      const Eigen::Index t = row + k;
      y(row) = d(t, effect);
      xr(row, 0) = 1.0;
      xu(row, 0) = 1.0;
      for (int l = 1; l <= k; ++l) {
        xr(row, l) = d(t - l, effect);
        xu(row, l) = d(t - l, effect);
        xu(row, k + l) = d(t - l, cause);
      }
    }
    const double rss_r = stats::ols(xr, y).residuals.squaredNorm();
    const double rss_u = stats::ols(xu, y).residuals.squaredNorm();
    const double dof2 = static_cast<double>(n - 2 * k - 1);
    if (!(rss_u > 0.0)) throw Error(Errc::SingularMoments, "unrestricted regression fits exactly");
    const double f = std::max(0.0, (rss_r - rss_u) / k) / (rss_u / dof2);
    return {f, stats::f_sf(f, k, dof2)};
  };

  std::vector<GrangerResult> out;
  for (int k = 1; k <= max_lag; ++k) {
    GrangerResult g;
    g.lag = k;
    std::tie(g.f_1to2, g.p_1to2) = one_direction(0, 1, k);
    std::tie(g.f_2to1, g.p_2to1) = one_direction(1, 0, k);
    out.push_back(g);
  }
  return out;
}

}  // namespace pricelab::vecm
