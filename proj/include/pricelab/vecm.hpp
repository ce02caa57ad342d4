#pragma once

// Bivariate VECM estimation by reduced-rank regression, the Johansen trace
// test, residual diagnostics and Granger causality on returns.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pricelab/marketdata.hpp"

namespace pricelab::vecm {

enum class DetSpec { None, UnrestrictedConstant };

const char* to_string(DetSpec spec);
DetSpec det_spec_from_string(const std::string& name);

/// Columns are the two markets' price levels.
Eigen::MatrixXd levels_matrix(const marketdata::AlignedPair& pair);

struct VecmFit {
  Eigen::Vector2d alpha = Eigen::Vector2d::Zero();
  Eigen::Vector2d beta = Eigen::Vector2d::Zero();  // beta(0) == 1
  std::vector<Eigen::Matrix2d> gamma;               // Gamma_1 .. Gamma_{p-1}
  Eigen::Vector2d constant = Eigen::Vector2d::Zero();
  Eigen::Matrix2d omega = Eigen::Matrix2d::Zero();
  Eigen::MatrixXd residuals;  // T_eff x 2
  Eigen::Vector2d eigenvalues = Eigen::Vector2d::Zero();
  double loglik = 0.0;
  int lags_p = 1;
  int rank = 1;
  DetSpec det_spec = DetSpec::None;
  std::vector<std::string> warnings;

  Eigen::Matrix2d pi() const { return alpha * beta.transpose(); }
  Eigen::Matrix2d gamma_sum() const;
  Eigen::Index sample_size() const { return residuals.rows(); }
};

/// Product moments of the concentrated system. Exposed for the restricted
/// estimators in the discovery module.
struct ReducedRankMoments {
  Eigen::MatrixXd r0;  // residuals of dX_t on the short-run regressors
  Eigen::MatrixXd r1;  // residuals of X_{t-1} on the short-run regressors
  Eigen::MatrixXd z0;
  Eigen::MatrixXd z1;
  Eigen::MatrixXd z2;
  Eigen::Matrix2d s00, s01, s11;
};

ReducedRankMoments reduced_rank_moments(const Eigen::MatrixXd& levels, int p, DetSpec det);

/// Generalised eigenvalues of S10 S00^-1 S01 against S11, descending and
/// clipped to [0, 1 - 1e-12], with matching S11-normalised eigenvectors.
struct EigenPairs {
  Eigen::Vector2d values;
  Eigen::Matrix2d vectors;
};
EigenPairs johansen_eigen(const ReducedRankMoments& m);

VecmFit estimate_vecm(const Eigen::MatrixXd& levels, int p = 1, int r = 1,
                      DetSpec det = DetSpec::None);

struct JohansenResult {
  Eigen::Vector2d eigenvalues = Eigen::Vector2d::Zero();
  std::array<double, 2> trace_stats{};      // H0: rank <= r, r = 0, 1
  std::array<double, 2> critical_values{};  // at `level`
  int selected_rank = 0;
  DetSpec det_spec = DetSpec::None;
  int level = 90;
};

/// Critical value of the trace statistic for n - r free trends (1 or 2) at a
/// 90, 95 or 99 percent level.
double trace_critical_value(DetSpec det, int n_minus_r, int level);

JohansenResult johansen_trace(const Eigen::MatrixXd& levels, int p = 1,
                              DetSpec det = DetSpec::None, int level = 90);

struct SeriesDiagnostics {
  std::vector<double> acf;  // lags 0..max_lag
  double ljung_box = 0.0;
  double p_value = 1.0;
};
std::array<SeriesDiagnostics, 2> residual_diagnostics(const VecmFit& fit, int max_lag);

/// Differenced (return) data for the Granger test. Built only from returns
/// or by differencing levels, so level series cannot reach the test.
class ReturnPair {
 public:
  static ReturnPair from_returns(Eigen::MatrixXd returns);
  static ReturnPair log_differences(const Eigen::MatrixXd& levels);

  const Eigen::MatrixXd& data() const { return data_; }
  Eigen::Index rows() const { return data_.rows(); }

 private:
  explicit ReturnPair(Eigen::MatrixXd data) : data_(std::move(data)) {}
  Eigen::MatrixXd data_;
};

struct GrangerResult {
  int lag = 0;
  double f_1to2 = 0.0;  // column 0 helps predict column 1
  double p_1to2 = 1.0;
  double f_2to1 = 0.0;
  double p_2to1 = 1.0;
};
std::vector<GrangerResult> granger_f_test(const ReturnPair& returns, int max_lag);

}  // namespace pricelab::vecm
