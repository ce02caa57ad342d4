#pragma once

// Hasbrouck information shares and the Gonzalo-Granger permanent-transitory
// decomposition, plus likelihood-ratio tests on the adjustment direction.

#include <utility>

#include <Eigen/Dense>

#include "pricelab/vecm.hpp"

namespace pricelab::discovery {

/// Unit vector orthogonal to `v`, first nonzero component positive.
Eigen::Vector2d alpha_perp(const Eigen::Vector2d& v);

/// Lower Cholesky factor of a symmetrised covariance, with one ridge retry
/// of 1e-12 * trace before giving up.
Eigen::Matrix2d cholesky_lower(const Eigen::Matrix2d& omega);

/// Common-trend loading row psi = (a_perp' (I - sum Gamma) b_perp)^-1 a_perp'.
Eigen::RowVector2d common_trend_weights(const vecm::VecmFit& fit);

/// IS_j = ([psi F]_j)^2 / (psi Omega psi') with F = chol(Omega), market 1
/// first in the ordering.
std::pair<double, double> information_shares(const Eigen::RowVector2d& psi,
                                             const Eigen::Matrix2d& omega);

struct InfoShares {
  std::pair<double, double> ordering_12;
  std::pair<double, double> ordering_21;  // reported in original market labels
  std::pair<double, double> midpoint;
};

InfoShares hasbrouck_is(const vecm::VecmFit& fit);

struct PTDecomposition {
  Eigen::VectorXd permanent;    // W_t = a_perp' X_t
  Eigen::MatrixXd transitory;   // rows A2 beta' X_t
  Eigen::Vector2d a1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d a2 = Eigen::Vector2d::Zero();
  Eigen::Vector2d alpha_perp = Eigen::Vector2d::Zero();
  Eigen::Vector2d beta_perp = Eigen::Vector2d::Zero();

  /// A1 W_t + transitory_t.
  Eigen::MatrixXd reconstruct() const;
};

PTDecomposition gg_decompose(const Eigen::Vector2d& alpha, const Eigen::Vector2d& beta,
                             const Eigen::MatrixXd& levels);
PTDecomposition gg_decompose(const vecm::VecmFit& fit, const Eigen::MatrixXd& levels);

struct LrTest {
  double chi2 = 0.0;
  double p_value = 1.0;
  double restricted_loglik = 0.0;
  double unrestricted_loglik = 0.0;
};

/// H0: alpha is proportional to `direction`, with beta held at its
/// unrestricted estimate. chi2 with one degree of freedom.
LrTest lr_test_alpha_direction(const Eigen::MatrixXd& levels, int p, vecm::DetSpec det,
                               const Eigen::Vector2d& direction);

enum class Leader { Market1, Market2, Neither, Inconclusive };
const char* to_string(Leader leader);

/// Reads the two axis tests: accepting alpha ~ (0,1) means market 1 does not
/// adjust, i.e. it leads.
Leader gg_verdict(const LrTest& h10, const LrTest& h01, double significance = 0.05);

}  // namespace pricelab::discovery
