#include "pricelab/discovery.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "pricelab/error.hpp"
#include "pricelab/stats.hpp"

namespace pricelab::discovery {
namespace {

constexpr double kDegenerate = 1e-12;

double gaussian_loglik(double t_eff, double log_det) {
  return -0.5 * t_eff * (2.0 * (1.0 + std::log(2.0 * std::numbers::pi)) + log_det);
}

}  // namespace

Eigen::Vector2d alpha_perp(const Eigen::Vector2d& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw Error(Errc::ZeroVector, "orthogonal complement of a zero vector");
  Eigen::Vector2d out(-v(1) / norm, v(0) / norm);
  const double lead = out(0) != 0.0 ? out(0) : out(1);
  if (lead < 0.0) out = -out;
  return out;
}

Eigen::Matrix2d cholesky_lower(const Eigen::Matrix2d& omega) {
  Eigen::Matrix2d sym = 0.5 * (omega + omega.transpose());
  auto attempt = [](const Eigen::Matrix2d& m) -> std::optional<Eigen::Matrix2d> {
    if (!(m(0, 0) > 0.0)) return std::nullopt;
    const Eigen::LLT<Eigen::Matrix2d> llt(m);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::Matrix2d l = llt.matrixL();
    if (!(l(1, 1) > 0.0)) return std::nullopt;
    return l;
  };
  if (auto l = attempt(sym)) return *l;
  sym.diagonal().array() += 1e-12 * sym.trace();
  if (auto l = attempt(sym)) return *l;
  throw Error(Errc::NotPositiveDefinite, "residual covariance is not positive definite");
}

Eigen::RowVector2d common_trend_weights(const vecm::VecmFit& fit) {
  if (fit.rank != 1) throw Error(Errc::RankMismatch, "information shares need rank 1");
  const Eigen::Vector2d a_perp = alpha_perp(fit.alpha);
  const Eigen::Vector2d b_perp = alpha_perp(fit.beta);
  const double scale = a_perp.dot((Eigen::Matrix2d::Identity() - fit.gamma_sum()) * b_perp);
  if (std::abs(scale) < kDegenerate) {
    throw Error(Errc::DegenerateGeometry, "a_perp' (I - sum Gamma) b_perp vanishes");
  }
  return a_perp.transpose() / scale;
}

std::pair<double, double> information_shares(const Eigen::RowVector2d& psi,
                                             const Eigen::Matrix2d& omega) {
  const Eigen::Matrix2d f = cholesky_lower(omega);
  const Eigen::RowVector2d pf = psi * f;
  const double total = pf.squaredNorm();
  if (!(total > 0.0)) throw Error(Errc::DegenerateGeometry, "efficient price has no variance");
  const double s1 = pf(0) * pf(0) / total;
  return {s1, 1.0 - s1};
}

InfoShares hasbrouck_is(const vecm::VecmFit& fit) {
  const Eigen::RowVector2d psi = common_trend_weights(fit);
  InfoShares out;
  out.ordering_12 = information_shares(psi, fit.omega);

  Eigen::Matrix2d swap;
  swap << 0.0, 1.0, 1.0, 0.0;
  const auto permuted = information_shares(psi * swap, swap * fit.omega * swap);
  out.ordering_21 = {permuted.second, permuted.first};
  out.midpoint = {0.5 * (out.ordering_12.first + out.ordering_21.first),
                  0.5 * (out.ordering_12.second + out.ordering_21.second)};
  return out;
}

Eigen::MatrixXd PTDecomposition::reconstruct() const {
  Eigen::MatrixXd out = transitory;
  out += permanent * a1.transpose();
  return out;
}

PTDecomposition gg_decompose(const Eigen::Vector2d& alpha, const Eigen::Vector2d& beta,
                             const Eigen::MatrixXd& levels) {
  if (levels.cols() != 2) throw Error(Errc::RankMismatch, "expected two price columns");
  PTDecomposition out;
  out.alpha_perp = alpha_perp(alpha);
  out.beta_perp = alpha_perp(beta);
  const double perm_scale = out.alpha_perp.dot(out.beta_perp);
  const double trans_scale = beta.dot(alpha);
  if (std::abs(perm_scale) < kDegenerate || std::abs(trans_scale) < kDegenerate) {
    throw Error(Errc::DegenerateGeometry, "a_perp'b_perp or beta'alpha vanishes");
  }
  out.a1 = out.beta_perp / perm_scale;
  out.a2 = alpha / trans_scale;
  out.permanent = levels * out.alpha_perp;
  const Eigen::VectorXd ect = levels * beta;
  out.transitory = ect * out.a2.transpose();
  return out;
}

PTDecomposition gg_decompose(const vecm::VecmFit& fit, const Eigen::MatrixXd& levels) {
  if (fit.rank != 1) throw Error(Errc::RankMismatch, "decomposition needs rank 1");
  return gg_decompose(fit.alpha, fit.beta, levels);
}

LrTest lr_test_alpha_direction(const Eigen::MatrixXd& levels, int p, vecm::DetSpec det,
                               const Eigen::Vector2d& direction) {
  if (!(direction.norm() > 0.0)) throw Error(Errc::ZeroVector, "direction must be nonzero");
  const vecm::VecmFit fit = vecm::estimate_vecm(levels, p, 1, det);
  const vecm::ReducedRankMoments m = vecm::reduced_rank_moments(levels, p, det);
  const double t_eff = static_cast<double>(m.r0.rows());

  // Unrestricted alpha given beta: R0 on e = R1 beta.
  const Eigen::VectorXd e = m.r1 * fit.beta;
  const Eigen::MatrixXd u_unres = stats::ols(e, m.r0).residuals;
  const Eigen::Matrix2d omega_u = u_unres.transpose() * u_unres / t_eff;

  // Rotate onto (h, h_perp). The h_perp combination carries no error
  // correction; the h combination is regressed on e and on the h_perp
  // combination, which is the exact conditional ML under alpha = h * c.
  const Eigen::Vector2d h = direction.normalized();
  const Eigen::Vector2d h_perp = alpha_perp(h);
  const Eigen::VectorXd along = m.r0 * h;
  const Eigen::VectorXd across = m.r0 * h_perp;
  const double var_across = across.squaredNorm() / t_eff;
  Eigen::MatrixXd x(m.r0.rows(), 2);
  x.col(0) = e;
  x.col(1) = across;
  const double var_along = stats::ols(x, along).residuals.squaredNorm() / t_eff;

  const double log_det_r = std::log(var_across) + std::log(var_along);
  const double log_det_u = std::log(omega_u.determinant());

  LrTest out;
  out.unrestricted_loglik = gaussian_loglik(t_eff, log_det_u);
  out.restricted_loglik = gaussian_loglik(t_eff, log_det_r);
  out.chi2 = std::max(0.0, t_eff * (log_det_r - log_det_u));
  out.p_value = stats::chi2_sf(out.chi2, 1.0);
  return out;
}

const char* to_string(Leader leader) {
  switch (leader) {
    case Leader::Market1: return "market1";
    case Leader::Market2: return "market2";
    case Leader::Neither: return "neither";
    case Leader::Inconclusive: return "inconclusive";
  }
  return "?";
}

Leader gg_verdict(const LrTest& h10, const LrTest& h01, double significance) {
  const bool accept_h10 = h10.p_value > significance;
  const bool accept_h01 = h01.p_value > significance;
  if (accept_h01 && !accept_h10) return Leader::Market1;
  if (accept_h10 && !accept_h01) return Leader::Market2;
  if (!accept_h10 && !accept_h01) return Leader::Neither;
  return Leader::Inconclusive;
}

}  // namespace pricelab::discovery
