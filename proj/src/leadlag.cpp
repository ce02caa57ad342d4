#include "pricelab/leadlag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>

#include "pricelab/error.hpp"

namespace pricelab::leadlag {
namespace {

std::vector<std::int64_t> default_lags() {
  std::vector<std::int64_t> positive;
  for (std::int64_t l = 5; l <= 500; l += 5) positive.push_back(l);
  for (std::int64_t l = 600; l <= 1000; l += 100) positive.push_back(l);
  for (std::int64_t l : {2000, 5000, 10000}) positive.push_back(l);
  std::vector<std::int64_t> out;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.push_back(-*it);
  out.push_back(0);
  out.insert(out.end(), positive.begin(), positive.end());
  return out;
}

double squared_sum(const Increments& inc) {
  double s = 0.0;
  for (double r : inc.r) s += r * r;
  return s;
}

// A flat profile should not manufacture a lead: prefer small |lag|, then
// positive lag.
bool better_peak(double abs_rho, std::int64_t lag, double best_abs, std::int64_t best_lag) {
  if (abs_rho != best_abs) return abs_rho > best_abs;
  const auto a = std::llabs(lag);
  const auto b = std::llabs(best_lag);
  if (a != b) return a < b;
  return lag > best_lag;
}

}  // namespace

LagGrid::LagGrid() : lags_(default_lags()) {}

LagGrid::LagGrid(std::vector<std::int64_t> lags_ms) : lags_(std::move(lags_ms)) {
  if (lags_.empty()) throw Error(Errc::InvalidGrid, "lag grid is empty");
  for (std::size_t i = 1; i < lags_.size(); ++i) {
    if (lags_[i] <= lags_[i - 1]) {
      throw Error(Errc::InvalidGrid, "lags must be strictly increasing");
    }
  }
  for (std::int64_t l : lags_) {
    if (!std::binary_search(lags_.begin(), lags_.end(), -l)) {
      throw Error(Errc::InvalidGrid, "lag grid is not symmetric about zero");
    }
  }
  if (!contains(0)) lags_.insert(std::lower_bound(lags_.begin(), lags_.end(), 0), 0);
}

LagGrid LagGrid::uniform(std::int64_t step_ms, std::int64_t max_ms) {
  if (step_ms <= 0 || max_ms < step_ms) {
    throw Error(Errc::InvalidGrid, "uniform grid needs 0 < step <= max");
  }
  std::vector<std::int64_t> lags;
  for (std::int64_t l = -(max_ms / step_ms) * step_ms; l <= max_ms; l += step_ms) {
    lags.push_back(l);
  }
  return LagGrid(std::move(lags));
}

bool LagGrid::contains(std::int64_t lag) const {
  return std::binary_search(lags_.begin(), lags_.end(), lag);
}

Increments increments(const marketdata::TickSeries& ticks) {
  if (ticks.size() < 2) {
    throw Error(Errc::DegenerateSeries, "at least two observations are required");
  }
  Increments out;
  out.t.reserve(ticks.size());
  out.r.reserve(ticks.size() - 1);
  out.t.push_back(ticks[0].t_ms);
  for (std::size_t i = 1; i < ticks.size(); ++i) {
    out.t.push_back(ticks[i].t_ms);
    out.r.push_back(std::log(ticks[i].price / ticks[i - 1].price));
  }
  return out;
}

double hy_cross_sum(const Increments& x, const Increments& y, std::int64_t lag_ms) {
  // Staircase over both partitions. Each step retires whichever interval ends
  // first (both on a tie), so pairs are visited in the same order whichever
  // series comes first.
  const std::size_t n = x.r.size();
  const std::size_t m = y.r.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double sum = 0.0;
  while (i < n && j < m) {
    const std::int64_t a0 = x.t[i];
    const std::int64_t a1 = x.t[i + 1];
    const std::int64_t b0 = y.t[j] - lag_ms;
    const std::int64_t b1 = y.t[j + 1] - lag_ms;
    if (a0 < b1 && b0 < a1) sum += x.r[i] * y.r[j];
    if (a1 < b1) {
      ++i;
    } else if (b1 < a1) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return sum;
}

double hy_corr(const Increments& x, const Increments& y, std::int64_t lag_ms) {
  const double sx = squared_sum(x);
  const double sy = squared_sum(y);
  if (!(sx > 0.0) || !(sy > 0.0)) {
    throw Error(Errc::DegenerateSeries, "series has no price variation");
  }
  return hy_cross_sum(x, y, lag_ms) / std::sqrt(sx * sy);
}

double hy_corr(const marketdata::TickSeries& x, const marketdata::TickSeries& y) {
  return hy_corr_lagged(x, y, 0);
}

double hy_corr_lagged(const marketdata::TickSeries& x, const marketdata::TickSeries& y,
                      std::int64_t lag_ms) {
  return hy_corr(increments(x), increments(y), lag_ms);
}

LeadLagReport lead_lag_profile(const marketdata::TickSeries& x, const marketdata::TickSeries& y,
                               const LagGrid& grid) {
  const Increments ix = increments(x);
  const Increments iy = increments(y);
  LeadLagReport out;
  out.clock = x.clock();
  if (x.clock() != y.clock()) out.flags.emplace_back("mixed_clocks");

  double best_abs = -1.0;
  double positive = 0.0;
  double negative = 0.0;
  out.profile.reserve(grid.size());
  for (std::int64_t lag : grid.lags_ms()) {
    const double rho = hy_corr(ix, iy, lag);
    out.profile.push_back({lag, rho});
    if (better_peak(std::abs(rho), lag, best_abs, out.hy_lead_lag_ms)) {
      best_abs = std::abs(rho);
      out.hy_lead_lag_ms = lag;
    }
    if (lag > 0) positive += rho * rho;
    if (lag < 0) negative += rho * rho;
  }
  out.max_abs_corr = best_abs;

  if (negative > 0.0) {
    out.llr = positive / negative;
    if (!(out.llr > 0.0)) out.flags.emplace_back("zero_numerator");
  } else if (positive > 0.0) {
    out.llr = std::numeric_limits<double>::infinity();
    out.flags.emplace_back("zero_denominator");
  } else {
    out.llr = 1.0;
    out.flags.emplace_back("flat_profile");
  }
  return out;
}

void write_profile_csv(std::ostream& out, const LeadLagReport& report) {
  out << "lag_ms,rho\n";
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : report.profile) out << p.lag_ms << ',' << p.rho << '\n';
  out.precision(precision);
}

}  // namespace pricelab::leadlag
