#pragma once

// Hayashi-Yoshida correlation on asynchronous ticks, lagged profiles and the
// lead-lag ratio.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pricelab/marketdata.hpp"

namespace pricelab::leadlag {

/// Sorted, deduplicated, symmetric lags in ms. Zero is always present.
class LagGrid {
 public:
  LagGrid();  // default grid
  explicit LagGrid(std::vector<std::int64_t> lags_ms);

  /// ±step, ±2·step, ..., ±max plus zero.
  static LagGrid uniform(std::int64_t step_ms, std::int64_t max_ms);

  std::span<const std::int64_t> lags_ms() const { return lags_; }
  std::size_t size() const { return lags_.size(); }
  bool contains(std::int64_t lag) const;

 private:
  std::vector<std::int64_t> lags_;
};

/// Interval endpoints and log increments of a tick series.
struct Increments {
  std::vector<std::int64_t> t;  // n + 1 endpoints
  std::vector<double> r;        // n increments, r[i] on ]t[i], t[i+1]]
};
Increments increments(const marketdata::TickSeries& ticks);

/// Sum of r_i^X r_j^Y over overlapping ]x_{i-1}, x_i] and ]y_{j-1} - lag, y_j - lag].
double hy_cross_sum(const Increments& x, const Increments& y, std::int64_t lag_ms = 0);

/// Normalised form of hy_cross_sum. Throws DegenerateSeries on a zero
/// squared-increment sum.
double hy_corr(const Increments& x, const Increments& y, std::int64_t lag_ms = 0);

double hy_corr(const marketdata::TickSeries& x, const marketdata::TickSeries& y);
double hy_corr_lagged(const marketdata::TickSeries& x, const marketdata::TickSeries& y,
                      std::int64_t lag_ms);

struct ProfilePoint {
  std::int64_t lag_ms = 0;
  double rho = 0.0;
};

struct LeadLagReport {
  std::vector<ProfilePoint> profile;
  std::int64_t hy_lead_lag_ms = 0;
  double max_abs_corr = 0.0;
  double llr = 1.0;
  std::vector<std::string> flags;
  marketdata::Clock clock = marketdata::Clock::TradeTime;
};

LeadLagReport lead_lag_profile(const marketdata::TickSeries& x, const marketdata::TickSeries& y,
                               const LagGrid& grid = LagGrid());

/// `lag_ms,rho` rows.
void write_profile_csv(std::ostream& out, const LeadLagReport& report);

}  // namespace pricelab::leadlag
