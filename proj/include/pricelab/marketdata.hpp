#pragma once

// Tick and bar series, file ingestion, alignment and the synthetic
// cointegrated-pair generator used by the oracle suites.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pricelab/amm_v2.hpp"
#include "pricelab/amm_v3.hpp"

namespace pricelab::marketdata {

enum class Clock { TradeTime, TickTime };

const char* to_string(Clock clock);
Clock clock_from_string(const std::string& name);

struct Observation {
  std::int64_t t_ms = 0;
  double price = 0.0;
  bool operator==(const Observation&) const = default;
};

/// Asynchronous observations with strictly increasing timestamps and
/// positive prices.
class TickSeries {
 public:
  TickSeries() = default;
  TickSeries(std::string market_id, std::vector<Observation> observations,
             Clock clock = Clock::TradeTime);

  const std::string& market_id() const { return market_id_; }
  Clock clock() const { return clock_; }
  std::span<const Observation> observations() const { return observations_; }
  std::size_t size() const { return observations_.size(); }
  bool empty() const { return observations_.empty(); }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }
  bool operator==(const TickSeries&) const = default;

 private:
  std::string market_id_;
  std::vector<Observation> observations_;
  Clock clock_ = Clock::TradeTime;
};

/// Prices on a regular grid of `interval_ms`.
class BarSeries {
 public:
  BarSeries() = default;
  BarSeries(std::string market_id, std::int64_t interval_ms, std::vector<Observation> values);

  const std::string& market_id() const { return market_id_; }
  std::int64_t interval_ms() const { return interval_ms_; }
  std::span<const Observation> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const Observation& operator[](std::size_t i) const { return values_[i]; }
  bool operator==(const BarSeries&) const = default;

  TickSeries as_ticks(Clock clock = Clock::TradeTime) const;

 private:
  std::string market_id_;
  std::int64_t interval_ms_ = 0;
  std::vector<Observation> values_;
};

struct EventWindow {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string label;
};

/// Observations with start <= t < end.
TickSeries slice(const TickSeries& ticks, const EventWindow& window);

// --- ingestion ---------------------------------------------------------------

TickSeries read_trades_csv(const std::filesystem::path& path, std::string market_id = {},
                           Clock clock = Clock::TradeTime);
TickSeries parse_trades_csv(const std::string& text, std::string market_id = {},
                            Clock clock = Clock::TradeTime);

/// Inverse of parse_trades_csv for the two-column layout.
std::string format_trades_csv(const TickSeries& ticks);

std::vector<amm_v2::PoolEvent> read_pool_events_jsonl(const std::filesystem::path& path);
std::vector<amm_v2::PoolEvent> parse_pool_events_jsonl(const std::string& text);

std::vector<amm_v3::LiquidityPosition> read_v3_positions_jsonl(const std::filesystem::path& path);
std::vector<amm_v3::LiquidityPosition> parse_v3_positions_jsonl(const std::string& text);

/// Parses a fee tier given in percent, either as a number or as a string
/// with an optional trailing '%'. Returns the fee as a fraction.
double parse_fee_tier_percent(const std::string& text);

// --- transforms -------------------------------------------------------------

BarSeries resample_last(const TickSeries& ticks, std::int64_t interval_ms);
BarSeries resample_last(const BarSeries& bars, std::int64_t interval_ms);

enum class AlignPolicy { Intersect, UnionFfill };

struct AlignedPair {
  std::vector<std::int64_t> t_ms;
  std::vector<double> a;
  std::vector<double> b;
  std::size_t size() const { return t_ms.size(); }
  bool empty() const { return t_ms.empty(); }
};

AlignedPair align_pair(const BarSeries& a, const BarSeries& b,
                       AlignPolicy policy = AlignPolicy::UnionFfill);

struct Return {
  std::int64_t t_ms = 0;
  double r = 0.0;
};
std::vector<Return> log_returns(const BarSeries& bars);
std::vector<Return> log_returns(std::span<const Observation> prices);

// --- synthetic generator ------------------------------------------------------

enum class SyntheticMode {
  Vecm,        // both markets follow dX = alpha * beta'X + eps
  PureLeader,  // market 2 = market 1 plus iid noise
};

struct SyntheticPairConfig {
  std::size_t n = 10000;
  std::pair<double, double> alpha{0.0, 0.5};
  std::pair<double, double> beta{1.0, -1.0};
  std::pair<double, double> noise_sd{1.0, 1.0};
  double rho = 0.0;
  std::int64_t leader_lag_ms = 0;  // market 2 timestamps trail market 1 by this much
  std::uint64_t seed = 42;
  std::int64_t interval_ms = 1000;
  std::int64_t start_ms = 0;
  double start_price = 1000.0;
  SyntheticMode mode = SyntheticMode::Vecm;
};

inline constexpr std::size_t kBurnIn = 500;
inline constexpr double kDivergenceBound = 1e6;

std::pair<TickSeries, TickSeries> simulate_cointegrated_pair(const SyntheticPairConfig& cfg);

}  // namespace pricelab::marketdata
