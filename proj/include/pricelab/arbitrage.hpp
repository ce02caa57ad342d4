#pragma once

// Gas fee model and arbitrage-potential scanning over aligned
// centralized/decentralized prices.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pricelab/marketdata.hpp"

namespace pricelab::arbitrage {

struct GasFeeModel {
  double gas_price_gwei = 0.0;
  std::int64_t gas_limit = 50000;
  std::optional<double> eth_usd;  // unset: each row's defi price converts ETH to USD
  int legs = 2;

  /// Throws ConfigError on non-positive fields.
  void validate() const;
};

struct GasFee {
  double fee_eth_per_leg = 0.0;
  double fee_usd_per_leg = 0.0;
  double fee_usd_total = 0.0;
};

GasFee gas_fee(const GasFeeModel& model);
GasFee gas_fee(const GasFeeModel& model, double eth_usd);

struct ArbOpportunity {
  std::int64_t t_ms = 0;
  double price_centralized = 0.0;
  double price_defi = 0.0;
  double gross_spread_usd = 0.0;  // defi - centralized
  double total_fee_usd = 0.0;
  double net_usd = 0.0;
  std::optional<double> fee_pct_of_spread;  // fee / |gross| as a fraction; unset when gross is zero
};

/// `pair.a` is the centralized market, `pair.b` the pool.
std::vector<ArbOpportunity> scan(const marketdata::AlignedPair& pair, const GasFeeModel& model);

struct ArbSummary {
  std::vector<ArbOpportunity> top_k;
  double mean_net_usd = 0.0;
  std::size_t count_profitable = 0;
  std::size_t count = 0;
};

ArbSummary summarize(const std::vector<ArbOpportunity>& ops, std::size_t k);

/// UTC, millisecond precision: 2024-03-05T19:36:08.000Z
std::string format_timestamp(std::int64_t t_ms);

/// `timestamp,price_centralized,price_defi,fee_usd,net_usd` rows.
void write_opportunities_csv(std::ostream& out, const std::vector<ArbOpportunity>& ops);

}  // namespace pricelab::arbitrage
