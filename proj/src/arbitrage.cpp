#include "pricelab/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <ostream>

#include "pricelab/error.hpp"

namespace pricelab::arbitrage {

void GasFeeModel::validate() const {
  if (!(gas_price_gwei > 0.0) || !std::isfinite(gas_price_gwei)) {
    throw Error(Errc::ConfigError, "gas price must be positive");
  }
  if (gas_limit <= 0) throw Error(Errc::ConfigError, "gas limit must be positive");
  if (legs < 1) throw Error(Errc::ConfigError, "at least one leg is required");
  if (eth_usd && !(*eth_usd > 0.0)) throw Error(Errc::ConfigError, "eth_usd must be positive");
}

GasFee gas_fee(const GasFeeModel& model, double eth_usd) {
  model.validate();
  if (!(eth_usd > 0.0)) throw Error(Errc::ConfigError, "eth_usd must be positive");
  GasFee out;
  out.fee_eth_per_leg = model.gas_price_gwei * static_cast<double>(model.gas_limit) * 1e-9;
  out.fee_usd_per_leg = out.fee_eth_per_leg * eth_usd;
  out.fee_usd_total = out.fee_usd_per_leg * model.legs;
  return out;
}

GasFee gas_fee(const GasFeeModel& model) {
  if (!model.eth_usd) {
    model.validate();
    GasFee out;
    out.fee_eth_per_leg = model.gas_price_gwei * static_cast<double>(model.gas_limit) * 1e-9;
    return out;
  }
  return gas_fee(model, *model.eth_usd);
}

std::vector<ArbOpportunity> scan(const marketdata::AlignedPair& pair, const GasFeeModel& model) {
  model.validate();
  if (pair.empty()) throw Error(Errc::EmptyInput, "no aligned prices to scan");
  std::vector<ArbOpportunity> out;
  out.reserve(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    ArbOpportunity op;
    op.t_ms = pair.t_ms[i];
    op.price_centralized = pair.a[i];
    op.price_defi = pair.b[i];
    op.gross_spread_usd = op.price_defi - op.price_centralized;
    op.total_fee_usd = gas_fee(model, model.eth_usd.value_or(op.price_defi)).fee_usd_total;
    const double gross = std::abs(op.gross_spread_usd);
    op.net_usd = gross - op.total_fee_usd;
    if (gross > 0.0) op.fee_pct_of_spread = op.total_fee_usd / gross;
    out.push_back(op);
  }
  return out;
}

ArbSummary summarize(const std::vector<ArbOpportunity>& ops, std::size_t k) {
  if (ops.empty()) throw Error(Errc::EmptyInput, "no opportunities to summarise");
  std::vector<ArbOpportunity> sorted = ops;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.net_usd != b.net_usd) return a.net_usd > b.net_usd;
    return a.t_ms < b.t_ms;
  });
  ArbSummary out;
  out.count = ops.size();
  double total = 0.0;
  for (const auto& op : ops) {
    total += op.net_usd;
    if (op.net_usd > 0.0) ++out.count_profitable;
  }
  out.mean_net_usd = total / static_cast<double>(ops.size());
  sorted.resize(std::min(k, sorted.size()));
  out.top_k = std::move(sorted);
  return out;
}

std::string format_timestamp(std::int64_t t_ms) {
  std::int64_t secs = t_ms / 1000;
  std::int64_t millis = t_ms % 1000;
  if (millis < 0) {
    millis += 1000;
    secs -= 1;
  }
  const std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(millis));
  return buf;
}

void write_opportunities_csv(std::ostream& out, const std::vector<ArbOpportunity>& ops) {
  out << "timestamp,price_centralized,price_defi,fee_usd,net_usd\n";
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& op : ops) {
    out << format_timestamp(op.t_ms) << ',' << op.price_centralized << ',' << op.price_defi << ','
        << op.total_fee_usd << ',' << op.net_usd << '\n';
  }
  out.precision(precision);
}

}  // namespace pricelab::arbitrage
