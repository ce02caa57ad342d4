#include "pricelab/amm_v3.hpp"

#include <cmath>
#include <string>

#include "pricelab/error.hpp"

namespace pricelab::amm_v3 {
namespace {

const double kLogBase = std::log(1.0001);

void check_tick(int i) {
  if (i < -kMaxTick || i > kMaxTick) {
    throw Error(Errc::TickOutOfBounds, "tick " + std::to_string(i) + " outside +/-887272");
  }
}

void check_spacing(int spacing) {
  if (spacing <= 0) throw Error(Errc::MisalignedBounds, "tick spacing must be positive");
}

void check_position(const LiquidityPosition& pos, int spacing) {
  if (pos.i_lower % spacing != 0 || pos.i_upper % spacing != 0) {
    throw Error(Errc::MisalignedBounds, "position [" + std::to_string(pos.i_lower) + ", " +
                                            std::to_string(pos.i_upper) +
                                            "] not aligned to spacing " + std::to_string(spacing));
  }
  if (pos.i_lower >= pos.i_upper) {
    throw Error(Errc::MisalignedBounds, "position lower tick must be below upper tick");
  }
  check_tick(pos.i_lower);
  check_tick(pos.i_upper);
}

double pow10(int e) { return std::pow(10.0, e); }

}  // namespace

double tick_to_price(int i) {
  check_tick(i);
  return std::exp(static_cast<double>(i) * kLogBase);
}

int price_to_tick(double p) {
  if (!(p > 0.0)) throw Error(Errc::NonPositivePrice, "price must be positive");
  const double raw = std::floor(std::log(p) / kLogBase);
  if (raw < -kMaxTick || raw > kMaxTick) {
    throw Error(Errc::TickOutOfBounds, "price maps outside the tick range");
  }
  int i = static_cast<int>(raw);
  // Settle float rounding so that tick_to_price(i) <= p < tick_to_price(i+1).
  while (i < kMaxTick && tick_to_price(i + 1) <= p) ++i;
  while (i > -kMaxTick && tick_to_price(i) > p) --i;
  return i;
}

AdjustedPrice adjust_price(double p_raw, PriceDecimals dec) {
  if (!(p_raw > 0.0)) throw Error(Errc::NonPositivePrice, "price must be positive");
  const double human = p_raw / pow10(dec.dy - dec.dx);
  return {human, 1.0 / human};
}

double reference_price(double p_lower, double p_upper, double p_mkt) {
  if (p_mkt <= p_lower) return p_lower;
  if (p_mkt >= p_upper) return p_upper;
  return p_mkt;
}

PositionLiquidity position_liquidity(double amount, TokenSide side, double p_mkt, int i_lower,
                                     int i_upper) {
  if (!(amount > 0.0)) throw Error(Errc::NonPositiveInput, "deposit amount must be positive");
  if (!(p_mkt > 0.0)) throw Error(Errc::NonPositivePrice, "market price must be positive");
  if (i_lower >= i_upper) throw Error(Errc::MisalignedBounds, "i_lower must be below i_upper");
  const double sa = std::sqrt(tick_to_price(i_lower));
  const double sb = std::sqrt(tick_to_price(i_upper));
  const double sz = std::sqrt(reference_price(sa * sa, sb * sb, p_mkt));

  PositionLiquidity out;
  if (side == TokenSide::Y) {
    if (!(sz > sa)) {
      throw Error(Errc::RangeMispriced, "range lies above market; it cannot hold token Y");
    }
    out.liquidity = amount / (sz - sa);
    out.counter_amount = out.liquidity / sz - out.liquidity / sb;
  } else {
    if (!(sz < sb)) {
      throw Error(Errc::RangeMispriced, "range lies below market; it cannot hold token X");
    }
    out.liquidity = amount / (1.0 / sz - 1.0 / sb);
    out.counter_amount = out.liquidity * (sz - sa);
  }
  return out;
}

PositionLiquidity position_liquidity(double amount, TokenSide side, int i_mkt, int i_lower,
                                     int i_upper) {
  return position_liquidity(amount, side, tick_to_price(i_mkt), i_lower, i_upper);
}

RangeAmounts range_reserves(double liquidity, int i, int spacing, double p_mkt) {
  check_spacing(spacing);
  if (i % spacing != 0) throw Error(Errc::MisalignedBounds, "range start not a multiple of spacing");
  if (!(liquidity >= 0.0)) throw Error(Errc::NonPositiveInput, "liquidity must be non-negative");
  const double p_lo = tick_to_price(i);
  const double p_hi = tick_to_price(i + spacing);
  const double sz = std::sqrt(reference_price(p_lo, p_hi, p_mkt));
  return {liquidity / sz - liquidity / std::sqrt(p_hi), liquidity * (sz - std::sqrt(p_lo))};
}

RangeAmounts range_reserves(double liquidity, int i, int spacing, int i_mkt) {
  return range_reserves(liquidity, i, spacing, tick_to_price(i_mkt));
}

std::map<int, double> aggregate_ranges(const std::vector<LiquidityPosition>& positions,
                                       int spacing) {
  check_spacing(spacing);
  std::map<int, double> out;
  for (const auto& pos : positions) {
    check_position(pos, spacing);
    if (!(pos.liquidity > 0.0)) throw Error(Errc::NonPositiveInput, "position liquidity must be positive");
    for (int i = pos.i_lower; i < pos.i_upper; i += spacing) out[i] += pos.liquidity;
  }
  return out;
}

std::vector<DepthRow> depth_profile(const std::vector<LiquidityPosition>& positions, int spacing,
                                    int i_mkt, PriceDecimals dec) {
  const auto ranges = aggregate_ranges(positions, spacing);
  const double p_mkt = tick_to_price(i_mkt);
  const double x_scale = pow10(dec.dx);
  const double y_scale = pow10(dec.dy);

  std::vector<DepthRow> rows;
  rows.reserve(ranges.size());
  for (const auto& [i, liquidity] : ranges) {
    const RangeAmounts r = range_reserves(liquidity, i, spacing, p_mkt);
    DepthRow row;
    row.i_lower = i;
    row.i_upper = i + spacing;
    row.price_lower = adjust_price(tick_to_price(i), dec).human;
    row.price_upper = adjust_price(tick_to_price(i + spacing), dec).human;
    row.liquidity = liquidity;
    row.x_raw = r.x;
    row.y_raw = r.y;
    row.x = r.x / x_scale;
    row.y = r.y / y_scale;
    row.touch = i <= i_mkt && i_mkt < i + spacing;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pricelab::amm_v3
