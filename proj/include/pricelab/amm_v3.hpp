#pragma once

// Uniswap v3 tick arithmetic, position liquidity and per-range reserves.
//
// Prices are raw (token-Y base units per token-X base unit) unless a
// function says otherwise; PriceDecimals converts to human units.

#include <map>
#include <vector>

namespace pricelab::amm_v3 {

inline constexpr int kMaxTick = 887272;

struct PriceDecimals {
  int dx = 0;
  int dy = 0;
};

struct LiquidityPosition {
  int i_lower = 0;
  int i_upper = 0;
  double liquidity = 0.0;
};

struct TickRangeReserves {
  int i = 0;
  double liquidity = 0.0;
  double x = 0.0;
  double y = 0.0;
};

enum class TokenSide { X, Y };

double tick_to_price(int i);
int price_to_tick(double p);

struct AdjustedPrice {
  double human = 0.0;    // token-X priced in token-Y, human units
  double inverse = 0.0;  // token-Y priced in token-X
};
AdjustedPrice adjust_price(double p_raw, PriceDecimals dec);

/// Reference price z for the range [p_lower, p_upper]: the market price
/// clamped into the range.
double reference_price(double p_lower, double p_upper, double p_mkt);

struct PositionLiquidity {
  double liquidity = 0.0;
  double counter_amount = 0.0;  // the other token's raw amount
};
PositionLiquidity position_liquidity(double amount, TokenSide side, int i_mkt, int i_lower,
                                     int i_upper);
PositionLiquidity position_liquidity(double amount, TokenSide side, double p_mkt, int i_lower,
                                     int i_upper);

struct RangeAmounts {
  double x = 0.0;
  double y = 0.0;
};
RangeAmounts range_reserves(double liquidity, int i, int spacing, double p_mkt);
RangeAmounts range_reserves(double liquidity, int i, int spacing, int i_mkt);

/// Liquidity per elementary range start; uncovered ranges are absent.
std::map<int, double> aggregate_ranges(const std::vector<LiquidityPosition>& positions,
                                       int spacing);

struct DepthRow {
  int i_lower = 0;
  int i_upper = 0;
  double price_lower = 0.0;  // human units, X in Y
  double price_upper = 0.0;
  double liquidity = 0.0;
  double x_raw = 0.0;
  double y_raw = 0.0;
  double x = 0.0;  // human units
  double y = 0.0;
  bool touch = false;
};

std::vector<DepthRow> depth_profile(const std::vector<LiquidityPosition>& positions, int spacing,
                                    int i_mkt, PriceDecimals dec);

}  // namespace pricelab::amm_v3
