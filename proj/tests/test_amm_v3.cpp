#include <doctest.h>

#include <cmath>
#include <random>

#include "pricelab/amm_v3.hpp"
#include "pricelab/error.hpp"

using namespace pricelab;
using namespace pricelab::amm_v3;

namespace {

constexpr int kMkt = 200618;
constexpr int kSpacing = 60;
constexpr PriceDecimals kUsdcEth{6, 18};

std::vector<LiquidityPosition> usdc_eth_positions() {
  const double l1 = position_liquidity(50e18, TokenSide::Y, kMkt, 200520, 200640).liquidity;
  const double l2 = position_liquidity(40e18, TokenSide::Y, kMkt, 200580, 200640).liquidity;
  const double l3 = position_liquidity(60e18, TokenSide::Y, kMkt, 200580, 200700).liquidity;
  return {{200520, 200640, l1}, {200580, 200640, l2}, {200580, 200700, l3}};
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

TEST_SUITE("amm_v3") {

TEST_CASE("tick prices") {
  CHECK(tick_to_price(0) == 1.0);
  CHECK(tick_to_price(10) == doctest::Approx(1.0010).epsilon(1e-4));
  CHECK(tick_to_price(100) == doctest::Approx(1.0100).epsilon(1e-4));
  CHECK(tick_to_price(1000) == doctest::Approx(1.1052).epsilon(1e-4));
  CHECK(tick_to_price(2000) == doctest::Approx(1.2214).epsilon(1e-4));
  CHECK_THROWS_AS(tick_to_price(kMaxTick + 1), Error);
  CHECK_THROWS_AS(tick_to_price(-kMaxTick - 1), Error);
}

TEST_CASE("price to tick floors and round-trips") {
  CHECK(price_to_tick(1.0) == 0);
  CHECK(price_to_tick(1.00015) == 1);
  CHECK(price_to_tick(0.99995) == -1);
  CHECK(price_to_tick(tick_to_price(kMkt)) == kMkt);
  CHECK_THROWS_AS(price_to_tick(0.0), Error);
  CHECK_THROWS_AS(price_to_tick(-1.0), Error);
  for (int i = -kMaxTick; i <= kMaxTick; i += 997) CHECK(price_to_tick(tick_to_price(i)) == i);
  CHECK(price_to_tick(tick_to_price(kMaxTick)) == kMaxTick);
  CHECK(price_to_tick(tick_to_price(-kMaxTick)) == -kMaxTick);
  for (int i = -2000; i < 2000; ++i) CHECK(tick_to_price(i) < tick_to_price(i + 1));
}

TEST_CASE("decimal adjustment") {
  const auto a = adjust_price(tick_to_price(kMkt), kUsdcEth);
  CHECK(a.human == doctest::Approx(0.00051558).epsilon(2e-5));
  CHECK(std::abs(a.inverse - 1939.56) <= 0.02);
  CHECK(adjust_price(1.0, {8, 8}).human == 1.0);
  CHECK(adjust_price(1e12, kUsdcEth).human == doctest::Approx(1.0));
}

TEST_CASE("position liquidity from a Y deposit") {
  const auto row1 = position_liquidity(50e18, TokenSide::Y, kMkt, 200520, 200640);
  CHECK(rel_close(row1.liquidity, 4.505e17, 1e-3));
  CHECK(rel_close(row1.counter_amount / 1e6, 21812, 1e-3));
  const auto row2 = position_liquidity(40e18, TokenSide::Y, kMkt, 200580, 200640);
  CHECK(rel_close(row2.liquidity, 9.281e17, 1e-3));
  CHECK(rel_close(row2.counter_amount / 1e6, 44934, 1e-3));
  const auto row3 = position_liquidity(60e18, TokenSide::Y, kMkt, 200580, 200700);
  CHECK(rel_close(row3.liquidity, 1.392e18, 1e-3));
  CHECK(rel_close(row3.counter_amount / 1e6, 250848, 1e-3));
}

TEST_CASE("position liquidity errors") {
  CHECK_THROWS_AS(position_liquidity(1.0, TokenSide::Y, 100, 200, 260), Error);
  CHECK_THROWS_AS(position_liquidity(1.0, TokenSide::X, 300, 200, 260), Error);
  CHECK_THROWS_AS(position_liquidity(1.0, TokenSide::X, 0, 60, 60), Error);
  CHECK_THROWS_AS(position_liquidity(-1.0, TokenSide::X, 0, 60, 120), Error);
}

TEST_CASE("range reserves for the USDC/ETH pool") {
  const double pm = tick_to_price(kMkt);
  const auto r1 = range_reserves(4.505e17, 200520, kSpacing, pm);
  CHECK(r1.x == 0.0);
  CHECK(rel_close(r1.y / 1e18, 30.58, 1e-3));
  const auto r2 = range_reserves(2.77e18, 200580, kSpacing, pm);
  CHECK(rel_close(r2.x / 1e6, 134159, 1e-3));
  CHECK(rel_close(r2.y / 1e18, 119.42, 1e-3));
  const auto r3 = range_reserves(1.392e18, 200640, kSpacing, pm);
  CHECK(rel_close(r3.x / 1e6, 183427, 1e-3));
  CHECK(r3.y == 0.0);
}

TEST_CASE("reserves are continuous across range boundaries") {
  const double l = 1e18;
  const int i = 1200;
  for (int edge : {i, i + kSpacing}) {
    const double p = tick_to_price(edge);
    const auto below = range_reserves(l, i, kSpacing, p * (1 - 1e-12));
    const auto above = range_reserves(l, i, kSpacing, p * (1 + 1e-12));
    const double scale = l * 1e-3;
    CHECK(std::abs(below.x - above.x) < scale);
    CHECK(std::abs(below.y - above.y) < scale);
  }
}

TEST_CASE("single-token ranges away from the market") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> tick(-5000, 5000);
  for (int k = 0; k < 200; ++k) {
    const int i = tick(rng) / kSpacing * kSpacing;
    const int mkt = tick(rng);
    const auto r = range_reserves(1e12, i, kSpacing, mkt);
    if (i > mkt) CHECK(r.y == 0.0);
    if (i + kSpacing < mkt) CHECK(r.x == 0.0);
    CHECK(r.x >= 0.0);
    CHECK(r.y >= 0.0);
  }
}

TEST_CASE("aggregation") {
  const auto positions = usdc_eth_positions();
  const auto agg = aggregate_ranges(positions, kSpacing);
  REQUIRE(agg.size() == 3);
  CHECK(rel_close(agg.at(200520), 4.505e17, 1e-3));
  CHECK(rel_close(agg.at(200580), 2.77e18, 2e-3));
  CHECK(rel_close(agg.at(200640), 1.392e18, 1e-3));
  CHECK(aggregate_ranges({}, kSpacing).empty());

  const auto single = aggregate_ranges({{-120, 180, 7.0}}, kSpacing);
  CHECK(single.size() == 5);
  for (const auto& [start, l] : single) CHECK(l == 7.0);

  CHECK_THROWS_AS(aggregate_ranges({{-100, 180, 7.0}}, kSpacing), Error);
}

TEST_CASE("aggregation is additive") {
  const std::vector<LiquidityPosition> a{{0, 600, 1.5}, {-300, 60, 2.25}};
  const std::vector<LiquidityPosition> b{{120, 240, 4.0}, {-600, -540, 0.5}};
  std::vector<LiquidityPosition> both = a;
  both.insert(both.end(), b.begin(), b.end());
  auto sum = aggregate_ranges(a, kSpacing);
  for (const auto& [start, l] : aggregate_ranges(b, kSpacing)) sum[start] += l;
  CHECK(sum == aggregate_ranges(both, kSpacing));
}

TEST_CASE("deposit round trip through range reserves") {
  const double y = 50e18;
  const auto pos = position_liquidity(y, TokenSide::Y, kMkt, 200520, 200640);
  double x_total = 0;
  double y_total = 0;
  for (int i = 200520; i < 200640; i += kSpacing) {
    const auto r = range_reserves(pos.liquidity, i, kSpacing, kMkt);
    x_total += r.x;
    y_total += r.y;
  }
  CHECK(rel_close(y_total, y, 1e-6));
  CHECK(rel_close(x_total, pos.counter_amount, 1e-6));
}

TEST_CASE("depth profile") {
  const auto rows = depth_profile(usdc_eth_positions(), kSpacing, kMkt, kUsdcEth);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].x == 0.0);
  CHECK(rel_close(rows[0].y, 30.58, 1e-3));
  CHECK(rel_close(rows[1].x, 134159, 1e-3));
  CHECK(rel_close(rows[1].y, 119.42, 1e-3));
  CHECK(rel_close(rows[2].x, 183427, 1e-3));
  CHECK(rows[2].y == 0.0);
  CHECK(!rows[0].touch);
  CHECK(rows[1].touch);
  CHECK(!rows[2].touch);
  CHECK(depth_profile({}, kSpacing, kMkt, kUsdcEth).empty());

  for (const auto& row : depth_profile(usdc_eth_positions(), kSpacing, 300000, kUsdcEth)) {
    CHECK(row.x == 0.0);
    CHECK(row.y > 0.0);
  }
}

}  // TEST_SUITE
