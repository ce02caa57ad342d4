#pragma once

// Uniswap v2 constant-product pool math and the event-driven liquidity
// snapshot state machine.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pricelab::amm_v2 {

inline constexpr double kDefaultFee = 0.003;
/// LP tokens locked forever by the first deposit (raw units).
inline constexpr unsigned kMinimumLiquidity = 1000;
/// Relative slack allowed when validating a logged trade against the invariant.
inline constexpr double kInvariantTolerance = 1e-9;

struct PoolSnapshotV2 {
  double x = 0.0;
  double y = 0.0;
  double lp_supply = 0.0;
  double lp_burned = 0.0;
  double fee = kDefaultFee;
  std::uint64_t event_index = 0;

  double k() const { return x * y; }
  bool empty() const { return lp_supply + lp_burned <= 0.0; }
  bool operator==(const PoolSnapshotV2&) const = default;
};

enum class EventKind { Mint, Burn, Trade };

const char* to_string(EventKind kind);

/// One pool event. Flows are signed token amounts entering the pool
/// (negative means the pool paid out).
struct PoolEvent {
  EventKind kind = EventKind::Trade;
  std::optional<double> ax;
  std::optional<double> ay;
  std::optional<double> lp_amount;
  std::optional<double> fee;  // fraction; overrides the pool fee for trades
  std::int64_t block_number = 0;
  std::int64_t timestamp_ms = 0;
  std::string pool_address;
  std::string provider_address;
};

/// Quote for a swap of token X into the pool for token Y. Prices are quoted
/// as input tokens per output token, so slippage is non-negative.
struct SwapQuote {
  double input_gross = 0.0;
  double input_effective = 0.0;
  double output = 0.0;
  double spot_price_before = 0.0;
  double spot_price_after = 0.0;
  double realized_price = 0.0;
  double slippage_fraction = 0.0;
  /// x + input_effective: the balance entering the constant-product identity.
  double effective_x_after = 0.0;
  double y_after = 0.0;
};

SwapQuote swap_exact_in(const PoolSnapshotV2& pool, double dx);
SwapQuote input_for_exact_out(const PoolSnapshotV2& pool, double dy_target);

PoolSnapshotV2 init_snapshot(double x0, double y0, double min_liquidity_burn = kMinimumLiquidity,
                             double fee = kDefaultFee);

struct MintResult {
  PoolSnapshotV2 pool;
  double lp_minted = 0.0;
};
MintResult apply_mint(const PoolSnapshotV2& pool, double ax, double ay);

struct BurnResult {
  PoolSnapshotV2 pool;
  double ax_out = 0.0;
  double ay_out = 0.0;
};
BurnResult apply_burn(const PoolSnapshotV2& pool, double lp_amount);

/// Applies a trade whose flows are both known. `fee` defaults to pool.fee.
PoolSnapshotV2 apply_trade(const PoolSnapshotV2& pool, double ax, double ay,
                           std::optional<double> fee = std::nullopt);

/// Y flow implied by a known X flow, assuming the trader donates nothing.
double infer_counterflow(const PoolSnapshotV2& pool, double ax,
                         std::optional<double> fee = std::nullopt);

// ---------------------------------------------------------------------------
// Integer mode. Raw on-chain amounts routinely exceed 64 bits and their
// products exceed 128, so the arithmetic is carried out in 256 bits with
// floor division, as the pool contract does.

using RawAmount = boost::multiprecision::uint256_t;

struct RawPoolSnapshot {
  RawAmount x;
  RawAmount y;
  RawAmount lp_supply;
  RawAmount lp_burned;
  bool operator==(const RawPoolSnapshot&) const = default;
};

RawAmount isqrt(const RawAmount& value);
RawPoolSnapshot init_snapshot_raw(const RawAmount& x0, const RawAmount& y0,
                                  const RawAmount& min_liquidity_burn = kMinimumLiquidity);

struct RawMintResult {
  RawPoolSnapshot pool;
  RawAmount lp_minted;
};
RawMintResult apply_mint_raw(const RawPoolSnapshot& pool, const RawAmount& ax, const RawAmount& ay);

struct RawBurnResult {
  RawPoolSnapshot pool;
  RawAmount ax_out;
  RawAmount ay_out;
};
RawBurnResult apply_burn_raw(const RawPoolSnapshot& pool, const RawAmount& lp_amount);

// ---------------------------------------------------------------------------
// Replay

struct ReplayOptions {
  double fee = kDefaultFee;
  double min_liquidity_burn = kMinimumLiquidity;
};

enum class ReplayFlag {
  Donation,         // both flows into the pool
  InferredFlow,     // one trade flow reconstructed from the invariant
  BurnFromAmounts,  // LP amount derived from withdrawn token amounts
  BurnRatioMismatch,
};

const char* to_string(ReplayFlag flag);

struct ReplayNote {
  std::size_t event_position = 0;
  ReplayFlag flag = ReplayFlag::Donation;
  std::string detail;
};

struct ReplayResult {
  /// snapshots[i] is the pool state after events[i].
  std::vector<PoolSnapshotV2> snapshots;
  std::vector<ReplayNote> notes;
};

/// Replays an ordered event stream starting from an empty pool. The first
/// event must be a mint; it seeds the pool through init_snapshot.
ReplayResult replay(const std::vector<PoolEvent>& events, const ReplayOptions& options = {});

}  // namespace pricelab::amm_v2
