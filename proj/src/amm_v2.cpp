#include "pricelab/amm_v2.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pricelab/error.hpp"

namespace pricelab::amm_v2 {
namespace {

void require_reserves(const PoolSnapshotV2& pool) {
  if (!(pool.x > 0.0) || !(pool.y > 0.0)) {
    throw Error(Errc::EmptyPool, "pool reserves must be positive");
  }
}

double resolve_fee(const PoolSnapshotV2& pool, std::optional<double> fee) {
  const double f = fee.value_or(pool.fee);
  if (!(f >= 0.0 && f < 1.0)) {
    throw Error(Errc::NonPositiveInput, "fee must lie in [0, 1)");
  }
  return f;
}

std::string describe(double ax, double ay) {
  std::ostringstream os;
  os << "ax=" << ax << " ay=" << ay;
  return os.str();
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Mint: return "mint";
    case EventKind::Burn: return "burn";
    case EventKind::Trade: return "trade";
  }
  return "?";
}

const char* to_string(ReplayFlag flag) {
  switch (flag) {
    case ReplayFlag::Donation: return "donation";
    case ReplayFlag::InferredFlow: return "inferred_flow";
    case ReplayFlag::BurnFromAmounts: return "burn_from_amounts";
    case ReplayFlag::BurnRatioMismatch: return "burn_ratio_mismatch";
  }
  return "?";
}

SwapQuote swap_exact_in(const PoolSnapshotV2& pool, double dx) {
  if (!(dx > 0.0)) throw Error(Errc::NonPositiveInput, "dx must be positive");
  require_reserves(pool);
  const double f = resolve_fee(pool, std::nullopt);

  SwapQuote q;
  q.input_gross = dx;
  q.input_effective = dx * (1.0 - f);
  q.effective_x_after = pool.x + q.input_effective;
  q.output = pool.y - pool.k() / q.effective_x_after;
  q.y_after = pool.y - q.output;
  q.spot_price_before = pool.x / pool.y;
  q.spot_price_after = (pool.x + dx) / q.y_after;
  q.realized_price = q.input_gross / q.output;
  q.slippage_fraction = q.realized_price / q.spot_price_before - 1.0;
  return q;
}

SwapQuote input_for_exact_out(const PoolSnapshotV2& pool, double dy_target) {
  if (!(dy_target > 0.0)) throw Error(Errc::NonPositiveInput, "dy_target must be positive");
  require_reserves(pool);
  if (dy_target >= pool.y) {
    throw Error(Errc::OutputExceedsReserve, "requested output exceeds the Y reserve");
  }
  const double f = resolve_fee(pool, std::nullopt);

  SwapQuote q;
  q.output = dy_target;
  q.y_after = pool.y - dy_target;
  q.effective_x_after = pool.k() / q.y_after;
  q.input_effective = q.effective_x_after - pool.x;
  q.input_gross = q.input_effective / (1.0 - f);
  q.spot_price_before = pool.x / pool.y;
  q.spot_price_after = (pool.x + q.input_gross) / q.y_after;
  q.realized_price = q.input_gross / q.output;
  q.slippage_fraction = q.realized_price / q.spot_price_before - 1.0;
  return q;
}

PoolSnapshotV2 init_snapshot(double x0, double y0, double min_liquidity_burn, double fee) {
  if (!(x0 > 0.0) || !(y0 > 0.0)) {
    throw Error(Errc::NonPositiveInput, "initial deposits must be positive");
  }
  if (!(min_liquidity_burn >= 0.0)) {
    throw Error(Errc::NonPositiveInput, "minimum liquidity burn must be non-negative");
  }
  const double total = std::sqrt(x0 * y0);
  if (total <= min_liquidity_burn) {
    throw Error(Errc::InsufficientInitialLiquidity,
                "sqrt(x0*y0) does not exceed the minimum liquidity burn");
  }
  PoolSnapshotV2 pool;
  pool.x = x0;
  pool.y = y0;
  pool.lp_supply = total - min_liquidity_burn;
  pool.lp_burned = min_liquidity_burn;
  pool.fee = fee;
  return pool;
}

MintResult apply_mint(const PoolSnapshotV2& pool, double ax, double ay) {
  if (!(ax > 0.0) || !(ay > 0.0)) {
    throw Error(Errc::NonPositiveInput, "mint amounts must be positive");
  }
  if (!(pool.lp_supply > 0.0)) throw Error(Errc::EmptyPool, "mint into a pool without LP supply");
  require_reserves(pool);

  const double lp = std::min(ax * pool.lp_supply / pool.x, ay * pool.lp_supply / pool.y);
  MintResult out{pool, lp};
  out.pool.x += ax;
  out.pool.y += ay;
  out.pool.lp_supply += lp;
  ++out.pool.event_index;
  return out;
}

BurnResult apply_burn(const PoolSnapshotV2& pool, double lp_amount) {
  if (!(lp_amount > 0.0)) throw Error(Errc::NonPositiveInput, "burn amount must be positive");
  if (lp_amount > pool.lp_supply) {
    throw Error(Errc::BurnExceedsSupply, "burn amount exceeds outstanding LP supply");
  }
  BurnResult out{pool, 0.0, 0.0};
  if (lp_amount == pool.lp_supply) {
    // Full withdrawal; avoids leaving rounding dust behind.
    out.ax_out = pool.x;
    out.ay_out = pool.y;
    out.pool.x = 0.0;
    out.pool.y = 0.0;
    out.pool.lp_supply = 0.0;
  } else {
    out.ax_out = lp_amount * pool.x / pool.lp_supply;
    out.ay_out = lp_amount * pool.y / pool.lp_supply;
    out.pool.x -= out.ax_out;
    out.pool.y -= out.ay_out;
    out.pool.lp_supply -= lp_amount;
  }
  ++out.pool.event_index;
  return out;
}

PoolSnapshotV2 apply_trade(const PoolSnapshotV2& pool, double ax, double ay,
                           std::optional<double> fee) {
  if (ax == 0.0 && ay == 0.0) throw Error(Errc::NonPositiveInput, "trade with no flows");
  require_reserves(pool);
  const double f = resolve_fee(pool, fee);
  const double x1 = pool.x + ax;
  const double y1 = pool.y + ay;
  if (!(x1 > 0.0) || !(y1 > 0.0)) {
    throw Error(Errc::InvariantViolation, "trade drains a reserve: " + describe(ax, ay));
  }
  // The fee is charged on whatever enters the pool.
  const double x_adj = x1 - f * std::max(ax, 0.0);
  const double y_adj = y1 - f * std::max(ay, 0.0);
  if (x_adj * y_adj < pool.k() * (1.0 - kInvariantTolerance)) {
    throw Error(Errc::InvariantViolation,
                "fee-adjusted product falls below x*y: " + describe(ax, ay));
  }
  PoolSnapshotV2 out = pool;
  out.x = x1;
  out.y = y1;
  ++out.event_index;
  return out;
}

double infer_counterflow(const PoolSnapshotV2& pool, double ax, std::optional<double> fee) {
  require_reserves(pool);
  const double f = resolve_fee(pool, fee);
  if (ax == 0.0) return 0.0;
  const double x1 = pool.x + ax;
  if (!(x1 > 0.0)) throw Error(Errc::NoSolution, "x + ax must stay positive");

  double y1 = 0.0;
  if (ax > 0.0) {
    // (x1 - f*ax) * y1 = x*y, Y leaves the pool.
    y1 = pool.k() / (x1 - f * ax);
  } else {
    // x1 * (y1 - f*(y1 - y)) = x*y, Y enters the pool.
    y1 = (pool.k() / x1 - f * pool.y) / (1.0 - f);
  }
  if (!(y1 > 0.0)) throw Error(Errc::NoSolution, "implied Y reserve is not positive");
  return y1 - pool.y;
}

// ---------------------------------------------------------------------------

RawAmount isqrt(const RawAmount& value) { return boost::multiprecision::sqrt(value); }

RawPoolSnapshot init_snapshot_raw(const RawAmount& x0, const RawAmount& y0,
                                  const RawAmount& min_liquidity_burn) {
  if (x0 == 0 || y0 == 0) throw Error(Errc::NonPositiveInput, "initial deposits must be positive");
  const RawAmount total = isqrt(x0 * y0);
  if (total <= min_liquidity_burn) {
    throw Error(Errc::InsufficientInitialLiquidity,
                "isqrt(x0*y0) does not exceed the minimum liquidity burn");
  }
  return RawPoolSnapshot{x0, y0, total - min_liquidity_burn, min_liquidity_burn};
}

RawMintResult apply_mint_raw(const RawPoolSnapshot& pool, const RawAmount& ax,
                             const RawAmount& ay) {
  if (ax == 0 || ay == 0) throw Error(Errc::NonPositiveInput, "mint amounts must be positive");
  if (pool.lp_supply == 0 || pool.x == 0 || pool.y == 0) {
    throw Error(Errc::EmptyPool, "mint into an empty pool");
  }
  const RawAmount lp = std::min(ax * pool.lp_supply / pool.x, ay * pool.lp_supply / pool.y);
  RawMintResult out{pool, lp};
  out.pool.x += ax;
  out.pool.y += ay;
  out.pool.lp_supply += lp;
  return out;
}

RawBurnResult apply_burn_raw(const RawPoolSnapshot& pool, const RawAmount& lp_amount) {
  if (lp_amount == 0) throw Error(Errc::NonPositiveInput, "burn amount must be positive");
  if (lp_amount > pool.lp_supply) {
    throw Error(Errc::BurnExceedsSupply, "burn amount exceeds outstanding LP supply");
  }
  RawBurnResult out{pool, lp_amount * pool.x / pool.lp_supply,
                    lp_amount * pool.y / pool.lp_supply};
  out.pool.x -= out.ax_out;
  out.pool.y -= out.ay_out;
  out.pool.lp_supply -= lp_amount;
  return out;
}

// ---------------------------------------------------------------------------

ReplayResult replay(const std::vector<PoolEvent>& events, const ReplayOptions& options) {
  ReplayResult result;
  result.snapshots.reserve(events.size());
  PoolSnapshotV2 pool;
  pool.fee = options.fee;

  auto note = [&](std::size_t pos, ReplayFlag flag, std::string detail) {
    result.notes.push_back({pos, flag, std::move(detail)});
  };

  for (std::size_t pos = 0; pos < events.size(); ++pos) {
    const PoolEvent& ev = events[pos];
    switch (ev.kind) {
      case EventKind::Mint: {
        if (!ev.ax || !ev.ay) throw Error(Errc::NonPositiveInput, "mint without both amounts");
        if (pool.lp_supply <= 0.0 && pool.lp_burned <= 0.0) {
          const std::uint64_t idx = pool.event_index;
          pool = init_snapshot(*ev.ax, *ev.ay, options.min_liquidity_burn, options.fee);
          pool.event_index = idx + 1;
        } else {
          pool = apply_mint(pool, *ev.ax, *ev.ay).pool;
        }
        break;
      }
      case EventKind::Burn: {
        double lp = 0.0;
        if (ev.lp_amount) {
          lp = *ev.lp_amount;
        } else if (ev.ax && pool.x > 0.0) {
          // Withdrawals are pro-rata, so either token pins the LP amount.
          const double ax = std::abs(*ev.ax);
          lp = ax * pool.lp_supply / pool.x;
          note(pos, ReplayFlag::BurnFromAmounts, "lp derived from X amount");
          if (ev.ay && pool.y > 0.0) {
            const double lp_y = std::abs(*ev.ay) * pool.lp_supply / pool.y;
            if (std::abs(lp_y - lp) > kInvariantTolerance * std::max(lp, lp_y)) {
              note(pos, ReplayFlag::BurnRatioMismatch, "withdrawn amounts are not pro-rata");
            }
          }
        } else {
          throw Error(Errc::NonPositiveInput, "burn without LP amount or withdrawn amounts");
        }
        pool = apply_burn(pool, lp).pool;
        break;
      }
      case EventKind::Trade: {
        const std::optional<double> fee = ev.fee ? ev.fee : std::optional<double>(pool.fee);
        double ax = 0.0;
        double ay = 0.0;
        if (ev.ax && ev.ay) {
          ax = *ev.ax;
          ay = *ev.ay;
          if (ax > 0.0 && ay > 0.0) note(pos, ReplayFlag::Donation, describe(ax, ay));
        } else if (ev.ax) {
          ax = *ev.ax;
          ay = infer_counterflow(pool, ax, fee);
          note(pos, ReplayFlag::InferredFlow, "ay inferred");
        } else if (ev.ay) {
          // Solve with the roles of the tokens exchanged.
          PoolSnapshotV2 mirrored = pool;
          std::swap(mirrored.x, mirrored.y);
          ay = *ev.ay;
          ax = infer_counterflow(mirrored, ay, fee);
          note(pos, ReplayFlag::InferredFlow, "ax inferred");
        } else {
          throw Error(Errc::NonPositiveInput, "trade without flows");
        }
        pool = apply_trade(pool, ax, ay, fee);
        break;
      }
    }
    result.snapshots.push_back(pool);
  }
  return result;
}

}  // namespace pricelab::amm_v2
