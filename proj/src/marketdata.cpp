#include "pricelab/marketdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string_view>
#include <tuple>

#include <json.hpp>

#include "pricelab/error.hpp"

namespace pricelab::marketdata {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IngestError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Splits on LF, dropping a trailing CR from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  // A terminating newline yields one empty tail element.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t c = line.find(',', pos);
    if (c == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
}

std::string line_msg(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void validate_observations(const std::vector<Observation>& obs, const char* what) {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!(obs[i].price > 0.0) || !std::isfinite(obs[i].price)) {
      throw Error(Errc::NonPositivePrice, std::string(what) + " price at index " +
                                              std::to_string(i) + " is not positive");
    }
    if (i > 0 && obs[i].t_ms <= obs[i - 1].t_ms) {
      throw Error(Errc::NonMonotonicTimestamp,
                  std::string(what) + " timestamps not strictly increasing at index " +
                      std::to_string(i));
    }
  }
}

// --- JSON helpers -----------------------------------------------------------

[[noreturn]] void schema_error(std::size_t line, const std::string& field) {
  throw Error(Errc::SchemaError, line_msg(line, "missing or invalid field '" + field + "'"));
}

const json& require(const json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) schema_error(line, field);
  return *it;
}

double number_field(const json& obj, const char* field, std::size_t line) {
  const json& v = require(obj, field, line);
  if (!v.is_number()) schema_error(line, field);
  return v.get<double>();
}

std::int64_t integer_field(const json& obj, const char* field, std::size_t line) {
  const json& v = require(obj, field, line);
  if (!v.is_number_integer()) schema_error(line, field);
  return v.get<std::int64_t>();
}

std::optional<double> optional_number(const json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) schema_error(line, field);
  return it->get<double>();
}

std::string optional_string(const json& obj, const char* field) {
  const auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

/// {"tokenA": .., "tokenB": ..}; tokenA is X, tokenB is Y.
std::pair<std::optional<double>, std::optional<double>> token_amounts(const json& obj,
                                                                      const char* field,
                                                                      std::size_t line,
                                                                      bool require_both) {
  const json& amounts = require(obj, field, line);
  if (!amounts.is_object()) schema_error(line, field);
  auto a = optional_number(amounts, "tokenA", line);
  auto b = optional_number(amounts, "tokenB", line);
  if (require_both && !a) schema_error(line, std::string(field) + ".tokenA");
  if (require_both && !b) schema_error(line, std::string(field) + ".tokenB");
  if (!a && !b) schema_error(line, field);
  return {a, b};
}

json parse_json_line(std::string_view text, std::size_t line) {
  try {
    json obj = json::parse(text);
    if (!obj.is_object()) throw Error(Errc::SchemaError, line_msg(line, "not a JSON object"));
    return obj;
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaError, line_msg(line, e.what()));
  }
}

std::string kind_of(const json& obj) {
  std::string kind = optional_string(obj, "event_type");
  if (kind.empty()) kind = optional_string(obj, "kind");
  return kind;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

const char* to_string(Clock clock) {
  return clock == Clock::TickTime ? "tick_time" : "trade_time";
}

Clock clock_from_string(const std::string& name) {
  if (name == "trade_time" || name == "trade") return Clock::TradeTime;
  if (name == "tick_time" || name == "tick") return Clock::TickTime;
  throw Error(Errc::ConfigError, "unknown clock '" + name + "'");
}

TickSeries::TickSeries(std::string market_id, std::vector<Observation> observations, Clock clock)
    : market_id_(std::move(market_id)), observations_(std::move(observations)), clock_(clock) {
  validate_observations(observations_, "tick");
}

BarSeries::BarSeries(std::string market_id, std::int64_t interval_ms,
                     std::vector<Observation> values)
    : market_id_(std::move(market_id)), interval_ms_(interval_ms), values_(std::move(values)) {
  if (interval_ms_ <= 0) throw Error(Errc::IntervalMismatch, "bar interval must be positive");
  validate_observations(values_, "bar");
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i].t_ms - values_[i - 1].t_ms != interval_ms_) {
      throw Error(Errc::IntervalMismatch, "bars are not on a regular grid at index " +
                                              std::to_string(i));
    }
  }
}

TickSeries BarSeries::as_ticks(Clock clock) const { return TickSeries(market_id_, values_, clock); }

TickSeries slice(const TickSeries& ticks, const EventWindow& window) {
  if (window.start_ms >= window.end_ms) {
    throw Error(Errc::ConfigError, "event window start must precede end");
  }
  const auto obs = ticks.observations();
  const auto lo = std::lower_bound(obs.begin(), obs.end(), window.start_ms,
                                   [](const Observation& o, std::int64_t t) { return o.t_ms < t; });
  const auto hi = std::lower_bound(lo, obs.end(), window.end_ms,
                                   [](const Observation& o, std::int64_t t) { return o.t_ms < t; });
  return TickSeries(ticks.market_id(), std::vector<Observation>(lo, hi), ticks.clock());
}

// --- CSV ----------------------------------------------------------------------

std::string format_trades_csv(const TickSeries& ticks) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "timestamp_ms,price\n";
  for (const auto& o : ticks.observations()) out << o.t_ms << ',' << o.price << '\n';
  return out.str();
}

TickSeries parse_trades_csv(const std::string& text, std::string market_id, Clock clock) {
  std::string_view body(text);
  if (body.substr(0, 3) == "\xEF\xBB\xBF") body.remove_prefix(3);
  const auto lines = split_lines(body);
  if (lines.empty()) throw Error(Errc::ParseError, line_msg(1, "missing header"));

  std::size_t columns = 0;
  if (lines[0] == "timestamp_ms,price") {
    columns = 2;
  } else if (lines[0] == "timestamp_ms,price,size") {
    columns = 3;
  } else {
    throw Error(Errc::ParseError,
                line_msg(1, "header must be 'timestamp_ms,price' or 'timestamp_ms,price,size'"));
  }

  std::vector<Observation> obs;
  obs.reserve(lines.size());
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    if (is_blank(lines[k])) continue;
    const auto fields = split_commas(lines[k]);
    if (fields.size() != columns) {
      throw Error(Errc::ParseError, line_msg(line_no, "expected " + std::to_string(columns) +
                                                          " fields"));
    }
    Observation o;
    if (!parse_number(fields[0], o.t_ms)) {
      throw Error(Errc::ParseError, line_msg(line_no, "bad timestamp"));
    }
    if (!parse_number(fields[1], o.price) || !std::isfinite(o.price)) {
      throw Error(Errc::ParseError, line_msg(line_no, "bad price"));
    }
    if (!(o.price > 0.0)) throw Error(Errc::ParseError, line_msg(line_no, "price must be positive"));
    if (columns == 3) {
      double size = 0.0;
      if (!parse_number(fields[2], size) || !(size >= 0.0)) {
        throw Error(Errc::ParseError, line_msg(line_no, "bad size"));
      }
    }
    if (!obs.empty() && o.t_ms < obs.back().t_ms) {
      throw Error(Errc::NonMonotonicTimestamp, line_msg(line_no, "timestamp goes backwards"));
    }
    if (!obs.empty() && o.t_ms == obs.back().t_ms) {
      obs.back() = o;  // last row for a timestamp wins
    } else {
      obs.push_back(o);
    }
  }
  return TickSeries(std::move(market_id), std::move(obs), clock);
}

TickSeries read_trades_csv(const std::filesystem::path& path, std::string market_id, Clock clock) {
  if (market_id.empty()) market_id = path.stem().string();
  return parse_trades_csv(read_file(path), std::move(market_id), clock);
}

// --- JSONL ------------------------------------------------------------------------

double parse_fee_tier_percent(const std::string& text) {
  std::string_view s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  if (!s.empty() && s.back() == '%') s.remove_suffix(1);
  double pct = 0.0;
  if (!parse_number(s, pct) || !(pct >= 0.0 && pct < 100.0)) {
    throw Error(Errc::SchemaError, "bad fee_tier '" + text + "'");
  }
  return pct / 100.0;
}

std::vector<amm_v2::PoolEvent> parse_pool_events_jsonl(const std::string& text) {
  using amm_v2::EventKind;
  using amm_v2::PoolEvent;
  std::vector<PoolEvent> events;
  const auto lines = split_lines(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    if (is_blank(lines[k])) continue;
    const json obj = parse_json_line(lines[k], line_no);
    if (obj.contains("snapshot_type")) continue;  // periodic snapshots are not events

    std::string kind = kind_of(obj);
    if (kind.empty() && obj.contains("amounts_swapped")) kind = "trade";
    if (kind.empty()) schema_error(line_no, "event_type");

    PoolEvent ev;
    if (kind == "mint") {
      ev.kind = EventKind::Mint;
      std::tie(ev.ax, ev.ay) = token_amounts(obj, "amounts_added", line_no, true);
      ev.lp_amount = optional_number(obj, "lp_amount", line_no);
    } else if (kind == "burn") {
      ev.kind = EventKind::Burn;
      ev.lp_amount = optional_number(obj, "lp_amount", line_no);
      if (obj.contains("amounts_removed") || !ev.lp_amount) {
        auto [a, b] = token_amounts(obj, "amounts_removed", line_no, true);
        ev.ax = -std::abs(*a);
        ev.ay = -std::abs(*b);
      }
    } else if (kind == "trade" || kind == "swap") {
      ev.kind = EventKind::Trade;
      std::tie(ev.ax, ev.ay) = token_amounts(obj, "amounts_swapped", line_no, false);
      if ((ev.ax && *ev.ax == 0.0 && (!ev.ay || *ev.ay == 0.0)) ||
          (ev.ay && *ev.ay == 0.0 && !ev.ax)) {
        schema_error(line_no, "amounts_swapped");
      }
    } else {
      throw Error(Errc::SchemaError, line_msg(line_no, "unknown event_type '" + kind + "'"));
    }

    ev.block_number = integer_field(obj, "block_number", line_no);
    ev.pool_address = optional_string(obj, "pool_address");
    ev.provider_address = optional_string(obj, "provider_address");
    if (obj.contains("timestamp_ms")) {
      ev.timestamp_ms = integer_field(obj, "timestamp_ms", line_no);
    } else if (obj.contains("timestamp")) {
      // Block timestamps are epoch seconds.
      ev.timestamp_ms = integer_field(obj, "timestamp", line_no) * 1000;
    }
    if (const auto it = obj.find("fee_tier"); it != obj.end() && !it->is_null()) {
      if (it->is_string()) {
        ev.fee = parse_fee_tier_percent(it->get<std::string>());
      } else if (it->is_number()) {
        ev.fee = parse_fee_tier_percent(std::to_string(it->get<double>()));
      } else {
        schema_error(line_no, "fee_tier");
      }
    }
    events.push_back(std::move(ev));
  }
  std::stable_sort(events.begin(), events.end(), [](const PoolEvent& a, const PoolEvent& b) {
    return a.block_number < b.block_number;
  });
  return events;
}

std::vector<amm_v2::PoolEvent> read_pool_events_jsonl(const std::filesystem::path& path) {
  return parse_pool_events_jsonl(read_file(path));
}

std::vector<amm_v3::LiquidityPosition> parse_v3_positions_jsonl(const std::string& text) {
  std::vector<amm_v3::LiquidityPosition> out;
  const auto lines = split_lines(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    if (is_blank(lines[k])) continue;
    const json obj = parse_json_line(lines[k], line_no);
    const std::string kind = kind_of(obj);
    if (kind != "v3_position") {
      throw Error(Errc::SchemaError, line_msg(line_no, "expected kind 'v3_position'"));
    }
    const std::int64_t lo = integer_field(obj, "i_lower", line_no);
    const std::int64_t hi = integer_field(obj, "i_upper", line_no);
    if (lo < -amm_v3::kMaxTick || lo > amm_v3::kMaxTick) schema_error(line_no, "i_lower");
    if (hi < -amm_v3::kMaxTick || hi > amm_v3::kMaxTick) schema_error(line_no, "i_upper");
    const double liquidity = number_field(obj, "L_pos", line_no);
    if (!(liquidity > 0.0)) schema_error(line_no, "L_pos");
    out.push_back({static_cast<int>(lo), static_cast<int>(hi), liquidity});
  }
  return out;
}

std::vector<amm_v3::LiquidityPosition> read_v3_positions_jsonl(const std::filesystem::path& path) {
  return parse_v3_positions_jsonl(read_file(path));
}

// --- transforms -------------------------------------------------------------------

BarSeries resample_last(const TickSeries& ticks, std::int64_t interval_ms) {
  if (ticks.empty()) throw Error(Errc::EmptyInput, "cannot resample an empty series");
  if (interval_ms <= 0) throw Error(Errc::IntervalMismatch, "interval must be positive");
  const auto obs = ticks.observations();
  const std::int64_t first = -floor_div(-obs.front().t_ms, interval_ms) * interval_ms;
  const std::int64_t last = obs.back().t_ms;

  std::vector<Observation> bars;
  if (first <= last) bars.reserve(static_cast<std::size_t>((last - first) / interval_ms + 1));
  std::size_t j = 0;
  for (std::int64_t g = first; g <= last; g += interval_ms) {
    while (j + 1 < obs.size() && obs[j + 1].t_ms <= g) ++j;
    bars.push_back({g, obs[j].price});
  }
  return BarSeries(ticks.market_id(), interval_ms, std::move(bars));
}

BarSeries resample_last(const BarSeries& bars, std::int64_t interval_ms) {
  return resample_last(bars.as_ticks(), interval_ms);
}

AlignedPair align_pair(const BarSeries& a, const BarSeries& b, AlignPolicy policy) {
  if (a.interval_ms() != b.interval_ms()) {
    throw Error(Errc::IntervalMismatch, "bar intervals differ");
  }
  AlignedPair out;
  const auto va = a.values();
  const auto vb = b.values();
  std::size_t i = 0;
  std::size_t j = 0;
  if (policy == AlignPolicy::Intersect) {
    while (i < va.size() && j < vb.size()) {
      if (va[i].t_ms < vb[j].t_ms) {
        ++i;
      } else if (vb[j].t_ms < va[i].t_ms) {
        ++j;
      } else {
        out.t_ms.push_back(va[i].t_ms);
        out.a.push_back(va[i].price);
        out.b.push_back(vb[j].price);
        ++i;
        ++j;
      }
    }
    return out;
  }

  std::optional<double> last_a;
  std::optional<double> last_b;
  while (i < va.size() || j < vb.size()) {
    std::int64_t t = 0;
    if (j >= vb.size() || (i < va.size() && va[i].t_ms < vb[j].t_ms)) {
      t = va[i].t_ms;
    } else {
      t = vb[j].t_ms;
    }
    if (i < va.size() && va[i].t_ms == t) last_a = va[i++].price;
    if (j < vb.size() && vb[j].t_ms == t) last_b = vb[j++].price;
    if (last_a && last_b) {
      out.t_ms.push_back(t);
      out.a.push_back(*last_a);
      out.b.push_back(*last_b);
    }
  }
  return out;
}

std::vector<Return> log_returns(std::span<const Observation> prices) {
  if (prices.size() < 2) throw Error(Errc::EmptyInput, "need at least two prices for returns");
  std::vector<Return> out;
  out.reserve(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) {
    out.push_back({prices[i].t_ms, std::log(prices[i].price) - std::log(prices[i - 1].price)});
  }
  return out;
}

std::vector<Return> log_returns(const BarSeries& bars) { return log_returns(bars.values()); }

// --- generator --------------------------------------------------------------------

std::pair<TickSeries, TickSeries> simulate_cointegrated_pair(const SyntheticPairConfig& cfg) {
  if (cfg.n < 2) throw Error(Errc::ConfigError, "synthetic pair needs n >= 2");
  if (!(cfg.noise_sd.first > 0.0) || !(cfg.noise_sd.second > 0.0)) {
    throw Error(Errc::ConfigError, "noise standard deviations must be positive");
  }
  if (!(cfg.rho > -1.0 && cfg.rho < 1.0)) throw Error(Errc::ConfigError, "rho must lie in (-1, 1)");
  if (cfg.leader_lag_ms < 0) throw Error(Errc::ConfigError, "leader lag must be non-negative");
  if (cfg.interval_ms <= 0) throw Error(Errc::ConfigError, "interval must be positive");
  if (!(cfg.start_price > 0.0)) throw Error(Errc::ConfigError, "start price must be positive");
  const auto [b1, b2] = cfg.beta;
  if (cfg.mode == SyntheticMode::Vecm && b2 == 0.0) {
    throw Error(Errc::ConfigError, "beta must load on market 2");
  }
  const auto [a1, a2] = cfg.alpha;
  const auto [s1, s2] = cfg.noise_sd;
  const double rho_c = std::sqrt(1.0 - cfg.rho * cfg.rho);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  double p = cfg.start_price;
  double q = cfg.mode == SyntheticMode::Vecm ? -b1 * p / b2 : p;

  std::vector<Observation> m1;
  std::vector<Observation> m2;
  m1.reserve(cfg.n);
  m2.reserve(cfg.n);

  const std::size_t total = kBurnIn + cfg.n;
  for (std::size_t step = 0; step < total; ++step) {
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    if (cfg.mode == SyntheticMode::Vecm) {
      const double spread = b1 * p + b2 * q;
      p += a1 * spread + s1 * z1;
      q += a2 * spread + s2 * (cfg.rho * z1 + rho_c * z2);
      if (step < kBurnIn && std::abs(b1 * p + b2 * q) > kDivergenceBound) {
        throw Error(Errc::UnstableConfig, "cointegrating spread diverges during burn-in");
      }
      if (step == kBurnIn - 1) {
        // Re-anchor levels so prices start near start_price after burn-in.
        const double shift = cfg.start_price - p;
        p += shift;
        q += -b1 * shift / b2;
      }
    } else {
      p += s1 * z1;
      if (step == kBurnIn - 1) p = cfg.start_price;
      q = p + s2 * z2;
    }
    if (step < kBurnIn) continue;
    const std::size_t k = step - kBurnIn;
    const std::int64_t t = cfg.start_ms + static_cast<std::int64_t>(k) * cfg.interval_ms;
    if (!(p > 0.0) || !(q > 0.0)) {
      throw Error(Errc::UnstableConfig, "simulated price is not positive; raise start_price");
    }
    m1.push_back({t, p});
    m2.push_back({t + cfg.leader_lag_ms, q});
  }
  return {TickSeries("market1", std::move(m1)), TickSeries("market2", std::move(m2))};
}

}  // namespace pricelab::marketdata
