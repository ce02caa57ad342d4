#pragma once

// Configuration, orchestration and report emission for the analysis
// pipeline behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pricelab/amm_v3.hpp"
#include "pricelab/arbitrage.hpp"
#include "pricelab/error.hpp"
#include "pricelab/leadlag.hpp"
#include "pricelab/marketdata.hpp"
#include "pricelab/vecm.hpp"

namespace pricelab::pipeline {

inline constexpr const char* kVersion = "0.1.0";

enum class Analysis { Johansen, Vecm, Is, Gg, Granger, Hy, Arb, PoolReplay, V3Depth };
const char* to_string(Analysis a);
Analysis analysis_from_string(const std::string& name);

enum class ReportFormat { Json, Markdown };
const char* to_string(ReportFormat f);
ReportFormat report_format_from_string(const std::string& name);

struct MarketInput {
  std::string path;
  std::string label;
  marketdata::Clock clock = marketdata::Clock::TradeTime;
};

struct PipelineConfig {
  MarketInput market1{"", "market1"};  // centralized side for arbitrage
  MarketInput market2{"", "market2"};
  std::string pool_events_path;
  std::string v3_positions_path;
  std::optional<marketdata::EventWindow> window;
  std::int64_t interval_ms = 1000;
  marketdata::AlignPolicy align = marketdata::AlignPolicy::UnionFfill;

  int vecm_p = 1;
  vecm::DetSpec det_spec = vecm::DetSpec::None;
  int level = 90;
  int diagnostics_max_lag = 10;
  int granger_max_lag = 5;

  leadlag::LagGrid grid;
  std::string grid_spec = "default";
  std::string hy_profile_path;

  arbitrage::GasFeeModel gas;
  std::size_t arb_top_k = 5;
  std::string arb_csv_path;

  double pool_fee = amm_v2::kDefaultFee;
  double pool_min_liquidity_burn = amm_v2::kMinimumLiquidity;
  std::string pool_csv_path;

  int v3_spacing = 60;
  std::optional<int> v3_market_tick;
  amm_v3::PriceDecimals v3_decimals;
  std::string v3_depth_csv_path;

  std::set<Analysis> analyses;
  std::string output_path;
  ReportFormat format = ReportFormat::Json;
  bool force_cointegration = false;

  /// Throws ConfigError when a selected analysis lacks its inputs.
  void validate() const;
};

/// `key = value` lines; `#` starts a comment. Later keys win.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(const std::string& text);
/// Reads a config file. Relative paths among the values are taken relative
/// to the directory holding the file.
KeyValues read_key_values(const std::filesystem::path& path);

/// Keys accepted by config_from_key_values.
const std::vector<std::string>& known_keys();
PipelineConfig config_from_key_values(const KeyValues& kv);

/// `default`, `uniform:STEP:MAX` or a comma-separated lag list in ms.
leadlag::LagGrid parse_grid(const std::string& spec);

using Report = nlohmann::json;

/// Side outputs (profile, arbitrage and depth CSVs) keyed by path. They are
/// returned rather than written so a failed run leaves nothing behind.
struct PipelineResult {
  Report report;
  std::vector<std::pair<std::string, std::string>> artifacts;
};

PipelineResult run_pipeline(const PipelineConfig& config);

/// JSON is key-sorted with a trailing newline; markdown renders summary tables.
std::string emit_report(const Report& report, ReportFormat format);

/// 1 configuration, 2 ingestion, 3 analysis.
int exit_code(Errc code);

/// CSV renderers shared with the command-line tool.
std::string depth_csv(const std::vector<amm_v3::DepthRow>& rows);
std::string snapshots_csv(const std::vector<amm_v2::PoolSnapshotV2>& snapshots);

}  // namespace pricelab::pipeline
