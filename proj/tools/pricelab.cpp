#include <CLI11.hpp>

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pricelab/marketdata.hpp"
#include "pricelab/pipeline.hpp"

namespace {

using pricelab::Errc;
using pricelab::Error;
namespace pl = pricelab::pipeline;
namespace md = pricelab::marketdata;

struct FlagBinding {
  const char* flag;
  const char* key;
  const char* help;
};

// Flags that mirror pipeline config keys. Each subcommand exposes the subset
// relevant to it; values given on the command line override the config file.
const std::vector<FlagBinding> kMarketFlags{
    {"--market1", "market1.path", "trades CSV of the first (centralized) market"},
    {"--market2", "market2.path", "trades CSV of the second market"},
    {"--label1", "market1.label", "label of the first market"},
    {"--label2", "market2.label", "label of the second market"},
    {"--clock1", "market1.clock", "clock of the first market (trade|tick)"},
    {"--clock2", "market2.clock", "clock of the second market (trade|tick)"},
    {"--window-start", "window.start_ms", "window start in ms since epoch"},
    {"--window-end", "window.end_ms", "window end in ms since epoch (exclusive)"},
    {"--window-label", "window.label", "window label used in reports"},
    {"--interval-ms", "interval_ms", "bar interval in ms"},
    {"--align", "align", "intersect|union_ffill"},
};
const std::vector<FlagBinding> kVecmFlags{
    {"--p", "vecm.p", "VECM lag order"},
    {"--det-spec", "vecm.det_spec", "none|unrestricted-constant"},
    {"--level", "vecm.level", "Johansen test level (90|95|99)"},
    {"--diagnostics-max-lag", "diagnostics.max_lag", "Ljung-Box lags"},
    {"--granger-max-lag", "granger.max_lag", "largest Granger lag"},
};
const std::vector<FlagBinding> kHyFlags{
    {"--grid", "leadlag.grid", "default | uniform:STEP:MAX | comma list of lags in ms"},
    {"--hy-profile", "hy.profile_path", "write the lag profile CSV here"},
};
const std::vector<FlagBinding> kArbFlags{
    {"--gwei", "gas.gwei", "gas price in gwei"},
    {"--gas-limit", "gas.limit", "gas units per leg"},
    {"--eth-usd", "gas.eth_usd", "ETH price in USD (default: row DeFi price)"},
    {"--legs", "gas.legs", "transactions per round trip"},
    {"--top-k", "arb.top_k", "rows kept in the summary"},
    {"--arb-csv", "arb.csv_path", "write all scanned rows here"},
};
const std::vector<FlagBinding> kPoolFlags{
    {"--events", "pool_events", "pool events JSONL"},
    {"--fee", "pool.fee", "swap fee as a fraction"},
    {"--min-liquidity-burn", "pool.min_liquidity_burn", "LP tokens locked at initialization"},
    {"--snapshots-csv", "pool.csv_path", "write per-event snapshots here"},
};
const std::vector<FlagBinding> kV3Flags{
    {"--positions", "v3.positions", "v3 positions JSONL"},
    {"--spacing", "v3.spacing", "tick spacing"},
    {"--market-tick", "v3.market_tick", "current pool tick"},
    {"--dx", "v3.dx", "decimals of token x"},
    {"--dy", "v3.dy", "decimals of token y"},
    {"--depth-csv", "v3.depth_csv", "write the depth profile here"},
};
const std::vector<FlagBinding> kOutputFlags{
    {"--analyses", "analyses", "comma list of analyses to run"},
    {"--output", "output.path", "report path (default: stdout)"},
    {"--format", "output.format", "json|markdown"},
};

class PipelineCommand {
 public:
  PipelineCommand(CLI::App& parent, const std::string& name, const std::string& description,
                  std::vector<const std::vector<FlagBinding>*> groups, std::string fixed_analysis)
      : fixed_analysis_(std::move(fixed_analysis)) {
    app_ = parent.add_subcommand(name, description);
    app_->add_option("--config", config_path_, "key = value config file");
    app_->add_option("--set", overrides_, "extra key=value overrides")->allow_extra_args(false);
    for (const auto* group : groups) {
      for (const auto& b : *group) {
        if (!fixed_analysis_.empty() && std::string(b.key) == "analyses") continue;
        values_.emplace_back(b.key, std::string());
        options_.push_back(app_->add_option(b.flag, values_.back().second, b.help));
      }
    }
    if (fixed_analysis_.empty()) {
      app_->add_flag("--force-cointegration", force_, "run IS and GG even without cointegration");
    }
  }

  CLI::App* app() const { return app_; }

  pl::PipelineConfig config() const {
    pl::KeyValues kv;
    if (!config_path_.empty()) kv = pl::read_key_values(config_path_);
    for (const auto& item : overrides_) {
      const auto parsed = pl::parse_key_values(item);
      if (parsed.empty()) throw Error(Errc::ConfigError, "--set expects key=value");
      for (const auto& [k, v] : parsed) kv[k] = v;
    }
    for (std::size_t i = 0; i < options_.size(); ++i) {
      if (options_[i]->count() > 0) kv[values_[i].first] = values_[i].second;
    }
    if (force_) kv["force_cointegration"] = "true";
    if (!fixed_analysis_.empty()) kv["analyses"] = fixed_analysis_;
    return pl::config_from_key_values(kv);
  }

 private:
  CLI::App* app_ = nullptr;
  std::string fixed_analysis_;
  std::string config_path_;
  std::vector<std::string> overrides_;
  std::deque<std::pair<std::string, std::string>> values_;
  std::vector<CLI::Option*> options_;
  bool force_ = false;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(Errc::IngestError, "cannot write " + path.string());
}

int run_command(const PipelineCommand& cmd) {
  const auto cfg = cmd.config();
  const auto result = pl::run_pipeline(cfg);
  const std::string text = pl::emit_report(result.report, cfg.format);
  for (const auto& [path, content] : result.artifacts) write_file(path, content);
  if (cfg.output_path.empty()) {
    std::cout << text;
  } else {
    write_file(cfg.output_path, text);
  }
  return 0;
}

// --- simulate -----------------------------------------------------------------

std::pair<double, double> parse_pair(const std::string& key, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(Errc::ConfigError, key + ": expected A,B");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error(Errc::ConfigError, key + ": expected two numbers");
  }
}

struct SimulateCommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  explicit SimulateCommand(CLI::App& parent) {
    app = parent.add_subcommand("simulate", "generate a seeded cointegrated pair of trade series");
    app->add_option("--config", config_path, "key = value config file");
    const std::vector<std::pair<const char*, const char*>> keys{
        {"n", "number of observations"},
        {"alpha", "adjustment coefficients A,B"},
        {"beta", "cointegrating vector A,B"},
        {"noise_sd", "innovation standard deviations A,B"},
        {"rho", "innovation correlation"},
        {"leader_lag_ms", "delay of market 2 timestamps"},
        {"seed", "RNG seed"},
        {"interval_ms", "spacing of observations"},
        {"start_ms", "first timestamp"},
        {"start_price", "initial price level"},
        {"mode", "vecm|pure_leader"},
        {"out1", "CSV path for market 1"},
        {"out2", "CSV path for market 2"},
    };
    for (const auto& [key, help] : keys) {
      values[key];
      std::string flag = std::string("--") + key;
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      options[key] = app->add_option(flag, values[key], help);
    }
  }

  int run() const {
    pl::KeyValues kv;
    if (!config_path.empty()) {
      kv = pl::read_key_values(config_path);
      const auto base = std::filesystem::path(config_path).parent_path();
      for (const char* key : {"out1", "out2"}) {
        const auto it = kv.find(key);
        if (it != kv.end() && std::filesystem::path(it->second).is_relative()) {
          it->second = (base / it->second).lexically_normal().string();
        }
      }
    }
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) kv[key] = values.at(key);
    }
    md::SyntheticPairConfig cfg;
    std::string out1 = "market1.csv";
    std::string out2 = "market2.csv";
    for (const auto& [key, value] : kv) {
      try {
        if (key == "n") cfg.n = std::stoull(value);
        else if (key == "alpha") cfg.alpha = parse_pair(key, value);
        else if (key == "beta") cfg.beta = parse_pair(key, value);
        else if (key == "noise_sd") cfg.noise_sd = parse_pair(key, value);
        else if (key == "rho") cfg.rho = std::stod(value);
        else if (key == "leader_lag_ms") cfg.leader_lag_ms = std::stoll(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "interval_ms") cfg.interval_ms = std::stoll(value);
        else if (key == "start_ms") cfg.start_ms = std::stoll(value);
        else if (key == "start_price") cfg.start_price = std::stod(value);
        else if (key == "mode") {
          if (value == "vecm") cfg.mode = md::SyntheticMode::Vecm;
          else if (value == "pure_leader") cfg.mode = md::SyntheticMode::PureLeader;
          else throw Error(Errc::ConfigError, "mode: expected vecm or pure_leader");
        } else if (key == "out1") out1 = value;
        else if (key == "out2") out2 = value;
        else throw Error(Errc::ConfigError, "unknown simulate key '" + key + "'");
      } catch (const std::logic_error&) {
        throw Error(Errc::ConfigError, key + ": bad value '" + value + "'");
      }
    }
    const auto [a, b] = [&] {
      try {
        return md::simulate_cointegrated_pair(cfg);
      } catch (const Error& e) {
        throw Error(Errc::ConfigError, e.what());
      }
    }();
    write_file(out1, md::format_trades_csv(a));
    write_file(out2, md::format_trades_csv(b));
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AMM state reconstruction and cross-market price discovery"};
  app.set_version_flag("--version", std::string(pl::kVersion));
  app.require_subcommand(1);

  PipelineCommand analyze(app, "analyze", "run the selected analyses and emit a report",
                          {&kMarketFlags, &kVecmFlags, &kHyFlags, &kArbFlags, &kPoolFlags,
                           &kV3Flags, &kOutputFlags},
                          "");
  SimulateCommand simulate(app);
  auto* pool = app.add_subcommand("pool", "Uniswap v2 pool tools");
  pool->require_subcommand(1);
  PipelineCommand replay(*pool, "replay", "replay pool events into snapshots",
                         {&kPoolFlags, &kOutputFlags}, "pool_replay");
  auto* v3 = app.add_subcommand("v3", "Uniswap v3 tools");
  v3->require_subcommand(1);
  PipelineCommand depth(*v3, "depth", "liquidity depth profile from positions",
                        {&kV3Flags, &kOutputFlags}, "v3_depth");
  PipelineCommand hy(app, "hy", "Hayashi-Yoshida lead-lag profile",
                     {&kMarketFlags, &kHyFlags, &kOutputFlags}, "hy");
  PipelineCommand arb(app, "arb", "gas-aware arbitrage scan",
                      {&kMarketFlags, &kArbFlags, &kOutputFlags}, "arb");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate.app->parsed()) return simulate.run();
    for (const auto* cmd : {&analyze, &replay, &depth, &hy, &arb}) {
      if (cmd->app()->parsed()) return run_command(*cmd);
    }
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pl::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
