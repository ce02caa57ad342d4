#include "pricelab/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "pricelab/amm_v2.hpp"
#include "pricelab/discovery.hpp"

namespace pricelab::pipeline {
namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) config_error(key + ": not an integer: '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used == value.size() && std::isfinite(out)) return out;
  } catch (const std::exception&) {
  }
  config_error(key + ": not a number: '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  config_error(key + ": expected true or false");
}

marketdata::Clock parse_clock(const std::string& key, const std::string& value) {
  try {
    return marketdata::clock_from_string(value);
  } catch (const Error&) {
    config_error(key + ": unknown clock '" + value + "'");
  }
}

json pair_json(const std::pair<double, double>& p, const PipelineConfig& cfg) {
  return json{{cfg.market1.label, p.first}, {cfg.market2.label, p.second}};
}

json vec_json(const Eigen::Vector2d& v) { return json::array({v(0), v(1)}); }

json mat_json(const Eigen::Matrix2d& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

std::string verdict_label(discovery::Leader leader) { return discovery::to_string(leader); }

// Any failure while loading inputs is an ingestion failure, whatever the
// underlying validation said.
template <typename F>
auto ingest(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (is_ingest_error(e.code())) throw;
    throw Error(Errc::IngestError, what + ": " + e.what());
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string md_value(const json& v) {
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "n/a";
  return v.dump();
}

json config_echo(const PipelineConfig& c) {
  json analyses = json::array();
  for (Analysis a : c.analyses) analyses.push_back(to_string(a));
  json out{
      {"market1", {{"path", c.market1.path}, {"label", c.market1.label},
                   {"clock", marketdata::to_string(c.market1.clock)}}},
      {"market2", {{"path", c.market2.path}, {"label", c.market2.label},
                   {"clock", marketdata::to_string(c.market2.clock)}}},
      {"pool_events", c.pool_events_path},
      {"v3_positions", c.v3_positions_path},
      {"interval_ms", c.interval_ms},
      {"align", c.align == marketdata::AlignPolicy::Intersect ? "intersect" : "union_ffill"},
      {"vecm", {{"p", c.vecm_p}, {"det_spec", vecm::to_string(c.det_spec)}, {"level", c.level}}},
      {"leadlag", {{"grid", c.grid_spec}}},
      {"gas",
       {{"gwei", c.gas.gas_price_gwei},
        {"limit", c.gas.gas_limit},
        {"eth_usd", c.gas.eth_usd ? json(*c.gas.eth_usd) : json(nullptr)},
        {"legs", c.gas.legs}}},
      {"analyses", analyses},
      {"format", to_string(c.format)},
      {"force_cointegration", c.force_cointegration},
  };
  if (c.window) {
    out["window"] = {{"start_ms", c.window->start_ms},
                     {"end_ms", c.window->end_ms},
                     {"label", c.window->label}};
  } else {
    out["window"] = nullptr;
  }
  return out;
}

bool needs_markets(const std::set<Analysis>& a) {
  for (Analysis x : {Analysis::Johansen, Analysis::Vecm, Analysis::Is, Analysis::Gg,
                     Analysis::Granger, Analysis::Hy, Analysis::Arb}) {
    if (a.count(x)) return true;
  }
  return false;
}

bool needs_bars(const std::set<Analysis>& a) {
  for (Analysis x : {Analysis::Johansen, Analysis::Vecm, Analysis::Is, Analysis::Gg,
                     Analysis::Granger, Analysis::Arb}) {
    if (a.count(x)) return true;
  }
  return false;
}

}  // namespace

const char* to_string(Analysis a) {
  switch (a) {
    case Analysis::Johansen: return "johansen";
    case Analysis::Vecm: return "vecm";
    case Analysis::Is: return "is";
    case Analysis::Gg: return "gg";
    case Analysis::Granger: return "granger";
    case Analysis::Hy: return "hy";
    case Analysis::Arb: return "arb";
    case Analysis::PoolReplay: return "pool_replay";
    case Analysis::V3Depth: return "v3_depth";
  }
  return "?";
}

Analysis analysis_from_string(const std::string& name) {
  for (Analysis a : {Analysis::Johansen, Analysis::Vecm, Analysis::Is, Analysis::Gg,
                     Analysis::Granger, Analysis::Hy, Analysis::Arb, Analysis::PoolReplay,
                     Analysis::V3Depth}) {
    if (name == to_string(a)) return a;
  }
  config_error("unknown analysis '" + name + "'");
}

const char* to_string(ReportFormat f) { return f == ReportFormat::Json ? "json" : "markdown"; }

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  config_error("unknown report format '" + name + "'");
}

void PipelineConfig::validate() const {
  if (needs_markets(analyses) && (market1.path.empty() || market2.path.empty())) {
    config_error("market analyses need market1.path and market2.path");
  }
  if (market1.label.empty() || market2.label.empty() || market1.label == market2.label) {
    config_error("market labels must be distinct and non-empty");
  }
  if (analyses.count(Analysis::PoolReplay) && pool_events_path.empty()) {
    config_error("pool_replay needs pool_events");
  }
  if (analyses.count(Analysis::V3Depth)) {
    if (v3_positions_path.empty()) config_error("v3_depth needs v3.positions");
    if (!v3_market_tick) config_error("v3_depth needs v3.market_tick");
    if (v3_spacing <= 0) config_error("v3.spacing must be positive");
  }
  if (interval_ms <= 0) config_error("interval_ms must be positive");
  if (vecm_p < 1) config_error("vecm.p must be at least 1");
  if (level != 90 && level != 95 && level != 99) config_error("vecm.level must be 90, 95 or 99");
  if (window && window->end_ms <= window->start_ms) config_error("window end must follow start");
  if (analyses.count(Analysis::Arb)) {
    try {
      gas.validate();
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) config_error("line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  KeyValues kv = parse_key_values(ss.str());
  const auto base = path.parent_path();
  for (const char* key : {"market1.path", "market2.path", "pool_events", "v3.positions",
                          "hy.profile_path", "arb.csv_path", "pool.csv_path", "v3.depth_csv",
                          "output.path"}) {
    const auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) continue;
    const std::filesystem::path value(it->second);
    if (value.is_relative()) it->second = (base / value).lexically_normal().string();
  }
  return kv;
}

leadlag::LagGrid parse_grid(const std::string& spec) {
  try {
    if (spec.empty() || spec == "default") return leadlag::LagGrid();
    if (spec.rfind("uniform:", 0) == 0) {
      const auto parts = split(spec.substr(8), ':');
      if (parts.size() != 2) config_error("grid: expected uniform:STEP:MAX");
      return leadlag::LagGrid::uniform(parse_integer<std::int64_t>("grid", parts[0]),
                                       parse_integer<std::int64_t>("grid", parts[1]));
    }
    std::vector<std::int64_t> lags;
    for (const auto& item : split(spec, ',')) lags.push_back(parse_integer<std::int64_t>("grid", item));
    return leadlag::LagGrid(std::move(lags));
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    config_error(std::string("grid: ") + e.what());
  }
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "market1.path", "market1.label", "market1.clock", "market2.path", "market2.label",
      "market2.clock", "pool_events", "v3.positions", "window.start_ms", "window.end_ms",
      "window.label", "interval_ms", "align", "vecm.p", "vecm.det_spec", "vecm.level",
      "diagnostics.max_lag", "granger.max_lag", "leadlag.grid", "hy.profile_path", "gas.gwei",
      "gas.limit", "gas.eth_usd", "gas.legs", "arb.top_k", "arb.csv_path", "pool.fee",
      "pool.min_liquidity_burn", "pool.csv_path", "v3.spacing", "v3.market_tick", "v3.dx",
      "v3.dy", "v3.depth_csv", "analyses", "output.path", "output.format",
      "force_cointegration"};
  return keys;
}

PipelineConfig config_from_key_values(const KeyValues& kv) {
  const auto& keys = known_keys();
  for (const auto& [key, value] : kv) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      config_error("unknown config key '" + key + "'");
    }
  }
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() || it->second.empty() ? nullptr : &it->second;
  };

  PipelineConfig c;
  if (auto v = get("market1.path")) c.market1.path = *v;
  if (auto v = get("market1.label")) c.market1.label = *v;
  if (auto v = get("market1.clock")) c.market1.clock = parse_clock("market1.clock", *v);
  if (auto v = get("market2.path")) c.market2.path = *v;
  if (auto v = get("market2.label")) c.market2.label = *v;
  if (auto v = get("market2.clock")) c.market2.clock = parse_clock("market2.clock", *v);
  if (auto v = get("pool_events")) c.pool_events_path = *v;
  if (auto v = get("v3.positions")) c.v3_positions_path = *v;

  const auto* ws = get("window.start_ms");
  const auto* we = get("window.end_ms");
  if ((ws == nullptr) != (we == nullptr)) config_error("window needs both start_ms and end_ms");
  if (ws) {
    marketdata::EventWindow w;
    w.start_ms = parse_integer<std::int64_t>("window.start_ms", *ws);
    w.end_ms = parse_integer<std::int64_t>("window.end_ms", *we);
    if (auto v = get("window.label")) w.label = *v;
    c.window = w;
  }
  if (auto v = get("interval_ms")) c.interval_ms = parse_integer<std::int64_t>("interval_ms", *v);
  if (auto v = get("align")) {
    if (*v == "intersect") {
      c.align = marketdata::AlignPolicy::Intersect;
    } else if (*v == "union_ffill") {
      c.align = marketdata::AlignPolicy::UnionFfill;
    } else {
      config_error("align: expected intersect or union_ffill");
    }
  }
  if (auto v = get("vecm.p")) c.vecm_p = parse_integer<int>("vecm.p", *v);
  if (auto v = get("vecm.det_spec")) {
    try {
      c.det_spec = vecm::det_spec_from_string(*v);
    } catch (const Error&) {
      config_error("vecm.det_spec: expected none or unrestricted-constant");
    }
  }
  if (auto v = get("vecm.level")) c.level = parse_integer<int>("vecm.level", *v);
  if (auto v = get("diagnostics.max_lag")) {
    c.diagnostics_max_lag = parse_integer<int>("diagnostics.max_lag", *v);
  }
  if (auto v = get("granger.max_lag")) c.granger_max_lag = parse_integer<int>("granger.max_lag", *v);
  if (auto v = get("leadlag.grid")) {
    c.grid = parse_grid(*v);
    c.grid_spec = *v;
  }
  if (auto v = get("hy.profile_path")) c.hy_profile_path = *v;
  if (auto v = get("gas.gwei")) c.gas.gas_price_gwei = parse_real("gas.gwei", *v);
  if (auto v = get("gas.limit")) c.gas.gas_limit = parse_integer<std::int64_t>("gas.limit", *v);
  if (auto v = get("gas.eth_usd")) c.gas.eth_usd = parse_real("gas.eth_usd", *v);
  if (auto v = get("gas.legs")) c.gas.legs = parse_integer<int>("gas.legs", *v);
  if (auto v = get("arb.top_k")) c.arb_top_k = parse_integer<std::size_t>("arb.top_k", *v);
  if (auto v = get("arb.csv_path")) c.arb_csv_path = *v;
  if (auto v = get("pool.fee")) c.pool_fee = parse_real("pool.fee", *v);
  if (auto v = get("pool.min_liquidity_burn")) {
    c.pool_min_liquidity_burn = parse_real("pool.min_liquidity_burn", *v);
  }
  if (auto v = get("pool.csv_path")) c.pool_csv_path = *v;
  if (auto v = get("v3.spacing")) c.v3_spacing = parse_integer<int>("v3.spacing", *v);
  if (auto v = get("v3.market_tick")) c.v3_market_tick = parse_integer<int>("v3.market_tick", *v);
  if (auto v = get("v3.dx")) c.v3_decimals.dx = parse_integer<int>("v3.dx", *v);
  if (auto v = get("v3.dy")) c.v3_decimals.dy = parse_integer<int>("v3.dy", *v);
  if (auto v = get("v3.depth_csv")) c.v3_depth_csv_path = *v;
  if (auto v = get("analyses")) {
    for (const auto& name : split(*v, ',')) {
      if (!name.empty()) c.analyses.insert(analysis_from_string(name));
    }
  }
  if (auto v = get("output.path")) c.output_path = *v;
  if (auto v = get("output.format")) c.format = report_format_from_string(*v);
  if (auto v = get("force_cointegration")) {
    c.force_cointegration = parse_bool("force_cointegration", *v);
  }
  c.validate();
  return c;
}

int exit_code(Errc code) {
  if (code == Errc::ConfigError || code == Errc::InvalidGrid) return 1;
  if (is_ingest_error(code)) return 2;
  return 3;
}

std::string depth_csv(const std::vector<amm_v3::DepthRow>& rows) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "i_lower,i_upper,price_lower,price_upper,liquidity,x,y,touch\n";
  for (const auto& r : rows) {
    out << r.i_lower << ',' << r.i_upper << ',' << r.price_lower << ',' << r.price_upper << ','
        << r.liquidity << ',' << r.x << ',' << r.y << ',' << (r.touch ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string snapshots_csv(const std::vector<amm_v2::PoolSnapshotV2>& snapshots) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "event_index,x,y,lp_supply,lp_burned,k\n";
  for (const auto& s : snapshots) {
    out << s.event_index << ',' << s.x << ',' << s.y << ',' << s.lp_supply << ',' << s.lp_burned
        << ',' << s.k() << '\n';
  }
  return out.str();
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult result;
  json& report = result.report;
  report = json::object();
  report["metadata"] = {{"version", kVersion},
                        {"seeds", json::array()},
                        {"config", config_echo(cfg)},
                        {"markets", {{"market1", cfg.market1.label}, {"market2", cfg.market2.label}}}};
  const auto& want = cfg.analyses;
  auto selected = [&](Analysis a) { return want.count(a) > 0; };

  // --- ingestion ------------------------------------------------------------
  marketdata::TickSeries ticks1;
  marketdata::TickSeries ticks2;
  marketdata::AlignedPair aligned;
  std::vector<amm_v2::PoolEvent> events;
  std::vector<amm_v3::LiquidityPosition> positions;
  if (needs_markets(want)) {
    ticks1 = ingest(cfg.market1.path, [&] {
      return marketdata::read_trades_csv(cfg.market1.path, cfg.market1.label, cfg.market1.clock);
    });
    ticks2 = ingest(cfg.market2.path, [&] {
      return marketdata::read_trades_csv(cfg.market2.path, cfg.market2.label, cfg.market2.clock);
    });
    if (cfg.window) {
      ticks1 = marketdata::slice(ticks1, *cfg.window);
      ticks2 = marketdata::slice(ticks2, *cfg.window);
    }
    report["metadata"]["observations"] = {{"market1_ticks", ticks1.size()},
                                          {"market2_ticks", ticks2.size()}};
    if (needs_bars(want)) {
      aligned = ingest("alignment", [&] {
        return marketdata::align_pair(marketdata::resample_last(ticks1, cfg.interval_ms),
                                      marketdata::resample_last(ticks2, cfg.interval_ms),
                                      cfg.align);
      });
      if (aligned.empty()) throw Error(Errc::IngestError, "markets share no bar timestamps");
      report["metadata"]["observations"]["aligned_rows"] = aligned.size();
    }
  }
  if (selected(Analysis::PoolReplay)) {
    events = ingest(cfg.pool_events_path,
                    [&] { return marketdata::read_pool_events_jsonl(cfg.pool_events_path); });
  }
  if (selected(Analysis::V3Depth)) {
    positions = ingest(cfg.v3_positions_path,
                       [&] { return marketdata::read_v3_positions_jsonl(cfg.v3_positions_path); });
  }

  // --- cointegration and discovery -------------------------------------------
  const bool need_levels = selected(Analysis::Johansen) || selected(Analysis::Vecm) ||
                           selected(Analysis::Is) || selected(Analysis::Gg);
  if (need_levels) {
    const Eigen::MatrixXd levels = vecm::levels_matrix(aligned);
    const auto jt = vecm::johansen_trace(levels, cfg.vecm_p, cfg.det_spec, cfg.level);
    if (selected(Analysis::Johansen)) {
      report["johansen"] = {
          {"eigenvalues", vec_json(jt.eigenvalues)},
          {"trace", json::array({jt.trace_stats[0], jt.trace_stats[1]})},
          {"crit", json::array({jt.critical_values[0], jt.critical_values[1]})},
          {"rank", jt.selected_rank},
          {"det_spec", vecm::to_string(jt.det_spec)},
          {"level", jt.level},
      };
    }
    const bool cointegrated = jt.selected_rank >= 1 || cfg.force_cointegration;
    const json skipped{{"skipped", "no cointegration"}};

    if (selected(Analysis::Vecm) || selected(Analysis::Is) || selected(Analysis::Gg)) {
      const auto fit = vecm::estimate_vecm(levels, cfg.vecm_p, 1, cfg.det_spec);
      if (selected(Analysis::Vecm)) {
        json gamma = json::array();
        for (const auto& g : fit.gamma) gamma.push_back(mat_json(g));
        report["vecm"] = {{"alpha", vec_json(fit.alpha)},
                          {"beta", vec_json(fit.beta)},
                          {"gamma", gamma},
                          {"constant", vec_json(fit.constant)},
                          {"omega", mat_json(fit.omega)},
                          {"loglik", fit.loglik},
                          {"p", fit.lags_p},
                          {"sample_size", fit.sample_size()},
                          {"warnings", fit.warnings},
                          {"cointegrated", jt.selected_rank >= 1}};
        const int m = std::min<int>(cfg.diagnostics_max_lag,
                                    static_cast<int>((fit.sample_size() - 1) / 4));
        if (m >= 1) {
          const auto diag = vecm::residual_diagnostics(fit, m);
          report["diagnostics"] = {
              {"max_lag", m},
              {"ljung_box",
               {{cfg.market1.label, {{"q", diag[0].ljung_box}, {"p", diag[0].p_value}}},
                {cfg.market2.label, {{"q", diag[1].ljung_box}, {"p", diag[1].p_value}}}}}};
        }
      }
      if (selected(Analysis::Is)) {
        if (!cointegrated) {
          report["is"] = skipped;
        } else {
          const auto is = discovery::hasbrouck_is(fit);
          std::string verdict = "neither";
          if (is.midpoint.first > 0.5) verdict = "market1";
          if (is.midpoint.second > 0.5) verdict = "market2";
          report["is"] = {{"ordering_12", pair_json(is.ordering_12, cfg)},
                          {"ordering_21", pair_json(is.ordering_21, cfg)},
                          {"midpoint", pair_json(is.midpoint, cfg)},
                          {"verdict", verdict}};
        }
      }
      if (selected(Analysis::Gg)) {
        if (!cointegrated) {
          report["gg"] = skipped;
        } else {
          const auto h10 = discovery::lr_test_alpha_direction(levels, cfg.vecm_p, cfg.det_spec,
                                                              {1.0, 0.0});
          const auto h01 = discovery::lr_test_alpha_direction(levels, cfg.vecm_p, cfg.det_spec,
                                                              {0.0, 1.0});
          report["gg"] = {{"alpha", vec_json(fit.alpha)},
                          {"alpha_perp", vec_json(discovery::alpha_perp(fit.alpha))},
                          {"lr_h10", {{"chi2", h10.chi2}, {"p", h10.p_value}}},
                          {"lr_h01", {{"chi2", h01.chi2}, {"p", h01.p_value}}},
                          {"verdict", verdict_label(discovery::gg_verdict(h10, h01))}};
        }
      }
    }
  }

  if (selected(Analysis::Granger)) {
    const auto returns = vecm::ReturnPair::log_differences(vecm::levels_matrix(aligned));
    json lags = json::array();
    for (const auto& g : vecm::granger_f_test(returns, cfg.granger_max_lag)) {
      lags.push_back({{"lag", g.lag},
                      {"f_1to2", g.f_1to2},
                      {"p_1to2", g.p_1to2},
                      {"f_2to1", g.f_2to1},
                      {"p_2to1", g.p_2to1}});
    }
    report["granger"] = {{"max_lag", cfg.granger_max_lag}, {"lags", lags}};
  }

  if (selected(Analysis::Hy)) {
    const auto rep = leadlag::lead_lag_profile(ticks1, ticks2, cfg.grid);
    std::string verdict = "neither";
    if (rep.llr > 1.0) verdict = "market1";
    if (rep.llr < 1.0) verdict = "market2";
    report["hy"] = {{"profile_path", cfg.hy_profile_path.empty() ? json(nullptr)
                                                                 : json(cfg.hy_profile_path)},
                    {"lead_lag_ms", rep.hy_lead_lag_ms},
                    {"max_abs_corr", rep.max_abs_corr},
                    {"llr", std::isfinite(rep.llr) ? json(rep.llr) : json("inf")},
                    {"flags", rep.flags},
                    {"clock", marketdata::to_string(rep.clock)},
                    {"verdict", verdict}};
    if (!cfg.hy_profile_path.empty()) {
      std::ostringstream csv;
      leadlag::write_profile_csv(csv, rep);
      result.artifacts.emplace_back(cfg.hy_profile_path, csv.str());
    }
  }

  if (selected(Analysis::Arb)) {
    const auto ops = arbitrage::scan(aligned, cfg.gas);
    const auto summary = arbitrage::summarize(ops, cfg.arb_top_k);
    json top = json::array();
    for (const auto& op : summary.top_k) {
      top.push_back({{"timestamp", arbitrage::format_timestamp(op.t_ms)},
                     {"price_centralized", op.price_centralized},
                     {"price_defi", op.price_defi},
                     {"gross_spread_usd", op.gross_spread_usd},
                     {"fee_usd", op.total_fee_usd},
                     {"net_usd", op.net_usd},
                     {"fee_pct_of_spread",
                      op.fee_pct_of_spread ? json(*op.fee_pct_of_spread) : json(nullptr)}});
    }
    const auto fee = arbitrage::gas_fee(cfg.gas);
    report["arb"] = {{"top_k", top},
                     {"mean_net", summary.mean_net_usd},
                     {"count_profitable", summary.count_profitable},
                     {"count", summary.count},
                     {"fee_eth_per_leg", fee.fee_eth_per_leg}};
    if (!cfg.arb_csv_path.empty()) {
      std::ostringstream csv;
      arbitrage::write_opportunities_csv(csv, ops);
      result.artifacts.emplace_back(cfg.arb_csv_path, csv.str());
    }
  }

  if (selected(Analysis::PoolReplay)) {
    amm_v2::ReplayOptions opts;
    opts.fee = cfg.pool_fee;
    opts.min_liquidity_burn = cfg.pool_min_liquidity_burn;
    const auto replayed = amm_v2::replay(events, opts);
    json notes = json::array();
    for (const auto& n : replayed.notes) {
      notes.push_back({{"event", n.event_position},
                       {"flag", amm_v2::to_string(n.flag)},
                       {"detail", n.detail}});
    }
    const auto& last = replayed.snapshots.back();
    report["pool_replay"] = {
        {"events", events.size()},
        {"final", {{"x", last.x}, {"y", last.y}, {"lp_supply", last.lp_supply},
                   {"lp_burned", last.lp_burned}, {"k", last.k()}}},
        {"notes", notes}};
    if (!cfg.pool_csv_path.empty()) {
      result.artifacts.emplace_back(cfg.pool_csv_path, snapshots_csv(replayed.snapshots));
    }
  }

  if (selected(Analysis::V3Depth)) {
    const auto rows =
        amm_v3::depth_profile(positions, cfg.v3_spacing, *cfg.v3_market_tick, cfg.v3_decimals);
    json out = json::array();
    for (const auto& r : rows) {
      out.push_back({{"i_lower", r.i_lower},
                     {"i_upper", r.i_upper},
                     {"price_lower", r.price_lower},
                     {"price_upper", r.price_upper},
                     {"liquidity", r.liquidity},
                     {"x", r.x},
                     {"y", r.y},
                     {"touch", r.touch}});
    }
    report["v3_depth"] = {{"market_tick", *cfg.v3_market_tick},
                          {"spacing", cfg.v3_spacing},
                          {"rows", out}};
    if (!cfg.v3_depth_csv_path.empty()) {
      result.artifacts.emplace_back(cfg.v3_depth_csv_path, depth_csv(rows));
    }
  }
  return result;
}

std::string emit_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Json) return report.dump(2) + "\n";

  std::ostringstream md;
  const auto& meta = report.at("metadata");
  const std::string m1 = meta.at("markets").at("market1").get<std::string>();
  const std::string m2 = meta.at("markets").at("market2").get<std::string>();
  std::string window = "full sample";
  if (const auto& w = meta.at("config").at("window"); w.is_object()) {
    window = w.at("label").get<std::string>();
    if (window.empty()) window = std::to_string(w.at("start_ms").get<std::int64_t>());
  }
  auto leader = [&](const json& block) -> std::string {
    if (block.contains("skipped")) return block.at("skipped").get<std::string>();
    const std::string v = block.at("verdict").get<std::string>();
    if (v == "market1") return m1;
    if (v == "market2") return m2;
    return v;
  };

  md << "# Price discovery report\n\n";
  md << "version " << meta.at("version").get<std::string>() << "\n";

  if (report.contains("is") || report.contains("gg") || report.contains("hy")) {
    md << "\n## Summary\n\n| Date | metric | leads |\n|---|---|---|\n";
    if (report.contains("is")) md << "| " << window << " | IS | " << leader(report["is"]) << " |\n";
    if (report.contains("gg")) md << "| " << window << " | GG | " << leader(report["gg"]) << " |\n";
    if (report.contains("hy")) md << "| " << window << " | HY | " << leader(report["hy"]) << " |\n";
  }
  if (report.contains("johansen")) {
    const auto& j = report["johansen"];
    md << "\n## Johansen trace test (" << j.at("det_spec").get<std::string>() << ", "
       << j.at("level").get<int>() << "%)\n\n| H0 | eigenvalue | trace | crit |\n|---|---|---|---|\n";
    for (int r = 0; r < 2; ++r) {
      md << "| r <= " << r << " | " << md_value(j["eigenvalues"][r]) << " | "
         << md_value(j["trace"][r]) << " | " << md_value(j["crit"][r]) << " |\n";
    }
    md << "\nselected rank: " << j.at("rank").get<int>() << "\n";
  }
  if (report.contains("vecm")) {
    const auto& v = report["vecm"];
    md << "\n## VECM\n\n| market | alpha | beta |\n|---|---|---|\n";
    md << "| " << m1 << " | " << md_value(v["alpha"][0]) << " | " << md_value(v["beta"][0]) << " |\n";
    md << "| " << m2 << " | " << md_value(v["alpha"][1]) << " | " << md_value(v["beta"][1]) << " |\n";
    for (const auto& w : v["warnings"]) md << "\nwarning: " << w.get<std::string>() << "\n";
  }
  if (report.contains("diagnostics")) {
    const auto& d = report["diagnostics"];
    md << "\n## Residual diagnostics (Ljung-Box, " << d.at("max_lag").get<int>()
       << " lags)\n\n| market | Q | p |\n|---|---|---|\n";
    for (const auto& label : {m1, m2}) {
      const auto& lb = d["ljung_box"][label];
      md << "| " << label << " | " << md_value(lb["q"]) << " | " << md_value(lb["p"]) << " |\n";
    }
  }
  if (report.contains("is")) {
    const auto& is = report["is"];
    md << "\n## Information shares\n\n";
    if (is.contains("skipped")) {
      md << "skipped: no cointegration\n";
    } else {
      md << "| market | share_ordering_12 | share_ordering_21 |\n|---|---|---|\n";
      for (const auto& label : {m1, m2}) {
        md << "| " << label << " | " << md_value(is["ordering_12"][label]) << " | "
           << md_value(is["ordering_21"][label]) << " |\n";
      }
    }
  }
  if (report.contains("gg")) {
    const auto& gg = report["gg"];
    md << "\n## Gonzalo-Granger\n\n";
    if (gg.contains("skipped")) {
      md << "skipped: no cointegration\n";
    } else {
      md << "| hypothesis | chi2 | p |\n|---|---|---|\n";
      md << "| alpha ~ (1,0) | " << md_value(gg["lr_h10"]["chi2"]) << " | "
         << md_value(gg["lr_h10"]["p"]) << " |\n";
      md << "| alpha ~ (0,1) | " << md_value(gg["lr_h01"]["chi2"]) << " | "
         << md_value(gg["lr_h01"]["p"]) << " |\n";
    }
  }
  if (report.contains("hy")) {
    const auto& hy = report["hy"];
    md << "\n## Hayashi-Yoshida lead-lag\n\n| lead_lag_ms | max_abs_corr | llr |\n|---|---|---|\n"
       << "| " << hy.at("lead_lag_ms").get<std::int64_t>() << " | " << md_value(hy["max_abs_corr"])
       << " | " << md_value(hy["llr"]) << " |\n";
  }
  if (report.contains("granger")) {
    md << "\n## Granger causality\n\n| lag | p " << m1 << " -> " << m2 << " | p " << m2 << " -> "
       << m1 << " |\n|---|---|---|\n";
    for (const auto& g : report["granger"]["lags"]) {
      md << "| " << g.at("lag").get<int>() << " | " << md_value(g["p_1to2"]) << " | "
         << md_value(g["p_2to1"]) << " |\n";
    }
  }
  if (report.contains("arb")) {
    const auto& arb = report["arb"];
    md << "\n## Arbitrage potential\n\n"
       << "| timestamp | price_centralized | price_defi | fee_usd | net_usd |\n|---|---|---|---|---|\n";
    for (const auto& op : arb["top_k"]) {
      md << "| " << op.at("timestamp").get<std::string>() << " | " << md_value(op["price_centralized"])
         << " | " << md_value(op["price_defi"]) << " | " << md_value(op["fee_usd"]) << " | "
         << md_value(op["net_usd"]) << " |\n";
    }
    md << "\nmean net: " << md_value(arb["mean_net"])
       << ", profitable rows: " << arb.at("count_profitable").get<std::size_t>() << " of "
       << arb.at("count").get<std::size_t>() << "\n";
  }
  if (report.contains("pool_replay")) {
    const auto& f = report["pool_replay"]["final"];
    md << "\n## Pool replay\n\n| x | y | lp_supply | k |\n|---|---|---|---|\n| " << md_value(f["x"])
       << " | " << md_value(f["y"]) << " | " << md_value(f["lp_supply"]) << " | "
       << md_value(f["k"]) << " |\n";
  }
  if (report.contains("v3_depth")) {
    md << "\n## Liquidity depth\n\n| range | liquidity | x | y | market |\n|---|---|---|---|---|\n";
    for (const auto& r : report["v3_depth"]["rows"]) {
      md << "| " << r.at("i_lower").get<int>() << ", " << r.at("i_upper").get<int>() << " | "
         << md_value(r["liquidity"]) << " | " << md_value(r["x"]) << " | " << md_value(r["y"])
         << " | " << (r.at("touch").get<bool>() ? "*" : "") << " |\n";
    }
  }
  return md.str();
}

}  // namespace pricelab::pipeline
