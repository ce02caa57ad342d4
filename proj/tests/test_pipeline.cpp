#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pricelab/error.hpp"
#include "pricelab/marketdata.hpp"
#include "pricelab/pipeline.hpp"

using namespace pricelab;
using namespace pricelab::pipeline;

namespace {

const std::filesystem::path kFixtures = PRICELAB_FIXTURES;

PipelineConfig fixture_config(const std::string& file) {
  return config_from_key_values(read_key_values(kFixtures / file));
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::ConfigError;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pricelab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("key value parsing") {
  const auto kv = parse_key_values("# comment\n a = 1 \n\nb=two words # trailing\nc =\n");
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b") == "two words");
  CHECK(kv.at("c").empty());
  CHECK(code_of([] { parse_key_values("novalue\n"); }) == Errc::ConfigError);
  CHECK(code_of([] { parse_key_values("= 3\n"); }) == Errc::ConfigError);
}

TEST_CASE("config validation") {
  CHECK(code_of([] { config_from_key_values({{"bogus", "1"}}); }) == Errc::ConfigError);
  CHECK(code_of([] { config_from_key_values({{"analyses", "hy"}}); }) == Errc::ConfigError);
  CHECK(code_of([] { config_from_key_values({{"analyses", "magic"}}); }) == Errc::ConfigError);
  CHECK(code_of([] { config_from_key_values({{"vecm.level", "80"}}); }) == Errc::ConfigError);
  CHECK(code_of([] { config_from_key_values({{"interval_ms", "1.5"}}); }) == Errc::ConfigError);
  CHECK(code_of([] { config_from_key_values({{"window.start_ms", "5"}}); }) == Errc::ConfigError);
  CHECK(code_of([] { config_from_key_values({{"leadlag.grid", "0,5"}}); }) == Errc::ConfigError);
  CHECK(code_of([] {
          config_from_key_values({{"market1.label", "x"}, {"market2.label", "x"}});
        }) == Errc::ConfigError);
  const auto c = config_from_key_values({{"analyses", "johansen, hy"},
                                         {"market1.path", "a.csv"},
                                         {"market2.path", "b.csv"},
                                         {"vecm.det_spec", "unrestricted-constant"},
                                         {"output.format", "markdown"}});
  CHECK(c.analyses.size() == 2);
  CHECK(c.det_spec == vecm::DetSpec::UnrestrictedConstant);
  CHECK(c.format == ReportFormat::Markdown);
}

TEST_CASE("grid specs") {
  CHECK(parse_grid("default").size() == leadlag::LagGrid().size());
  const auto u = parse_grid("uniform:100:1000");
  CHECK(u.size() == 21);
  CHECK(u.contains(-1000));
  const auto l = parse_grid("-20,-10,10,20");
  CHECK(l.size() == 5);
  CHECK(l.contains(0));
  CHECK(code_of([] { parse_grid("uniform:0:10"); }) == Errc::ConfigError);
  CHECK(code_of([] { parse_grid("a,b"); }) == Errc::ConfigError);
}

TEST_CASE("config file paths are relative to the file") {
  const auto kv = read_key_values(kFixtures / "arb" / "arb.conf");
  CHECK(std::filesystem::path(kv.at("market1.path")) == (kFixtures / "arb" / "cex.csv").lexically_normal());
}

TEST_CASE("exit codes") {
  CHECK(exit_code(Errc::ConfigError) == 1);
  CHECK(exit_code(Errc::InvalidGrid) == 1);
  CHECK(exit_code(Errc::IngestError) == 2);
  CHECK(exit_code(Errc::ParseError) == 2);
  CHECK(exit_code(Errc::NonMonotonicTimestamp) == 2);
  CHECK(exit_code(Errc::SingularMoments) == 3);
  CHECK(exit_code(Errc::DegenerateSeries) == 3);
}

TEST_CASE("empty analyses give a metadata-only report") {
  const auto result = run_pipeline(PipelineConfig{});
  CHECK(result.report.size() == 1);
  CHECK(result.report.contains("metadata"));
  CHECK(result.report["metadata"]["version"] == kVersion);
  CHECK(result.artifacts.empty());
}

TEST_CASE("missing input is an ingest failure") {
  auto cfg = fixture_config("arb/arb.conf");
  cfg.market2.path = (kFixtures / "arb" / "absent.csv").string();
  const Errc code = code_of([&] { run_pipeline(cfg); });
  CHECK(code == Errc::IngestError);
  CHECK(exit_code(code) == 2);
}

TEST_CASE("malformed input is an ingest failure") {
  const auto dir = temp_dir("malformed");
  write(dir / "a.csv", "timestamp_ms,price\n1,10\n0,11\n");
  write(dir / "b.csv", "timestamp_ms,price\n1,10\n2,11\n");
  PipelineConfig cfg;
  cfg.market1.path = (dir / "a.csv").string();
  cfg.market2.path = (dir / "b.csv").string();
  cfg.analyses = {Analysis::Hy};
  CHECK(exit_code(code_of([&] { run_pipeline(cfg); })) == 2);
}

TEST_CASE("analysis failures map to exit code 3") {
  const auto dir = temp_dir("flat");
  write(dir / "a.csv", "timestamp_ms,price\n1,10\n2,10\n3,10\n");
  write(dir / "b.csv", "timestamp_ms,price\n1,10\n2,11\n3,12\n");
  PipelineConfig cfg;
  cfg.market1.path = (dir / "a.csv").string();
  cfg.market2.path = (dir / "b.csv").string();
  cfg.analyses = {Analysis::Hy};
  CHECK(exit_code(code_of([&] { run_pipeline(cfg); })) == 3);
}

TEST_CASE("arbitrage fixture reproduces the top five table") {
  const auto result = run_pipeline(fixture_config("arb/arb.conf"));
  const auto& arb = result.report.at("arb");
  const std::vector<std::pair<std::string, double>> expected{
      {"2024-03-05T19:36:08.000Z", 0.11}, {"2024-03-05T19:36:05.000Z", -1.36},
      {"2024-03-05T19:36:10.000Z", -2.34}, {"2024-03-05T19:36:06.000Z", -3.58},
      {"2024-03-05T19:36:07.000Z", -4.74}};
  REQUIRE(arb["top_k"].size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(arb["top_k"][i]["timestamp"] == expected[i].first);
    CHECK(std::abs(arb["top_k"][i]["net_usd"].get<double>() - expected[i].second) <= 0.05);
    CHECK(std::abs(arb["top_k"][i]["fee_usd"].get<double>() - 34.92) <= 0.05);
  }
  CHECK(arb["count_profitable"] == 1);
  CHECK(arb["count"] == 7);
}

TEST_CASE("synthetic leader fixture gives the leader triple") {
  const auto result = run_pipeline(fixture_config("synthetic/analyze.conf"));
  const auto& r = result.report;
  CHECK(r["johansen"]["rank"] == 1);
  CHECK(r["is"]["midpoint"]["binance"].get<double>() > 0.9);
  CHECK(r["gg"]["verdict"] == "market1");
  CHECK(r["hy"]["llr"].get<double>() > 1.0);
  CHECK(r["hy"]["verdict"] == "market1");
  CHECK(r["hy"]["lead_lag_ms"] == 100);
  const auto& is = r["is"];
  for (const char* key : {"ordering_12", "ordering_21", "midpoint"}) {
    CHECK(is[key]["binance"].get<double>() + is[key]["uniswap"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("reports are deterministic and round-trip") {
  const auto cfg = fixture_config("synthetic/analyze.conf");
  const std::string a = emit_report(run_pipeline(cfg).report, ReportFormat::Json);
  const std::string b = emit_report(run_pipeline(cfg).report, ReportFormat::Json);
  CHECK(a == b);
  CHECK(a.back() == '\n');
  const std::string again = emit_report(Report::parse(a), ReportFormat::Json);
  CHECK(again == a);
}

TEST_CASE("markdown layout") {
  const auto report = run_pipeline(fixture_config("synthetic/analyze.conf")).report;
  const std::string md = emit_report(report, ReportFormat::Markdown);
  CHECK(md.find("| market | share_ordering_12 | share_ordering_21 |") != std::string::npos);
  CHECK(md.find("| Date | metric | leads |") != std::string::npos);
  CHECK(md.find("| full sample | IS | binance |") != std::string::npos);
  CHECK(md.find("| full sample | GG | binance |") != std::string::npos);
  CHECK(md.find("| full sample | HY | binance |") != std::string::npos);
}

TEST_CASE("rank zero skips IS and GG unless forced") {
  marketdata::SyntheticPairConfig sim;
  sim.alpha = {0.0, 0.0};
  sim.n = 2000;
  sim.seed = 3;
  const auto [x, y] = marketdata::simulate_cointegrated_pair(sim);
  const auto dir = temp_dir("walks");
  write(dir / "a.csv", marketdata::format_trades_csv(x));
  write(dir / "b.csv", marketdata::format_trades_csv(y));
  PipelineConfig cfg;
  cfg.market1.path = (dir / "a.csv").string();
  cfg.market2.path = (dir / "b.csv").string();
  cfg.analyses = {Analysis::Johansen, Analysis::Is, Analysis::Gg};
  const auto skipped = run_pipeline(cfg).report;
  REQUIRE(skipped["johansen"]["rank"] == 0);
  CHECK(skipped["is"]["skipped"] == "no cointegration");
  CHECK(skipped["gg"]["skipped"] == "no cointegration");
  CHECK(emit_report(skipped, ReportFormat::Markdown).find("skipped: no cointegration") !=
        std::string::npos);

  cfg.force_cointegration = true;
  const auto forced = run_pipeline(cfg).report;
  CHECK(forced["is"].contains("midpoint"));
  CHECK(forced["gg"].contains("verdict"));
}

TEST_CASE("artifacts carry the module CSV headers") {
  auto cfg = fixture_config("synthetic/analyze.conf");
  cfg.analyses = {Analysis::Hy};
  cfg.hy_profile_path = "profile.csv";
  const auto result = run_pipeline(cfg);
  REQUIRE(result.artifacts.size() == 1);
  CHECK(result.artifacts[0].first == "profile.csv");
  CHECK(result.artifacts[0].second.rfind("lag_ms,rho\n", 0) == 0);
  CHECK(result.report["hy"]["profile_path"] == "profile.csv");

  const auto depth = run_pipeline(fixture_config("v3/depth.conf"));
  CHECK(depth.report["v3_depth"]["rows"].size() == 3);
  auto pool = fixture_config("pool/replay.conf");
  pool.pool_csv_path = "snapshots.csv";
  const auto replay = run_pipeline(pool);
  REQUIRE(replay.artifacts.size() == 1);
  CHECK(replay.artifacts[0].second.rfind("event_index,x,y,lp_supply,lp_burned,k\n", 0) == 0);
  CHECK(replay.report["pool_replay"]["final"]["x"] == 550.0);
}

TEST_CASE("window slicing narrows the sample") {
  auto cfg = fixture_config("arb/arb.conf");
  cfg.window = marketdata::EventWindow{1709667365000, 1709667369000, "19:36:05-19:36:09"};
  const auto r = run_pipeline(cfg).report;
  CHECK(r["arb"]["count"] == 4);
  CHECK(r["metadata"]["config"]["window"]["label"] == "19:36:05-19:36:09");
}

}  // TEST_SUITE
