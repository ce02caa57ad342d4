#include <doctest.h>

#include <cmath>
#include <random>

#include "pricelab/error.hpp"
#include "pricelab/leadlag.hpp"
#include "pricelab/marketdata.hpp"

using namespace pricelab;
using namespace pricelab::leadlag;
using marketdata::Observation;
using marketdata::TickSeries;

namespace {

// O(n m) double loop over every interval pair.
double naive_cross_sum(const Increments& x, const Increments& y, std::int64_t lag) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.r.size(); ++i) {
    for (std::size_t j = 0; j < y.r.size(); ++j) {
      const bool overlap = x.t[i] < y.t[j + 1] - lag && y.t[j] - lag < x.t[i + 1];
      if (overlap) sum += x.r[i] * y.r[j];
    }
  }
  return sum;
}

TickSeries from_returns(const std::vector<double>& r, std::int64_t step = 1,
                        std::int64_t start = 0) {
  std::vector<Observation> obs{{start, 1.0}};
  double log_p = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    log_p += r[k];
    obs.push_back({start + static_cast<std::int64_t>(k + 1) * step, std::exp(log_p)});
  }
  return TickSeries("m", std::move(obs));
}

TickSeries random_walk(std::mt19937_64& rng, std::size_t n, int max_gap, std::int64_t start = 0) {
  std::uniform_int_distribution<int> gap(1, max_gap);
  std::normal_distribution<double> z(0.0, 0.001);
  std::vector<Observation> obs;
  std::int64_t t = start;
  double p = 100.0;
  for (std::size_t k = 0; k < n; ++k) {
    t += gap(rng);
    p *= std::exp(z(rng));
    obs.push_back({t, p});
  }
  return TickSeries("m", std::move(obs));
}

}  // namespace

TEST_SUITE("leadlag") {

TEST_CASE("worked example columns") {
  const auto x_tick = from_returns({0.01, 0.02, 0.03, 0.04, 0.05});
  const auto y_tick = from_returns({0.02, -0.01, 0.01, -0.02, 0.03});
  CHECK(hy_corr(x_tick, y_tick) == doctest::Approx(0.309).epsilon(0.001 / 0.309));

  // Trade-time columns: the exact value is 0.001 / sqrt(0.0149 * 0.0003).
  const auto x_trade = from_returns({0.01, 0.02, 0.0, 0.0, 0.12});
  const auto y_trade = from_returns({0.0, -0.01, 0.01, 0.0, 0.01});
  CHECK(hy_corr(x_trade, y_trade) == doctest::Approx(0.001 / std::sqrt(0.0149 * 0.0003)).epsilon(1e-9));

  Increments xi{{0, 1, 2, 3, 4, 5}, {0.01, 0.02, 0.03, 0.04, 0.05}};
  Increments yi{{0, 1, 2, 3, 4, 5}, {0.02, -0.01, 0.01, -0.02, 0.03}};
  CHECK(hy_corr(xi, yi) == doctest::Approx(0.001 / std::sqrt(0.0055 * 0.0019)).epsilon(1e-12));
}

TEST_CASE("identical series") {
  std::mt19937_64 rng(1);
  const auto x = random_walk(rng, 300, 50);
  CHECK(hy_corr(x, x) == doctest::Approx(1.0).epsilon(1e-14));
  // Lags are whole sampling steps, so every nonzero lag pairs distinct
  // increments. Sub-step lags also pair each increment with its neighbours
  // and may exceed 1.
  std::normal_distribution<double> z(0.0, 0.01);
  std::vector<double> r(500);
  for (double& v : r) v = z(rng);
  const auto regular = from_returns(r, 1000);
  CHECK(lead_lag_profile(regular, regular, LagGrid::uniform(1000, 20000)).hy_lead_lag_ms == 0);
}

TEST_CASE("sweep equals the naive double loop") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 60; ++k) {
    const auto x = increments(random_walk(rng, 150 + k, 40));
    const auto y = increments(random_walk(rng, 200 - k, 25, 37));
    for (std::int64_t lag : {-700, -55, -5, 0, 5, 20, 333}) {
      CHECK(hy_cross_sum(x, y, lag) == naive_cross_sum(x, y, lag));
    }
  }
}

TEST_CASE("synchronous grids reduce to the Pearson correlation") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int k = 0; k < 30; ++k) {
    std::vector<double> a(200);
    std::vector<double> b(200);
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = 0.01 * z(rng);
      b[i] = 0.5 * a[i] + 0.01 * z(rng);
      ma += a[i];
      mb += b[i];
    }
    ma /= 200;
    mb /= 200;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] -= ma;
      b[i] -= mb;
    }
    // Pearson on the increments as realised by the price path.
    const auto ia = increments(from_returns(a, 1000));
    const auto ib = increments(from_returns(b, 1000));
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    const double n = static_cast<double>(ia.r.size());
    for (std::size_t i = 0; i < ia.r.size(); ++i) {
      sa += ia.r[i];
      sb += ib.r[i];
    }
    for (std::size_t i = 0; i < ia.r.size(); ++i) {
      const double da = ia.r[i] - sa / n;
      const double db = ib.r[i] - sb / n;
      saa += da * da;
      sbb += db * db;
      sab += da * db;
    }
    CHECK(std::abs(hy_corr(from_returns(a, 1000), from_returns(b, 1000)) -
                   sab / std::sqrt(saa * sbb)) < 1e-12);
  }
}

TEST_CASE("scale invariance") {
  std::mt19937_64 rng(4);
  const auto x = random_walk(rng, 300, 30);
  const auto y = random_walk(rng, 250, 40);
  std::vector<Observation> scaled(y.observations().begin(), y.observations().end());
  for (auto& o : scaled) o.price *= 3.7;
  const double base = hy_corr_lagged(x, y, 15);
  CHECK(std::abs(hy_corr_lagged(x, TickSeries("m", scaled), 15) - base) < 1e-12);
}

TEST_CASE("role swap is exact") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto x = random_walk(rng, 200, 30);
    const auto y = random_walk(rng, 180, 35, 11);
    for (std::int64_t lag : {-100, -10, 0, 25, 95}) {
      CHECK(hy_corr_lagged(x, y, lag) == hy_corr_lagged(y, x, -lag));
    }
    CHECK(hy_corr_lagged(x, y, 0) == hy_corr(x, y));
  }
}

TEST_CASE("zero-increment points that add no overlaps are inert") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> gap(1, 20);
  std::normal_distribution<double> z(0.0, 0.01);
  std::vector<Observation> xs;
  std::vector<Observation> ys;
  double p = 1.0;
  for (std::int64_t t = 0; t < 4000; t += 2 * gap(rng)) xs.push_back({t, p *= std::exp(z(rng))});
  for (std::int64_t t = 0; t < 4000; t += 4 * gap(rng)) ys.push_back({t, p *= std::exp(z(rng))});
  const TickSeries x("x", xs);
  const TickSeries y("y", ys);
  // Odd timestamps never coincide with an X endpoint.
  std::vector<Observation> padded;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    padded.push_back(ys[k]);
    if (k + 1 < ys.size()) padded.push_back({ys[k].t_ms + 1, ys[k].price});
  }
  CHECK(std::abs(hy_corr(x, TickSeries("y", padded)) - hy_corr(x, y)) < 1e-12);
}

TEST_CASE("a delayed copy peaks at its delay") {
  std::mt19937_64 rng(7);
  const auto x = random_walk(rng, 2000, 30);
  std::vector<Observation> shifted(x.observations().begin(), x.observations().end());
  for (auto& o : shifted) o.t_ms += 100;
  const TickSeries y("y", shifted);
  CHECK(hy_corr_lagged(x, y, 100) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(hy_corr_lagged(x, y, -100)) < 0.5);
  const auto rep = lead_lag_profile(x, y);
  CHECK(rep.hy_lead_lag_ms == 100);
  CHECK(rep.llr > 1.0);
}

TEST_CASE("pure leader from the generator") {
  marketdata::SyntheticPairConfig cfg;
  cfg.mode = marketdata::SyntheticMode::PureLeader;
  cfg.n = 5000;
  cfg.interval_ms = 1;
  cfg.leader_lag_ms = 100;
  cfg.noise_sd = {1.0, 0.3};
  const auto [x, y] = marketdata::simulate_cointegrated_pair(cfg);
  const LagGrid grid;
  const auto xy = lead_lag_profile(x, y, grid);
  const auto yx = lead_lag_profile(y, x, grid);
  CHECK(std::llabs(xy.hy_lead_lag_ms - 100) <= 5);
  CHECK(xy.llr > 1.0);
  CHECK(yx.llr < 1.0);
  CHECK(xy.llr * yx.llr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(xy.profile.size() == grid.size());
  CHECK(xy.max_abs_corr > 0.5);
}

TEST_CASE("lag grids") {
  const LagGrid def;
  CHECK(def.contains(0));
  CHECK(def.contains(-10000));
  CHECK(def.contains(495));
  CHECK(def.contains(700));
  CHECK(!def.contains(650));
  CHECK(def.size() == 2 * (100 + 5 + 3) + 1);
  CHECK(LagGrid({-5, 5}).size() == 3);
  CHECK_THROWS_AS(LagGrid({-5, 10}), Error);
  CHECK_THROWS_AS(LagGrid({5, -5}), Error);
  CHECK_THROWS_AS(LagGrid({-5, -5, 5}), Error);
  CHECK_THROWS_AS(LagGrid(std::vector<std::int64_t>{}), Error);
  CHECK(LagGrid::uniform(10, 30).size() == 7);
  CHECK_THROWS_AS(LagGrid::uniform(0, 30), Error);
}

TEST_CASE("ties prefer small then positive lags") {
  // One increment per series; every lag whose windows overlap gives the
  // same correlation.
  const TickSeries x("x", {{0, 1.0}, {1000, 2.0}});
  const TickSeries y("y", {{0, 1.0}, {1000, 2.0}});
  const auto rep = lead_lag_profile(x, y, LagGrid::uniform(100, 500));
  CHECK(rep.hy_lead_lag_ms == 0);
  CHECK(rep.llr == doctest::Approx(1.0));

  const TickSeries y2("y", {{0, 1.0}, {1000, 2.0}, {5000, 2.0}});
  const auto r2 = lead_lag_profile(x, y2, LagGrid({-4000, 4000}));
  CHECK(r2.hy_lead_lag_ms == 0);
}

TEST_CASE("degenerate inputs") {
  const TickSeries flat("f", {{0, 1.0}, {10, 1.0}, {20, 1.0}});
  const TickSeries one("o", {{0, 1.0}});
  const TickSeries x("x", {{0, 1.0}, {10, 2.0}});
  CHECK_THROWS_AS(hy_corr(flat, x), Error);
  CHECK_THROWS_AS(hy_corr(one, x), Error);
  // Y only moves after X ends: no negative-lag overlap at all.
  const TickSeries late("l", {{0, 1.0}, {100, 1.0}, {110, 2.0}});
  const auto rep = lead_lag_profile(x, late, LagGrid({-100, 100}));
  CHECK(std::isinf(rep.llr));
  REQUIRE(!rep.flags.empty());
  CHECK(rep.flags.back() == "zero_denominator");
}

}  // TEST_SUITE
