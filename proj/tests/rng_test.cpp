#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <set>

#include "oracles.hpp"
#include "tcap/rng.hpp"

using namespace tcap;

namespace {

template <typename Draw>
std::vector<double> draw_many(std::size_t n, std::uint64_t seed, Draw draw) {
  CounterRng rng(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = draw(rng);
  return v;
}

}  // namespace

TEST_SUITE("rng") {

TEST_CASE("philox known-answer vectors") {
  using Block = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of seed and stream id") {
  CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    seen.insert(x);
    seen.insert(c());
    seen.insert(d());
  }
  CHECK(seen.size() == 3000);
}

TEST_CASE("mix_seed separates salts") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) {
    for (std::uint64_t salt = 0; salt < 100; ++salt) seen.insert(mix_seed(s, salt));
  }
  CHECK(seen.size() == 10000);
}

TEST_CASE("uniform draws lie in (0, 1] and are uniform") {
  const auto u = draw_many(20000, 1, [](CounterRng& r) { return r.uniform(); });
  for (double x : u) {
    REQUIRE(x > 0.0);
    REQUIRE(x <= 1.0);
  }
  CHECK(oracle::cramer_von_mises(u) < oracle::kCvm1pct);
}

TEST_CASE("exponential, normal and complex normal moments") {
  constexpr std::size_t n = 200000;
  const auto e = oracle::summarize(draw_many(n, 2, [](CounterRng& r) { return r.exponential(); }));
  CHECK(std::abs(e.mean - 1.0) < 4 * e.se);
  const auto g = draw_many(n, 3, [](CounterRng& r) { return r.normal(); });
  const auto gm = oracle::summarize(g);
  CHECK(std::abs(gm.mean) < 4 * gm.se);
  std::vector<double> sq;
  for (double x : g) sq.push_back(x * x);
  const auto v = oracle::summarize(sq);
  CHECK(std::abs(v.mean - 1.0) < 4 * v.se);
  const auto z = oracle::summarize(
      draw_many(n, 4, [](CounterRng& r) { return std::norm(r.complex_normal()); }));
  CHECK(std::abs(z.mean - 1.0) < 4 * z.se);
  CHECK(oracle::cramer_von_mises(g, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }) <
        oracle::kCvm1pct);
}

TEST_CASE("poisson mean and variance") {
  for (double mean : {0.0, 0.3, 3.5, 29.0, 314.0, 5000.0}) {
    CAPTURE(mean);
    const auto k =
        draw_many(100000, 5, [&](CounterRng& r) { return static_cast<double>(r.poisson(mean)); });
    const auto s = oracle::summarize(k);
    if (mean == 0.0) {
      CHECK(s.mean == 0.0);
      continue;
    }
    CHECK(std::abs(s.mean - mean) < 4 * s.se);
    const double var = s.se * s.se * static_cast<double>(k.size());
    CHECK(var == doctest::Approx(mean).epsilon(0.03));
  }
}

TEST_CASE("gamma sampler matches the Gamma law") {
  for (double shape : {1.0, 1.5, 2.0, 4.0, 12.0}) {
    CAPTURE(shape);
    const GammaSampler g(shape);
    const auto x = draw_many(100000, 6, [&](CounterRng& r) { return g(r); });
    CHECK(oracle::cramer_von_mises(x, [&](double v) { return boost::math::gamma_p(shape, v); }) <
          oracle::kCvm1pct);
  }
  CHECK_THROWS(GammaSampler(0.5));
}

}  // TEST_SUITE
