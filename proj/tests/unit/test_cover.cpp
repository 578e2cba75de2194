#include <sstream>

#include "doctest.h"
#include "oracles/brute_cover.hpp"
#include "support/gen.hpp"
#include "walkcover/cover.hpp"
#include "walkcover/errors.hpp"

using namespace walkcover;

namespace {

VisitGrid filled_disc(std::int64_t r, std::uint32_t times = 1) {
  VisitGrid g;
  for (const auto& s : disc_sites({0, 0}, DiscRadius::from_integer(r)))
    for (std::uint32_t i = 0; i < times; ++i) g.record_visit(s);
  return g;
}

}  // namespace

TEST_CASE("distance field small cases") {
  // Box [0,3]x[0,4] fully visited except the origin.
  VisitGrid g;
  for (std::int32_t x = 0; x <= 3; ++x)
    for (std::int32_t y = 0; y <= 4; ++y)
      if (x != 0 || y != 0) g.record_visit({x, y});
  const auto f = distance_field(g, 1);
  CHECK(f.region == Box{0, 0, 3, 4});
  CHECK(f.at({0, 0}) == 0);
  CHECK(f.at({1, 0}) == 1);  // origin and ring both at distance 1

  const auto disc = filled_disc(3);
  CHECK(distance_field(disc, 1).at({0, 0}) == 9);
}

TEST_CASE("3-4-5 with a single deficient site") {
  VisitGrid g;
  for (std::int32_t x = -10; x <= 10; ++x)
    for (std::int32_t y = -10; y <= 10; ++y)
      if (x != 0 || y != 0) g.record_visit({x, y});
  CHECK(distance_field(g, 1).at({3, 4}) == 25);
}

TEST_CASE("distance field equals brute force on random 64x64 grids") {
  SplitMix64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const double fill = 0.5 + 0.5 * rng.uniform();
    const auto g = gen::random_block(rng, static_cast<std::int32_t>(gen::uniform_int(rng, -100, 100)),
                                     static_cast<std::int32_t>(gen::uniform_int(rng, -100, 100)), 64, 64, fill);
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(i % 3);
    REQUIRE(distance_field(g, k).values == oracle::field(g, k));
  }
}

TEST_CASE("banded transform is bit-identical to dense") {
  SplitMix64 rng(2);
  for (int i = 0; i < 40; ++i) {
    const auto w = static_cast<std::int32_t>(gen::uniform_int(rng, 1, 70));
    const auto h = static_cast<std::int32_t>(gen::uniform_int(rng, 1, 70));
    const auto g = gen::random_block(rng, -3, 5, w, h, 0.3 + 0.7 * rng.uniform());
    const auto dense = distance_field(g, 1);
    for (std::size_t budget : {std::size_t{1}, std::size_t{73}, std::size_t{500}, std::size_t{4096}}) {
      REQUIRE(distance_field(g, 1, budget).values == dense.values);
      REQUIRE(largest_covered_disc(g, 1, budget) == largest_covered_disc(g, 1));
    }
  }
}

TEST_CASE("ring around the box is a complete exterior source set") {
  // Distance from in-box points to the nearest lattice point outside the box, computed
  // against a wide frame of exterior sites, equals the distance to the one-site ring.
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto w = static_cast<std::int32_t>(gen::uniform_int(rng, 1, 12));
    const auto h = static_cast<std::int32_t>(gen::uniform_int(rng, 1, 12));
    const Box box{0, 0, w - 1, h - 1};
    std::vector<LatticeSite> ring, frame;
    for (std::int32_t y = -15; y < h + 15; ++y)
      for (std::int32_t x = -15; x < w + 15; ++x) {
        if (box.contains({x, y})) continue;
        frame.push_back({x, y});
        if (x >= -1 && x <= w && y >= -1 && y <= h) ring.push_back({x, y});
      }
    for (std::int32_t y = 0; y < h; ++y)
      for (std::int32_t x = 0; x < w; ++x)
        REQUIRE(oracle::nearest_sq({x, y}, ring) == oracle::nearest_sq({x, y}, frame));
  }
}

TEST_CASE("threshold errors") {
  VisitGrid g(5);
  g.record_visit({0, 0});
  CHECK_THROWS_AS(distance_field(g, 6), InvalidThreshold);
  CHECK_THROWS_AS(largest_covered_disc(g, 6), InvalidThreshold);
  CHECK_THROWS_AS(distance_field(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(distance_field(VisitGrid{}, 1), std::invalid_argument);
}

TEST_CASE("largest covered disc examples") {
  const auto origin = gen::grid_of({{0, 0}});
  const auto r0 = largest_covered_disc(origin, 1);
  CHECK(r0.center == LatticeSite{0, 0});
  CHECK(r0.radius_sq == 1);
  CHECK(r0.radius() == 1.0);

  const auto disc = filled_disc(3);
  const auto r1 = largest_covered_disc(disc, 1);
  CHECK(r1.center == LatticeSite{0, 0});
  CHECK(r1.radius_sq == 9);

  const auto r2 = largest_covered_disc(disc, 2);
  CHECK_FALSE(r2.center.has_value());
  CHECK(r2.radius_sq == 0);

  const auto twice = filled_disc(3, 2);
  CHECK(largest_covered_disc(twice, 2).radius_sq == 9);
}

TEST_CASE("ties go to the lexicographically smallest center") {
  // Two disjoint covered discs of radius 2.
  VisitGrid g;
  for (const auto& s : disc_sites({10, 0}, DiscRadius::from_integer(2))) g.record_visit(s);
  for (const auto& s : disc_sites({0, 10}, DiscRadius::from_integer(2))) g.record_visit(s);
  const auto r = largest_covered_disc(g, 1);
  CHECK(r.radius_sq == 4);
  CHECK(r.center == LatticeSite{0, 10});
}

TEST_CASE("covered disc matches brute force on walk grids") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto g = gen::grid_of(gen::path(seed, 2000 + 100 * seed));
    for (std::uint32_t k = 1; k <= 3; ++k) {
      const auto fast = largest_covered_disc(g, k);
      const auto slow = oracle::best_disc_k(g, k);
      REQUIRE(fast == slow);
      if (fast.center) {
        // D(center, radius) holds no deficient site; any larger disc does.
        const auto inner = DiscRadius::from_squared(fast.radius_sq);
        CHECK(g.deficient_sites(*fast.center, inner, k).empty());
        CHECK_FALSE(g.deficient_sites(*fast.center, DiscRadius::from_squared(fast.radius_sq + 1), k).empty());
      }
    }
  }
}

TEST_CASE("monotone in time and in k") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = gen::path(seed, 20'000);
    VisitGrid g;
    std::int64_t last = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      g.record_visit(p[i]);
      if (i % 2000 == 0 || i + 1 == p.size()) {
        const auto now = largest_covered_disc(g, 1).radius_sq;
        CHECK(now >= last);
        last = now;
      }
    }
    std::int64_t prev = largest_covered_disc(g, 1).radius_sq;
    for (std::uint32_t k = 2; k <= 6; ++k) {
      const auto cur = largest_covered_disc(g, k).radius_sq;
      CHECK(cur <= prev);
      prev = cur;
    }
    CHECK(origin_covered_radius_sq(g) <= largest_covered_disc(g, 1).radius_sq);
  }
}

TEST_CASE("multi-walk covered disc") {
  const std::vector<VisitGrid> none;
  CHECK_THROWS_AS(largest_covered_disc_multi(none), std::invalid_argument);

  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto a = gen::grid_of(gen::path(seed, 3000));
    const auto b = gen::grid_of(gen::path(seed + 1000, 3000));
    const std::vector<VisitGrid> one{a};
    CHECK(largest_covered_disc_multi(one) == largest_covered_disc(a, 1));
    const std::vector<VisitGrid> same{a, a};
    CHECK(largest_covered_disc_multi(same) == largest_covered_disc(a, 1));
    const std::vector<VisitGrid> pair{a, b};
    const auto fast = largest_covered_disc_multi(pair);
    REQUIRE(fast == oracle::best_disc({&a, &b}));
    CHECK(fast.radius_sq <= std::min(largest_covered_disc(a, 1).radius_sq, largest_covered_disc(b, 1).radius_sq));
    CHECK(largest_covered_disc_multi(pair, 97) == fast);
  }

  // Disjoint boxes share no covered site.
  const auto far = gen::grid_of({{1000, 1000}});
  const std::vector<VisitGrid> apart{filled_disc(3), far};
  CHECK_FALSE(largest_covered_disc_multi(apart).center.has_value());
}

TEST_CASE("origin covered radius") {
  CHECK(origin_covered_radius(gen::grid_of({{0, 0}})) == 1.0);
  CHECK(origin_covered_radius(filled_disc(3)) == 3.0);
  CHECK(origin_covered_radius_sq(filled_disc(40)) == 1600);
  CHECK(origin_covered_radius_sq(gen::grid_of({{1, 0}})) == 0);
}

TEST_CASE("cover time") {
  CHECK(cover_time(std::vector<LatticeSite>{{0, 0}}, {0, 0}, DiscRadius::from_integer(1), 1) == 0);

  // Twelve steps through the 3x3 block D(0,2); the last new site arrives at index 10.
  const std::vector<LatticeSite> walk12{{0, 0},  {1, 0},  {1, 1},  {0, 1},  {-1, 1}, {-1, 0}, {-1, -1},
                                        {0, -1}, {0, 0},  {1, 0},  {1, -1}, {1, 0},  {0, 0}};
  CHECK(cover_time(walk12, {0, 0}, DiscRadius::from_integer(2), 1) == 10);
  CHECK(cover_time(walk12, {0, 0}, DiscRadius::from_integer(3), 1) == std::nullopt);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = gen::path(seed, 1500);
    const auto r = DiscRadius::from_real(1.5 + 0.1 * static_cast<double>(seed % 10));
    const auto c1 = cover_time(p, {0, 1}, r, 1);
    const auto c2 = cover_time(p, {0, 1}, r, 2);
    REQUIRE(c1 == oracle::cover_time(p, {0, 1}, r, 1));
    REQUIRE(c2 == oracle::cover_time(p, {0, 1}, r, 2));
    if (c1 && c2) CHECK(*c1 <= *c2);
  }
}

TEST_CASE("V(n)") {
  const std::vector<LatticeSite> p{{0, 0}, {1, 0}, {0, 0}, {1, 0}, {2, 0}};
  CHECK(v_of_n(p, 1) == 3);
  CHECK(v_of_n(p, 0) == 1);
  CHECK(v_of_n(p, 4) == std::nullopt);
  CHECK_THROWS_AS(v_of_n(p, 5), std::out_of_range);

  const auto w = gen::path(17, 800);
  for (std::size_t n = 0; n < w.size(); n += 7) {
    const auto v = v_of_n(w, n);
    REQUIRE(v == oracle::v_of_n(w, n));
    if (n + 1 < w.size() && oracle::v_of_n(std::vector<LatticeSite>(w.begin(), w.begin() + n + 2), n) == 1)
      CHECK(v == 1);
  }
}

TEST_CASE("inside covered disc") {
  const auto disc = filled_disc(3);
  CHECK(inside_covered_disc(disc, {0, 0}, DiscRadius::from_integer(3)));
  CHECK_FALSE(inside_covered_disc(disc, {0, 0}, DiscRadius::from_integer(4)));
  // Brute force settles the off-center case: (0,0) is within 3 of (2,0) and has clearance 3.
  CHECK(oracle::inside_covered_disc(disc, {2, 0}, DiscRadius::from_integer(3)));
  CHECK(inside_covered_disc(disc, {2, 0}, DiscRadius::from_integer(3)));
  CHECK_FALSE(inside_covered_disc(disc, {3, 0}, DiscRadius::from_integer(3)));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = gen::path(seed, 4000);
    const auto g = gen::grid_of(p);
    for (double rho : {1.0, 1.5, 2.0, 2.9, 4.0}) {
      const auto r = DiscRadius::from_real(rho);
      for (std::size_t i = 0; i < p.size(); i += 397)
        REQUIRE(inside_covered_disc(g, p[i], r) == oracle::inside_covered_disc(g, p[i], r));
    }
  }
}

TEST_CASE("field csv") {
  std::ostringstream os;
  write_csv(os, distance_field(gen::grid_of({{0, 0}}), 1));
  CHECK(os.str() == "x,y,dist_sq\n0,0,1\n");
}
