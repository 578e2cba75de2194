#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support/gen.hpp"
#include "walkcover/lattice.hpp"

using namespace walkcover;

TEST_CASE("norms are exact at the coordinate limit") {
  const std::int32_t big = 1 << 30;
  CHECK(norm_sq({big, big}) == 2 * (std::int64_t{1} << 60));
  CHECK(dist_sq({-big, 0}, {big, 0}) == 4 * (std::int64_t{1} << 60));
  CHECK(l1_dist({3, -4}, {0, 0}) == 7);
}

TEST_CASE("ordering is lexicographic") {
  CHECK(LatticeSite{0, 5} < LatticeSite{1, -5});
  CHECK(LatticeSite{1, -5} < LatticeSite{1, 0});
  std::ostringstream os;
  os << LatticeSite{-2, 7};
  CHECK(os.str() == "(-2,7)");
}

TEST_CASE("ceil_square is exact") {
  CHECK(ceil_square(1.0) == 1);
  CHECK(ceil_square(2.0) == 4);
  CHECK(ceil_square(1.5) == 3);
  CHECK(ceil_square(std::sqrt(2.0)) == 3);  // sqrt(2) rounds up in binary, so r^2 > 2
  CHECK(ceil_square(0.25) == 1);
  CHECK(ceil_square(1e-300) == 1);
  CHECK(ceil_square(46340.0) == 46340LL * 46340);
  CHECK_THROWS(ceil_square(0.0));
  CHECK_THROWS(ceil_square(-1.0));
  CHECK_THROWS(ceil_square(std::nan("")));

  SplitMix64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double r = 1 + rng.uniform() * 1000;
    const auto t = ceil_square(r);
    // t - 1 < r^2 <= t, checked in long double (64-bit mantissa holds r^2 of a 53-bit r
    // only approximately, so compare with a margin that is far below one unit).
    const long double sq = static_cast<long double>(r) * r;
    CHECK(static_cast<long double>(t) >= sq - 1e-9L);
    CHECK(static_cast<long double>(t - 1) < sq);
  }
}

TEST_CASE("isqrt") {
  for (std::int64_t v = 0; v < 5000; ++v) {
    const auto s = isqrt(v);
    CHECK(s * s <= v);
    CHECK((s + 1) * (s + 1) > v);
  }
  CHECK(isqrt((std::int64_t{1} << 62) - 1) == (std::int64_t{1} << 31) - 1);
}

TEST_CASE("disc membership and sizes") {
  CHECK(disc_sites({0, 0}, DiscRadius::from_integer(1)).size() == 1);
  CHECK(disc_sites({0, 0}, DiscRadius::from_integer(2)).size() == 9);
  CHECK(disc_sites({0, 0}, DiscRadius::from_integer(3)).size() == 25);
  CHECK(disc_sites({5, -5}, DiscRadius::from_real(1.0000001)).size() == 5);

  const auto r = DiscRadius::from_real(2.5);
  CHECK(r.threshold() == 7);
  CHECK(r.inside({2, 1}, {0, 0}));
  CHECK_FALSE(r.inside({2, 2}, {0, 0}));
  CHECK(r.extent() == 2);

  const auto sites = disc_sites({1, 1}, DiscRadius::from_integer(4));
  CHECK(std::is_sorted(sites.begin(), sites.end()));
  for (const auto& s : sites) CHECK(dist_sq(s, {1, 1}) < 16);
}

TEST_CASE("box intersection") {
  const Box a{0, 0, 4, 4};
  const Box b{3, -2, 9, 1};
  CHECK(intersect(a, b) == Box{3, 0, 4, 1});
  CHECK(intersect(a, Box{5, 5, 6, 6}).empty());
  CHECK(intersect(a, Box{}).empty());
  CHECK(a.area() == 25);
}
