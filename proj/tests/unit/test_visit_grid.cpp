#include <filesystem>
#include <map>

#include "doctest.h"
#include "support/gen.hpp"
#include "walkcover/errors.hpp"
#include "walkcover/visit_grid.hpp"

using namespace walkcover;

TEST_CASE("counter semantics") {
  VisitGrid g;
  CHECK(g.empty());
  CHECK(g.bounding_box().empty());
  CHECK(g.record_visit({0, 0}) == 1);
  CHECK(g.record_visit({0, 0}) == 2);
  CHECK(g.visit_count({0, 0}) == 2);
  CHECK(g.visit_count({1'000'000, -7}) == 0);
  CHECK(g.total_steps() == 1);
}

TEST_CASE("saturation") {
  VisitGrid g(3);
  for (int i = 0; i < 5; ++i) g.record_visit({-1, -1});
  CHECK(g.visit_count({-1, -1}) == 3);
  CHECK(g.saturated());
  CHECK_THROWS_AS(VisitGrid(0), std::invalid_argument);
  CHECK_THROWS_AS(VisitGrid(70000), std::invalid_argument);
}

TEST_CASE("loop path") {
  const auto g = gen::grid_of({{0, 0}, {1, 0}, {0, 0}});
  CHECK(g.visit_count({0, 0}) == 2);
  CHECK(g.visit_count({1, 0}) == 1);
  CHECK(gen::grid_of({{0, 0}}).visit_count({0, 0}) == 1);
}

TEST_CASE("conservation and naive tally agreement") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = gen::path(seed, seed == 0 ? 10'000 : 5'000);
    const auto g = gen::grid_of(p);
    std::map<LatticeSite, std::uint32_t> tally;
    for (const auto& s : p) ++tally[s];
    std::uint64_t sum = 0;
    for (const auto& [s, c] : tally) {
      CHECK(g.visit_count(s) == c);
      CHECK(g.bounding_box().contains(s));
      sum += g.visit_count(s);
    }
    CHECK(sum == g.total_steps() + 1);
    CHECK(g.total_steps() == p.size() - 1);
  }
}

TEST_CASE("deficient sites") {
  const auto only_origin = gen::grid_of({{0, 0}});
  const auto d1 = only_origin.deficient_sites({0, 0}, DiscRadius::from_integer(2), 1);
  CHECK(d1.size() == 8);
  CHECK(std::find(d1.begin(), d1.end(), LatticeSite{0, 0}) == d1.end());
  CHECK(only_origin.deficient_sites({0, 0}, DiscRadius::from_integer(2), 2).size() == 9);

  VisitGrid covered;
  for (const auto& s : disc_sites({0, 0}, DiscRadius::from_integer(3))) covered.record_visit(s);
  CHECK(covered.deficient_sites({0, 0}, DiscRadius::from_integer(3), 1).empty());

  VisitGrid capped(4);
  CHECK_THROWS_AS(capped.deficient_sites({0, 0}, DiscRadius::from_integer(2), 5), InvalidThreshold);
}

TEST_CASE("deficient sites are monotone in k") {
  const auto g = gen::grid_of(gen::path(42, 3000));
  const auto r = DiscRadius::from_real(9.5);
  for (std::uint32_t k = 1; k < 8; ++k) {
    const auto a = g.deficient_sites({1, 2}, r, k);
    const auto b = g.deficient_sites({1, 2}, r, k + 1);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("copy and move") {
  auto g = gen::grid_of(gen::path(8, 2000));
  VisitGrid copy = g;
  CHECK(copy == g);
  copy.record_visit({0, 0});
  CHECK_FALSE(copy == g);
  VisitGrid moved = std::move(copy);
  CHECK(copy.empty());
  copy.record_visit({500, 500});  // moved-from grid stays usable
  CHECK(copy.visit_count({500, 500}) == 1);
  CHECK(moved.visit_count({0, 0}) == g.visit_count({0, 0}) + 1);
}

TEST_CASE("snapshot round trips") {
  VisitGrid empty(100, 5);
  CHECK(decode_snapshot(encode_snapshot(empty)) == empty);

  VisitGrid g(VisitGrid::kMaxCap, 77);
  for (const auto& s : gen::path(77, 1'000'000)) g.record_visit(s);
  const auto bytes = encode_snapshot(g);
  const auto back = decode_snapshot(bytes);
  CHECK(back == g);
  CHECK(back.total_steps() == 1'000'000);
  CHECK(back.seed() == 77);

  VisitGrid sat(2, 1);
  for (int i = 0; i < 3; ++i) sat.record_visit({-100, 3});
  const auto sat_back = decode_snapshot(encode_snapshot(sat));
  CHECK(sat_back.saturated());
  CHECK(sat_back.cap() == 2);

  const auto path = std::filesystem::temp_directory_path() / "walkcover_grid_test.bin";
  save_snapshot(g, path);
  CHECK(load_snapshot(path) == g);
  std::filesystem::remove(path);
}

TEST_CASE("snapshot errors") {
  auto bytes = encode_snapshot(gen::grid_of(gen::path(3, 500)));
  auto kind_of = [](std::vector<std::uint8_t> b) {
    try {
      decode_snapshot(b);
    } catch (const SnapshotError& e) {
      return static_cast<int>(e.kind);
    }
    return -1;
  };
  using K = SnapshotError::Kind;

  auto corrupt = bytes;
  corrupt[40] ^= 0x01;
  CHECK(kind_of(corrupt) == static_cast<int>(K::checksum_mismatch));

  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  CHECK(kind_of(truncated) == static_cast<int>(K::truncated));
  CHECK(kind_of({1, 2, 3}) == static_cast<int>(K::truncated));

  auto magic = bytes;
  magic[0] = 'X';
  CHECK(kind_of(magic) == static_cast<int>(K::bad_magic));

  auto version = bytes;
  version[8] = 9;
  CHECK(kind_of(version) == static_cast<int>(K::version_mismatch));

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK(kind_of(trailing) == static_cast<int>(K::malformed));
}
