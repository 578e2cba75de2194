#include "walkcover/visit_grid.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "walkcover/errors.hpp"

namespace walkcover {

VisitGrid::VisitGrid(std::uint32_t cap, std::uint64_t seed) : cap_(cap), seed_(seed) {
  if (cap == 0 || cap > kMaxCap) throw std::invalid_argument("VisitGrid: cap must be in [1, 65535]");
}

VisitGrid::VisitGrid(const VisitGrid& other)
    : cap_(other.cap_),
      seed_(other.seed_),
      visits_(other.visits_),
      saturated_(other.saturated_),
      box_(other.box_) {
  tiles_.reserve(other.tiles_.size());
  for (const auto& [k, t] : other.tiles_) tiles_.emplace(k, std::make_unique<Tile>(*t));
}

VisitGrid::VisitGrid(VisitGrid&& other) noexcept
    : tiles_(std::move(other.tiles_)),
      cap_(other.cap_),
      seed_(other.seed_),
      visits_(other.visits_),
      saturated_(other.saturated_),
      box_(other.box_),
      cached_key_(other.cached_key_),
      cached_tile_(other.cached_tile_) {
  other.tiles_.clear();
  other.cached_tile_ = nullptr;
  other.visits_ = 0;
  other.box_ = Box{};
}

VisitGrid& VisitGrid::operator=(VisitGrid&& other) noexcept {
  if (this != &other) {
    tiles_ = std::move(other.tiles_);
    cap_ = other.cap_;
    seed_ = other.seed_;
    visits_ = other.visits_;
    saturated_ = other.saturated_;
    box_ = other.box_;
    cached_key_ = other.cached_key_;
    cached_tile_ = other.cached_tile_;
    other.tiles_.clear();
    other.cached_tile_ = nullptr;
    other.visits_ = 0;
    other.box_ = Box{};
  }
  return *this;
}

VisitGrid& VisitGrid::operator=(const VisitGrid& other) {
  if (this != &other) {
    VisitGrid copy(other);
    *this = std::move(copy);
  }
  return *this;
}

VisitGrid::Tile& VisitGrid::tile_for_write(std::int32_t tx, std::int32_t ty) {
  const std::uint64_t k = key(tx, ty);
  if (cached_tile_ != nullptr && cached_key_ == k) return *cached_tile_;
  auto& slot = tiles_[k];
  if (!slot) {
    slot = std::make_unique<Tile>();
    slot->fill(0);
  }
  cached_key_ = k;
  cached_tile_ = slot.get();
  return *slot;
}

std::uint32_t VisitGrid::record_visit(const LatticeSite& s) {
  Tile& t = tile_for_write(s.x >> kTileShift, s.y >> kTileShift);
  auto& c = t[((s.y & kTileMask) << kTileShift) | (s.x & kTileMask)];
  if (c < cap_) {
    ++c;
  } else {
    saturated_ = true;
  }
  if (visits_ == 0) {
    box_ = Box{s.x, s.y, s.x, s.y};
  } else {
    box_.min_x = std::min(box_.min_x, s.x);
    box_.max_x = std::max(box_.max_x, s.x);
    box_.min_y = std::min(box_.min_y, s.y);
    box_.max_y = std::max(box_.max_y, s.y);
  }
  ++visits_;
  return c;
}

const VisitGrid::Tile* VisitGrid::find_tile(std::int32_t tx, std::int32_t ty) const {
  auto it = tiles_.find(key(tx, ty));
  return it == tiles_.end() ? nullptr : it->second.get();
}

std::uint32_t VisitGrid::visit_count(const LatticeSite& s) const {
  const Tile* t = find_tile(s.x >> kTileShift, s.y >> kTileShift);
  if (t == nullptr) return 0;
  return (*t)[((s.y & kTileMask) << kTileShift) | (s.x & kTileMask)];
}

std::vector<LatticeSite> VisitGrid::deficient_sites(const LatticeSite& center, const DiscRadius& r,
                                                    std::uint32_t k) const {
  if (k > cap_)
    throw InvalidThreshold("deficient_sites: threshold " + std::to_string(k) + " exceeds cap " +
                           std::to_string(cap_));
  std::vector<LatticeSite> out;
  for (const LatticeSite& p : disc_sites(center, r)) {
    if (visit_count(p) < k) out.push_back(p);
  }
  return out;
}

std::vector<VisitGrid::TileRef> VisitGrid::sorted_tiles() const {
  std::vector<TileRef> out;
  out.reserve(tiles_.size());
  for (const auto& [k, t] : tiles_) {
    out.push_back(TileRef{static_cast<std::int32_t>(static_cast<std::uint32_t>(k >> 32)),
                          static_cast<std::int32_t>(static_cast<std::uint32_t>(k)), t.get()});
  }
  std::sort(out.begin(), out.end(), [](const TileRef& a, const TileRef& b) {
    return a.tile_y != b.tile_y ? a.tile_y < b.tile_y : a.tile_x < b.tile_x;
  });
  return out;
}

bool operator==(const VisitGrid& a, const VisitGrid& b) {
  if (a.cap_ != b.cap_ || a.seed_ != b.seed_ || a.visits_ != b.visits_ ||
      a.saturated_ != b.saturated_ || !(a.box_ == b.box_))
    return false;
  // An all-zero allocated tile equals an absent tile.
  auto covers = [](const VisitGrid& x, const VisitGrid& y) {
    for (const auto& [k, t] : x.tiles_) {
      auto it = y.tiles_.find(k);
      if (it == y.tiles_.end()) {
        if (std::any_of(t->begin(), t->end(), [](std::uint16_t c) { return c != 0; })) return false;
      } else if (*it->second != *t) {
        return false;
      }
    }
    return true;
  };
  return covers(a, b) && covers(b, a);
}

// ---------------------------------------------------------------------------
// Snapshot encoding

namespace {

constexpr char kMagic[8] = {'W', 'C', 'V', 'G', 'R', 'I', 'D', '\0'};
constexpr std::size_t kHeaderBytes = 16;

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <class T>
  void put(T v) {
    auto u = static_cast<std::make_unsigned_t<T>>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(u & 0xff));
      if constexpr (sizeof(T) > 1) u >>= 8;
    }
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size())
      throw SnapshotError(SnapshotError::Kind::malformed, "snapshot payload ends mid-field");
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const VisitGrid& grid) {
  Writer w;
  w.put<std::uint64_t>(grid.seed());
  w.put<std::uint64_t>(grid.total_visits());
  w.put<std::uint32_t>(VisitGrid::kTileSize);
  w.put<std::uint32_t>(grid.cap());
  w.put<std::uint32_t>(grid.saturated() ? 1u : 0u);
  const Box& b = grid.bounding_box();
  w.put<std::int32_t>(b.min_x);
  w.put<std::int32_t>(b.min_y);
  w.put<std::int32_t>(b.max_x);
  w.put<std::int32_t>(b.max_y);
  const auto tiles = grid.sorted_tiles();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tiles.size()));
  std::vector<std::pair<std::uint16_t, std::uint16_t>> runs;
  for (const auto& ref : tiles) {
    runs.clear();
    const auto& cells = *ref.tile;
    std::size_t i = 0;
    while (i < cells.size()) {
      std::size_t j = i + 1;
      while (j < cells.size() && cells[j] == cells[i]) ++j;
      runs.emplace_back(cells[i], static_cast<std::uint16_t>(j - i));
      i = j;
    }
    w.put<std::int32_t>(ref.tile_x);
    w.put<std::int32_t>(ref.tile_y);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(runs.size()));
    for (auto [count, len] : runs) {
      w.put<std::uint16_t>(count);
      w.put<std::uint16_t>(len);
    }
  }
  const std::vector<std::uint8_t> payload = std::move(w.bytes());
  if (payload.size() > 0xffffffffULL) throw std::length_error("snapshot payload exceeds 4 GiB");

  Writer out;
  for (char c : kMagic) out.put<std::uint8_t>(static_cast<std::uint8_t>(c));
  out.put<std::uint32_t>(kSnapshotVersion);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(payload.size()));
  auto& bytes = out.bytes();
  bytes.insert(bytes.end(), payload.begin(), payload.end());
  const std::uint64_t sum = fnv1a(bytes);
  out.put<std::uint64_t>(sum);
  return std::move(out.bytes());
}

VisitGrid decode_snapshot(std::span<const std::uint8_t> bytes) {
  using Kind = SnapshotError::Kind;
  if (bytes.size() < kHeaderBytes) throw SnapshotError(Kind::truncated, "snapshot shorter than header");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw SnapshotError(Kind::bad_magic, "not a visit-grid snapshot");
  Reader header(bytes.subspan(8, 8));
  const auto version = header.get<std::uint32_t>();
  const auto payload_len = header.get<std::uint32_t>();
  if (version != kSnapshotVersion)
    throw SnapshotError(Kind::version_mismatch,
                        "snapshot version " + std::to_string(version) + ", expected " +
                            std::to_string(kSnapshotVersion));
  const std::size_t expected = kHeaderBytes + payload_len + 8;
  if (bytes.size() < expected) throw SnapshotError(Kind::truncated, "snapshot payload truncated");
  if (bytes.size() > expected) throw SnapshotError(Kind::malformed, "trailing bytes after snapshot");
  Reader trailer(bytes.subspan(expected - 8));
  if (trailer.get<std::uint64_t>() != fnv1a(bytes.first(expected - 8)))
    throw SnapshotError(Kind::checksum_mismatch, "snapshot checksum mismatch");

  Reader r(bytes.subspan(kHeaderBytes, payload_len));
  const auto seed = r.get<std::uint64_t>();
  const auto visits = r.get<std::uint64_t>();
  const auto tile_size = r.get<std::uint32_t>();
  const auto cap = r.get<std::uint32_t>();
  const auto flags = r.get<std::uint32_t>();
  if (tile_size != static_cast<std::uint32_t>(VisitGrid::kTileSize))
    throw SnapshotError(Kind::malformed, "unsupported tile size " + std::to_string(tile_size));
  if (cap == 0 || cap > VisitGrid::kMaxCap) throw SnapshotError(Kind::malformed, "invalid cap");
  VisitGrid g(cap, seed);
  g.visits_ = visits;
  g.saturated_ = (flags & 1u) != 0;
  g.box_.min_x = r.get<std::int32_t>();
  g.box_.min_y = r.get<std::int32_t>();
  g.box_.max_x = r.get<std::int32_t>();
  g.box_.max_y = r.get<std::int32_t>();
  const auto ntiles = r.get<std::uint32_t>();
  for (std::uint32_t t = 0; t < ntiles; ++t) {
    const auto tx = r.get<std::int32_t>();
    const auto ty = r.get<std::int32_t>();
    const auto nruns = r.get<std::uint32_t>();
    auto tile = std::make_unique<VisitGrid::Tile>();
    std::size_t pos = 0;
    for (std::uint32_t k = 0; k < nruns; ++k) {
      const auto count = r.get<std::uint16_t>();
      const auto len = r.get<std::uint16_t>();
      if (len == 0 || pos + len > tile->size())
        throw SnapshotError(Kind::malformed, "tile run lengths inconsistent");
      std::fill_n(tile->begin() + static_cast<std::ptrdiff_t>(pos), len, count);
      pos += len;
    }
    if (pos != tile->size()) throw SnapshotError(Kind::malformed, "tile run lengths inconsistent");
    if (!g.tiles_.emplace(VisitGrid::key(tx, ty), std::move(tile)).second)
      throw SnapshotError(Kind::malformed, "duplicate tile");
  }
  if (!r.done()) throw SnapshotError(Kind::malformed, "unparsed bytes in payload");
  return g;
}

void save_snapshot(const VisitGrid& grid, const std::filesystem::path& path) {
  const auto bytes = encode_snapshot(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

VisitGrid load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace walkcover
