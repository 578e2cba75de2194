#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "walkcover/errors.hpp"
#include "walkcover/harness.hpp"

namespace walkcover {
namespace {

constexpr const char* kColumns[] = {"experiment", "replica", "seed", "n", "statistic", "value", "extra"};
constexpr std::size_t kColumnCount = 7;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

void write_field(std::ostream& os, const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    os << s;
    return;
  }
  os << '"';
  for (char ch : s) {
    if (ch == '"') os << '"';
    os << ch;
  }
  os << '"';
}

// RFC 4180 fields of one line; quoted fields may not span lines here.
std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch != '"') {
        out.back() += ch;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (ch == '"' && out.back().empty()) {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  if (quoted) throw MalformedFile("line " + std::to_string(line_no) + ": unterminated quote");
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* column, std::size_t line_no) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw MalformedFile("line " + std::to_string(line_no) + ": bad " + column + " '" + s + "'");
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void export_csv(std::ostream& os, const std::vector<RunRecord>& records, std::uint64_t config_hash) {
  os << "# format=" << kRecordFormat << " config_hash=" << hex64(config_hash) << '\n';
  for (std::size_t i = 0; i < kColumnCount; ++i) os << (i ? "," : "") << kColumns[i];
  os << '\n';
  for (const auto& r : records)
    for (const auto& m : r.rows) {
      write_field(os, r.experiment);
      os << ',' << r.replica << ',' << r.seed << ',' << m.n << ',';
      write_field(os, m.statistic);
      os << ',' << format_double(m.value) << ',';
      write_field(os, m.extra);
      os << '\n';
    }
}

void export_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records,
                std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  export_csv(out, records, config_hash);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RecordFile import_csv(std::istream& is, std::optional<std::uint64_t> expected_hash, std::ostream* warn) {
  RecordFile file;
  std::string line;
  if (!std::getline(is, line)) throw MalformedFile("empty file");
  const std::string prefix = std::string("# format=") + kRecordFormat + " config_hash=";
  if (line.rfind(prefix, 0) != 0 || line.size() != prefix.size() + 16)
    throw MalformedFile("missing or unsupported format line");
  {
    const std::string hex = line.substr(prefix.size());
    const auto res = std::from_chars(hex.data(), hex.data() + hex.size(), file.config_hash, 16);
    if (res.ec != std::errc{} || res.ptr != hex.data() + hex.size()) throw MalformedFile("bad config hash");
  }
  if (expected_hash && *expected_hash != file.config_hash && warn)
    *warn << "warning: config hash " << hex64(file.config_hash) << " differs from expected "
          << hex64(*expected_hash) << "; importing anyway\n";

  if (!std::getline(is, line)) throw MalformedFile("missing column header");
  const auto header = split_line(line, 2);
  std::size_t pos[kColumnCount];
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    const auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) throw MalformedFile(std::string("missing column '") + kColumns[c] + "'");
    pos[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::size_t line_no = 2;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_line(line, line_no);
    if (f.size() != header.size()) throw MalformedFile("line " + std::to_string(line_no) + ": wrong field count");
    const std::string& experiment = f[pos[0]];
    const auto replica = parse_number<std::uint32_t>(f[pos[1]], "replica", line_no);
    const auto seed = parse_number<std::uint64_t>(f[pos[2]], "seed", line_no);
    Measurement m{parse_number<std::uint64_t>(f[pos[3]], "n", line_no), f[pos[4]],
                  parse_number<double>(f[pos[5]], "value", line_no), f[pos[6]]};
    if (file.records.empty() || file.records.back().replica != replica ||
        file.records.back().experiment != experiment || file.records.back().seed != seed)
      file.records.push_back({experiment, replica, seed, {}});
    file.records.back().rows.push_back(std::move(m));
  }
  return file;
}

RecordFile import_csv(const std::filesystem::path& path, std::optional<std::uint64_t> expected_hash,
                      std::ostream* warn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile("cannot read " + path.string());
  return import_csv(in, expected_hash, warn);
}

}  // namespace walkcover
