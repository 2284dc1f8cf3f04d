#include "fibrank/io.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "fibrank/error.hpp"

namespace fibrank {

struct LineReader::Impl {
  gzFile gz = nullptr;       // used for both plain and gzip files:
  std::string buffer;        // zlib reads uncompressed files transparently
  std::size_t pos = 0;
  bool eof = false;

  explicit Impl(const std::filesystem::path& path) {
    gz = gzopen(path.string().c_str(), "rb");
    if (gz == nullptr) throw IoError("cannot open " + path.string());
    gzbuffer(gz, 1 << 16);
  }

  ~Impl() {
    if (gz != nullptr) gzclose(gz);
  }

  bool fill() {
    if (eof) return false;
    std::array<char, 1 << 16> chunk;
    const int n = gzread(gz, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int errnum = 0;
      const char* msg = gzerror(gz, &errnum);
      throw IoError(std::string("read error: ") + (msg != nullptr ? msg : "unknown"));
    }
    if (n == 0) {
      eof = true;
      return false;
    }
    buffer.append(chunk.data(), static_cast<std::size_t>(n));
    return true;
  }

  bool next(std::string& line) {
    for (;;) {
      const auto nl = buffer.find('\n', pos);
      if (nl != std::string::npos) {
        line.assign(buffer, pos, nl - pos);
        pos = nl + 1;
        if (pos > (1 << 20)) {
          buffer.erase(0, pos);
          pos = 0;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      if (!fill()) break;
    }
    if (pos < buffer.size()) { // final line without trailing newline
      line.assign(buffer, pos, buffer.size() - pos);
      pos = buffer.size();
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }
};

LineReader::LineReader(const std::filesystem::path& path)
    : impl_(std::make_unique<Impl>(path)), path_(path) {}

LineReader::~LineReader() = default;

bool LineReader::next(std::string& line) {
  if (!impl_->next(line)) return false;
  ++line_no_;
  return true;
}

std::string format_double(double value) {
  std::array<char, 64> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf.data(), ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  std::array<char, 1 << 16> chunk;
  while (in.read(chunk.data(), chunk.size()) || in.gcount() > 0) {
    const auto n = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

namespace {

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};

std::int64_t days_from_civil(int y, int m, int d) {
  // Howard Hinnant's algorithm, days since 1970-01-01.
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int parse_int_field(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') throw ParseError("bad timestamp: " + std::string(text));
    value = value * 10 + (c - '0');
  }
  return value;
}

} // namespace

std::int64_t parse_utc(std::string_view text) {
  if (text.empty()) throw ParseError("empty timestamp");
  if (text.find('T') == std::string_view::npos) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw ParseError("bad timestamp: " + std::string(text));
    return value;
  }
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z')
    throw ParseError("bad timestamp: " + std::string(text));
  const int year = parse_int_field(text, 0, 4);
  const int month = parse_int_field(text, 5, 2);
  const int day = parse_int_field(text, 8, 2);
  const int hour = parse_int_field(text, 11, 2);
  const int minute = parse_int_field(text, 14, 2);
  const int second = parse_int_field(text, 17, 2);
  if (month < 1 || month > 12) throw ParseError("bad timestamp: " + std::string(text));
  int dim = kMonthDays[month - 1];
  if (month == 2 && is_leap(year)) dim = 29;
  if (day < 1 || day > dim || hour > 23 || minute > 59 || second > 59)
    throw ParseError("bad timestamp: " + std::string(text));
  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_utc(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  // civil_from_days, inverse of the above
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t year = y + (m <= 2);

  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(year), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_gzip(const std::filesystem::path& path, std::string_view content) {
  gzFile gz = gzopen(path.string().c_str(), "wb");
  if (gz == nullptr) throw IoError("cannot open " + path.string() + " for writing");
  std::size_t off = 0;
  while (off < content.size()) {
    const auto chunk = static_cast<unsigned>(
        std::min<std::size_t>(content.size() - off, 1u << 20));
    if (gzwrite(gz, content.data() + off, chunk) != static_cast<int>(chunk)) {
      gzclose(gz);
      throw IoError("gzip write failed: " + path.string());
    }
    off += chunk;
  }
  if (gzclose(gz) != Z_OK) throw IoError("gzip close failed: " + path.string());
}

} // namespace fibrank
