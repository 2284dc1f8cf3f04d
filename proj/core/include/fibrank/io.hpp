#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fibrank {

/// Reads a text file line by line. Files ending in ".gz" are decompressed
/// transparently. Line numbers are 1-based.
class LineReader {
public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();

  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  /// Fetches the next line (without trailing newline); false at EOF.
  bool next(std::string& line);

  std::size_t line_no() const noexcept { return line_no_; }
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::filesystem::path path_;
  std::size_t line_no_ = 0;
};

/// Shortest round-trip decimal form of a double (std::to_chars), so exports
/// are byte-stable and parse back to the identical value.
std::string format_double(double value);

/// Quotes a CSV field when it contains separators, quotes, or newlines.
std::string csv_escape(std::string_view field);

/// Splits one CSV line honoring double-quote escaping. No embedded newlines.
std::vector<std::string> csv_split(std::string_view line);

/// FNV-1a 64-bit content hash; used for run manifests and the offline
/// toxicity stub.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (or a bare integer) as UTC epoch seconds.
std::int64_t parse_utc(std::string_view text);
std::string format_utc(std::int64_t epoch_seconds);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Gzip-compressed counterpart of write_file; pairs with LineReader's
/// transparent ".gz" handling.
void write_gzip(const std::filesystem::path& path, std::string_view content);

} // namespace fibrank
