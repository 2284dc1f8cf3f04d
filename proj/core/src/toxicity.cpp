#include "fibrank/toxicity.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <utility>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"

namespace fibrank {

std::optional<double> OfflineStubScorer::score(const TweetRecord& record) {
  if (!record.is_original()) return std::nullopt;
  // fnv's high bits barely move for short ids, so finish with a splitmix64
  // avalanche before mapping 53 bits onto [0,1)
  std::uint64_t h = fnv1a64(record.tweet_id);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

DiskCachedScorer::DiskCachedScorer(std::string cache_path, ToxicityScorer* inner)
    : path_(std::move(cache_path)), inner_(inner) {
  if (!std::filesystem::exists(path_)) return;
  LineReader reader(path_);
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError("bad cache row", reader.line_no());
    double value = 0;
    const char* begin = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      throw ParseError("bad cache score", reader.line_no());
    cache_[line.substr(0, tab)] = value;
  }
}

DiskCachedScorer::~DiskCachedScorer() {
  try {
    flush();
  } catch (...) {
    // a failed flush on teardown must not terminate
  }
}

std::optional<double> DiskCachedScorer::score(const TweetRecord& record) {
  if (const auto it = cache_.find(record.tweet_id); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  if (inner_ == nullptr) return std::nullopt;
  const auto value = inner_->score(record);
  if (value) {
    cache_[record.tweet_id] = *value;
    dirty_ = true;
  }
  return value;
}

void DiskCachedScorer::flush() {
  if (!dirty_) return;
  std::vector<std::pair<std::string_view, double>> rows(cache_.begin(), cache_.end());
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path_);
  for (const auto& [id, value] : rows)
    out << id << '\t' << format_double(value) << '\n';
  if (!out.flush()) throw IoError("short write to " + path_);
  dirty_ = false;
}

std::size_t apply_scorer(std::vector<TweetRecord>& records, ToxicityScorer& scorer) {
  std::size_t scored = 0;
  for (auto& rec : records) {
    if (!rec.is_original() || rec.toxicity.has_value()) continue;
    const auto value = scorer.score(rec);
    if (!value) continue;
    rec.toxicity = *value;
    ++scored;
  }
  return scored;
}

} // namespace fibrank
