#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fibrank/ingest.hpp"

namespace fibrank {

/// Supplies a toxicity score in [0,1] for a tweet, or nothing when the
/// scorer cannot judge it.
class ToxicityScorer {
public:
  virtual ~ToxicityScorer() = default;
  virtual std::optional<double> score(const TweetRecord& record) = 0;
};

/// Deterministic stand-in keyed by tweet id; no I/O. Scores originals only.
class OfflineStubScorer final : public ToxicityScorer {
public:
  std::optional<double> score(const TweetRecord& record) override;
};

/// Wraps another scorer behind a TSV disk cache (tweet_id <TAB> score).
/// With no inner scorer it serves cached entries only. flush() rewrites the
/// cache sorted by tweet id.
class DiskCachedScorer final : public ToxicityScorer {
public:
  DiskCachedScorer(std::string cache_path, ToxicityScorer* inner);
  ~DiskCachedScorer();

  std::optional<double> score(const TweetRecord& record) override;
  void flush();

  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }

private:
  std::string path_;
  ToxicityScorer* inner_;
  std::unordered_map<std::string, double> cache_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  bool dirty_ = false;
};

/// Fills in toxicity for original records that lack it; returns the number
/// scored.
std::size_t apply_scorer(std::vector<TweetRecord>& records, ToxicityScorer& scorer);

} // namespace fibrank
