#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fibrank/ingest.hpp"

namespace fibrank {

/// Weighted directed retweet network for one period. An edge (i, j) with
/// weight w counts the retweets by j of i's low-credibility posts. Posters
/// are the accounts that authored at least one low-credibility original
/// post in the period (zero-retweet posters included). Immutable once
/// built; safe to share across threads.
class RetweetNetwork {
public:
  struct Edge {
    std::string_view poster;
    std::string_view retweeter;
    std::uint64_t weight;
  };

  /// Accounts appearing as any edge endpoint or as a poster
  /// (pure retweeters included).
  std::size_t node_count() const noexcept { return ids_.size(); }
  /// Accounts that authored low-credibility posts (the candidate pool).
  std::size_t poster_count() const noexcept { return poster_list_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::uint64_t total_weight() const noexcept { return total_weight_; }

  /// Sum of outgoing edge weights; 0 for accounts absent from the network.
  std::uint64_t out_strength(std::string_view account) const;
  std::uint64_t edge_weight(std::string_view poster, std::string_view retweeter) const;
  bool is_poster(std::string_view account) const;

  /// Poster ids in ascending lexicographic order.
  std::vector<std::string> posters() const;
  std::vector<std::string> nodes() const;

  /// Edges in lexicographic (poster, retweeter) order.
  std::vector<Edge> sorted_edges() const;

  /// Three-column CSV (poster_id, retweeter_id, weight) with a header row,
  /// deterministic lexicographic edge ordering.
  void write_csv(std::ostream& out) const;

private:
  friend class NetworkBuilder;

  std::uint32_t intern(std::string_view id);
  const std::string& name(std::uint32_t idx) const { return ids_[idx]; }

  static std::uint64_t edge_key(std::uint32_t poster, std::uint32_t retweeter) {
    return (static_cast<std::uint64_t>(poster) << 32) | retweeter;
  }

  // owned keys with heterogeneous lookup; view keys into ids_ would dangle
  // when the vector reallocates
  struct IdHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t, IdHash, std::equal_to<>> index_;
  std::unordered_map<std::uint64_t, std::uint64_t> edges_;
  std::vector<std::uint64_t> out_strength_;
  std::vector<bool> poster_flag_;
  std::vector<std::uint32_t> poster_list_;
  std::uint64_t total_weight_ = 0;
};

/// Accumulates labeled records into a RetweetNetwork. Only low-credibility
/// records contribute: an original registers its author as a poster, a
/// retweet increments the (original author -> retweeter) edge. Self-retweets
/// are skipped and counted. Builders from different shards merge
/// commutatively.
class NetworkBuilder {
public:
  void add(const TweetRecord& record, bool low_cred);
  void add(const LabeledRecord& labeled) { add(labeled.record, labeled.low_cred); }
  void merge(const NetworkBuilder& other);

  std::uint64_t self_retweets_skipped() const noexcept { return self_retweets_skipped_; }

  RetweetNetwork finish() &&;

private:
  // string-keyed accumulation; interning happens once in finish()
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> weights_;
  std::unordered_set<std::string> posters_;
  std::uint64_t self_retweets_skipped_ = 0;
};

/// Convenience single-shot build.
RetweetNetwork build_network(std::span<const LabeledRecord> records,
                             std::uint64_t* self_retweets_skipped = nullptr);

} // namespace fibrank
