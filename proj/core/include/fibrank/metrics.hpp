#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fibrank/ingest.hpp"
#include "fibrank/network.hpp"

namespace fibrank {

enum class Metric { Fib, Influence, Popularity, BotScore, Optimal };

std::string_view metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

/// Per-account observation-period metrics. popularity and bot_score are
/// absent when the account has no tweet carrying the underlying field.
struct AccountMetrics {
  std::string account_id;
  std::uint64_t fib_index = 0;
  std::uint64_t influence = 0;
  std::optional<double> popularity;
  std::optional<double> bot_score;
  std::uint64_t n_misinfo_posts = 0;
};

/// Max f such that at least f entries are each >= f. Empty list -> 0.
/// O(n log n).
std::uint64_t fib_index(std::span<const std::uint64_t> retweet_counts);

/// Alias for out_strength on the observation network.
std::uint64_t influence(const RetweetNetwork& network, std::string_view account);

/// Accumulates one period's labeled records into per-account metric inputs.
/// Popularity and bot score average over all of an account's tweets in the
/// period; FIB inputs and influence cover its low-credibility posts,
/// including posts outside the stream that were retweeted in-period.
/// Shards merge commutatively.
class MetricsAccumulator {
public:
  void add(const TweetRecord& record, bool low_cred);
  void add(const LabeledRecord& labeled) { add(labeled.record, labeled.low_cred); }
  void merge(MetricsAccumulator&& other);

  std::uint64_t self_retweets_skipped() const noexcept { return self_retweets_skipped_; }

  /// One row per account with at least one low-credibility post, ascending
  /// account id.
  std::vector<AccountMetrics> finish() &&;

  /// Per-post retweet counts, descending, for each poster. Test hook for
  /// cross-checking fib_index and influence against ground truth.
  std::map<std::string, std::vector<std::uint64_t>> fib_inputs() const;

private:
  struct AccountAgg {
    std::unordered_map<std::string, std::uint64_t> post_counts;
    std::uint64_t follower_sum = 0;
    std::uint64_t follower_n = 0;
    long double bot_sum = 0;
    std::uint64_t bot_n = 0;
  };
  std::unordered_map<std::string, AccountAgg> accounts_;
  std::uint64_t self_retweets_skipped_ = 0;
};

std::vector<AccountMetrics> compute_metrics(std::span<const LabeledRecord> records);

/// Accounts ordered best-first by one metric. values[i] is the metric value
/// of ordered_accounts[i]; non-increasing. Accounts lacking the metric are
/// excluded and counted.
struct Ranking {
  Metric metric = Metric::Fib;
  std::vector<std::string> ordered_accounts;
  std::vector<double> values;
  std::string tie_policy;
  std::size_t excluded = 0;

  std::size_t size() const noexcept { return ordered_accounts.size(); }
  bool empty() const noexcept { return ordered_accounts.empty(); }
};

/// Sort by the chosen metric descending; ties broken by influence
/// descending, then account id ascending.
Ranking rank_accounts(std::span<const AccountMetrics> metrics, Metric by);

/// CSV with header (account_id, fib_index, influence, popularity,
/// bot_score, n_misinfo_posts); absent optionals are empty fields.
void write_metrics_csv(std::ostream& out, std::span<const AccountMetrics> metrics);
std::vector<AccountMetrics> read_metrics_csv(const std::string& path);

} // namespace fibrank
