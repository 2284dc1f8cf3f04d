#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fibrank/domain.hpp"
#include "fibrank/ingest.hpp"
#include "fibrank/metrics.hpp"

namespace fibrank {

enum class AccountStatus { active, suspended, deleted, unknown };

std::string_view status_name(AccountStatus s);
std::optional<AccountStatus> parse_status(std::string_view name);

enum class Affiliation { left, right };

std::string_view affiliation_name(Affiliation a);
std::optional<Affiliation> parse_affiliation(std::string_view name);

struct AccountProfile {
  std::string account_id;
  std::optional<double> r_m;
  std::optional<double> mean_toxicity;
  std::uint64_t n_links_total = 0;
  std::uint64_t n_links_lowcred = 0;
  std::optional<bool> verified;
  AccountStatus status = AccountStatus::unknown;
  std::uint64_t followers = 0;
  std::optional<std::string> category;
  std::optional<Affiliation> political_affiliation;
};

struct LinkLabel {
  std::string domain;
  bool low_cred = false;
};

/// Fraction of low-credibility links among all links; absent on zero links.
std::optional<double> sharing_ratio(std::span<const LinkLabel> links);
std::optional<double> sharing_ratio(std::uint64_t n_lowcred, std::uint64_t n_total);

/// Mean toxicity over original, scored, English-tagged tweets; absent when
/// none qualify. Records without a language tag are excluded.
std::optional<double> mean_toxicity(std::span<const TweetRecord> tweets);

struct TopRule {
  enum class Kind { percent_positive, top_n };
  Kind kind = Kind::top_n;
  double percent = 1.0;
  std::size_t n = 0;

  /// Top percent of accounts whose metric value is > 0, rounded up.
  static TopRule percent_positive(double percent) {
    return TopRule{Kind::percent_positive, percent, 0};
  }
  static TopRule top_n(std::size_t n) { return TopRule{Kind::top_n, 0.0, n}; }
};

/// Head of the ranking under the rule, in rank order.
std::vector<std::string> select_top(const Ranking& ranking, const TopRule& rule);

struct ProminenceCrosstab {
  std::uint64_t follower_threshold = 0;
  std::size_t n_profiles = 0;
  std::size_t n_unknown_status = 0;
  std::size_t n_suspended = 0;
  std::size_t n_suspended_verified_known = 0;  // suspended with a known flag
  std::size_t n_suspended_verified = 0;
  std::size_t n_suspended_above = 0;  // followers >= threshold
  std::size_t n_suspended_below = 0;
  std::size_t n_above = 0;  // known-status accounts at or above threshold
  std::size_t n_below = 0;

  double pct_suspended_verified() const;  // among suspended with known flag
  double pct_suspended_above() const;     // among suspended
  double pct_suspended_below() const;
  double suspension_rate_above() const;  // among accounts at/above threshold
  double suspension_rate_below() const;
};

/// Suspension-by-verified and suspension-by-follower-band counts over the
/// given profiles. Unknown statuses are excluded from every rate and
/// counted.
ProminenceCrosstab prominence_crosstab(std::span<const AccountProfile> profiles,
                                       std::uint64_t follower_threshold);

struct StatusEntry {
  AccountStatus status = AccountStatus::unknown;
  std::optional<bool> verified;
};

/// CSV with header (account_id, status, verified); verified is true/false
/// or empty.
std::unordered_map<std::string, StatusEntry> read_status_csv(const std::string& path);

struct AnnotationEntry {
  std::optional<std::string> category;
  std::optional<Affiliation> political_affiliation;
};

/// CSV with header (account_id, category, political_affiliation); empty
/// fields stay absent.
std::unordered_map<std::string, AnnotationEntry> read_annotation_csv(const std::string& path);

struct ProfileBuildResult {
  std::vector<AccountProfile> profiles;  // ascending account id
  std::uint64_t url_failures = 0;        // unparseable URLs skipped
  std::size_t accounts_without_tweets = 0;
};

/// Profiles for the selected accounts from their tweets inside the window.
/// Links come from all tweets, toxicity from originals only; followers is
/// the latest in-window snapshot. status/annotations may be null.
ProfileBuildResult build_profiles(
    std::span<const TweetRecord> records, std::span<const std::string> accounts,
    const DomainList& list, const PublicSuffixList& psl, const Interval& window,
    const std::unordered_map<std::string, StatusEntry>* status,
    const std::unordered_map<std::string, AnnotationEntry>* annotations);

/// CSV of every AccountProfile field, header included, rows in given order.
void write_profiles_csv(std::ostream& out, std::span<const AccountProfile> profiles);

} // namespace fibrank
