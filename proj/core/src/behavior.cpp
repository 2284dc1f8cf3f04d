#include "fibrank/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"

namespace fibrank {

std::string_view status_name(AccountStatus s) {
  switch (s) {
    case AccountStatus::active: return "active";
    case AccountStatus::suspended: return "suspended";
    case AccountStatus::deleted: return "deleted";
    case AccountStatus::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<AccountStatus> parse_status(std::string_view name) {
  if (name == "active") return AccountStatus::active;
  if (name == "suspended") return AccountStatus::suspended;
  if (name == "deleted") return AccountStatus::deleted;
  if (name == "unknown" || name.empty()) return AccountStatus::unknown;
  return std::nullopt;
}

std::string_view affiliation_name(Affiliation a) {
  return a == Affiliation::left ? "left" : "right";
}

std::optional<Affiliation> parse_affiliation(std::string_view name) {
  if (name == "left") return Affiliation::left;
  if (name == "right") return Affiliation::right;
  return std::nullopt;
}

std::optional<double> sharing_ratio(std::uint64_t n_lowcred, std::uint64_t n_total) {
  if (n_total == 0) return std::nullopt;
  return static_cast<double>(n_lowcred) / static_cast<double>(n_total);
}

std::optional<double> sharing_ratio(std::span<const LinkLabel> links) {
  std::uint64_t lowcred = 0;
  for (const auto& link : links) lowcred += link.low_cred ? 1 : 0;
  return sharing_ratio(lowcred, links.size());
}

namespace {

bool english_tag(const std::optional<std::string>& lang) {
  if (!lang) return false;
  return *lang == "en" || lang->starts_with("en-");
}

bool toxicity_eligible(const TweetRecord& rec) {
  return rec.is_original() && rec.toxicity.has_value() && english_tag(rec.text_lang);
}

} // namespace

std::optional<double> mean_toxicity(std::span<const TweetRecord> tweets) {
  long double sum = 0;
  std::uint64_t n = 0;
  for (const auto& rec : tweets) {
    if (!toxicity_eligible(rec)) continue;
    sum += *rec.toxicity;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(sum / n);
}

std::vector<std::string> select_top(const Ranking& ranking, const TopRule& rule) {
  std::size_t take = 0;
  switch (rule.kind) {
    case TopRule::Kind::top_n:
      take = std::min(rule.n, ranking.size());
      break;
    case TopRule::Kind::percent_positive: {
      if (!(rule.percent > 0.0) || rule.percent > 100.0)
        throw ConfigError("top percent must lie in (0, 100]");
      std::size_t positive = 0;
      while (positive < ranking.size() && ranking.values[positive] > 0.0) ++positive;
      // values are non-increasing, so the positive accounts are a prefix
      const double raw = rule.percent / 100.0 * static_cast<double>(positive);
      take = std::min<std::size_t>(
          positive, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
      break;
    }
  }
  return {ranking.ordered_accounts.begin(),
          ranking.ordered_accounts.begin() + static_cast<std::ptrdiff_t>(take)};
}

namespace {

double pct(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

double ProminenceCrosstab::pct_suspended_verified() const {
  return pct(n_suspended_verified, n_suspended_verified_known);
}
double ProminenceCrosstab::pct_suspended_above() const {
  return pct(n_suspended_above, n_suspended);
}
double ProminenceCrosstab::pct_suspended_below() const {
  return pct(n_suspended_below, n_suspended);
}
double ProminenceCrosstab::suspension_rate_above() const {
  return pct(n_suspended_above, n_above);
}
double ProminenceCrosstab::suspension_rate_below() const {
  return pct(n_suspended_below, n_below);
}

ProminenceCrosstab prominence_crosstab(std::span<const AccountProfile> profiles,
                                       std::uint64_t follower_threshold) {
  ProminenceCrosstab tab;
  tab.follower_threshold = follower_threshold;
  tab.n_profiles = profiles.size();
  for (const auto& p : profiles) {
    if (p.status == AccountStatus::unknown) {
      ++tab.n_unknown_status;
      continue;
    }
    const bool above = p.followers >= follower_threshold;
    if (above)
      ++tab.n_above;
    else
      ++tab.n_below;
    if (p.status != AccountStatus::suspended) continue;
    ++tab.n_suspended;
    if (p.verified.has_value()) {
      ++tab.n_suspended_verified_known;
      if (*p.verified) ++tab.n_suspended_verified;
    }
    if (above)
      ++tab.n_suspended_above;
    else
      ++tab.n_suspended_below;
  }
  return tab;
}

std::unordered_map<std::string, StatusEntry> read_status_csv(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line) ||
      csv_split(line) != std::vector<std::string>{"account_id", "status", "verified"})
    throw ParseError("unexpected status CSV header in " + path);
  std::unordered_map<std::string, StatusEntry> out;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = csv_split(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields", reader.line_no());
    StatusEntry entry;
    const auto status = parse_status(fields[1]);
    if (!status) throw ParseError("unknown status \"" + fields[1] + "\"", reader.line_no());
    entry.status = *status;
    if (fields[2] == "true" || fields[2] == "1")
      entry.verified = true;
    else if (fields[2] == "false" || fields[2] == "0")
      entry.verified = false;
    else if (!fields[2].empty())
      throw ParseError("bad verified flag \"" + fields[2] + "\"", reader.line_no());
    out[fields[0]] = entry;
  }
  return out;
}

std::unordered_map<std::string, AnnotationEntry> read_annotation_csv(
    const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line) ||
      csv_split(line) != std::vector<std::string>{"account_id", "category",
                                                  "political_affiliation"})
    throw ParseError("unexpected annotation CSV header in " + path);
  std::unordered_map<std::string, AnnotationEntry> out;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = csv_split(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields", reader.line_no());
    AnnotationEntry entry;
    if (!fields[1].empty()) entry.category = fields[1];
    if (!fields[2].empty()) {
      const auto aff = parse_affiliation(fields[2]);
      if (!aff)
        throw ParseError("bad political_affiliation \"" + fields[2] + "\"",
                         reader.line_no());
      entry.political_affiliation = aff;
    }
    out[fields[0]] = std::move(entry);
  }
  return out;
}

ProfileBuildResult build_profiles(
    std::span<const TweetRecord> records, std::span<const std::string> accounts,
    const DomainList& list, const PublicSuffixList& psl, const Interval& window,
    const std::unordered_map<std::string, StatusEntry>* status,
    const std::unordered_map<std::string, AnnotationEntry>* annotations) {
  struct Agg {
    std::uint64_t links_total = 0;
    std::uint64_t links_lowcred = 0;
    long double tox_sum = 0;
    std::uint64_t tox_n = 0;
    std::int64_t follower_ts = -1;
    std::string follower_tweet;
    std::uint64_t followers = 0;
    bool any_tweet = false;
  };

  std::unordered_map<std::string_view, Agg> aggs;
  for (const auto& id : accounts) aggs.try_emplace(id);

  ProfileBuildResult result;
  for (const auto& rec : records) {
    if (!window.contains(rec.timestamp)) continue;
    const auto it = aggs.find(rec.author_id);
    if (it == aggs.end()) continue;
    Agg& agg = it->second;
    agg.any_tweet = true;
    for (const auto& url : rec.urls) {
      const auto domain = extract_registrable_domain(url, psl);
      if (!domain) {
        ++result.url_failures;
        continue;
      }
      ++agg.links_total;
      if (list.contains(*domain)) ++agg.links_lowcred;
    }
    if (toxicity_eligible(rec)) {
      agg.tox_sum += *rec.toxicity;
      ++agg.tox_n;
    }
    if (rec.follower_count &&
        (rec.timestamp > agg.follower_ts ||
         (rec.timestamp == agg.follower_ts && rec.tweet_id > agg.follower_tweet))) {
      agg.follower_ts = rec.timestamp;
      agg.follower_tweet = rec.tweet_id;
      agg.followers = *rec.follower_count;
    }
  }

  result.profiles.reserve(aggs.size());
  for (const auto& [id, agg] : aggs) {
    AccountProfile profile;
    profile.account_id = std::string(id);
    profile.n_links_total = agg.links_total;
    profile.n_links_lowcred = agg.links_lowcred;
    profile.r_m = sharing_ratio(agg.links_lowcred, agg.links_total);
    if (agg.tox_n > 0)
      profile.mean_toxicity = static_cast<double>(agg.tox_sum / agg.tox_n);
    profile.followers = agg.followers;
    if (!agg.any_tweet) ++result.accounts_without_tweets;
    if (status != nullptr) {
      if (const auto it = status->find(profile.account_id); it != status->end()) {
        profile.status = it->second.status;
        profile.verified = it->second.verified;
      }
    }
    if (annotations != nullptr) {
      if (const auto it = annotations->find(profile.account_id);
          it != annotations->end()) {
        profile.category = it->second.category;
        profile.political_affiliation = it->second.political_affiliation;
      }
    }
    result.profiles.push_back(std::move(profile));
  }
  std::sort(result.profiles.begin(), result.profiles.end(),
            [](const AccountProfile& a, const AccountProfile& b) {
              return a.account_id < b.account_id;
            });
  return result;
}

void write_profiles_csv(std::ostream& out, std::span<const AccountProfile> profiles) {
  out << "account_id,r_m,mean_toxicity,n_links_total,n_links_lowcred,verified,status,"
         "followers,category,political_affiliation\n";
  for (const auto& p : profiles) {
    out << csv_escape(p.account_id) << ',';
    if (p.r_m) out << format_double(*p.r_m);
    out << ',';
    if (p.mean_toxicity) out << format_double(*p.mean_toxicity);
    out << ',' << p.n_links_total << ',' << p.n_links_lowcred << ',';
    if (p.verified) out << (*p.verified ? "true" : "false");
    out << ',' << status_name(p.status) << ',' << p.followers << ',';
    if (p.category) out << csv_escape(*p.category);
    out << ',';
    if (p.political_affiliation) out << affiliation_name(*p.political_affiliation);
    out << '\n';
  }
}

} // namespace fibrank
