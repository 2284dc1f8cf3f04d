#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

#include "fibrank/ingest.hpp"

namespace fibrank {

/// Public-suffix rules (exact, wildcard, exception) with the standard
/// longest-match resolution and the implicit "*" fallback for unknown TLDs.
/// A bundled snapshot covers the common multi-label suffixes; load the full
/// publicsuffix.org list via from_file for complete coverage.
class PublicSuffixList {
public:
  static const PublicSuffixList& bundled();
  static PublicSuffixList from_file(const std::filesystem::path& path);
  static PublicSuffixList from_text(std::string_view text);

  /// Longest matching public suffix for a normalized host, or the last
  /// label under the implicit "*" rule.
  std::string public_suffix(std::string_view host) const;

  /// Public suffix plus one label; nullopt when the host itself is a
  /// public suffix (nothing registrable).
  std::optional<std::string> registrable_domain(std::string_view host) const;

  std::size_t rule_count() const noexcept {
    return rules_.size() + wildcards_.size() + exceptions_.size();
  }

private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;  // parent of "*.parent"
  std::unordered_set<std::string> exceptions_; // "!rule" entries
};

/// Host component of an absolute URL, lowercased, trailing dot removed.
/// nullopt when the URL has no scheme or no parseable host.
std::optional<std::string> url_host(std::string_view url);

/// Lowercase registrable domain of an absolute URL. nullopt (skip with
/// warning upstream) for unparseable URLs, IP-literal hosts, and hosts that
/// are themselves public suffixes.
std::optional<std::string> extract_registrable_domain(std::string_view url,
                                                      const PublicSuffixList& psl);

/// Set of low-credibility registrable domains. Entries are normalized to
/// lowercase with scheme, path, and leading "www." stripped; membership is
/// exact match on the registrable domain.
struct DomainList {
  std::unordered_set<std::string> domains;
  std::string source_name;

  /// Plain-text list: one domain per line, '#' comments, blanks ignored.
  static DomainList from_file(const std::filesystem::path& path,
                              std::string source_name = {});

  void add(std::string_view raw_domain);
  bool contains(std::string_view domain) const {
    return domains.find(std::string(domain)) != domains.end();
  }
  std::size_t size() const noexcept { return domains.size(); }
};

/// True iff at least one of the record's urls resolves to a listed domain.
bool label_low_credibility(const TweetRecord& record, const DomainList& list,
                           const PublicSuffixList& psl);

/// One redirect hop. Implementations: offline ShortenerMap, live
/// HttpLinkResolver.
class LinkResolver {
public:
  virtual ~LinkResolver() = default;
  virtual std::optional<std::string> resolve(const std::string& url) = 0;
};

/// Offline resolver backed by a two-column TSV (short URL, expanded URL).
class ShortenerMap final : public LinkResolver {
public:
  static ShortenerMap from_tsv(const std::filesystem::path& path);

  void add(std::string short_url, std::string expanded_url);
  std::optional<std::string> resolve(const std::string& url) override;

  /// Hosts appearing among the short URLs; seeds the expander's domain set.
  std::unordered_set<std::string> hosts() const;
  std::size_t size() const noexcept { return map_.size(); }

private:
  std::map<std::string, std::string> map_;
};

/// Follows shortener redirect chains up to max_hops. URLs whose host is not
/// in the shortener set pass through untouched; a dead or over-long chain
/// yields the original URL and bumps the failure counter.
class ShortLinkExpander {
public:
  ShortLinkExpander(std::unordered_set<std::string> shortener_hosts,
                    LinkResolver& resolver, int max_hops = 5)
      : hosts_(std::move(shortener_hosts)), resolver_(&resolver), max_hops_(max_hops) {}

  /// Well-known shortener hosts (bit.ly, t.co, ...).
  static std::unordered_set<std::string> default_hosts();

  std::string expand(const std::string& url, IngestCounters& counters) const;
  bool is_shortener(std::string_view url) const;

private:
  std::unordered_set<std::string> hosts_;
  LinkResolver* resolver_;
  int max_hops_;
};

/// Expands every url in place (when an expander is given) and labels the
/// record against the domain list.
LabeledRecord label_record(TweetRecord record, const DomainList& list,
                           const PublicSuffixList& psl,
                           const ShortLinkExpander* expander,
                           IngestCounters& counters);

} // namespace fibrank
