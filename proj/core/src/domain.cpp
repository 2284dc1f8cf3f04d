#include "fibrank/domain.hpp"

#include <algorithm>
#include <cctype>
#include <utility>
#include <vector>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"

namespace fibrank {

namespace psl_data {
extern const char* kSnapshot;
}

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= host.size(); ++i) {
    if (i == host.size() || host[i] == '.') {
      labels.push_back(host.substr(start, i - start));
      start = i + 1;
    }
  }
  return labels;
}

bool valid_label(std::string_view label) {
  if (label.empty()) return false;
  for (const char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

bool all_numeric(std::string_view label) {
  return !label.empty() &&
         std::all_of(label.begin(), label.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Joins labels[i..] back into a dotted suffix of the original host.
std::string_view suffix_from(std::string_view host,
                             const std::vector<std::string_view>& labels, std::size_t i) {
  const char* start = labels[i].data();
  return host.substr(static_cast<std::size_t>(start - host.data()));
}

} // namespace

const PublicSuffixList& PublicSuffixList::bundled() {
  static const PublicSuffixList instance = from_text(psl_data::kSnapshot);
  return instance;
}

PublicSuffixList PublicSuffixList::from_file(const std::filesystem::path& path) {
  return from_text(read_file(path));
}

PublicSuffixList PublicSuffixList::from_text(std::string_view text) {
  PublicSuffixList psl;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    line = trim(line);
    if (line.empty() || line.starts_with("//")) continue;
    const auto space = line.find_first_of(" \t");
    if (space != std::string_view::npos) line = line.substr(0, space);

    std::string rule = to_lower(line);
    if (rule.starts_with("!")) {
      psl.exceptions_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      psl.wildcards_.insert(rule.substr(2));
    } else if (!rule.empty() && rule != "*") {
      psl.rules_.insert(std::move(rule));
    }
  }
  return psl;
}

std::string PublicSuffixList::public_suffix(std::string_view host) const {
  const auto labels = split_labels(host);
  const std::size_t n = labels.size();

  // Exception rules beat everything; the suffix is the rule minus its
  // first label.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (exceptions_.count(std::string(suffix_from(host, labels, i))) > 0)
      return std::string(suffix_from(host, labels, i + 1));
  }
  // Longest match wins; scanning from the longest candidate down.
  for (std::size_t i = 0; i < n; ++i) {
    const std::string cand(suffix_from(host, labels, i));
    if (rules_.count(cand) > 0) return cand;
    if (i + 1 < n && wildcards_.count(std::string(suffix_from(host, labels, i + 1))) > 0)
      return cand;
  }
  // Implicit "*" rule: the last label.
  return std::string(labels[n - 1]);
}

std::optional<std::string> PublicSuffixList::registrable_domain(std::string_view host) const {
  const std::string ps = public_suffix(host);
  if (ps.size() >= host.size()) return std::nullopt;
  const std::size_t boundary = host.size() - ps.size() - 1; // the '.' before ps
  if (boundary == 0) return std::nullopt;                   // empty label
  const auto prev = host.rfind('.', boundary - 1);
  const std::size_t start = prev == std::string_view::npos ? 0 : prev + 1;
  if (start == boundary) return std::nullopt; // consecutive dots
  return std::string(host.substr(start));
}

std::optional<std::string> url_host(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
  const std::string_view scheme = url.substr(0, scheme_end);
  if (!std::isalpha(static_cast<unsigned char>(scheme.front()))) return std::nullopt;
  for (const char c : scheme) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
    if (!ok) return std::nullopt;
  }

  std::string_view rest = url.substr(scheme_end + 3);
  const auto auth_end = rest.find_first_of("/?#");
  std::string_view authority =
      auth_end == std::string_view::npos ? rest : rest.substr(0, auth_end);
  if (const auto at = authority.rfind('@'); at != std::string_view::npos)
    authority = authority.substr(at + 1);

  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    authority = authority.substr(1, close - 1); // IPv6 literal, kept with ':'s
  } else if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    const std::string_view port = authority.substr(colon + 1);
    if (!std::all_of(port.begin(), port.end(),
                     [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    authority = authority.substr(0, colon);
  }

  std::string host = to_lower(authority);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty()) return std::nullopt;
  return host;
}

std::optional<std::string> extract_registrable_domain(std::string_view url,
                                                      const PublicSuffixList& psl) {
  const auto host = url_host(url);
  if (!host) return std::nullopt;
  if (host->find(':') != std::string::npos) return std::nullopt; // IPv6
  const auto labels = split_labels(*host);
  bool numeric = true;
  for (const auto& label : labels) {
    if (!valid_label(label)) return std::nullopt;
    numeric = numeric && all_numeric(label);
  }
  if (numeric) return std::nullopt; // IPv4
  return psl.registrable_domain(*host);
}

DomainList DomainList::from_file(const std::filesystem::path& path, std::string source_name) {
  DomainList list;
  list.source_name = source_name.empty() ? path.filename().string() : std::move(source_name);
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    const std::string_view entry = trim(line);
    if (entry.empty() || entry.starts_with("#")) continue;
    list.add(entry);
  }
  return list;
}

void DomainList::add(std::string_view raw_domain) {
  std::string_view v = trim(raw_domain);
  if (const auto scheme_end = v.find("://"); scheme_end != std::string_view::npos)
    v = v.substr(scheme_end + 3);
  if (const auto slash = v.find_first_of("/?#"); slash != std::string_view::npos)
    v = v.substr(0, slash);
  std::string domain = to_lower(v);
  if (domain.starts_with("www.")) domain.erase(0, 4);
  while (!domain.empty() && domain.back() == '.') domain.pop_back();
  if (!domain.empty()) domains.insert(std::move(domain));
}

bool label_low_credibility(const TweetRecord& record, const DomainList& list,
                           const PublicSuffixList& psl) {
  for (const auto& url : record.urls) {
    const auto domain = extract_registrable_domain(url, psl);
    if (domain && list.contains(*domain)) return true;
  }
  return false;
}

ShortenerMap ShortenerMap::from_tsv(const std::filesystem::path& path) {
  ShortenerMap map;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    const std::string_view v = trim(line);
    if (v.empty() || v.starts_with("#")) continue;
    const auto tab = v.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError("shortener map needs two tab-separated columns", reader.line_no());
    const std::string_view short_url = trim(v.substr(0, tab));
    const std::string_view expanded = trim(v.substr(tab + 1));
    if (short_url.empty() || expanded.empty())
      throw ParseError("shortener map entry has an empty column", reader.line_no());
    map.add(std::string(short_url), std::string(expanded));
  }
  return map;
}

void ShortenerMap::add(std::string short_url, std::string expanded_url) {
  map_[std::move(short_url)] = std::move(expanded_url);
}

std::optional<std::string> ShortenerMap::resolve(const std::string& url) {
  const auto it = map_.find(url);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

std::unordered_set<std::string> ShortenerMap::hosts() const {
  std::unordered_set<std::string> out;
  for (const auto& [short_url, expanded] : map_) {
    if (auto host = url_host(short_url)) out.insert(std::move(*host));
  }
  return out;
}

std::unordered_set<std::string> ShortLinkExpander::default_hosts() {
  return {"bit.ly",  "t.co",    "tinyurl.com", "ow.ly",  "buff.ly", "goo.gl",
          "dlvr.it", "ift.tt",  "is.gd",       "j.mp",   "trib.al", "shar.es",
          "tiny.cc", "rebrand.ly"};
}

bool ShortLinkExpander::is_shortener(std::string_view url) const {
  const auto host = url_host(url);
  return host && hosts_.count(*host) > 0;
}

std::string ShortLinkExpander::expand(const std::string& url, IngestCounters& counters) const {
  std::string current = url;
  for (int hop = 0; hop < max_hops_; ++hop) {
    if (!is_shortener(current)) return current;
    auto next = resolver_->resolve(current);
    if (!next) {
      ++counters.expansion_failures;
      return url;
    }
    current = std::move(*next);
  }
  if (is_shortener(current)) {
    ++counters.expansion_failures;
    return url;
  }
  return current;
}

LabeledRecord label_record(TweetRecord record, const DomainList& list,
                           const PublicSuffixList& psl, const ShortLinkExpander* expander,
                           IngestCounters& counters) {
  if (expander != nullptr) {
    for (auto& url : record.urls) url = expander->expand(url, counters);
  }
  const bool low_cred = label_low_credibility(record, list, psl);
  if (low_cred) ++counters.low_cred;
  return LabeledRecord{std::move(record), low_cred};
}

} // namespace fibrank
