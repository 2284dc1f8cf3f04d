#include "fibrank/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <utility>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"

namespace fibrank {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Fib: return "fib";
    case Metric::Influence: return "influence";
    case Metric::Popularity: return "popularity";
    case Metric::BotScore: return "bot_score";
    case Metric::Optimal: return "optimal";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "fib") return Metric::Fib;
  if (name == "influence") return Metric::Influence;
  if (name == "popularity") return Metric::Popularity;
  if (name == "bot_score") return Metric::BotScore;
  if (name == "optimal") return Metric::Optimal;
  return std::nullopt;
}

std::uint64_t fib_index(std::span<const std::uint64_t> retweet_counts) {
  std::vector<std::uint64_t> sorted(retweet_counts.begin(), retweet_counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::uint64_t f = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] >= i + 1)
      f = i + 1;
    else
      break;
  }
  return f;
}

std::uint64_t influence(const RetweetNetwork& network, std::string_view account) {
  return network.out_strength(account);
}

void MetricsAccumulator::add(const TweetRecord& record, bool low_cred) {
  auto& agg = accounts_[record.author_id];
  if (record.follower_count) {
    agg.follower_sum += *record.follower_count;
    ++agg.follower_n;
  }
  if (record.bot_score) {
    agg.bot_sum += *record.bot_score;
    ++agg.bot_n;
  }
  if (!low_cred) return;
  if (record.is_original()) {
    agg.post_counts.try_emplace(record.tweet_id, 0);
    return;
  }
  const auto& ref = *record.retweet_of;
  if (ref.author_id == record.author_id) {
    ++self_retweets_skipped_;
    return;
  }
  ++accounts_[ref.author_id].post_counts[ref.tweet_id];
}

void MetricsAccumulator::merge(MetricsAccumulator&& other) {
  for (auto& [id, theirs] : other.accounts_) {
    auto [it, inserted] = accounts_.try_emplace(id, std::move(theirs));
    if (inserted) continue;
    auto& mine = it->second;
    for (const auto& [tweet, count] : theirs.post_counts)
      mine.post_counts[tweet] += count;
    mine.follower_sum += theirs.follower_sum;
    mine.follower_n += theirs.follower_n;
    mine.bot_sum += theirs.bot_sum;
    mine.bot_n += theirs.bot_n;
  }
  self_retweets_skipped_ += other.self_retweets_skipped_;
}

std::vector<AccountMetrics> MetricsAccumulator::finish() && {
  std::vector<AccountMetrics> rows;
  for (auto& [id, agg] : accounts_) {
    if (agg.post_counts.empty()) continue; // not a poster
    AccountMetrics row;
    row.account_id = id;
    row.n_misinfo_posts = agg.post_counts.size();
    std::vector<std::uint64_t> counts;
    counts.reserve(agg.post_counts.size());
    for (const auto& [tweet, count] : agg.post_counts) {
      counts.push_back(count);
      row.influence += count;
    }
    row.fib_index = fib_index(counts);
    if (agg.follower_n > 0)
      row.popularity = static_cast<double>(agg.follower_sum) /
                       static_cast<double>(agg.follower_n);
    if (agg.bot_n > 0)
      row.bot_score = static_cast<double>(agg.bot_sum / agg.bot_n);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const AccountMetrics& a, const AccountMetrics& b) {
    return a.account_id < b.account_id;
  });
  return rows;
}

std::map<std::string, std::vector<std::uint64_t>> MetricsAccumulator::fib_inputs() const {
  std::map<std::string, std::vector<std::uint64_t>> out;
  for (const auto& [id, agg] : accounts_) {
    if (agg.post_counts.empty()) continue;
    auto& counts = out[id];
    counts.reserve(agg.post_counts.size());
    for (const auto& [tweet, count] : agg.post_counts) counts.push_back(count);
    std::sort(counts.begin(), counts.end(), std::greater<>());
  }
  return out;
}

std::vector<AccountMetrics> compute_metrics(std::span<const LabeledRecord> records) {
  MetricsAccumulator acc;
  for (const auto& rec : records) acc.add(rec);
  return std::move(acc).finish();
}

Ranking rank_accounts(std::span<const AccountMetrics> metrics, Metric by) {
  if (by == Metric::Optimal)
    throw Error("the optimal ranking needs the evaluation network, not metrics");

  struct Row {
    const AccountMetrics* m;
    double value;
  };
  std::vector<Row> rows;
  std::size_t excluded = 0;
  for (const auto& am : metrics) {
    std::optional<double> value;
    switch (by) {
      case Metric::Fib: value = static_cast<double>(am.fib_index); break;
      case Metric::Influence: value = static_cast<double>(am.influence); break;
      case Metric::Popularity: value = am.popularity; break;
      case Metric::BotScore: value = am.bot_score; break;
      case Metric::Optimal: break;
    }
    if (value)
      rows.push_back(Row{&am, *value});
    else
      ++excluded;
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.m->influence != b.m->influence) return a.m->influence > b.m->influence;
    return a.m->account_id < b.m->account_id;
  });

  Ranking ranking;
  ranking.metric = by;
  ranking.tie_policy = "influence desc, account_id asc";
  ranking.excluded = excluded;
  ranking.ordered_accounts.reserve(rows.size());
  ranking.values.reserve(rows.size());
  for (const auto& row : rows) {
    ranking.ordered_accounts.push_back(row.m->account_id);
    ranking.values.push_back(row.value);
  }
  return ranking;
}

void write_metrics_csv(std::ostream& out, std::span<const AccountMetrics> metrics) {
  out << "account_id,fib_index,influence,popularity,bot_score,n_misinfo_posts\n";
  for (const auto& m : metrics) {
    out << csv_escape(m.account_id) << ',' << m.fib_index << ',' << m.influence << ',';
    if (m.popularity) out << format_double(*m.popularity);
    out << ',';
    if (m.bot_score) out << format_double(*m.bot_score);
    out << ',' << m.n_misinfo_posts << '\n';
  }
}

namespace {

std::uint64_t parse_u64_field(const std::string& field, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("bad integer field \"" + field + "\"", line_no);
  return value;
}

double parse_double_field(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("bad numeric field \"" + field + "\"", line_no);
  return value;
}

} // namespace

std::vector<AccountMetrics> read_metrics_csv(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line) ||
      line != "account_id,fib_index,influence,popularity,bot_score,n_misinfo_posts")
    throw ParseError("unexpected metrics CSV header in " + path);
  std::vector<AccountMetrics> rows;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = csv_split(line);
    if (fields.size() != 6)
      throw ParseError("expected 6 fields", reader.line_no());
    AccountMetrics m;
    m.account_id = fields[0];
    m.fib_index = parse_u64_field(fields[1], reader.line_no());
    m.influence = parse_u64_field(fields[2], reader.line_no());
    if (!fields[3].empty()) m.popularity = parse_double_field(fields[3], reader.line_no());
    if (!fields[4].empty()) m.bot_score = parse_double_field(fields[4], reader.line_no());
    m.n_misinfo_posts = parse_u64_field(fields[5], reader.line_no());
    rows.push_back(std::move(m));
  }
  return rows;
}

} // namespace fibrank
