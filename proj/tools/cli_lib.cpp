#include "cli_lib.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "fibrank/dismantle.hpp"
#include "fibrank/domain.hpp"
#include "fibrank/error.hpp"
#include "fibrank/io.hpp"
#include "fibrank/net.hpp"
#include "fibrank/network.hpp"
#include "fibrank/toxicity.hpp"
#include "fibrank/version.hpp"

namespace fibrank::cli {

namespace {

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " path is required");
  if (!fs::exists(path)) throw IoError(std::string(what) + " not found: " + path);
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered interval_json(const Interval& iv) {
  return ordered{{"start", iv.start}, {"end", iv.end}};
}

Interval interval_from_json(const nlohmann::json& j) {
  return {j.at("start").get<std::int64_t>(), j.at("end").get<std::int64_t>()};
}

/// Run record written next to every subcommand's artifacts. The timestamp
/// is the one field that varies between identical runs.
struct Manifest {
  std::string command;
  std::string config_json;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::uint64_t>> counters;
  std::vector<std::pair<std::string, double>> results;
};

void write_manifest(const Manifest& m, const fs::path& out_dir) {
  ordered j;
  j["version"] = kVersion;
  j["command"] = m.command;
  j["timestamp"] = format_utc(std::time(nullptr));
  if (!m.config_json.empty()) {
    j["config_hash"] = hash_hex(fnv1a64(m.config_json));
    j["config"] = ordered::parse(m.config_json);
  }
  ordered inputs = ordered::object();
  for (const auto& [path, hash] : m.inputs) inputs[path] = hash;
  j["inputs"] = inputs;
  ordered counters = ordered::object();
  for (const auto& [key, value] : m.counters) counters[key] = value;
  j["counters"] = counters;
  if (!m.results.empty()) {
    ordered results = ordered::object();
    for (const auto& [key, value] : m.results) results[key] = value;
    j["results"] = results;
  }
  write_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

std::vector<std::pair<std::string, std::string>> input_hashes(
    const PipelineConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto* path : {&config.input, &config.domain_list, &config.shortener_map,
                           &config.status_file, &config.annotation_file}) {
    if (!path->empty() && fs::exists(*path))
      out.emplace_back(*path, hash_hex(fnv1a64_file(*path)));
  }
  return out;
}

std::vector<std::pair<std::string, std::uint64_t>> corpus_counters(
    const LoadedCorpus& corpus) {
  return {{"lines", corpus.counters.lines},
          {"parsed", corpus.counters.parsed},
          {"parse_errors", corpus.counters.parse_errors},
          {"empty_lines", corpus.counters.empty_lines},
          {"expansion_failures", corpus.counters.expansion_failures},
          {"low_cred", corpus.counters.low_cred},
          {"dropped", corpus.dropped},
          {"observation_records", corpus.observation.size()},
          {"evaluation_records", corpus.evaluation.size()}};
}

void emit_warnings(const LoadedCorpus& corpus) {
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
}

void write_text(const fs::path& out_dir, const char* name, std::string_view text) {
  write_file(out_dir / name, text);
}

unsigned resolve_workers(unsigned configured, std::size_t items, std::size_t serial_floor) {
  unsigned n = configured ? configured : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (items < serial_floor) return 1;
  return static_cast<unsigned>(std::min<std::size_t>(n, items));
}

std::string sides_name(Sides s) {
  switch (s) {
    case Sides::two_sided: return "two-sided";
    case Sides::less: return "less";
    case Sides::greater: return "greater";
  }
  return "two-sided";
}

} // namespace

void PipelineConfig::validate() const {
  split.validate();
  if (metrics.empty()) throw ConfigError("at least one metric is required");
  bool seen[5] = {};
  for (const auto metric : metrics) {
    if (metric == Metric::Optimal)
      throw ConfigError("the optimal oracle is always included; list predictive metrics only");
    if (seen[static_cast<int>(metric)])
      throw ConfigError("duplicate metric: " + std::string(metric_name(metric)));
    seen[static_cast<int>(metric)] = true;
  }
  if (top_rule.kind == TopRule::Kind::percent_positive &&
      (!(top_rule.percent > 0.0) || top_rule.percent > 100.0))
    throw ConfigError("top percent must lie in (0, 100]");
  if (scorer != "offline-stub" && scorer != "cached" && scorer != "live")
    throw ConfigError("unknown scorer mode: " + scorer);
  if (scorer == "live" && scorer_endpoint.empty())
    throw ConfigError("the live scorer needs an endpoint");
  if (curve_stride == 0) throw ConfigError("curve stride must be positive");
  if ((ratio_window.start != 0 || ratio_window.end != 0) &&
      ratio_window.end <= ratio_window.start)
    throw ConfigError("ratio window is empty or inverted");
  if (out_dir.empty()) throw ConfigError("output directory is required");
}

Interval PipelineConfig::effective_ratio_window() const {
  if (ratio_window.start != 0 || ratio_window.end != 0) return ratio_window;
  return {split.observation.start, split.observation.start + 90 * std::int64_t{86400}};
}

std::string PipelineConfig::to_json() const {
  ordered j;
  j["input"] = input;
  j["domain_list"] = domain_list;
  j["shortener_map"] = shortener_map;
  j["status_file"] = status_file;
  j["annotation_file"] = annotation_file;
  j["split"] = ordered{{"observation", interval_json(split.observation)},
                       {"evaluation", interval_json(split.evaluation)}};
  std::vector<std::string> names;
  names.reserve(metrics.size());
  for (const auto metric : metrics) names.emplace_back(metric_name(metric));
  j["metrics"] = names;
  j["top_rule"] = ordered{
      {"kind", top_rule.kind == TopRule::Kind::top_n ? "top_n" : "percent_positive"},
      {"percent", top_rule.percent},
      {"n", top_rule.n}};
  j["ratio_window"] = interval_json(ratio_window);
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["scorer"] = scorer;
  j["scorer_endpoint"] = scorer_endpoint;
  j["toxicity_cache"] = toxicity_cache;
  j["follower_threshold"] = follower_threshold;
  j["max_scan_k"] = max_scan_k;
  j["curve_stride"] = curve_stride;
  j["workers"] = workers;
  j["strict"] = strict;
  return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("malformed config JSON");
  PipelineConfig cfg;
  try {
    cfg.input = j.value("input", cfg.input);
    cfg.domain_list = j.value("domain_list", cfg.domain_list);
    cfg.shortener_map = j.value("shortener_map", cfg.shortener_map);
    cfg.status_file = j.value("status_file", cfg.status_file);
    cfg.annotation_file = j.value("annotation_file", cfg.annotation_file);
    if (j.contains("split")) {
      cfg.split.observation = interval_from_json(j.at("split").at("observation"));
      cfg.split.evaluation = interval_from_json(j.at("split").at("evaluation"));
    }
    if (j.contains("metrics")) {
      cfg.metrics.clear();
      for (const auto& name : j.at("metrics")) {
        const auto metric = parse_metric(name.get<std::string>());
        if (!metric) throw ConfigError("unknown metric: " + name.get<std::string>());
        cfg.metrics.push_back(*metric);
      }
    }
    if (j.contains("top_rule")) {
      const auto& rule = j.at("top_rule");
      const std::string kind = rule.value("kind", "percent_positive");
      if (kind == "top_n")
        cfg.top_rule.kind = TopRule::Kind::top_n;
      else if (kind == "percent_positive")
        cfg.top_rule.kind = TopRule::Kind::percent_positive;
      else
        throw ConfigError("unknown top rule: " + kind);
      cfg.top_rule.percent = rule.value("percent", cfg.top_rule.percent);
      cfg.top_rule.n = rule.value("n", cfg.top_rule.n);
    }
    if (j.contains("ratio_window"))
      cfg.ratio_window = interval_from_json(j.at("ratio_window"));
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.scorer = j.value("scorer", cfg.scorer);
    cfg.scorer_endpoint = j.value("scorer_endpoint", cfg.scorer_endpoint);
    cfg.toxicity_cache = j.value("toxicity_cache", cfg.toxicity_cache);
    cfg.follower_threshold = j.value("follower_threshold", cfg.follower_threshold);
    cfg.max_scan_k = j.value("max_scan_k", cfg.max_scan_k);
    cfg.curve_stride = j.value("curve_stride", cfg.curve_stride);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.strict = j.value("strict", cfg.strict);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return cfg;
}

void PipelineConfig::save(const std::string& path) const { write_file(path, to_json()); }

PipelineConfig PipelineConfig::load(const std::string& path) {
  require_file(path, "config");
  return from_json(read_file(path));
}

void PipelineConfig::resolve_paths(const std::string& base) {
  const fs::path root(base);
  const auto fix = [&](std::string& p) {
    if (p.empty()) return;
    const fs::path fp(p);
    if (fp.is_absolute()) return;
    p = (root / fp).lexically_normal().string();
  };
  fix(input);
  fix(domain_list);
  fix(shortener_map);
  fix(status_file);
  fix(annotation_file);
  fix(toxicity_cache);
  fix(out_dir);
}

namespace {

struct ShardOutcome {
  std::vector<LabeledRecord> observation;
  std::vector<LabeledRecord> evaluation;
  IngestCounters counters;
  std::uint64_t dropped = 0;
  std::vector<std::string> warnings;
  std::string fatal;  // strict-mode diagnostic, already carrying the line number
  std::size_t fatal_line = 0;
};

} // namespace

LoadedCorpus load_corpus(const PipelineConfig& config) {
  require_file(config.input, "input corpus");
  require_file(config.domain_list, "domain list");
  const DomainList list = DomainList::from_file(config.domain_list);
  const auto& psl = PublicSuffixList::bundled();

  std::optional<ShortenerMap> shortener;
  std::optional<ShortLinkExpander> expander;
  if (!config.shortener_map.empty()) {
    require_file(config.shortener_map, "shortener map");
    shortener = ShortenerMap::from_tsv(config.shortener_map);
    expander.emplace(shortener->hosts(), *shortener);
  }
  const ShortLinkExpander* exp = expander ? &*expander : nullptr;

  std::vector<std::string> lines;
  {
    LineReader reader(config.input);
    std::string line;
    while (reader.next(line)) lines.push_back(line);
  }

  const unsigned workers = resolve_workers(config.workers, lines.size(), 2048);
  std::vector<ShardOutcome> shards(workers);
  const std::size_t chunk = lines.empty() ? 1 : (lines.size() + workers - 1) / workers;
  const auto work = [&](unsigned w) {
    ShardOutcome& out = shards[w];
    const std::size_t begin = std::min(lines.size(), w * chunk);
    const std::size_t end = std::min(lines.size(), begin + chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const std::string& line = lines[i];
      ++out.counters.lines;
      if (line.empty()) {
        ++out.counters.empty_lines;
        continue;
      }
      TweetRecord rec;
      try {
        rec = parse_record(line, i + 1);
      } catch (const RecordError& e) {
        if (config.strict) {
          out.fatal = e.what();
          out.fatal_line = i + 1;
          return;
        }
        ++out.counters.parse_errors;
        if (out.warnings.size() < 8) out.warnings.emplace_back(e.what());
        continue;
      }
      ++out.counters.parsed;
      const Period period = assign_period(rec.timestamp, config.split);
      if (period == Period::dropped) {
        ++out.dropped;
        continue;
      }
      auto labeled = label_record(std::move(rec), list, psl, exp, out.counters);
      (period == Period::observation ? out.observation : out.evaluation)
          .push_back(std::move(labeled));
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  const ShardOutcome* failed = nullptr;
  for (const auto& shard : shards)
    if (!shard.fatal.empty() && (failed == nullptr || shard.fatal_line < failed->fatal_line))
      failed = &shard;
  if (failed != nullptr) throw ParseError(config.input + ": " + failed->fatal);

  LoadedCorpus out;
  for (auto& shard : shards) {
    std::move(shard.observation.begin(), shard.observation.end(),
              std::back_inserter(out.observation));
    std::move(shard.evaluation.begin(), shard.evaluation.end(),
              std::back_inserter(out.evaluation));
    out.counters.merge(shard.counters);
    out.dropped += shard.dropped;
    for (auto& w : shard.warnings)
      if (out.warnings.size() < 8) out.warnings.push_back(config.input + ": " + w);
  }
  return out;
}

std::vector<AccountMetrics> observation_metrics(const LoadedCorpus& corpus,
                                                unsigned workers) {
  const auto& records = corpus.observation;
  const unsigned n = resolve_workers(workers, records.size(), 4096);
  if (n == 1) {
    MetricsAccumulator acc;
    for (const auto& rec : records) acc.add(rec);
    return std::move(acc).finish();
  }
  std::vector<MetricsAccumulator> accs(n);
  const std::size_t chunk = (records.size() + n - 1) / n;
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (unsigned w = 0; w < n; ++w)
    threads.emplace_back([&, w] {
      const std::size_t begin = std::min(records.size(), w * chunk);
      const std::size_t end = std::min(records.size(), begin + chunk);
      for (std::size_t i = begin; i < end; ++i) accs[w].add(records[i]);
    });
  for (auto& t : threads) t.join();
  MetricsAccumulator total = std::move(accs.front());
  for (unsigned w = 1; w < n; ++w) total.merge(std::move(accs[w]));
  return std::move(total).finish();
}

void run_ingest(const PipelineConfig& config) {
  config.validate();
  const auto corpus = load_corpus(config);
  emit_warnings(corpus);
  std::uint64_t obs_skips = 0;
  std::uint64_t eval_skips = 0;
  const auto obs_net = build_network(corpus.observation, &obs_skips);
  const auto eval_net = build_network(corpus.evaluation, &eval_skips);

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  {
    std::ostringstream out;
    obs_net.write_csv(out);
    write_text(out_dir, "observation_network.csv", out.str());
  }
  {
    std::ostringstream out;
    eval_net.write_csv(out);
    write_text(out_dir, "evaluation_network.csv", out.str());
  }

  Manifest m;
  m.command = "ingest";
  m.config_json = config.to_json();
  m.inputs = input_hashes(config);
  m.counters = corpus_counters(corpus);
  m.counters.insert(m.counters.end(),
                    {{"observation_self_retweets_skipped", obs_skips},
                     {"evaluation_self_retweets_skipped", eval_skips},
                     {"observation_nodes", obs_net.node_count()},
                     {"observation_posters", obs_net.poster_count()},
                     {"observation_edges", obs_net.edge_count()},
                     {"observation_total_weight", obs_net.total_weight()},
                     {"evaluation_nodes", eval_net.node_count()},
                     {"evaluation_posters", eval_net.poster_count()},
                     {"evaluation_edges", eval_net.edge_count()},
                     {"evaluation_total_weight", eval_net.total_weight()}});
  write_manifest(m, out_dir);
}

void run_rank(const PipelineConfig& config) {
  config.validate();
  const auto corpus = load_corpus(config);
  emit_warnings(corpus);
  const auto metrics = observation_metrics(corpus, config.workers);

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  {
    std::ostringstream out;
    write_metrics_csv(out, metrics);
    write_text(out_dir, "metrics.csv", out.str());
  }

  Manifest m;
  m.command = "rank";
  m.config_json = config.to_json();
  m.inputs = input_hashes(config);
  m.counters = corpus_counters(corpus);
  m.counters.emplace_back("accounts", metrics.size());

  for (const auto metric : config.metrics) {
    const auto ranking = rank_accounts(metrics, metric);
    std::ostringstream out;
    out << "rank,account_id,value\n";
    for (std::size_t i = 0; i < ranking.size(); ++i)
      out << i + 1 << ',' << csv_escape(ranking.ordered_accounts[i]) << ','
          << format_double(ranking.values[i]) << '\n';
    const std::string name(metric_name(metric));
    write_file(out_dir / ("ranking_" + name + ".csv"), out.str());
    m.counters.emplace_back("excluded_" + name, ranking.excluded);
  }
  write_manifest(m, out_dir);
}

void run_dismantle(const PipelineConfig& config) {
  config.validate();
  const auto corpus = load_corpus(config);
  emit_warnings(corpus);
  const auto metrics = observation_metrics(corpus, config.workers);
  const auto eval_net = build_network(corpus.evaluation);

  std::vector<std::string> candidates;
  candidates.reserve(metrics.size());
  for (const auto& row : metrics) candidates.push_back(row.account_id);

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);

  Manifest m;
  m.command = "dismantle";
  m.config_json = config.to_json();
  m.inputs = input_hashes(config);
  m.counters = corpus_counters(corpus);
  m.counters.insert(m.counters.end(),
                    {{"candidates", candidates.size()},
                     {"evaluation_total_weight", eval_net.total_weight()}});

  std::vector<DismantlingCurve> curves;
  std::ostringstream shares;
  shares << "account_id,m\n";
  if (eval_net.total_weight() == 0 || candidates.empty()) {
    // nothing measurable to remove: every curve is the single point (0, 1)
    DismantlingCurve flat;
    flat.metric = Metric::Optimal;
    flat.points = {CurvePoint{}};
    curves.push_back(flat);
    for (const auto metric : config.metrics) {
      flat.metric = metric;
      curves.push_back(flat);
    }
  } else {
    const auto optimal = optimal_ranking(eval_net, candidates);
    curves.push_back(dismantling_curve(optimal, eval_net));
    for (std::size_t i = 0; i < optimal.size(); ++i)
      shares << csv_escape(optimal.ordered_accounts[i]) << ','
             << format_double(optimal.values[i]) << '\n';
    for (const auto metric : config.metrics)
      curves.push_back(dismantling_curve(rank_accounts(metrics, metric), eval_net));
    m.results.emplace_back("residual_floor", residual_floor(eval_net, candidates));
  }
  {
    std::ostringstream out;
    write_curves_csv(out, curves, config.curve_stride);
    write_text(out_dir, "curves.csv", out.str());
  }
  write_text(out_dir, "shares.csv", shares.str());
  write_manifest(m, out_dir);
}

void run_scan(const PipelineConfig& config) {
  config.validate();
  if (config.metrics.size() < 2)
    throw ConfigError("scan compares the first two configured metrics; give two");
  const auto corpus = load_corpus(config);
  emit_warnings(corpus);
  const auto metrics = observation_metrics(corpus, config.workers);
  const auto eval_net = build_network(corpus.evaluation);
  if (eval_net.total_weight() == 0)
    throw StatsError("evaluation network carries no misinformation retweets");

  const auto rank_a = rank_accounts(metrics, config.metrics[0]);
  const auto rank_b = rank_accounts(metrics, config.metrics[1]);
  const auto curve_a = dismantling_curve(rank_a, eval_net);
  const auto curve_b = dismantling_curve(rank_b, eval_net);

  const std::size_t cap = std::min(rank_a.size(), rank_b.size());
  const std::size_t max_k =
      config.max_scan_k ? std::min(config.max_scan_k, cap) : cap;
  if (max_k < 2) throw StatsError("not enough ranked accounts to scan");

  TestOptions options;
  options.seed = config.seed;
  const auto scan = prefix_cvm_scan(curve_a, curve_b, max_k, options);

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  std::ostringstream out;
  out << "k,p_value\n";
  std::size_t first_alarm = 0;
  for (const auto& [k, p] : scan) {
    out << k << ',' << format_double(p) << '\n';
    if (first_alarm == 0 && p < 0.05) first_alarm = k;
  }
  write_text(out_dir, "scan.csv", out.str());

  Manifest m;
  m.command = "scan";
  m.config_json = config.to_json();
  m.inputs = input_hashes(config);
  m.counters = corpus_counters(corpus);
  m.counters.insert(m.counters.end(), {{"scanned_ks", scan.size()},
                                       {"first_alarm_k", first_alarm}});
  m.results.emplace_back("alarm_threshold", 0.05);
  write_manifest(m, out_dir);
}

void run_characterize(const PipelineConfig& config) {
  config.validate();
  const auto corpus = load_corpus(config);
  emit_warnings(corpus);
  const auto metrics = observation_metrics(corpus, config.workers);

  std::vector<std::string> accounts;
  for (const auto metric : config.metrics) {
    const auto ranking = rank_accounts(metrics, metric);
    auto head = select_top(ranking, config.top_rule);
    accounts.insert(accounts.end(), std::make_move_iterator(head.begin()),
                    std::make_move_iterator(head.end()));
  }
  std::sort(accounts.begin(), accounts.end());
  accounts.erase(std::unique(accounts.begin(), accounts.end()), accounts.end());

  std::vector<TweetRecord> records;
  records.reserve(corpus.observation.size() + corpus.evaluation.size());
  for (const auto& labeled : corpus.observation) records.push_back(labeled.record);
  for (const auto& labeled : corpus.evaluation) records.push_back(labeled.record);

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);

  OfflineStubScorer stub;
  std::unique_ptr<HttpToxicityScorer> live;
  std::unique_ptr<DiskCachedScorer> cached;
  ToxicityScorer* scorer = &stub;
  if (config.scorer == "live") {
    live = std::make_unique<HttpToxicityScorer>(config.scorer_endpoint);
    scorer = live.get();
  } else if (config.scorer == "cached") {
    ToxicityScorer* base = &stub;
    if (!config.scorer_endpoint.empty()) {
      live = std::make_unique<HttpToxicityScorer>(config.scorer_endpoint);
      base = live.get();
    }
    const std::string cache_path = config.toxicity_cache.empty()
                                       ? (out_dir / "toxicity_cache.tsv").string()
                                       : config.toxicity_cache;
    cached = std::make_unique<DiskCachedScorer>(cache_path, base);
    scorer = cached.get();
  }
  const std::size_t scored = apply_scorer(records, *scorer);
  if (cached) cached->flush();

  std::optional<std::unordered_map<std::string, StatusEntry>> status;
  if (!config.status_file.empty()) {
    require_file(config.status_file, "status file");
    status = read_status_csv(config.status_file);
  }
  std::optional<std::unordered_map<std::string, AnnotationEntry>> notes;
  if (!config.annotation_file.empty()) {
    require_file(config.annotation_file, "annotation file");
    notes = read_annotation_csv(config.annotation_file);
  }

  const DomainList list = DomainList::from_file(config.domain_list);
  const auto built = build_profiles(records, accounts, list,
                                    PublicSuffixList::bundled(),
                                    config.effective_ratio_window(),
                                    status ? &*status : nullptr,
                                    notes ? &*notes : nullptr);
  {
    std::ostringstream out;
    write_profiles_csv(out, built.profiles);
    write_text(out_dir, "profiles.csv", out.str());
  }

  const auto tab = prominence_crosstab(built.profiles, config.follower_threshold);
  ordered cj;
  cj["follower_threshold"] = tab.follower_threshold;
  cj["n_profiles"] = tab.n_profiles;
  cj["n_unknown_status"] = tab.n_unknown_status;
  cj["n_suspended"] = tab.n_suspended;
  cj["n_suspended_verified_known"] = tab.n_suspended_verified_known;
  cj["n_suspended_verified"] = tab.n_suspended_verified;
  cj["n_suspended_above"] = tab.n_suspended_above;
  cj["n_suspended_below"] = tab.n_suspended_below;
  cj["n_above"] = tab.n_above;
  cj["n_below"] = tab.n_below;
  cj["pct_suspended_verified"] = tab.pct_suspended_verified();
  cj["pct_suspended_above"] = tab.pct_suspended_above();
  cj["pct_suspended_below"] = tab.pct_suspended_below();
  cj["suspension_rate_above"] = tab.suspension_rate_above();
  cj["suspension_rate_below"] = tab.suspension_rate_below();
  write_text(out_dir, "crosstab.json", cj.dump(2) + "\n");

  Manifest m;
  m.command = "characterize";
  m.config_json = config.to_json();
  m.inputs = input_hashes(config);
  m.counters = corpus_counters(corpus);
  m.counters.insert(m.counters.end(),
                    {{"selected_accounts", accounts.size()},
                     {"scored_tweets", scored},
                     {"url_failures", built.url_failures},
                     {"accounts_without_tweets", built.accounts_without_tweets}});
  if (cached)
    m.counters.insert(m.counters.end(), {{"toxicity_cache_hits", cached->hits()},
                                         {"toxicity_cache_misses", cached->misses()}});
  write_manifest(m, out_dir);
}

void run_synth(const GeneratorConfig& config, const std::string& out_dir,
               bool gzip_corpus) {
  const auto result = generate(config);
  const fs::path root(out_dir.empty() ? "." : out_dir);
  fs::create_directories(root);

  const char* corpus_name = gzip_corpus ? "corpus.jsonl.gz" : "corpus.jsonl";
  write_synth_result(result, (root / corpus_name).string(),
                     (root / "truth.json").string());
  std::string domains;
  for (const auto& d : result.truth.lowcred_domains) {
    domains += d;
    domains += '\n';
  }
  write_text(root, "domains.txt", domains);

  // ready-to-run config next to the corpus; paths resolve against it
  PipelineConfig pipeline;
  pipeline.input = corpus_name;
  pipeline.domain_list = "domains.txt";
  pipeline.split = result.truth.split;
  pipeline.out_dir = ".";
  pipeline.seed = config.seed;
  pipeline.save((root / "config.json").string());

  ordered g;
  g["seed"] = config.seed;
  g["n_accounts"] = config.n_accounts;
  g["n_superspreaders"] = config.n_superspreaders;
  g["activity_exponent"] = config.activity_exponent;
  g["retweet_exponent"] = config.retweet_exponent;
  g["lowcred_domain_count"] = config.lowcred_domain_count;
  g["planted_residual"] = config.planted_residual;
  g["observation_days"] = config.observation_days;
  g["evaluation_days"] = config.evaluation_days;

  Manifest m;
  m.command = "synth";
  m.config_json = g.dump(2) + "\n";
  m.counters = {{"corpus_records", result.corpus_lines.size()},
                {"superspreaders", result.truth.superspreaders.size()},
                {"observation_records", result.truth.observation.n_records},
                {"evaluation_records", result.truth.evaluation.n_records},
                {"dropped", result.truth.n_dropped},
                {"observation_total_weight", result.truth.observation.total_weight},
                {"evaluation_total_weight", result.truth.evaluation.total_weight}};
  m.results = {{"residual_fraction", result.truth.residual_fraction}};
  write_manifest(m, root);
}

std::vector<double> read_sample(const std::string& path) {
  LineReader reader(path);
  std::vector<double> values;
  std::string line;
  while (reader.next(line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t'))
      line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    if (start == line.size()) continue;
    double v = 0.0;
    const char* begin = line.data() + start;
    const char* end = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
      throw ParseError("bad sample value: " + line, reader.line_no());
    values.push_back(v);
  }
  return values;
}

std::string run_stats(const StatsRequest& request) {
  ordered j;
  if (request.test == "cvm" || request.test == "mwu" || request.test == "spearman") {
    require_file(request.x_path, "sample x");
    require_file(request.y_path, "sample y");
    const auto x = read_sample(request.x_path);
    const auto y = read_sample(request.y_path);
    if (request.test == "cvm") {
      const auto r = cvm_two_sample(x, y, request.options);
      j["test"] = "cvm";
      j["n1"] = r.n1;
      j["n2"] = r.n2;
      j["statistic"] = r.statistic;
      j["p_value"] = r.p_value;
      j["method"] = std::string(pmethod_name(r.method));
    } else if (request.test == "mwu") {
      const auto r = mann_whitney_u(x, y, request.sides, request.options);
      j["test"] = "mwu";
      j["sides"] = sides_name(request.sides);
      j["n1"] = r.n1;
      j["n2"] = r.n2;
      j["statistic"] = r.statistic;
      j["p_value"] = r.p_value;
      j["method"] = std::string(pmethod_name(r.method));
    } else {
      const auto r = spearman(x, y);
      j["test"] = "spearman";
      j["n"] = r.n;
      j["r"] = r.r;
      j["p_value"] = r.p_value;
    }
  } else if (request.test == "alpha") {
    require_file(request.annotations_path, "annotations");
    const auto table = AnnotationTable::from_csv(request.annotations_path);
    j["test"] = "krippendorff_alpha";
    j["n_entries"] = table.n_entries();
    j["n_annotators"] = table.n_annotators();
    j["alpha"] = krippendorff_alpha(table);
  } else {
    throw ConfigError("unknown stats test: " + request.test);
  }
  const std::string out = j.dump() + "\n";
  if (!request.out_path.empty()) write_file(request.out_path, out);
  return out;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) != nullptr) return 1;
  if (dynamic_cast<const RecordError*>(&error) != nullptr) return 2;
  if (dynamic_cast<const IoError*>(&error) != nullptr) return 2;
  if (dynamic_cast<const StatsError*>(&error) != nullptr) return 2;
  return 3;
}

} // namespace fibrank::cli
