#include "fibrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <utility>

#include <json.hpp>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"
#include "fibrank/rng.hpp"

namespace fibrank {

namespace {

constexpr std::int64_t kEpoch = 1577836800; // 2020-01-01T00:00:00Z
constexpr std::int64_t kDay = 86400;

std::string padded_id(char prefix, std::uint64_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*llu", prefix, std::min(width, 20),
                static_cast<unsigned long long>(value));
  return buf;
}

std::string numbered_domain(const char* stem, std::size_t i, const char* tld) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%02zu%s", stem, i, tld);
  return buf;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

} // namespace

void GeneratorConfig::validate() const {
  if (n_accounts < 10) throw ConfigError("n_accounts must be at least 10");
  if (n_superspreaders * 2 > n_accounts)
    throw ConfigError("n_superspreaders must not exceed n_accounts/2");
  if (!(activity_exponent > 1.0) || !(retweet_exponent > 1.0))
    throw ConfigError("power-law exponents must exceed 1");
  if (lowcred_domain_count == 0)
    throw ConfigError("need at least one low-credibility domain");
  if (!(planted_residual >= 0.0) || planted_residual >= 0.5)
    throw ConfigError("planted_residual must lie in [0, 0.5)");
  if (observation_days <= 0 || evaluation_days <= 0)
    throw ConfigError("period lengths must be positive");
}

PeriodSplit GeneratorConfig::split() const {
  PeriodSplit s;
  s.observation = {kEpoch, kEpoch + observation_days * kDay};
  s.evaluation = {s.observation.end, s.observation.end + evaluation_days * kDay};
  return s;
}

SynthResult generate(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const PeriodSplit split = config.split();

  // evaluation-only posters that carry the planted residual mass
  const std::size_t n_late = std::max<std::size_t>(2, config.n_accounts / 100);
  const std::size_t n_total = config.n_accounts + n_late;

  int id_width = 4;
  for (std::size_t v = n_total - 1; v >= 10000; v /= 10) ++id_width;

  std::vector<std::string> account_ids(n_total);
  std::vector<std::uint64_t> followers(n_total);
  std::vector<double> bot_base(n_total);
  for (std::size_t a = 0; a < n_total; ++a) {
    account_ids[a] = padded_id('a', a, id_width);
    const bool super = a < config.n_superspreaders;
    followers[a] = super ? rng.pareto_int(2.0, 20000, 5000000)
                         : rng.pareto_int(2.0, 50, 1000000);
    bot_base[a] = super ? 0.5 + rng.uniform01() * 0.45 : rng.uniform01() * 0.5;
  }

  std::vector<std::string> lowcred_domains(config.lowcred_domain_count);
  for (std::size_t d = 0; d < lowcred_domains.size(); ++d)
    lowcred_domains[d] = numbered_domain("lowcred-", d, ".info");
  std::vector<std::string> credible_domains(20);
  for (std::size_t d = 0; d < credible_domains.size(); ++d)
    credible_domains[d] = numbered_domain("legit-", d, ".org");

  GroundTruth truth;
  truth.split = split;
  truth.superspreaders.assign(account_ids.begin(),
                              account_ids.begin() +
                                  static_cast<std::ptrdiff_t>(config.n_superspreaders));
  truth.lowcred_domains = lowcred_domains;

  std::vector<TweetRecord> records;
  std::uint64_t tweet_counter = 0;
  // per period: poster id -> tweet id -> low-cred retweet count
  std::map<std::string, std::map<std::string, std::uint64_t>> obs_posts, eval_posts;

  auto make_tweet_id = [&] { return padded_id('t', tweet_counter++, 8); };

  auto jitter = [&](double base) {
    return clamp01(base + (rng.uniform01() - 0.5) * 0.1);
  };

  auto record_event = [&](const TweetRecord& rec, bool lowcred) {
    const Period period = assign_period(rec.timestamp, split);
    if (period == Period::dropped) {
      ++truth.n_dropped;
      return;
    }
    const bool obs = period == Period::observation;
    PeriodTruth& slice = obs ? truth.observation : truth.evaluation;
    auto& posts = obs ? obs_posts : eval_posts;
    ++slice.n_records;
    if (!lowcred) return;
    if (rec.is_original()) {
      posts[rec.author_id].try_emplace(rec.tweet_id, 0);
    } else {
      ++posts[rec.retweet_of->author_id][rec.retweet_of->tweet_id];
      ++slice.edges[rec.retweet_of->author_id][rec.author_id];
      ++slice.total_weight;
    }
  };

  // returns the index of the new record in `records`
  auto emit_original = [&](std::size_t author, std::int64_t ts, bool lowcred) {
    TweetRecord rec;
    rec.tweet_id = make_tweet_id();
    rec.author_id = account_ids[author];
    rec.timestamp = ts;
    if (lowcred) {
      const auto& domain = lowcred_domains[rng.uniform_index(lowcred_domains.size())];
      rec.urls.push_back("https://" + domain + "/p/" + rec.tweet_id);
    } else if (rng.uniform01() < 0.6) {
      const auto& domain = credible_domains[rng.uniform_index(credible_domains.size())];
      rec.urls.push_back("https://" + domain + "/a/" + rec.tweet_id);
    }
    rec.follower_count = followers[author];
    rec.bot_score = jitter(bot_base[author]);
    const double lang = rng.uniform01();
    if (lang < 0.90)
      rec.text_lang = "en";
    else if (lang < 0.95)
      rec.text_lang = "es";
    else
      rec.text_lang = "de";
    if (*rec.text_lang == "en")
      rec.toxicity = clamp01(
          (author < config.n_superspreaders ? 0.25 : 0.10) + rng.uniform01() * 0.5);
    record_event(rec, lowcred);
    records.push_back(std::move(rec));
    return records.size() - 1;
  };

  auto emit_retweets = [&](std::size_t orig_index, std::size_t author,
                           std::uint64_t count, bool lowcred, const Interval& window) {
    const std::string orig_id = records[orig_index].tweet_id;
    const std::string orig_author = records[orig_index].author_id;
    const std::int64_t orig_ts = records[orig_index].timestamp;
    const std::vector<std::string> urls = records[orig_index].urls;
    for (std::uint64_t r = 0; r < count; ++r) {
      std::size_t who;
      if (author < config.n_accounts) {
        who = rng.uniform_index(config.n_accounts - 1);
        if (who >= author) ++who;
      } else {
        who = rng.uniform_index(config.n_accounts);
      }
      TweetRecord rec;
      rec.tweet_id = make_tweet_id();
      rec.author_id = account_ids[who];
      rec.timestamp = rng.uniform_i64(orig_ts + 1, window.end);
      rec.retweet_of = RetweetRef{orig_id, orig_author};
      rec.urls = urls;
      rec.follower_count = followers[who];
      rec.bot_score = jitter(bot_base[who]);
      record_event(rec, lowcred);
      records.push_back(std::move(rec));
    }
  };

  // observation period: heavy-tailed low-cred activity, planted heads
  for (std::size_t a = 0; a < config.n_accounts; ++a) {
    const bool super = a < config.n_superspreaders;
    const std::uint64_t n_posts =
        super ? 30 + rng.uniform_u64(31)
              : rng.pareto_int(config.activity_exponent, 1, 40) - 1;
    for (std::uint64_t p = 0; p < n_posts; ++p) {
      const std::int64_t ts =
          rng.uniform_i64(split.observation.start, split.observation.end - 1);
      const std::size_t idx = emit_original(a, ts, true);
      const std::uint64_t rts =
          super ? rng.pareto_int(config.retweet_exponent, 15, 400)
                : rng.pareto_int(config.retweet_exponent, 1, 200) - 1;
      emit_retweets(idx, a, rts, true, split.observation);
    }
    if (rng.uniform01() < 0.25) { // credible traffic, stays off the network
      const std::int64_t ts =
          rng.uniform_i64(split.observation.start, split.observation.end - 1);
      const std::size_t idx = emit_original(a, ts, false);
      emit_retweets(idx, a, rng.pareto_int(config.retweet_exponent, 1, 30) - 1, false,
                    split.observation);
    }
  }

  // evaluation mass per observation poster, correlated with their influence
  std::vector<std::uint64_t> eval_target(config.n_accounts, 0);
  std::uint64_t insider_mass = 0;
  for (std::size_t a = 0; a < config.n_accounts; ++a) {
    const auto it = obs_posts.find(account_ids[a]);
    if (it == obs_posts.end()) continue;
    std::uint64_t infl = 0;
    for (const auto& [tweet, c] : it->second) infl += c;
    const double factor = 0.85 + 0.3 * rng.uniform01();
    eval_target[a] =
        static_cast<std::uint64_t>(std::llround(static_cast<double>(infl) * factor));
    insider_mass += eval_target[a];
  }

  auto emit_eval_mass = [&](std::size_t author, std::uint64_t mass, std::uint64_t lo,
                            std::uint64_t hi) {
    std::uint64_t remaining = mass;
    while (remaining > 0) {
      const std::uint64_t chunk = std::min<std::uint64_t>(
          remaining, rng.pareto_int(config.retweet_exponent, lo, hi));
      const std::int64_t ts =
          rng.uniform_i64(split.evaluation.start, split.evaluation.end - 1);
      const std::size_t idx = emit_original(author, ts, true);
      emit_retweets(idx, author, chunk, true, split.evaluation);
      remaining -= chunk;
    }
  };

  for (std::size_t a = 0; a < config.n_accounts; ++a) {
    const auto it = obs_posts.find(account_ids[a]);
    if (it == obs_posts.end()) continue;
    if (eval_target[a] == 0) {
      if (rng.uniform01() < 0.3) {
        const std::int64_t ts =
            rng.uniform_i64(split.evaluation.start, split.evaluation.end - 1);
        emit_original(a, ts, true);
      }
      continue;
    }
    const bool super = a < config.n_superspreaders;
    emit_eval_mass(a, eval_target[a], super ? 10 : 1, super ? 300 : 120);
  }

  // late accounts: posters unseen in observation, carrying the residual
  std::uint64_t late_total = 0;
  if (config.planted_residual > 0.0 && insider_mass > 0) {
    const double scale = config.planted_residual / (1.0 - config.planted_residual) *
                         (0.9 + 0.2 * rng.uniform01());
    late_total = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(insider_mass) * scale));
  }
  if (late_total > 0) {
    std::vector<double> weight(n_late);
    double wsum = 0;
    for (auto& w : weight) {
      w = 0.5 + rng.uniform01();
      wsum += w;
    }
    std::uint64_t assigned = 0;
    for (std::size_t j = 0; j < n_late; ++j) {
      const std::uint64_t share =
          j + 1 == n_late
              ? late_total - assigned
              : static_cast<std::uint64_t>(static_cast<double>(late_total) *
                                           (weight[j] / wsum));
      assigned += share;
      if (share > 0) emit_eval_mass(config.n_accounts + j, share, 5, 200);
    }
  }

  for (std::size_t a = 0; a < config.n_accounts; ++a) { // credible eval traffic
    if (rng.uniform01() >= 0.15) continue;
    const std::int64_t ts =
        rng.uniform_i64(split.evaluation.start, split.evaluation.end - 1);
    const std::size_t idx = emit_original(a, ts, false);
    emit_retweets(idx, a, rng.uniform_u64(6), false, split.evaluation);
  }

  // stragglers outside both windows; the splitter must drop them
  const std::uint64_t n_before = 3 + rng.uniform_u64(3);
  for (std::uint64_t i = 0; i < n_before; ++i) {
    const std::int64_t ts = rng.uniform_i64(split.observation.start - 10 * kDay,
                                            split.observation.start);
    emit_original(rng.uniform_index(config.n_accounts), ts, i % 2 == 0);
  }
  const std::uint64_t n_after = 2 + rng.uniform_u64(3);
  for (std::uint64_t i = 0; i < n_after; ++i) {
    const std::int64_t ts =
        rng.uniform_i64(split.evaluation.end, split.evaluation.end + 10 * kDay);
    emit_original(rng.uniform_index(config.n_accounts), ts, i % 2 == 0);
  }

  auto finalize = [](const std::map<std::string, std::map<std::string, std::uint64_t>>&
                         posts,
                     PeriodTruth& slice) {
    for (const auto& [poster, counts] : posts) {
      std::uint64_t infl = 0;
      std::vector<std::uint64_t> inputs;
      inputs.reserve(counts.size());
      for (const auto& [tweet, c] : counts) {
        infl += c;
        inputs.push_back(c);
      }
      std::sort(inputs.begin(), inputs.end(), std::greater<>());
      slice.influence[poster] = infl;
      slice.fib_inputs[poster] = std::move(inputs);
    }
  };
  finalize(obs_posts, truth.observation);
  finalize(eval_posts, truth.evaluation);

  if (truth.evaluation.total_weight > 0) {
    const double total = static_cast<double>(truth.evaluation.total_weight);
    std::uint64_t covered = 0;
    for (const auto& [poster, infl] : truth.evaluation.influence) {
      truth.m_eval[poster] = static_cast<double>(infl) / total;
      if (truth.observation.influence.count(poster) != 0) covered += infl;
    }
    truth.residual_fraction =
        static_cast<double>(truth.evaluation.total_weight - covered) / total;
  }

  SynthResult result;
  result.corpus_lines.reserve(records.size());
  for (const auto& rec : records) result.corpus_lines.push_back(serialize_record(rec));
  rng.shuffle(result.corpus_lines); // the stream arrives in no particular order
  result.truth = std::move(truth);
  return result;
}

std::string GroundTruth::to_json() const {
  nlohmann::json j;
  j["split"] = {
      {"observation",
       {{"start", split.observation.start}, {"end", split.observation.end}}},
      {"evaluation",
       {{"start", split.evaluation.start}, {"end", split.evaluation.end}}}};
  j["superspreaders"] = superspreaders;
  j["lowcred_domains"] = lowcred_domains;
  const auto dump_period = [](const PeriodTruth& p) {
    nlohmann::json o;
    o["edges"] = p.edges;
    o["influence"] = p.influence;
    o["fib_inputs"] = p.fib_inputs;
    o["total_weight"] = p.total_weight;
    o["n_records"] = p.n_records;
    return o;
  };
  j["observation"] = dump_period(observation);
  j["evaluation"] = dump_period(evaluation);
  j["m_eval"] = m_eval;
  j["residual_fraction"] = residual_fraction;
  j["n_dropped"] = n_dropped;
  return j.dump();
}

GroundTruth GroundTruth::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError("malformed ground-truth JSON");
  try {
    GroundTruth t;
    const auto& s = j.at("split");
    t.split.observation = {s.at("observation").at("start").get<std::int64_t>(),
                           s.at("observation").at("end").get<std::int64_t>()};
    t.split.evaluation = {s.at("evaluation").at("start").get<std::int64_t>(),
                          s.at("evaluation").at("end").get<std::int64_t>()};
    t.superspreaders = j.at("superspreaders").get<std::vector<std::string>>();
    t.lowcred_domains = j.at("lowcred_domains").get<std::vector<std::string>>();
    const auto load_period = [](const nlohmann::json& o) {
      PeriodTruth p;
      p.edges = o.at("edges")
                    .get<std::map<std::string, std::map<std::string, std::uint64_t>>>();
      p.influence = o.at("influence").get<std::map<std::string, std::uint64_t>>();
      p.fib_inputs =
          o.at("fib_inputs").get<std::map<std::string, std::vector<std::uint64_t>>>();
      p.total_weight = o.at("total_weight").get<std::uint64_t>();
      p.n_records = o.at("n_records").get<std::size_t>();
      return p;
    };
    t.observation = load_period(j.at("observation"));
    t.evaluation = load_period(j.at("evaluation"));
    t.m_eval = j.at("m_eval").get<std::map<std::string, double>>();
    t.residual_fraction = j.at("residual_fraction").get<double>();
    t.n_dropped = j.at("n_dropped").get<std::size_t>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad ground-truth JSON: ") + e.what());
  }
}

void write_synth_result(const SynthResult& result, const std::string& corpus_path,
                        const std::string& truth_path) {
  std::string corpus;
  for (const auto& line : result.corpus_lines) {
    corpus += line;
    corpus += '\n';
  }
  if (corpus_path.ends_with(".gz"))
    write_gzip(corpus_path, corpus);
  else
    write_file(corpus_path, corpus);
  write_file(truth_path, result.truth.to_json() + "\n");
}

} // namespace fibrank
