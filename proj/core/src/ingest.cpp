#include "fibrank/ingest.hpp"

#include <json.hpp>

#include <utility>

#include "fibrank/io.hpp"

namespace fibrank {

namespace {

using nlohmann::json;

std::string require_string(const json& j, const char* key, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end())
    throw ParseError(std::string("missing field \"") + key + "\"", line_no);
  if (!it->is_string())
    throw ParseError(std::string("field \"") + key + "\" must be a string", line_no);
  auto value = it->get<std::string>();
  if (value.empty())
    throw ParseError(std::string("field \"") + key + "\" is empty", line_no);
  return value;
}

double score_in_unit_interval(const json& j, const char* key, std::size_t line_no) {
  if (!j.is_number())
    throw ParseError(std::string("field \"") + key + "\" must be a number", line_no);
  const double v = j.get<double>();
  if (!(v >= 0.0 && v <= 1.0))
    throw ValidationError(std::string("field \"") + key + "\" outside [0,1]", line_no);
  return v;
}

} // namespace

TweetRecord parse_record(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("record is not a JSON object", line_no);

  TweetRecord rec;
  rec.tweet_id = require_string(j, "tweet_id", line_no);
  rec.author_id = require_string(j, "author_id", line_no);

  const auto ts = j.find("timestamp");
  if (ts == j.end()) throw ParseError("missing field \"timestamp\"", line_no);
  if (ts->is_number_integer()) {
    rec.timestamp = ts->get<std::int64_t>();
  } else if (ts->is_string()) {
    try {
      rec.timestamp = parse_utc(ts->get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  } else {
    throw ParseError("field \"timestamp\" must be an integer or UTC string", line_no);
  }
  if (rec.timestamp <= 0)
    throw ValidationError("timestamp must be positive", line_no);

  if (const auto it = j.find("retweet_of"); it != j.end() && !it->is_null()) {
    if (!it->is_object())
      throw ParseError("field \"retweet_of\" must be an object", line_no);
    RetweetRef ref;
    ref.tweet_id = require_string(*it, "tweet_id", line_no);
    ref.author_id = require_string(*it, "author_id", line_no);
    if (ref.tweet_id == rec.tweet_id)
      throw ValidationError("retweet_of references the record's own tweet_id", line_no);
    rec.retweet_of = std::move(ref);
  }

  if (const auto it = j.find("urls"); it != j.end() && !it->is_null()) {
    if (!it->is_array())
      throw ParseError("field \"urls\" must be an array", line_no);
    rec.urls.reserve(it->size());
    for (const auto& u : *it) {
      if (!u.is_string())
        throw ParseError("field \"urls\" must contain strings", line_no);
      rec.urls.push_back(u.get<std::string>());
    }
  }

  if (const auto it = j.find("follower_count"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
      throw ValidationError("field \"follower_count\" must be a non-negative integer",
                            line_no);
    rec.follower_count = it->get<std::uint64_t>();
  }
  if (const auto it = j.find("bot_score"); it != j.end() && !it->is_null())
    rec.bot_score = score_in_unit_interval(*it, "bot_score", line_no);
  if (const auto it = j.find("toxicity"); it != j.end() && !it->is_null())
    rec.toxicity = score_in_unit_interval(*it, "toxicity", line_no);
  if (const auto it = j.find("text_lang"); it != j.end() && !it->is_null()) {
    if (!it->is_string())
      throw ParseError("field \"text_lang\" must be a string", line_no);
    rec.text_lang = it->get<std::string>();
  }
  return rec;
}

std::string serialize_record(const TweetRecord& record) {
  json j = json::object();
  j["tweet_id"] = record.tweet_id;
  j["author_id"] = record.author_id;
  j["timestamp"] = record.timestamp;
  if (record.retweet_of) {
    j["retweet_of"] = {{"tweet_id", record.retweet_of->tweet_id},
                       {"author_id", record.retweet_of->author_id}};
  }
  if (!record.urls.empty()) j["urls"] = record.urls;
  if (record.follower_count) j["follower_count"] = *record.follower_count;
  if (record.bot_score) j["bot_score"] = *record.bot_score;
  if (record.toxicity) j["toxicity"] = *record.toxicity;
  if (record.text_lang) j["text_lang"] = *record.text_lang;
  return j.dump();
}

void PeriodSplit::validate() const {
  if (observation.start >= observation.end)
    throw ConfigError("observation interval is empty or inverted");
  if (evaluation.start >= evaluation.end)
    throw ConfigError("evaluation interval is empty or inverted");
  if (observation.end > evaluation.start)
    throw ConfigError("observation must end before evaluation starts");
}

Period assign_period(std::int64_t timestamp, const PeriodSplit& split) {
  if (split.observation.contains(timestamp)) return Period::observation;
  if (split.evaluation.contains(timestamp)) return Period::evaluation;
  return Period::dropped;
}

SplitResult split_periods(std::vector<TweetRecord> records, const PeriodSplit& split) {
  split.validate();
  SplitResult result;
  for (auto& rec : records) {
    switch (assign_period(rec.timestamp, split)) {
      case Period::observation:
        result.observation.push_back(std::move(rec));
        break;
      case Period::evaluation:
        result.evaluation.push_back(std::move(rec));
        break;
      case Period::dropped:
        ++result.dropped;
        break;
    }
  }
  return result;
}

void read_corpus(const std::string& path,
                 const std::function<void(TweetRecord&&, std::size_t)>& on_record,
                 IngestCounters& counters, std::vector<std::string>* warnings,
                 const CorpusReadOptions& options) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    ++counters.lines;
    if (line.empty()) {
      ++counters.empty_lines;
      continue;
    }
    try {
      TweetRecord rec = parse_record(line, reader.line_no());
      ++counters.parsed;
      on_record(std::move(rec), reader.line_no());
    } catch (const RecordError& e) {
      if (options.strict) throw;
      ++counters.parse_errors;
      if (warnings != nullptr && warnings->size() < options.max_warnings)
        warnings->emplace_back(e.what());
    }
  }
}

} // namespace fibrank
