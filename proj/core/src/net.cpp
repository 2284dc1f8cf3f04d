#include "fibrank/net.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fibrank/error.hpp"

namespace fibrank {

namespace {

// Paces calls so a client instance stays under its request ceiling.
class RateLimiter {
public:
  explicit RateLimiter(double rps) {
    using namespace std::chrono;
    if (rps > 0)
      interval_ = duration_cast<steady_clock::duration>(duration<double>(1.0 / rps));
  }

  void wait() {
    if (interval_.count() == 0) return;
    auto now = std::chrono::steady_clock::now();
    if (next_ > now) {
      std::this_thread::sleep_until(next_);
      now = next_;
    }
    next_ = now + interval_;
  }

private:
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

struct SplitUrl {
  std::string scheme;
  std::string origin; // scheme://host[:port]
  std::string target; // path plus query, "/" at minimum
};

std::optional<SplitUrl> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || scheme_end == 0) return std::nullopt;
  const auto path_start = url.find_first_of("/?#", scheme_end + 3);
  SplitUrl out;
  out.scheme = url.substr(0, scheme_end);
  if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
  if (path_start == std::string::npos) {
    out.origin = url;
    out.target = "/";
  } else {
    out.origin = url.substr(0, path_start);
    out.target = url.substr(path_start);
    if (out.target[0] != '/') out.target.insert(out.target.begin(), '/');
  }
  if (out.origin.size() == scheme_end + 3) return std::nullopt; // empty host
  return out;
}

void configure(httplib::Client& cli, const HttpClientOptions& options) {
  const time_t sec = options.timeout_ms / 1000;
  const time_t usec = (options.timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  cli.set_follow_location(false);
}

bool redirect_status(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 ||
         status == 308;
}

} // namespace

struct HttpLinkResolver::Impl {
  HttpClientOptions options;
  RateLimiter limiter;

  explicit Impl(HttpClientOptions opts)
      : options(opts), limiter(opts.requests_per_second) {}
};

HttpLinkResolver::HttpLinkResolver(HttpClientOptions options)
    : impl_(std::make_unique<Impl>(options)) {}

HttpLinkResolver::~HttpLinkResolver() = default;

std::optional<std::string> HttpLinkResolver::resolve(const std::string& url) {
  const auto parts = split_url(url);
  if (!parts) return std::nullopt;
  impl_->limiter.wait();
  httplib::Client cli(parts->origin);
  if (!cli.is_valid()) return std::nullopt;
  configure(cli, impl_->options);
  const auto res = cli.Head(parts->target);
  if (!res || !redirect_status(res->status)) return std::nullopt;
  std::string location = res->get_header_value("Location");
  if (location.empty()) return std::nullopt;
  if (location.starts_with("http://") || location.starts_with("https://"))
    return location;
  if (location.starts_with("//")) return parts->scheme + ":" + location;
  if (location[0] == '/') return parts->origin + location;
  return std::nullopt;
}

struct HttpToxicityScorer::Impl {
  SplitUrl endpoint;
  HttpClientOptions options;
  RateLimiter limiter;
  httplib::Client client;
  httplib::Headers headers;

  Impl(SplitUrl ep, HttpClientOptions opts)
      : endpoint(std::move(ep)),
        options(opts),
        limiter(opts.requests_per_second),
        client(endpoint.origin) {
    configure(client, options);
    if (const char* key = std::getenv("FIBRANK_SCORER_KEY"); key != nullptr)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }
};

HttpToxicityScorer::HttpToxicityScorer(std::string endpoint, HttpClientOptions options) {
  auto parts = split_url(endpoint);
  if (!parts) throw ConfigError("bad scorer endpoint: " + endpoint);
  impl_ = std::make_unique<Impl>(std::move(*parts), options);
}

HttpToxicityScorer::~HttpToxicityScorer() = default;

std::optional<double> HttpToxicityScorer::score(const TweetRecord& record) {
  if (!impl_->client.is_valid()) return std::nullopt;
  impl_->limiter.wait();
  nlohmann::json body;
  body["tweet_id"] = record.tweet_id;
  const auto res = impl_->client.Post(impl_->endpoint.target, impl_->headers,
                                      body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  const auto it = parsed.find("score");
  if (it == parsed.end() || !it->is_number()) return std::nullopt;
  const double value = it->get<double>();
  if (!(value >= 0.0 && value <= 1.0)) return std::nullopt;
  return value;
}

} // namespace fibrank
