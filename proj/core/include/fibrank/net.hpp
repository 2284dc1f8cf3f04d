#pragma once

#include <memory>
#include <optional>
#include <string>

#include "fibrank/domain.hpp"
#include "fibrank/toxicity.hpp"

namespace fibrank {

/// Shared knobs for the two live clients. The rate ceiling applies per
/// client instance.
struct HttpClientOptions {
  double requests_per_second = 10.0;
  int timeout_ms = 5000;
};

/// One-hop redirect resolver: issues a HEAD request without following
/// redirects and reads the Location header. Nothing on non-redirect
/// statuses, timeouts, or bad URLs.
class HttpLinkResolver final : public LinkResolver {
public:
  explicit HttpLinkResolver(HttpClientOptions options = {});
  ~HttpLinkResolver();

  std::optional<std::string> resolve(const std::string& url) override;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Live scorer: POSTs {"tweet_id": ...} to the endpoint and expects
/// {"score": s} with s in [0,1]. The credential is read from the
/// FIBRANK_SCORER_KEY environment variable and sent as a bearer token.
class HttpToxicityScorer final : public ToxicityScorer {
public:
  HttpToxicityScorer(std::string endpoint, HttpClientOptions options = {});
  ~HttpToxicityScorer();

  std::optional<double> score(const TweetRecord& record) override;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace fibrank
