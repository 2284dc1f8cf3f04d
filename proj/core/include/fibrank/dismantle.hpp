#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fibrank/metrics.hpp"
#include "fibrank/network.hpp"

namespace fibrank {

/// Fraction of evaluation-period misinformation retweet weight originated
/// by one account.
struct MisinfoShare {
  std::string account_id;
  double m = 0.0;
};

/// Remaining misinformation fraction after removing the top k ranked
/// accounts. removed_weight is the integer prefix weight; remaining is
/// (total_weight - removed_weight) / total_weight, so curves over the same
/// network compare exactly.
struct CurvePoint {
  std::size_t k = 0;
  std::uint64_t removed_weight = 0;
  double remaining = 1.0;
};

struct DismantlingCurve {
  Metric metric = Metric::Optimal;
  std::vector<CurvePoint> points;  // k = 0 .. ranking size
  double residual_floor = 0.0;
  std::uint64_t total_weight = 0;

  double remaining_at(std::size_t k) const;
  /// Per-account m values of the first max_k ranked accounts, i.e. the
  /// removal increments remaining(k) - remaining(k+1).
  std::vector<double> increments(std::size_t max_k) const;
};

/// m for one account; 0 for accounts absent from the network.
/// Throws StatsError when total_weight is zero.
double misinfo_share(const RetweetNetwork& eval_network, std::string_view account);
std::vector<MisinfoShare> misinfo_shares(const RetweetNetwork& eval_network,
                                         std::span<const std::string> accounts);

/// Prefix-sum curve over the ranking's accounts in order.
DismantlingCurve dismantling_curve(const Ranking& ranking,
                                   const RetweetNetwork& eval_network);

/// Candidates sorted by descending m with the evaluation network as oracle;
/// ties broken by ascending account id.
Ranking optimal_ranking(const RetweetNetwork& eval_network,
                        std::span<const std::string> candidates);

/// Fraction of total weight originated by posters outside the candidate
/// set. 0 on an empty network.
double residual_floor(const RetweetNetwork& eval_network,
                      std::span<const std::string> candidates);

/// CSV (metric, k, remaining) for one or more curves; points thinned to
/// every `stride`-th k (the endpoints always kept).
void write_curves_csv(std::ostream& out, std::span<const DismantlingCurve> curves,
                      std::size_t stride = 1);

} // namespace fibrank
