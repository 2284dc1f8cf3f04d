#include "fibrank/dismantle.hpp"

#include <algorithm>
#include <unordered_set>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"

namespace fibrank {

double DismantlingCurve::remaining_at(std::size_t k) const {
  if (k >= points.size())
    throw Error("curve has no point at k=" + std::to_string(k));
  return points[k].remaining;
}

std::vector<double> DismantlingCurve::increments(std::size_t max_k) const {
  if (max_k + 1 > points.size())
    throw StatsError("curve shorter than requested k=" + std::to_string(max_k));
  std::vector<double> out;
  out.reserve(max_k);
  for (std::size_t i = 0; i < max_k; ++i) {
    const std::uint64_t w = points[i + 1].removed_weight - points[i].removed_weight;
    out.push_back(total_weight > 0
                      ? static_cast<double>(w) / static_cast<double>(total_weight)
                      : 0.0);
  }
  return out;
}

double misinfo_share(const RetweetNetwork& eval_network, std::string_view account) {
  if (eval_network.total_weight() == 0)
    throw StatsError("misinformation share is undefined on a zero-weight network");
  return static_cast<double>(eval_network.out_strength(account)) /
         static_cast<double>(eval_network.total_weight());
}

std::vector<MisinfoShare> misinfo_shares(const RetweetNetwork& eval_network,
                                         std::span<const std::string> accounts) {
  std::vector<MisinfoShare> out;
  out.reserve(accounts.size());
  for (const auto& id : accounts)
    out.push_back(MisinfoShare{id, misinfo_share(eval_network, id)});
  return out;
}

DismantlingCurve dismantling_curve(const Ranking& ranking,
                                   const RetweetNetwork& eval_network) {
  const std::uint64_t total = eval_network.total_weight();
  if (total == 0)
    throw StatsError("dismantling curve is undefined on a zero-weight network");

  DismantlingCurve curve;
  curve.metric = ranking.metric;
  curve.total_weight = total;
  curve.points.reserve(ranking.size() + 1);
  curve.points.push_back(CurvePoint{0, 0, 1.0});
  std::uint64_t prefix = 0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    prefix += eval_network.out_strength(ranking.ordered_accounts[k]);
    const double remaining =
        static_cast<double>(total - prefix) / static_cast<double>(total);
    curve.points.push_back(CurvePoint{k + 1, prefix, remaining});
  }
  curve.residual_floor = curve.points.back().remaining;
  return curve;
}

Ranking optimal_ranking(const RetweetNetwork& eval_network,
                        std::span<const std::string> candidates) {
  struct Row {
    const std::string* id;
    std::uint64_t strength;
  };
  std::vector<Row> rows;
  rows.reserve(candidates.size());
  std::unordered_set<std::string_view> seen;
  for (const auto& id : candidates) {
    if (seen.insert(id).second) rows.push_back(Row{&id, eval_network.out_strength(id)});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.strength != b.strength) return a.strength > b.strength;
    return *a.id < *b.id;
  });

  const std::uint64_t total = eval_network.total_weight();
  Ranking ranking;
  ranking.metric = Metric::Optimal;
  ranking.tie_policy = "account_id asc";
  ranking.ordered_accounts.reserve(rows.size());
  ranking.values.reserve(rows.size());
  for (const auto& row : rows) {
    ranking.ordered_accounts.push_back(*row.id);
    ranking.values.push_back(total > 0 ? static_cast<double>(row.strength) /
                                             static_cast<double>(total)
                                       : 0.0);
  }
  return ranking;
}

double residual_floor(const RetweetNetwork& eval_network,
                      std::span<const std::string> candidates) {
  const std::uint64_t total = eval_network.total_weight();
  if (total == 0) return 0.0;
  std::unordered_set<std::string_view> seen;
  std::uint64_t covered = 0;
  for (const auto& id : candidates) {
    if (seen.insert(id).second) covered += eval_network.out_strength(id);
  }
  return static_cast<double>(total - covered) / static_cast<double>(total);
}

void write_curves_csv(std::ostream& out, std::span<const DismantlingCurve> curves,
                      std::size_t stride) {
  if (stride == 0) stride = 1;
  out << "metric,k,remaining\n";
  for (const auto& curve : curves) {
    if (curve.points.empty()) continue;
    const std::size_t last = curve.points.size() - 1;
    for (std::size_t k = 0; k < curve.points.size(); k += stride) {
      out << metric_name(curve.metric) << ',' << curve.points[k].k << ','
          << format_double(curve.points[k].remaining) << '\n';
      if (k != last && k + stride > last) { // keep the endpoint
        out << metric_name(curve.metric) << ',' << curve.points[last].k << ','
            << format_double(curve.points[last].remaining) << '\n';
      }
    }
  }
}

} // namespace fibrank
