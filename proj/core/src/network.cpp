#include "fibrank/network.hpp"

#include <algorithm>
#include <utility>

#include "fibrank/io.hpp"

namespace fibrank {

std::uint32_t RetweetNetwork::intern(std::string_view id) {
  if (const auto it = index_.find(id); it != index_.end()) return it->second;
  const auto idx = static_cast<std::uint32_t>(ids_.size());
  ids_.emplace_back(id);
  index_.emplace(ids_.back(), idx);
  return idx;
}

std::uint64_t RetweetNetwork::out_strength(std::string_view account) const {
  const auto it = index_.find(account);
  if (it == index_.end()) return 0;
  return out_strength_[it->second];
}

std::uint64_t RetweetNetwork::edge_weight(std::string_view poster,
                                          std::string_view retweeter) const {
  const auto pi = index_.find(poster);
  const auto ri = index_.find(retweeter);
  if (pi == index_.end() || ri == index_.end()) return 0;
  const auto it = edges_.find(edge_key(pi->second, ri->second));
  return it == edges_.end() ? 0 : it->second;
}

bool RetweetNetwork::is_poster(std::string_view account) const {
  const auto it = index_.find(account);
  return it != index_.end() && poster_flag_[it->second];
}

std::vector<std::string> RetweetNetwork::posters() const {
  std::vector<std::string> out;
  out.reserve(poster_list_.size());
  for (const auto idx : poster_list_) out.push_back(ids_[idx]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> RetweetNetwork::nodes() const {
  std::vector<std::string> out(ids_.begin(), ids_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RetweetNetwork::Edge> RetweetNetwork::sorted_edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& [key, weight] : edges_) {
    const auto poster = static_cast<std::uint32_t>(key >> 32);
    const auto retweeter = static_cast<std::uint32_t>(key & 0xffffffffu);
    out.push_back(Edge{ids_[poster], ids_[retweeter], weight});
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    if (a.poster != b.poster) return a.poster < b.poster;
    return a.retweeter < b.retweeter;
  });
  return out;
}

void RetweetNetwork::write_csv(std::ostream& out) const {
  out << "poster_id,retweeter_id,weight\n";
  for (const auto& edge : sorted_edges()) {
    out << csv_escape(edge.poster) << ',' << csv_escape(edge.retweeter) << ','
        << edge.weight << '\n';
  }
}

void NetworkBuilder::add(const TweetRecord& record, bool low_cred) {
  if (!low_cred) return;
  if (record.is_original()) {
    posters_.insert(record.author_id);
    weights_[record.author_id]; // ensure a poster entry even with no edges
    return;
  }
  const auto& ref = *record.retweet_of;
  if (ref.author_id == record.author_id) {
    ++self_retweets_skipped_;
    return;
  }
  ++weights_[ref.author_id][record.author_id];
  posters_.insert(ref.author_id);
}

void NetworkBuilder::merge(const NetworkBuilder& other) {
  for (const auto& [poster, row] : other.weights_) {
    auto& mine = weights_[poster];
    for (const auto& [retweeter, w] : row) mine[retweeter] += w;
  }
  posters_.insert(other.posters_.begin(), other.posters_.end());
  self_retweets_skipped_ += other.self_retweets_skipped_;
}

RetweetNetwork NetworkBuilder::finish() && {
  RetweetNetwork net;
  for (const auto& [poster, row] : weights_) {
    const auto pi = net.intern(poster);
    for (const auto& [retweeter, w] : row) {
      const auto ri = net.intern(retweeter);
      net.edges_.emplace(RetweetNetwork::edge_key(pi, ri), w);
      net.total_weight_ += w;
    }
  }
  net.out_strength_.assign(net.ids_.size(), 0);
  net.poster_flag_.assign(net.ids_.size(), false);
  for (const auto& [key, w] : net.edges_)
    net.out_strength_[static_cast<std::uint32_t>(key >> 32)] += w;
  for (const auto& poster : posters_) {
    const auto idx = net.intern(poster);
    if (idx >= net.poster_flag_.size()) { // poster with no edges, interned late
      net.out_strength_.resize(net.ids_.size(), 0);
      net.poster_flag_.resize(net.ids_.size(), false);
    }
    if (!net.poster_flag_[idx]) {
      net.poster_flag_[idx] = true;
      net.poster_list_.push_back(idx);
    }
  }
  return net;
}

RetweetNetwork build_network(std::span<const LabeledRecord> records,
                             std::uint64_t* self_retweets_skipped) {
  NetworkBuilder builder;
  for (const auto& rec : records) builder.add(rec);
  if (self_retweets_skipped != nullptr)
    *self_retweets_skipped = builder.self_retweets_skipped();
  return std::move(builder).finish();
}

} // namespace fibrank
