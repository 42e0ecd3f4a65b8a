#include "cmn/kd_index.hpp"

#include <algorithm>
#include <numeric>

namespace cmn {
namespace {

constexpr std::size_t kLeafSize = 8;

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

}  // namespace

void offer_neighbor(std::vector<Neighbor>& best, std::size_t k, std::size_t id,
                    double squared) {
  const Neighbor candidate{id, squared};
  if (best.size() >= k) {
    if (k == 0 || !neighbor_less(candidate, best.back())) return;
    best.pop_back();
  }
  best.insert(std::upper_bound(best.begin(), best.end(), candidate, neighbor_less),
              candidate);
}

void KdIndex::build(std::span<const double> coords, std::size_t dim,
                    std::size_t count) {
  dim_ = dim;
  count_ = count;
  order_.resize(count);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.clear();
  if (count > 0) build_node(coords, 0, count);
}

std::size_t KdIndex::build_node(std::span<const double> coords, std::size_t begin,
                                std::size_t end) {
  const std::size_t index = nodes_.size();
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return index;

  std::size_t widest = 0;
  double widest_spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = coords[order_[begin] * dim_ + d];
    double hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = coords[order_[i] * dim_ + d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest_spread) {
      widest_spread = hi - lo;
      widest = d;
    }
  }
  if (widest_spread <= 0.0) return index;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return coords[a * dim_ + widest] < coords[b * dim_ + widest];
                   });
  const double split = coords[order_[mid] * dim_ + widest];
  const std::size_t left = build_node(coords, begin, mid);
  const std::size_t right = build_node(coords, mid, end);
  Node& node = nodes_[index];
  node.leaf = false;
  node.split_dim = widest;
  node.split_value = split;
  node.left = left;
  node.right = right;
  return index;
}

void KdIndex::query(std::span<const double> coords, std::span<const double> point,
                    std::size_t k, std::vector<Neighbor>& best) const {
  if (count_ == 0 || k == 0) return;
  search(0, coords, point, k, best);
}

void KdIndex::search(std::size_t node_index, std::span<const double> coords,
                     std::span<const double> point, std::size_t k,
                     std::vector<Neighbor>& best) const {
  const Node& node = nodes_[node_index];
  if (node.leaf) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t id = order_[i];
      double squared = 0.0;
      for (std::size_t d = 0; d < dim_; ++d) {
        const double diff = point[d] - coords[id * dim_ + d];
        squared += diff * diff;
      }
      offer_neighbor(best, k, id, squared);
    }
    return;
  }
  const double diff = point[node.split_dim] - node.split_value;
  const std::size_t near = diff < 0.0 ? node.left : node.right;
  const std::size_t far = diff < 0.0 ? node.right : node.left;
  search(near, coords, point, k, best);
  // Equal bound distances are still visited so id tie-breaks stay exact.
  if (best.size() < k || diff * diff <= best.back().distance) {
    search(far, coords, point, k, best);
  }
}

}  // namespace cmn
