#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cmn {

struct Neighbor {
  std::size_t id = 0;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Static kd-tree over a prefix of a row-major coordinate table. Results are
/// ordered by (squared distance, id), identical to a full sort.
class KdIndex {
 public:
  KdIndex() = default;

  void build(std::span<const double> coords, std::size_t dim, std::size_t count);
  std::size_t size() const { return count_; }

  /// Merges the k best points of the index into `best`, a list kept sorted by
  /// (squared distance, id) and capped at k entries. Distances are squared.
  void query(std::span<const double> coords, std::span<const double> point,
             std::size_t k, std::vector<Neighbor>& best) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t split_dim = 0;
    double split_value = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    bool leaf = true;
  };

  std::size_t build_node(std::span<const double> coords, std::size_t begin,
                         std::size_t end);
  void search(std::size_t node, std::span<const double> coords,
              std::span<const double> point, std::size_t k,
              std::vector<Neighbor>& best) const;

  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Inserts (id, squared distance) into a sorted best-k list.
void offer_neighbor(std::vector<Neighbor>& best, std::size_t k, std::size_t id,
                    double squared);

}  // namespace cmn
