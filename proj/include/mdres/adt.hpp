#pragma once

#include "mdres/common.hpp"

#include <vector>

namespace mdres {

/**
 * @brief Alternating digital tree over axis-aligned boxes.
 *
 * Each box is a point in R^6 (min x,y,z, max x,y,z). Level k of the tree
 * bisects coordinate k mod 6 of the region it covers, so the tree holds one
 * item per node and needs no rebalancing. Queries return every item whose box
 * overlaps the query box.
 */
class Adt {
public:
  Adt() = default;
  /// Items are numbered by their position in `boxes`.
  explicit Adt(const std::vector<Box>& boxes);

  [[nodiscard]] std::vector<int> candidates(const Box& query) const;
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] bool empty() const { return nodes_.empty(); }

private:
  struct Node {
    std::array<double, 6> key;
    int item;
    std::array<int, 2> child{-1, -1};
  };
  void insert(const std::array<double, 6>& key, int item);

  std::vector<Node> nodes_;
  std::array<double, 6> lo_{};
  std::array<double, 6> hi_{};
};

Adt adt_build(const std::vector<Box>& boxes);
std::vector<int> adt_candidates(const Adt& adt, const Box& query);

} // namespace mdres
