#include "mdres/adt.hpp"

namespace mdres {

namespace {

std::array<double, 6> to_key(const Box& b)
{
  return {b.min.x(), b.min.y(), b.min.z(), b.max.x(), b.max.y(), b.max.z()};
}

} // namespace

Adt::Adt(const std::vector<Box>& boxes)
{
  if (boxes.empty()) {
    return;
  }
  lo_.fill(std::numeric_limits<double>::infinity());
  hi_.fill(-std::numeric_limits<double>::infinity());
  for (const auto& b : boxes) {
    const auto k = to_key(b);
    for (int i = 0; i < 6; ++i) {
      lo_[i] = std::min(lo_[i], k[i]);
      hi_[i] = std::max(hi_[i], k[i]);
    }
  }
  nodes_.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    insert(to_key(boxes[i]), static_cast<int>(i));
  }
}

void Adt::insert(const std::array<double, 6>& key, int item)
{
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({key, item, {-1, -1}});
  if (id == 0) {
    return;
  }
  auto lo = lo_;
  auto hi = hi_;
  int cur = 0;
  for (int depth = 0;; ++depth) {
    const int k = depth % 6;
    const double mid = 0.5 * (lo[k] + hi[k]);
    const int side = key[k] < mid ? 0 : 1;
    (side == 0 ? hi[k] : lo[k]) = mid;
    int& child = nodes_[cur].child[side];
    if (child < 0) {
      child = id;
      return;
    }
    cur = child;
  }
}

std::vector<int> Adt::candidates(const Box& q) const
{
  std::vector<int> out;
  if (nodes_.empty()) {
    return out;
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  // an item overlaps q iff its min corner <= q.max and its max corner >= q.min
  const std::array<double, 6> qlo{-inf, -inf, -inf, q.min.x(), q.min.y(), q.min.z()};
  const std::array<double, 6> qhi{q.max.x(), q.max.y(), q.max.z(), inf, inf, inf};

  struct Frame {
    int node;
    int depth;
    std::array<double, 6> lo;
    std::array<double, 6> hi;
  };
  std::vector<Frame> stack{{0, 0, lo_, hi_}};
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    const Node& n = nodes_[fr.node];
    bool inside = true;
    for (int i = 0; i < 6 && inside; ++i) {
      inside = n.key[i] >= qlo[i] && n.key[i] <= qhi[i];
    }
    if (inside) {
      out.push_back(n.item);
    }
    const int k = fr.depth % 6;
    const double mid = 0.5 * (fr.lo[k] + fr.hi[k]);
    if (n.child[0] >= 0 && qlo[k] <= mid) {
      Frame c = fr;
      c.node = n.child[0];
      c.depth = fr.depth + 1;
      c.hi[k] = mid;
      stack.push_back(c);
    }
    if (n.child[1] >= 0 && qhi[k] >= mid) {
      Frame c = fr;
      c.node = n.child[1];
      c.depth = fr.depth + 1;
      c.lo[k] = mid;
      stack.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Adt adt_build(const std::vector<Box>& boxes) { return Adt(boxes); }

std::vector<int> adt_candidates(const Adt& adt, const Box& query) { return adt.candidates(query); }

} // namespace mdres
