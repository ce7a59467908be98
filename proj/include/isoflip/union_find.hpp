#pragma once

#include <numeric>
#include <vector>

namespace isoflip {

/// Disjoint-set forest with path halving and union by smaller root id, so the
/// representative of every set is its smallest member.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
    sets_ = n;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    --sets_;
    return true;
  }

  int set_count() const { return sets_; }
  int size() const { return static_cast<int>(parent_.size()); }

 private:
  std::vector<int> parent_;
  int sets_ = 0;
};

}  // namespace isoflip
