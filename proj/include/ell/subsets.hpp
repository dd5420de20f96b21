#ifndef ELL_SUBSETS_HPP
#define ELL_SUBSETS_HPP

// Subsets of [1..N] (stored 0-based as bitmasks) and multi-index utilities.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "ell/core.hpp"

namespace ell {

/// Subset of {1,..,N}; members are kept as a bitmask over 0-based indices.
/// Restrictions z_S always preserve ascending index order, and complements
/// are taken in the ambient [1..N].
struct SubsetOfN {
  int ambient = 0;
  std::uint32_t mask = 0;

  SubsetOfN() = default;
  SubsetOfN(int ambient_, std::uint32_t mask_) : ambient(ambient_), mask(mask_) {
    if (ambient_ < 0 || ambient_ > 30) throw domain_error("SubsetOfN: ambient out of range");
    if (mask_ >> ambient_) throw domain_error("SubsetOfN: member outside ambient");
  }

  /// Build from 1-based member indices (any order, duplicates rejected).
  static SubsetOfN of(int ambient, const std::vector<int>& members_1based) {
    std::uint32_t m = 0;
    for (int i : members_1based) {
      if (i < 1 || i > ambient) throw domain_error("SubsetOfN: member outside ambient");
      if (m & (1u << (i - 1))) throw domain_error("SubsetOfN: duplicate member");
      m |= 1u << (i - 1);
    }
    return SubsetOfN(ambient, m);
  }

  int size() const { return __builtin_popcount(mask); }
  bool contains(int i0) const { return (mask >> i0) & 1u; }
  SubsetOfN complement() const {
    return SubsetOfN(ambient, ~mask & ((ambient == 32 ? 0 : (1u << ambient)) - 1u));
  }
  std::vector<int> members() const {  // 0-based ascending
    std::vector<int> v;
    for (int i = 0; i < ambient; ++i)
      if (contains(i)) v.push_back(i);
    return v;
  }
  bool operator==(const SubsetOfN& o) const { return ambient == o.ambient && mask == o.mask; }
};

inline std::uint32_t full_mask(int n) { return n == 0 ? 0u : ((1u << n) - 1u); }

inline std::vector<int> mask_members(std::uint32_t mask, int ambient) {
  std::vector<int> v;
  for (int i = 0; i < ambient; ++i)
    if ((mask >> i) & 1u) v.push_back(i);
  return v;
}

inline std::vector<cplx> restrict_to(const std::vector<cplx>& z, std::uint32_t mask) {
  std::vector<cplx> r;
  for (std::size_t i = 0; i < z.size(); ++i)
    if ((mask >> i) & 1u) r.push_back(z[i]);
  return r;
}

inline std::vector<cplx> restrict_to(const std::vector<cplx>& z, const SubsetOfN& s) {
  return restrict_to(z, s.mask);
}

/// Visit all submasks of `super` in increasing numeric order (deterministic).
template <class F>
void for_each_submask(std::uint32_t super, F&& fn) {
  std::uint32_t sub = 0;
  while (true) {
    fn(sub);
    if (sub == super) break;
    sub = (sub - super) & super;
  }
}

/// Visit submasks of `super` with exactly k bits.
template <class F>
void for_each_submask_of_size(std::uint32_t super, int k, F&& fn) {
  for_each_submask(super, [&](std::uint32_t sub) {
    if (__builtin_popcount(sub) == k) fn(sub);
  });
}

using MultiIndex = std::vector<int>;

inline int mi_sum(const MultiIndex& y) {
  int s = 0;
  for (int v : y) s += v;
  return s;
}

/// Visit the box 0 <= y_i <= caps[i] in lexicographic order.
template <class F>
void for_each_box(const MultiIndex& caps, F&& fn) {
  MultiIndex y(caps.size(), 0);
  while (true) {
    fn(const_cast<const MultiIndex&>(y));
    std::size_t i = caps.size();
    while (i > 0) {
      --i;
      if (y[i] < caps[i]) {
        ++y[i];
        std::fill(y.begin() + i + 1, y.end(), 0);
        break;
      }
      if (i == 0) return;
    }
    if (caps.empty()) return;
  }
}

/// Ordered set partitions of {0,..,n-1} into nonempty blocks.
inline std::vector<std::vector<std::vector<int>>> ordered_set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> cur;
  std::function<void(std::uint32_t)> rec = [&](std::uint32_t remaining) {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    std::uint32_t sub = remaining;
    // nonempty submasks, descending enumeration of the standard trick
    for (std::uint32_t b = remaining; b; b = (b - 1) & remaining) {
      cur.push_back(mask_members(b, n));
      rec(remaining & ~b);
      cur.pop_back();
    }
  };
  rec(full_mask(n));
  return out;
}

}  // namespace ell

#endif  // ELL_SUBSETS_HPP
