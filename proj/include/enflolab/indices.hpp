#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "enflolab/parallel.hpp"

namespace enflolab {

using Index = std::uint64_t;

/// Dyadic block level of a positive index: block n holds [2^n, 2^{n+1}).
inline int block_of(Index j) {
  if (j < 1) throw std::domain_error("block_of: index must be positive");
  return std::bit_width(j) - 1;
}

inline Index block_begin(int n) { return Index{1} << n; }
inline Index block_size(int n) { return Index{1} << n; }

/// Residue class within a block: all k in [2^n, 2^{n+1}) with k = j (mod 16).
/// Only meaningful once blocks are unions of whole 16-runs, i.e. n >= 4.
inline std::vector<Index> residue_class(int n, int j) {
  if (n < 4) throw std::domain_error("residue_class: block level must be >= 4");
  if (j < 0 || j > 15) throw std::domain_error("residue_class: residue must be in 0..15");
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(block_size(n) / 16));
  Index end = block_begin(n + 1);
  for (Index k = block_begin(n) + static_cast<Index>(j); k < end; k += 16) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Support maps. Writing j = 16i + l:
//   f_k(16i+l) = 8i + k - 1        k = 1..8,  one block down
//   g_k(16i+l) = 16i + (l+k) % 16  k = 1..15, same block
//   h_k(16i+l) = 32i + k - 1       k = 1..32, one block up, only l <= 3
// All three require i >= 2.
// ---------------------------------------------------------------------------

enum class XiName { f, g, h };

struct XiFamily {
  XiName family;
  int k;
};

inline int xi_max_k(XiName fam) {
  switch (fam) {
    case XiName::f: return 8;
    case XiName::g: return 15;
    case XiName::h: return 32;
  }
  return 0;
}

inline char xi_letter(XiName fam) {
  return fam == XiName::f ? 'f' : fam == XiName::g ? 'g' : 'h';
}

inline Index xi_eval(XiFamily xi, Index j) {
  if (xi.k < 1 || xi.k > xi_max_k(xi.family))
    throw std::domain_error("xi_eval: k out of range for family");
  Index i = j / 16;
  Index l = j % 16;
  if (i < 2) throw std::domain_error("xi_eval: argument must be >= 32");
  switch (xi.family) {
    case XiName::f: return 8 * i + static_cast<Index>(xi.k) - 1;
    case XiName::g: return 16 * i + (l + static_cast<Index>(xi.k)) % 16;
    case XiName::h:
      if (l > 3) throw std::domain_error("xi_eval: h family is defined on residues 0..3 only");
      return 32 * i + static_cast<Index>(xi.k) - 1;
  }
  throw std::logic_error("xi_eval: unreachable");
}

inline bool xi_in_domain(XiFamily xi, Index j) {
  if (j / 16 < 2) return false;
  if (xi.family == XiName::h && j % 16 > 3) return false;
  return true;
}

/// All 55 support maps, f then g then h, k ascending.
inline std::vector<XiFamily> all_xi() {
  std::vector<XiFamily> out;
  for (int k = 1; k <= 8; ++k) out.push_back({XiName::f, k});
  for (int k = 1; k <= 15; ++k) out.push_back({XiName::g, k});
  for (int k = 1; k <= 32; ++k) out.push_back({XiName::h, k});
  return out;
}

// ---------------------------------------------------------------------------
// Partition pair (nabla, delta) of a block.
//
// For n >= 4 the residue class I_n^0 is represented as a product C_n x D_n.
// The doubling maps psi_n^r(k) = 2k + 16r send columns of C_n x D_n onto
// rows of C_{n+1} x D_{n+1}; translation phi_n^l(k) = k + l moves the
// structure to the other residues. D_n is split into sixteen slot factors;
// a nabla set fixes everything except one slot digit, a delta set fixes
// exactly that digit.
// ---------------------------------------------------------------------------

struct PartitionPair {
  int level = 0;
  Index m_n = 1;  // smallest nabla set size, equals the smallest slot factor
  std::vector<std::vector<Index>> nabla;
  std::vector<std::vector<Index>> delta;
  Index c_size = 1;
  Index d_size = 1;
  std::array<Index, 16> d_split{};  // slot factor sizes, sorted nondecreasing
};

namespace detail {

// Residue slots grouped {2g, 2g+1, 2g+8, 2g+9}, g = 0..3: one group per
// index class I_n(eps, delta). The doubled factors are spread round-robin
// over the groups, slot 0 last, so the four classes see size profiles as
// equal as the factorization permits and m_n stays the slot-0 size.
inline std::array<Index, 16> slot_sizes(int log2_d) {
  std::array<Index, 16> size;
  int q = log2_d / 16;
  int r = log2_d % 16;
  size.fill(Index{1} << q);
  static constexpr int kDoubleOrder[16] = {9, 11, 13, 15, 8, 10, 12, 14,
                                           1, 3,  5,  7,  2, 4,  6,  0};
  for (int t = 0; t < r; ++t) size[kDoubleOrder[t]] <<= 1;
  return size;
}

inline std::array<int, 16> slot_digits(Index d, const std::array<Index, 16>& size) {
  std::array<int, 16> digit{};
  for (int l = 15; l >= 0; --l) {
    digit[l] = static_cast<int>(d % size[l]);
    d /= size[l];
  }
  return digit;
}

// Rank of the digit tuple with one slot removed, mixed radix, slot 0 most
// significant. Used to number nabla sets densely and deterministically.
inline Index reduced_rank(const std::array<int, 16>& digit, const std::array<Index, 16>& size,
                          int skip) {
  Index r = 0;
  for (int l = 0; l < 16; ++l) {
    if (l == skip) continue;
    r = r * size[l] + static_cast<Index>(digit[l]);
  }
  return r;
}

}  // namespace detail

/// All partition pairs up to a level, with the product coordinates retained
/// and per-index lookup for delta and nabla membership. Immutable after
/// construction; safe to share across threads.
class PartitionSet {
 public:
  static constexpr int kMaxLevelCap = 22;

  explicit PartitionSet(int n_max) : n_max_(n_max) {
    if (n_max < 4) throw std::domain_error("PartitionSet: n_max must be >= 4");
    if (n_max > kMaxLevelCap)
      throw std::length_error("PartitionSet: level cap exceeded (memory)");
    pairs_.resize(static_cast<std::size_t>(n_max) + 1);
    delta_of_.resize(pairs_.size());
    nabla_of_.resize(pairs_.size());
    coords_.resize(pairs_.size());
    for (int n = 0; n <= n_max; ++n) build_level(n);
  }

  int max_level() const { return n_max_; }

  const PartitionPair& level(int n) const {
    if (n < 0 || n > n_max_) throw std::invalid_argument("PartitionSet: level out of range");
    return pairs_[static_cast<std::size_t>(n)];
  }

  const std::vector<PartitionPair>& pairs() const { return pairs_; }

  /// Pairs for levels lo..hi (used to hand a slice to the verifier).
  std::vector<PartitionPair> pairs_slice(int lo, int hi) const {
    if (lo < 0 || hi > n_max_ || lo > hi) throw std::invalid_argument("pairs_slice: bad range");
    return std::vector<PartitionPair>(pairs_.begin() + lo, pairs_.begin() + hi + 1);
  }

  /// Globally unique delta block id of an index (level in the high bits).
  std::uint64_t delta_block_id(Index j) const {
    int n = block_of(j);
    if (n > n_max_) throw std::invalid_argument("delta_block_id: index beyond built levels");
    return (static_cast<std::uint64_t>(n) << 40) |
           static_cast<std::uint64_t>(delta_of_[static_cast<std::size_t>(n)][j - block_begin(n)]);
  }

  std::uint64_t nabla_block_id(Index j) const {
    int n = block_of(j);
    if (n > n_max_) throw std::invalid_argument("nabla_block_id: index beyond built levels");
    return (static_cast<std::uint64_t>(n) << 40) |
           static_cast<std::uint64_t>(nabla_of_[static_cast<std::size_t>(n)][j - block_begin(n)]);
  }

  bool covers(Index j) const { return block_of(j) <= n_max_; }

  /// Product coordinates (c, d) of k in I_n^0, n >= 4.
  std::pair<Index, Index> product_coords(int n, Index k) const {
    if (n < 4 || n > n_max_) throw std::invalid_argument("product_coords: level out of range");
    if (k % 16 != 0 || block_of(k) != n)
      throw std::invalid_argument("product_coords: index not in I_n^0");
    return coords_[static_cast<std::size_t>(n)][(k - block_begin(n)) / 16];
  }

 private:
  void build_level(int n) {
    auto& pair = pairs_[static_cast<std::size_t>(n)];
    pair.level = n;
    Index begin = block_begin(n);
    Index size = block_size(n);
    auto& d_of = delta_of_[static_cast<std::size_t>(n)];
    auto& n_of = nabla_of_[static_cast<std::size_t>(n)];
    d_of.assign(size, 0);
    n_of.assign(size, 0);

    if (n < 4) {
      // Below level 4 the residue classes degenerate; both partitions are
      // singletons and every map domain is empty, so nothing else is needed.
      pair.m_n = 1;
      pair.c_size = pair.d_size = 1;
      pair.d_split.fill(1);
      pair.nabla.reserve(size);
      for (Index k = 0; k < size; ++k) {
        pair.nabla.push_back({begin + k});
        d_of[k] = static_cast<std::int32_t>(k);
        n_of[k] = static_cast<std::int32_t>(k);
      }
      pair.delta = pair.nabla;
      return;
    }

    // Product coordinates of I_n^0.
    auto& coords = coords_[static_cast<std::size_t>(n)];
    if (n == 4) {
      pair.c_size = 1;
      pair.d_size = 1;
      coords.assign(1, {0, 0});
    } else {
      const auto& prev = pairs_[static_cast<std::size_t>(n - 1)];
      const auto& prev_coords = coords_[static_cast<std::size_t>(n - 1)];
      pair.c_size = 2 * prev.d_size;
      pair.d_size = prev.c_size;
      coords.assign(prev_coords.size() * 2, {0, 0});
      // psi^r(k) = 2k + 16r: position (2k - 2^{n})/16 = 2*pos(k) + r.
      for (std::size_t pos = 0; pos < prev_coords.size(); ++pos) {
        auto [c, d] = prev_coords[pos];
        coords[2 * pos] = {2 * d + 0, c};
        coords[2 * pos + 1] = {2 * d + 1, c};
      }
    }

    int log2_d = std::bit_width(pair.d_size) - 1;
    auto slots = detail::slot_sizes(log2_d);
    pair.d_split = slots;
    std::sort(pair.d_split.begin(), pair.d_split.end());
    pair.m_n = pair.d_split[0];

    // Dense deterministic numbering of the sets.
    std::array<Index, 16> nabla_offset{}, delta_offset{};
    Index nab_total = 0, del_total = 0;
    for (int l = 0; l < 16; ++l) {
      nabla_offset[static_cast<std::size_t>(l)] = nab_total;
      delta_offset[static_cast<std::size_t>(l)] = del_total;
      nab_total += pair.c_size * (pair.d_size / slots[static_cast<std::size_t>(l)]);
      del_total += slots[static_cast<std::size_t>(l)];
    }
    pair.nabla.assign(nab_total, {});
    pair.delta.assign(del_total, {});

    Index class_count = block_size(n) / 16;
    for (Index pos = 0; pos < class_count; ++pos) {
      Index k0 = begin + 16 * pos;
      auto [c, d] = coords[pos];
      auto digit = detail::slot_digits(d, slots);
      for (int l = 0; l < 16; ++l) {
        Index member = k0 + static_cast<Index>(l);
        Index nab_id = nabla_offset[static_cast<std::size_t>(l)] +
                       c * (pair.d_size / slots[static_cast<std::size_t>(l)]) +
                       detail::reduced_rank(digit, slots, l);
        Index del_id = delta_offset[static_cast<std::size_t>(l)] +
                       static_cast<Index>(digit[static_cast<std::size_t>(l)]);
        pair.nabla[nab_id].push_back(member);
        pair.delta[del_id].push_back(member);
        n_of[member - begin] = static_cast<std::int32_t>(nab_id);
        d_of[member - begin] = static_cast<std::int32_t>(del_id);
      }
    }
    // Members were pushed in ascending k0 order, so the sets are sorted.
  }

  int n_max_;
  std::vector<PartitionPair> pairs_;
  std::vector<std::vector<std::int32_t>> delta_of_, nabla_of_;
  std::vector<std::vector<std::pair<Index, Index>>> coords_;
};

inline PartitionSet build_partitions(int n_max) { return PartitionSet(n_max); }

// ---------------------------------------------------------------------------
// Property verification.
// ---------------------------------------------------------------------------

struct LevelPropertyReport {
  int level = 0;
  bool sizes_ok = true;       // m_n <= |A| <= 2 m_n and A inside one residue class
  bool meets_ok = true;       // |A \cap B| <= 1 for every delta set B
  enum class Prop3 { pass, fail, skipped } prop3 = Prop3::pass;
  std::uint64_t prop3_checked = 0;
  std::uint64_t prop3_skipped_h = 0;  // h maps unavailable on residues > 3
  std::string detail;
};

struct PartitionReport {
  std::vector<LevelPropertyReport> levels;
  bool all_pass = true;
};

/// Exhaustive check of the three partition properties on consecutive levels.
/// Property 3 asks every map image xi(A) to land inside a single delta set
/// one level down, same level, or one level up; the top provided level
/// reports it as skipped (the level above is missing by construction).
inline PartitionReport verify_partition_properties(const std::vector<PartitionPair>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("verify_partition_properties: no pairs");
  for (std::size_t i = 1; i < pairs.size(); ++i)
    if (pairs[i].level != pairs[i - 1].level + 1)
      throw std::invalid_argument("verify_partition_properties: levels must be consecutive");

  // Index -> (level, delta ordinal) over the provided slice only.
  std::unordered_map<Index, std::uint64_t> delta_lookup;
  for (const auto& p : pairs)
    for (std::size_t b = 0; b < p.delta.size(); ++b)
      for (Index k : p.delta[b])
        delta_lookup.emplace(k, (static_cast<std::uint64_t>(p.level) << 40) | b);

  int lo = pairs.front().level, hi = pairs.back().level;
  PartitionReport report;
  report.levels.resize(pairs.size());
  auto xis = all_xi();

  parallel_for(pairs.size(), [&](std::size_t pi) {
    const auto& p = pairs[pi];
    LevelPropertyReport r;
    r.level = p.level;
    Index min_size = ~Index{0};

    for (const auto& A : p.nabla) {
      min_size = std::min<Index>(min_size, A.size());
      if (A.size() < p.m_n || A.size() > 2 * p.m_n) {
        r.sizes_ok = false;
        r.detail = "size bound violated at level " + std::to_string(p.level);
      }
      for (Index k : A)
        if (k % 16 != A.front() % 16 || block_of(k) != p.level) {
          r.sizes_ok = false;
          r.detail = "set not inside one residue class";
        }

      // property 2 via delta ids: members of A must hit distinct delta sets
      std::vector<std::uint64_t> ids;
      ids.reserve(A.size());
      for (Index k : A) ids.push_back(delta_lookup.at(k));
      std::sort(ids.begin(), ids.end());
      if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        r.meets_ok = false;
        r.detail = "a nabla set meets a delta set twice";
      }

      // property 3
      for (const auto& xi : xis) {
        bool in_domain = true;
        for (Index k : A)
          if (!xi_in_domain(xi, k)) in_domain = false;
        if (!in_domain) {
          if (xi.family == XiName::h && !A.empty() && A.front() / 16 >= 2) ++r.prop3_skipped_h;
          continue;
        }
        int target = p.level + (xi.family == XiName::f ? -1 : xi.family == XiName::g ? 0 : 1);
        if (target > hi || target < lo) {
          // boundary level: the adjacent partition is outside the slice
          if (r.prop3 == LevelPropertyReport::Prop3::pass)
            r.prop3 = LevelPropertyReport::Prop3::skipped;
          continue;
        }
        std::uint64_t id0 = 0;
        bool first = true, ok = true;
        for (Index k : A) {
          auto it = delta_lookup.find(xi_eval(xi, k));
          if (it == delta_lookup.end() || static_cast<int>(it->second >> 40) != target) {
            ok = false;
            break;
          }
          if (first) {
            id0 = it->second;
            first = false;
          } else if (it->second != id0) {
            ok = false;
            break;
          }
        }
        ++r.prop3_checked;
        if (!ok) {
          r.prop3 = LevelPropertyReport::Prop3::fail;
          r.detail = "image of a nabla set crosses delta sets (" +
                     std::string(1, xi_letter(xi.family)) + "_" + std::to_string(xi.k) + ")";
        }
      }
    }
    if (!p.nabla.empty() && min_size != p.m_n) {
      r.sizes_ok = false;
      r.detail = "m_n is not the minimum nabla set size";
    }
    report.levels[pi] = r;
  });

  for (const auto& r : report.levels)
    if (!r.sizes_ok || !r.meets_ok || r.prop3 == LevelPropertyReport::Prop3::fail)
      report.all_pass = false;
  return report;
}

}  // namespace enflolab
