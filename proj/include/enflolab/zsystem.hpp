#pragma once

#include <array>
#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include "enflolab/rational.hpp"
#include "enflolab/sparse_vec.hpp"

namespace enflolab {

/// Identifier of a basis pair (z_{i,eps}, z*_{i,eps}). The support maps need
/// i >= 2, so that is the minimum everywhere.
struct ZId {
  Index i = 2;
  int eps = 0;

  friend auto operator<=>(const ZId&, const ZId&) = default;
};

inline std::string to_string(const ZId& id) {
  return "z(" + std::to_string(id.i) + "," + std::to_string(id.eps) + ")";
}

inline void check_zid(const ZId& id) {
  if (id.i < 2) throw std::domain_error("z system: index must be >= 2");
  if (id.eps != 0 && id.eps != 1) throw std::domain_error("z system: eps must be 0 or 1");
}

/// Finite 0/1 word t(1)..t(N) selecting which half of each level a subspace
/// keeps.
class BitPrefix {
 public:
  explicit BitPrefix(std::vector<int> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw std::domain_error("BitPrefix: needs at least one bit");
    for (int b : bits_)
      if (b != 0 && b != 1) throw std::domain_error("BitPrefix: bits must be 0 or 1");
  }

  static BitPrefix from_string(const std::string& s) {
    std::vector<int> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::domain_error("BitPrefix: expects a 0/1 word");
      bits.push_back(c - '0');
    }
    return BitPrefix(std::move(bits));
  }

  int length() const { return static_cast<int>(bits_.size()); }

  /// t(n), 1-based.
  int at(int n) const {
    if (n < 1 || n > length()) throw std::invalid_argument("BitPrefix: position out of range");
    return bits_[static_cast<std::size_t>(n) - 1];
  }

  std::string str() const {
    std::string s;
    for (int b : bits_) s += static_cast<char>('0' + b);
    return s;
  }

 private:
  std::vector<int> bits_;
};

namespace detail {
// Offsets of the +1 coefficients in the 16-run of z_{i,eps}, relative to
// 16i + 2 eps.
inline constexpr std::array<int, 8> kPlusOffsets = {0, 1, 4, 5, 8, 9, 12, 13};
}  // namespace detail

/// The 12-term vector
///   z_{i,0} = (x_{8i}-x_{8i+1}) + (x_{8i+2}-x_{8i+3}) + x_{16i} + x_{16i+1}
///             + x_{16i+4} + x_{16i+5} + x_{16i+8} + x_{16i+9} + x_{16i+12} + x_{16i+13}
/// and its eps = 1 sibling, shifted by 4 in the 8-block and by 2 in the 16-run.
inline SparseVec build_z(ZId id) {
  check_zid(id);
  SparseVec z(VecRole::vec);
  Index base8 = 8 * id.i + 4 * static_cast<Index>(id.eps);
  z.set(base8 + 0, 1);
  z.set(base8 + 1, -1);
  z.set(base8 + 2, 1);
  z.set(base8 + 3, -1);
  Index base16 = 16 * id.i + 2 * static_cast<Index>(id.eps);
  for (int off : detail::kPlusOffsets) z.set(base16 + static_cast<Index>(off), 1);
  return z;
}

/// Coefficient of x_m in z_{i,eps} without building the vector.
inline int x_coeff_of_z(const ZId& id, Index m) {
  Index base8 = 8 * id.i + 4 * static_cast<Index>(id.eps);
  if (m >= base8 && m < base8 + 4) return (m - base8) % 2 == 0 ? 1 : -1;
  Index base16 = 16 * id.i + 2 * static_cast<Index>(id.eps);
  if (m >= base16 && m < base16 + 14) {
    Index d = m - base16;
    for (int off : detail::kPlusOffsets)
      if (d == static_cast<Index>(off)) return 1;
  }
  return 0;
}

/// z*_{i,eps} = 1/2 (x*_{8i+4eps} - x*_{8i+4eps+1}), restricted to the span
/// of the z's.
inline SparseVec build_zstar(ZId id) {
  check_zid(id);
  SparseVec f(VecRole::fun);
  Index base = 8 * id.i + 4 * static_cast<Index>(id.eps);
  f.set(base, Rational(1, 2));
  f.set(base + 1, Rational(-1, 2));
  return f;
}

/// The four x*-combinations that agree with z*_{i,eps} on the z-span: two
/// halved differences and two quartered four-term sums.
inline std::array<SparseVec, 4> zstar_representations(ZId id) {
  check_zid(id);
  std::array<SparseVec, 4> reps{SparseVec(VecRole::fun), SparseVec(VecRole::fun),
                                SparseVec(VecRole::fun), SparseVec(VecRole::fun)};
  Index base8 = 8 * id.i + 4 * static_cast<Index>(id.eps);
  reps[0].set(base8 + 0, Rational(1, 2));
  reps[0].set(base8 + 1, Rational(-1, 2));
  reps[1].set(base8 + 2, Rational(1, 2));
  reps[1].set(base8 + 3, Rational(-1, 2));
  Index base16 = 16 * id.i + 2 * static_cast<Index>(id.eps);
  for (int off : {0, 1, 8, 9}) reps[2].set(base16 + static_cast<Index>(off), Rational(1, 4));
  for (int off : {4, 5, 12, 13}) reps[3].set(base16 + static_cast<Index>(off), Rational(1, 4));
  return reps;
}

/// Basis of a prefix-selected subspace over levels n_lo..n_hi: z_{j,t(n)} for
/// j in I_n, ordered by j.
inline std::vector<ZId> xt_basis(const BitPrefix& t, int n_lo, int n_hi) {
  if (n_lo < 1 || n_lo > n_hi) throw std::invalid_argument("xt_basis: bad level range");
  if (n_hi > t.length()) throw std::invalid_argument("xt_basis: range exceeds prefix length");
  std::vector<ZId> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    int eps = t.at(n);
    for (Index j = block_begin(n); j < block_begin(n + 1); ++j) out.push_back({j, eps});
  }
  return out;
}

// ---------------------------------------------------------------------------
// The y vectors of the trace telescoping. For the level-bit pair
// (eps, delta) the participating residues are o, o+1, o+8, o+9 with
// o = 4 eps + 2 delta, and for j = 16i + o + b + 8a
//   y_j = (-1)^b z_{2i+a, eps} - z_{i, delta}.
// ---------------------------------------------------------------------------

inline std::array<int, 4> case_offsets(int eps, int delta) {
  int o = 4 * eps + 2 * delta;
  return {o, o + 1, o + 8, o + 9};
}

/// The (eps, delta) pair whose index class contains residue r.
inline std::pair<int, int> case_of_residue(int r) {
  if (r < 0 || r > 15) throw std::domain_error("case_of_residue: residue out of range");
  int eps = (r % 8) >= 4 ? 1 : 0;
  int delta = (r % 4) >= 2 ? 1 : 0;
  return {eps, delta};
}

inline SparseVec build_y(Index j, int eps, int delta) {
  if (eps != 0 && eps != 1) throw std::domain_error("build_y: eps must be 0 or 1");
  if (delta != 0 && delta != 1) throw std::domain_error("build_y: delta must be 0 or 1");
  Index i = j / 16;
  int r = static_cast<int>(j % 16);
  if (i < 2) throw std::domain_error("build_y: index must be >= 32");
  int o = 4 * eps + 2 * delta;
  int rr = r - o;
  if (rr != 0 && rr != 1 && rr != 8 && rr != 9)
    throw std::invalid_argument("build_y: residue inconsistent with the case");
  int a = rr >= 8 ? 1 : 0;
  int b = rr % 2;
  SparseVec y(VecRole::vec);
  y.axpy(b ? Rational(-1) : Rational(1), build_z({2 * i + static_cast<Index>(a), eps}));
  y.axpy(Rational(-1), build_z({i, delta}));
  return y;
}

/// y in z-coordinates: the two (id, sign) terms before expansion.
inline std::array<std::pair<ZId, int>, 2> y_z_terms(Index j, int eps, int delta) {
  Index i = j / 16;
  int r = static_cast<int>(j % 16);
  int o = 4 * eps + 2 * delta;
  int rr = r - o;
  if (i < 2 || (rr != 0 && rr != 1 && rr != 8 && rr != 9))
    throw std::invalid_argument("y_z_terms: residue inconsistent with the case");
  int a = rr >= 8 ? 1 : 0;
  int b = rr % 2;
  return {{{{2 * i + static_cast<Index>(a), eps}, b ? -1 : 1}, {{i, delta}, -1}}};
}

}  // namespace enflolab
