#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "enflolab/indices.hpp"
#include "enflolab/sparse_vec.hpp"

namespace enflolab {

/// Parameters of the delta-block lattice norm
///   ||sum a_j x_j|| = ( sum_n sum_{B in Delta_n} ( sum_{j in B} a_j^2 )^{p/2} )^{1/p}
/// and of its dual (same shape with the conjugate exponent q). The model
/// space constant is 1, so the two-sided estimates collapse to equalities.
struct NormSpec {
  double p = 1.0;
  const PartitionSet* partitions = nullptr;

  NormSpec(double p_, const PartitionSet* parts) : p(p_), partitions(parts) {
    if (!(p >= 1.0 && p < 2.0)) throw std::domain_error("NormSpec: p must lie in [1, 2)");
    if (!parts) throw std::invalid_argument("NormSpec: partitions required");
  }

  /// Conjugate exponent; infinity when p = 1.
  double q() const {
    return p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
  }
};

namespace detail {

// Sum of squares per delta block. Throws if an index lies beyond the built
// partition levels.
inline std::map<std::uint64_t, double> block_squares(const RealVec& v, const NormSpec& spec) {
  std::map<std::uint64_t, double> acc;
  for (const auto& [j, a] : v) {
    if (!spec.partitions->covers(j))
      throw std::invalid_argument("norm: index outside available partition levels");
    acc[spec.partitions->delta_block_id(j)] += a * a;
  }
  return acc;
}

inline double combine_blocks(const std::map<std::uint64_t, double>& blocks, double exponent) {
  if (blocks.empty()) return 0.0;
  if (std::isinf(exponent)) {
    double best = 0.0;
    for (const auto& [id, s] : blocks) best = std::max(best, s);
    return std::sqrt(best);
  }
  double total = 0.0;
  for (const auto& [id, s] : blocks) total += std::pow(s, exponent / 2.0);
  return std::pow(total, 1.0 / exponent);
}

}  // namespace detail

inline double lattice_norm(const RealVec& v, const NormSpec& spec) {
  return detail::combine_blocks(detail::block_squares(v, spec), spec.p);
}

inline double lattice_norm(const SparseVec& v, const NormSpec& spec) {
  if (!v.is_vector()) throw std::invalid_argument("lattice_norm: expects a vector");
  return lattice_norm(to_real(v), spec);
}

inline double dual_norm(const RealVec& phi, const NormSpec& spec) {
  return detail::combine_blocks(detail::block_squares(phi, spec), spec.q());
}

inline double dual_norm(const SparseVec& phi, const NormSpec& spec) {
  if (!phi.is_functional()) throw std::invalid_argument("dual_norm: expects a functional");
  return dual_norm(to_real(phi), spec);
}

}  // namespace enflolab
