#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "enflolab/norms.hpp"
#include "enflolab/rational.hpp"
#include "enflolab/zsystem.hpp"

namespace enflolab {

/// Finitely supported operator in z-coordinates: columns are indexed by the
/// domain basis (a prefix-selected subspace), rows by arbitrary basis pairs
/// of the ambient z-span. A column may be present and empty; an absent
/// column means the operator is not defined there.
class OperatorMatrix {
 public:
  using Column = std::map<ZId, Rational>;

  void ensure_column(const ZId& col) {
    check_zid(col);
    cols_.try_emplace(col);
  }

  void set_entry(const ZId& row, const ZId& col, const Rational& v) {
    check_zid(row);
    check_zid(col);
    auto& column = cols_[col];
    if (v == 0)
      column.erase(row);
    else
      column[row] = v;
  }

  void add_entry(const ZId& row, const ZId& col, const Rational& v) {
    check_zid(row);
    check_zid(col);
    auto& column = cols_[col];
    auto it = column.find(row);
    if (it == column.end()) {
      if (v != 0) column.emplace(row, v);
      return;
    }
    it->second += v;
    if (it->second == 0) column.erase(it);
  }

  bool has_column(const ZId& col) const { return cols_.count(col) != 0; }

  const Column& column(const ZId& col) const {
    auto it = cols_.find(col);
    if (it == cols_.end())
      throw std::invalid_argument("OperatorMatrix: missing column " + to_string(col));
    return it->second;
  }

  const std::map<ZId, Column>& columns() const { return cols_; }

  std::size_t column_count() const { return cols_.size(); }

  bool zero() const {
    for (const auto& [c, col] : cols_)
      if (!col.empty()) return false;
    return true;
  }

  /// x-coefficient at position m of T applied to the basis vector `col`.
  Rational x_coeff(const ZId& col, Index m) const {
    const Column& c = column(col);
    Rational acc(0);
    for (const auto& [row, v] : c) {
      int w = x_coeff_of_z(row, m);
      if (w == 1)
        acc += v;
      else if (w == -1)
        acc -= v;
    }
    return acc;
  }

  /// Full x-expansion of T applied to the basis vector `col`.
  SparseVec apply_to_basis_x(const ZId& col) const {
    const Column& c = column(col);
    SparseVec out(VecRole::vec);
    for (const auto& [row, v] : c) out.axpy(v, build_z(row));
    return out;
  }

  /// Rows must belong to the subspace selected by `s` (used when an
  /// operator is required to factor through that subspace).
  void validate_range_in(const BitPrefix& s) const {
    for (const auto& [c, col] : cols_)
      for (const auto& [row, v] : col) {
        int n = block_of(row.i);
        if (n > s.length() || row.eps != s.at(n))
          throw std::invalid_argument("OperatorMatrix: row " + to_string(row) +
                                      " lies outside the target subspace");
      }
  }

  /// The inclusion of a prefix-selected subspace into the z-span.
  static OperatorMatrix identity_inclusion(const BitPrefix& t, int n_lo, int n_hi) {
    OperatorMatrix T;
    for (const ZId& id : xt_basis(t, n_lo, n_hi)) T.set_entry(id, id, Rational(1));
    return T;
  }

  /// Entrywise difference on the union of the domains.
  static OperatorMatrix subtract(const OperatorMatrix& A, const OperatorMatrix& B) {
    OperatorMatrix D = A;
    for (const auto& [c, col] : B.cols_) {
      D.ensure_column(c);
      for (const auto& [row, v] : col) D.add_entry(row, c, -v);
    }
    return D;
  }

 private:
  std::map<ZId, Column> cols_;
};

/// Random operator with the given domain columns and row pool: each column
/// receives a small random selection of rows with random bounded rationals.
/// Density stays under a quarter of the pool.
inline OperatorMatrix random_operator(Rng& rng, const std::vector<ZId>& domain,
                                      const std::vector<ZId>& row_pool,
                                      double rows_per_column = 6.0) {
  OperatorMatrix T;
  double density = std::min(0.25, rows_per_column / std::max<std::size_t>(1, row_pool.size()));
  for (const ZId& col : domain) {
    T.ensure_column(col);
    for (const ZId& row : row_pool)
      if (rng.chance(density)) T.set_entry(row, col, rng.rational());
  }
  return T;
}

// ---------------------------------------------------------------------------
// Operator norm estimation between two lattice norms. Exact values are out
// of reach; the lab provides a certified lower bound (every reported value
// is a ratio attained by a concrete vector) and a crude upper bound.
// ---------------------------------------------------------------------------

namespace detail {

struct OpNormWorkspace {
  std::vector<ZId> cols;
  std::vector<RealVec> domain_x;  // x-expansion of each domain basis vector
  std::vector<RealVec> image_x;   // x-expansion of each column image
};

inline OpNormWorkspace op_norm_workspace(const OperatorMatrix& T) {
  OpNormWorkspace w;
  for (const auto& [c, col] : T.columns()) w.cols.push_back(c);
  for (const ZId& c : w.cols) {
    w.domain_x.push_back(to_real(build_z(c)));
    w.image_x.push_back(to_real(T.apply_to_basis_x(c)));
  }
  return w;
}

inline RealVec combine(const std::vector<RealVec>& parts, const std::vector<double>& coeff) {
  RealVec out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (coeff[k] == 0.0) continue;
    for (const auto& [j, v] : parts[k]) out[j] += coeff[k] * v;
  }
  return out;
}

inline double ratio_at(const OpNormWorkspace& w, const std::vector<double>& coeff,
                       const NormSpec& dom, const NormSpec& cod) {
  double den = lattice_norm(combine(w.domain_x, coeff), dom);
  if (den == 0.0) return 0.0;
  return lattice_norm(combine(w.image_x, coeff), cod) / den;
}

}  // namespace detail

/// Certified lower bound for ||T|| between two lattice norms: the maximum of
/// ||Tu||/||u|| over seeded random starts refined by coordinate hill
/// climbing. Nondecreasing in the budget (restart r uses its own seed
/// derived from `seed` and r) and never above the true norm.
inline double op_norm_lower(const OperatorMatrix& T, const NormSpec& dom, const NormSpec& cod,
                            int budget, std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("op_norm_lower: budget must be >= 1");
  if (T.zero()) return 0.0;
  auto w = detail::op_norm_workspace(T);
  std::size_t d = w.cols.size();
  double best = 0.0;

  auto climb = [&](std::vector<double> c) {
    double cur = detail::ratio_at(w, c, dom, cod);
    double step = 0.5;
    while (step > 1e-4) {
      bool improved = false;
      for (std::size_t k = 0; k < d; ++k) {
        for (double s : {step, -step}) {
          auto cand = c;
          cand[k] += s;
          double val = detail::ratio_at(w, cand, dom, cod);
          if (val > cur + 1e-15) {
            cur = val;
            c = cand;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    return cur;
  };

  for (int r = 0; r < budget; ++r) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(r) + 1);
    std::vector<double> c(d);
    if (r == 0) {
      c.assign(d, 0.0);
      c[0] = 1.0;  // deterministic first start
    } else {
      for (auto& x : c) x = 2.0 * rng.unit() - 1.0;
    }
    best = std::max(best, climb(std::move(c)));
    // axis starts early in the schedule
    if (r < static_cast<int>(d)) {
      std::vector<double> axis(d, 0.0);
      axis[static_cast<std::size_t>(r)] = 1.0;
      best = std::max(best, climb(std::move(axis)));
    }
  }
  return best;
}

/// Crude upper bound: sum over columns of ||T z_c|| times the dual norm of
/// the coordinate functional z*_c.
inline double op_norm_upper_crude(const OperatorMatrix& T, const NormSpec& dom,
                                  const NormSpec& cod) {
  double total = 0.0;
  for (const auto& [c, col] : T.columns()) {
    double img = lattice_norm(to_real(T.apply_to_basis_x(c)), cod);
    double fun = dual_norm(to_real(build_zstar(c)), dom);
    total += img * fun;
  }
  return total;
}

}  // namespace enflolab
