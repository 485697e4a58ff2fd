#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "enflolab/indices.hpp"
#include "enflolab/rational.hpp"

namespace enflolab {

enum class VecRole { vec, fun };

/// Finitely supported exact-rational vector over the x-basis. The role flag
/// separates vectors (x-basis) from functionals (x*-basis); pairing requires
/// one of each. Zero coefficients are never stored.
class SparseVec {
 public:
  SparseVec() = default;
  explicit SparseVec(VecRole role) : role_(role) {}

  VecRole role() const { return role_; }
  bool is_vector() const { return role_ == VecRole::vec; }
  bool is_functional() const { return role_ == VecRole::fun; }

  void set(Index j, const Rational& v) {
    if (j < 1) throw std::domain_error("SparseVec: indices are positive");
    if (v == 0)
      coeffs_.erase(j);
    else
      coeffs_[j] = v;
  }

  void add(Index j, const Rational& v) {
    if (j < 1) throw std::domain_error("SparseVec: indices are positive");
    auto it = coeffs_.find(j);
    if (it == coeffs_.end()) {
      if (v != 0) coeffs_.emplace(j, v);
      return;
    }
    it->second += v;
    if (it->second == 0) coeffs_.erase(it);
  }

  Rational at(Index j) const {
    auto it = coeffs_.find(j);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  const std::map<Index, Rational>& coeffs() const { return coeffs_; }
  std::size_t support_size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  Index max_index() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

  /// this += a * other. Roles must agree.
  SparseVec& axpy(const Rational& a, const SparseVec& other) {
    if (role_ != other.role_) throw std::invalid_argument("SparseVec: role mismatch in axpy");
    if (a == 0) return *this;
    for (const auto& [j, v] : other.coeffs_) add(j, a * v);
    return *this;
  }

  friend bool operator==(const SparseVec& a, const SparseVec& b) {
    return a.role_ == b.role_ && a.coeffs_ == b.coeffs_;
  }

 private:
  VecRole role_ = VecRole::vec;
  std::map<Index, Rational> coeffs_;
};

/// Duality pairing <phi, v> = sum_j phi_j v_j, exact.
inline Rational pair(const SparseVec& phi, const SparseVec& v) {
  if (!phi.is_functional() || !v.is_vector())
    throw std::invalid_argument("pair: expects a functional and a vector");
  Rational acc(0);
  const auto& small = phi.support_size() <= v.support_size() ? phi : v;
  const auto& large = phi.support_size() <= v.support_size() ? v : phi;
  for (const auto& [j, c] : small.coeffs()) {
    auto it = large.coeffs().find(j);
    if (it != large.coeffs().end()) acc += c * it->second;
  }
  return acc;
}

/// Double-valued companion used by the norm and optimization paths.
using RealVec = std::map<Index, double>;

inline RealVec to_real(const SparseVec& v) {
  RealVec out;
  for (const auto& [j, c] : v.coeffs()) out[j] = c.get_d();
  return out;
}

}  // namespace enflolab
