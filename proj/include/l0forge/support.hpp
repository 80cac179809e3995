#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "l0forge/types.hpp"

namespace l0forge {

/// Index set I(x) of zero components of an n-dimensional vector.
/// The complement of I spans the subspace C_I of vectors vanishing on I.
class SupportSet {
 public:
  SupportSet() = default;

  SupportSet(std::vector<Index> zero_indices, Index dimension)
      : zero_indices_(std::move(zero_indices)), dimension_(dimension) {
    std::sort(zero_indices_.begin(), zero_indices_.end());
    for (std::size_t i = 0; i < zero_indices_.size(); ++i) {
      if (zero_indices_[i] < 0 || zero_indices_[i] >= dimension_)
        throw std::invalid_argument("SupportSet: index out of range");
      if (i > 0 && zero_indices_[i] == zero_indices_[i - 1])
        throw std::invalid_argument("SupportSet: duplicate index");
    }
  }

  const std::vector<Index>& zero_indices() const { return zero_indices_; }
  Index dimension() const { return dimension_; }

  bool is_zero(Index i) const {
    return std::binary_search(zero_indices_.begin(), zero_indices_.end(), i);
  }

  /// Number of coordinates allowed to be nonzero (|I^c|).
  Index nonzero_count() const {
    return dimension_ - static_cast<Index>(zero_indices_.size());
  }

  std::vector<Index> nonzero_indices() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(nonzero_count()));
    std::size_t j = 0;
    for (Index i = 0; i < dimension_; ++i) {
      if (j < zero_indices_.size() && zero_indices_[j] == i) {
        ++j;
      } else {
        out.push_back(i);
      }
    }
    return out;
  }

  friend bool operator==(const SupportSet& a, const SupportSet& b) {
    return a.dimension_ == b.dimension_ && a.zero_indices_ == b.zero_indices_;
  }

 private:
  std::vector<Index> zero_indices_;
  Index dimension_ = 0;
};

/// I = {i : |x_i| <= tol}. Exact zeros are always included.
inline SupportSet support_of(const Vector& x, double tol = 0.0) {
  if (tol < 0.0) throw std::invalid_argument("support_of: tol must be >= 0");
  std::vector<Index> zeros;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) <= tol) zeros.push_back(i);
  }
  return SupportSet(std::move(zeros), x.size());
}

/// Orthogonal projection onto C_I: writes literal zeros on I.
inline Vector project_support(const Vector& x, const SupportSet& s) {
  if (s.dimension() != x.size())
    throw std::invalid_argument("project_support: dimension mismatch");
  Vector out = x;
  for (Index i : s.zero_indices()) out[i] = 0.0;
  return out;
}

}  // namespace l0forge
