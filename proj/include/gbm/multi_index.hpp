#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gbm/errors.hpp"
#include "gbm/types.hpp"

namespace gbm {

/// Sum of absolute entries of alpha.
inline int order(const MultiIndex& alpha) { return alpha.cwiseAbs().sum(); }

/// True when every entry of alpha is nonzero.
inline bool all_nonzero(const MultiIndex& alpha) {
  return (alpha.array() != 0).all();
}

inline std::string to_string(const MultiIndex& alpha) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(alpha(i));
  }
  return s + ")";
}

/// The truncation box |alpha_i| <= K in Z^n, enumerated lexicographically
/// (first coordinate slowest). All mode sums in the library run in this order.
class ModeBox {
 public:
  ModeBox(int dim, int radius) : dim_(dim), radius_(radius) {
    require(dim >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    require(radius >= 0, ErrorKind::InvalidArgument, "truncation radius must be nonnegative");
    size_ = 1;
    for (int d = 0; d < dim; ++d) size_ *= static_cast<std::size_t>(2 * radius + 1);
  }

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  std::size_t size() const { return size_; }

  MultiIndex operator[](std::size_t index) const {
    MultiIndex alpha(dim_);
    const std::size_t side = static_cast<std::size_t>(2 * radius_ + 1);
    for (int d = dim_ - 1; d >= 0; --d) {
      alpha(d) = static_cast<int>(index % side) - radius_;
      index /= side;
    }
    return alpha;
  }

  bool contains(const MultiIndex& alpha) const {
    return alpha.size() == dim_ && alpha.cwiseAbs().maxCoeff() <= radius_;
  }

  std::size_t index_of(const MultiIndex& alpha) const {
    if (!contains(alpha))
      throw Error(ErrorKind::InvalidArgument, "multiindex " + gbm::to_string(alpha) + " outside truncation box");
    const std::size_t side = static_cast<std::size_t>(2 * radius_ + 1);
    std::size_t index = 0;
    for (int d = 0; d < dim_; ++d) index = index * side + static_cast<std::size_t>(alpha(d) + radius_);
    return index;
  }

  /// Index of -alpha; the box is symmetric so this is size() - 1 - index.
  std::size_t mirror(std::size_t index) const { return size_ - 1 - index; }

  std::vector<MultiIndex> all() const {
    std::vector<MultiIndex> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i]);
    return out;
  }

 private:
  int dim_;
  int radius_;
  std::size_t size_;
};

}  // namespace gbm
