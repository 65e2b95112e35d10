#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ghne {

// Grid extents, one per axis. Rank >= 1, every extent >= 1.
class Shape {
 public:
  explicit Shape(std::vector<std::size_t> extents);
  Shape(std::initializer_list<std::size_t> extents);

  std::size_t rank() const noexcept { return extents_.size(); }
  std::size_t extent(std::size_t axis) const { return extents_.at(axis); }
  std::span<const std::size_t> extents() const noexcept { return extents_; }

  // Number of grid entries.
  std::size_t size() const noexcept { return size_; }

  // Row-major flat offset of a multi-index.
  std::size_t offset(std::span<const std::size_t> index) const;

  // "14x14", "4", "3x5x7".
  std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<std::size_t> extents_;
  std::size_t size_ = 0;
};

// Extent a + b - 1 on every axis. Throws ShapeMismatch on a rank mismatch.
Shape full_shape(const Shape& a, const Shape& b);

}  // namespace ghne
