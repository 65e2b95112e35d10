#include "ghne/shape.hpp"

#include "ghne/error.hpp"

namespace ghne {

Shape::Shape(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
  if (extents_.empty()) throw InvalidArgument("shape must have rank >= 1");
  size_ = 1;
  for (std::size_t e : extents_) {
    if (e == 0) throw InvalidArgument("shape extents must be >= 1, got " + to_string());
    size_ *= e;
  }
}

Shape::Shape(std::initializer_list<std::size_t> extents)
    : Shape(std::vector<std::size_t>(extents)) {}

std::size_t Shape::offset(std::span<const std::size_t> index) const {
  if (index.size() != rank()) throw ShapeMismatch("index rank does not match shape");
  std::size_t off = 0;
  for (std::size_t axis = 0; axis < rank(); ++axis) {
    if (index[axis] >= extents_[axis]) throw InvalidArgument("index out of range");
    off = off * extents_[axis] + index[axis];
  }
  return off;
}

std::string Shape::to_string() const {
  std::string out;
  for (std::size_t axis = 0; axis < extents_.size(); ++axis) {
    if (axis > 0) out += 'x';
    out += std::to_string(extents_[axis]);
  }
  return out;
}

Shape full_shape(const Shape& a, const Shape& b) {
  if (a.rank() != b.rank()) {
    throw ShapeMismatch("rank mismatch: " + a.to_string() + " vs " + b.to_string());
  }
  std::vector<std::size_t> out(a.rank());
  for (std::size_t axis = 0; axis < a.rank(); ++axis) {
    out[axis] = a.extent(axis) + b.extent(axis) - 1;
  }
  return Shape(std::move(out));
}

}  // namespace ghne
