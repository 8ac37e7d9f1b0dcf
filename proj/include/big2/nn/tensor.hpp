#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <new>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "big2/error.hpp"

namespace big2::nn {

// Eigen's vectorized reductions peel a head whose length depends on the
// buffer address, so buffers mapped into Eigen get a fixed alignment to keep
// results independent of where the heap places them.
inline constexpr std::size_t kBufferAlignment = 64;

template <typename T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kBufferAlignment}));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t{kBufferAlignment}); }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

template <typename T>
using Buffer = std::vector<T, AlignedAllocator<T>>;

// Dense row-major buffer with an explicit shape.
template <typename T>
struct TensorBuffer {
  std::vector<int> shape;
  std::vector<T> data;

  TensorBuffer() = default;
  explicit TensorBuffer(std::vector<int> dims, T fill = T{0})
      : shape(std::move(dims)), data(numel_of(shape), fill) {}

  static std::size_t numel_of(const std::vector<int>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
  }
  std::size_t numel() const { return data.size(); }
  bool consistent() const { return numel_of(shape) == data.size(); }
};

template <typename T>
bool all_finite(std::span<const T> values) {
  for (T v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

template <typename T>
void assert_finite(std::span<const T> values, const std::string& what) {
  if (!all_finite(values)) throw NumericalFault("non-finite value in " + what);
}

}  // namespace big2::nn
