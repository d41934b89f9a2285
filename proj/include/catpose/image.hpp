#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace catpose {

// Row-major depth in millimeters; 0 marks an invalid pixel.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> mm;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), mm(static_cast<std::size_t>(w) * h, 0) {}

  std::uint16_t& at(int u, int v) { return mm[static_cast<std::size_t>(v) * width + u]; }
  std::uint16_t at(int u, int v) const { return mm[static_cast<std::size_t>(v) * width + u]; }
};

struct InstanceMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> on;  // 0 or 1

  InstanceMask() = default;
  InstanceMask(int w, int h) : width(w), height(h), on(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int u, int v) const { return on[static_cast<std::size_t>(v) * width + u] != 0; }
  void set(int u, int v, bool value) { on[static_cast<std::size_t>(v) * width + u] = value ? 1 : 0; }
};

}  // namespace catpose
