#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtg/errors.hpp"

namespace gtg {

// 8-bit RGB image, row-major interleaved.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  const uint8_t* px(int x, int y) const {
    return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
  }
  uint8_t* px(int x, int y) { return rgb.data() + 3 * (static_cast<size_t>(y) * width + x); }
};

// Binary PPM (P6), 8-bit maxval only. Header comments are accepted on read.
Image read_ppm(const std::string& path);          // throws UnreadableImage
void write_ppm(const Image& img, const std::string& path);  // throws IoError

}  // namespace gtg
