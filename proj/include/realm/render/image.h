// Copyright 2026 The realm-desk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REALM_RENDER_IMAGE_H_
#define REALM_RENDER_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace realm::render {

// Row-major RGB8.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  Image() = default;
  Image(int w, int h, uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, fill) {}

  uint8_t& at(int x, int y, int c) { return pixels[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  bool operator==(const Image&) const = default;
};

// Linear radiance before 8-bit quantization.
struct RadianceImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major RGB

  double at(int x, int y, int c) const {
    return values[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  double Mean() const;
};

// round(255 * v), clamped to [0, 255].
Image Quantize(const RadianceImage& radiance);

void WritePng(const Image& image, const std::filesystem::path& path);

}  // namespace realm::render

#endif  // REALM_RENDER_IMAGE_H_
