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

#include "realm/render/photometric.h"

#include <algorithm>
#include <cmath>

namespace realm::render {

std::vector<double> GaussianKernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

Image ApplyPhotometric(const Image& image, double contrast, double blur_sigma) {
  if (contrast == 1.0 && blur_sigma == 0.0) return image;
  const int w = image.width, h = image.height;
  std::vector<double> buf(image.pixels.size());
  for (size_t i = 0; i < buf.size(); ++i) {
    buf[i] = std::clamp(128.0 + contrast * (image.pixels[i] - 128.0), 0.0, 255.0);
  }

  if (blur_sigma > 0.0) {
    const std::vector<double> k = GaussianKernel(blur_sigma);
    const int r = static_cast<int>(k.size() / 2);
    std::vector<double> tmp(buf.size());
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (int i = -r; i <= r; ++i) {
            const int xs = std::clamp(x + i, 0, w - 1);
            acc += k[i + r] * buf[(static_cast<size_t>(y) * w + xs) * 3 + c];
          }
          tmp[(static_cast<size_t>(y) * w + x) * 3 + c] = acc;
        }
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          double acc = 0.0;
          for (int i = -r; i <= r; ++i) {
            const int ys = std::clamp(y + i, 0, h - 1);
            acc += k[i + r] * tmp[(static_cast<size_t>(ys) * w + x) * 3 + c];
          }
          buf[(static_cast<size_t>(y) * w + x) * 3 + c] = acc;
        }
      }
    }
  }

  Image out(w, h);
  for (size_t i = 0; i < buf.size(); ++i) {
    out.pixels[i] = static_cast<uint8_t>(std::clamp(std::lround(buf[i]), 0L, 255L));
  }
  return out;
}

}  // namespace realm::render
