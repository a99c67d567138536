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

#ifndef REALM_RENDER_PHOTOMETRIC_H_
#define REALM_RENDER_PHOTOMETRIC_H_

#include <vector>

#include "realm/render/image.h"

namespace realm::render {

// Normalized Gaussian taps for offsets -r..r, r = ceil(3 sigma).
std::vector<double> GaussianKernel(double sigma);

// Contrast about mid-gray (128), clamped to [0, 255], then a separable
// Gaussian blur with edge clamping. (1, 0) is the exact identity.
Image ApplyPhotometric(const Image& image, double contrast, double blur_sigma);

}  // namespace realm::render

#endif  // REALM_RENDER_PHOTOMETRIC_H_
