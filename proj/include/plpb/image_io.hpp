/*
 * Copyright 2026 PLPB Toolkit Contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plpb/tensor.hpp"

namespace plpb {

/// Raw 8-bit image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;
};

void write_png(const std::string& path, const Image8& image);
Image8 read_png(const std::string& path);

/// [C,H,W] float tensor in [0,1] -> interleaved 8-bit image. C must be 1-3;
/// C=2 is padded with a zero blue channel so masks render as red/green.
Image8 to_image8(const Tensor32& t);

/// Inverse of to_image8: values scaled back to [0,1]; if the tensor had
/// 2 channels at save time, pass channels=2 to drop the padding plane.
Tensor32 from_image8(const Image8& img, int channels);

}  // namespace plpb
