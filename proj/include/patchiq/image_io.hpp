// Copyright 2026 The patchiq authors
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

#pragma once

#include <string>

#include "patchiq/image.hpp"

namespace patchiq {

// Supported containers:
//   .f32           raw little-endian 32-bit floats, row-major, with a JSON
//                  sidecar "<path>.json" holding {height, width, pixel_size_um}.
//                  Lossless; the canonical on-disk representation.
//   .png           16-bit grayscale, [0,1] mapped linearly to [0,65535].
//   .tif / .tiff   16-bit grayscale, same mapping.
//
// Multi-channel or unsupported bit-depth inputs are rejected with DataError.
enum class ImageFormat { RawFloat, Png, Tiff };

// Deduce the format from the file extension; DataError on unknown extension.
ImageFormat format_from_path(const std::string& path);

Image read_image(const std::string& path);
Image read_image(const std::string& path, ImageFormat format);

void write_image(const Image& image, const std::string& path);
void write_image(const Image& image, const std::string& path, ImageFormat format);

} // namespace patchiq
