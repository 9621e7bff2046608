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

#include "patchiq/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "patchiq/error.hpp"

namespace patchiq {

namespace {

using nlohmann::json;

std::string lower_ext(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext;
}

uint16_t to_u16(float v) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<uint16_t>(std::lround(c * 65535.0f));
}

// ----- raw float -----

Image read_raw_float(const std::string& path) {
    std::ifstream sidecar(path + ".json");
    if (!sidecar) throw DataError("missing sidecar " + path + ".json");
    json meta = json::parse(sidecar, nullptr, false);
    if (meta.is_discarded()) throw DataError("invalid JSON sidecar for " + path);
    Image img(meta.at("height").get<int>(), meta.at("width").get<int>());
    if (meta.contains("pixel_size_um") && !meta["pixel_size_um"].is_null()) {
        img.pixel_size_um = meta["pixel_size_um"].get<double>();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size() * sizeof(float))) {
        throw DataError("truncated raw-float file " + path);
    }
    return img;
}

void write_raw_float(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size() * sizeof(float)));
    json meta{{"height", img.height}, {"width", img.width}};
    if (img.pixel_size_um) {
        meta["pixel_size_um"] = *img.pixel_size_um;
    } else {
        meta["pixel_size_um"] = nullptr;
    }
    std::ofstream sidecar(path + ".json");
    if (!sidecar) throw DataError("cannot write " + path + ".json");
    sidecar << meta.dump(2) << "\n";
}

// ----- PNG -----

struct PngReadCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCtx() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) fclose(fp);
    }
};

Image read_png(const std::string& path) {
    PngReadCtx ctx;
    ctx.fp = fopen(path.c_str(), "rb");
    if (!ctx.fp) throw DataError("cannot open " + path);
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (setjmp(png_jmpbuf(ctx.png))) throw DataError("PNG decode failed: " + path);
    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const int color = png_get_color_type(ctx.png, ctx.info);
    const int depth = png_get_bit_depth(ctx.png, ctx.info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        throw DataError("single-channel required: " + path);
    }
    if (depth != 8 && depth != 16) {
        throw DataError("unsupported PNG bit depth " + std::to_string(depth) + ": " + path);
    }
    const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));

    Image img(h, w);
    const float scale = depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
    std::vector<uint8_t> row(static_cast<size_t>(w) * (depth / 8));
    for (int r = 0; r < h; ++r) {
        png_read_row(ctx.png, row.data(), nullptr);
        for (int c = 0; c < w; ++c) {
            // PNG 16-bit samples are big-endian.
            const uint32_t v = depth == 16
                ? (static_cast<uint32_t>(row[2 * c]) << 8) | row[2 * c + 1]
                : row[c];
            img.at(r, c) = static_cast<float>(v) * scale;
        }
    }
    return img;
}

struct PngWriteCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCtx() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) fclose(fp);
    }
};

void write_png(const Image& img, const std::string& path) {
    PngWriteCtx ctx;
    ctx.fp = fopen(path.c_str(), "wb");
    if (!ctx.fp) throw DataError("cannot write " + path);
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (setjmp(png_jmpbuf(ctx.png))) throw DataError("PNG encode failed: " + path);
    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    std::vector<uint8_t> row(static_cast<size_t>(img.width) * 2);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const uint16_t v = to_u16(img.at(r, c));
            row[2 * c] = static_cast<uint8_t>(v >> 8);
            row[2 * c + 1] = static_cast<uint8_t>(v & 0xff);
        }
        png_write_row(ctx.png, row.data());
    }
    png_write_end(ctx.png, nullptr);
}

// ----- TIFF -----

struct TiffCloser {
    void operator()(TIFF* t) const { if (t) TIFFClose(t); }
};

Image read_tiff(const std::string& path) {
    TIFFSetWarningHandler(nullptr);
    std::unique_ptr<TIFF, TiffCloser> tif(TIFFOpen(path.c_str(), "r"));
    if (!tif) throw DataError("cannot open " + path);
    uint32_t w = 0, h = 0;
    uint16_t depth = 0, samples = 1, fmt = SAMPLEFORMAT_UINT;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
    TIFFGetField(tif.get(), TIFFTAG_BITSPERSAMPLE, &depth);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &samples);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &fmt);
    if (samples != 1) throw DataError("single-channel required: " + path);
    if ((depth != 8 && depth != 16) || fmt != SAMPLEFORMAT_UINT) {
        throw DataError("unsupported TIFF sample format (" + std::to_string(depth) +
                        " bit): " + path);
    }
    Image img(static_cast<int>(h), static_cast<int>(w));
    std::vector<uint8_t> row(TIFFScanlineSize(tif.get()));
    const float scale = depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
    for (uint32_t r = 0; r < h; ++r) {
        if (TIFFReadScanline(tif.get(), row.data(), r) < 0) {
            throw DataError("TIFF decode failed: " + path);
        }
        for (uint32_t c = 0; c < w; ++c) {
            uint32_t v;
            if (depth == 16) {
                uint16_t s;
                std::memcpy(&s, &row[2 * c], 2);
                v = s;
            } else {
                v = row[c];
            }
            img.at(static_cast<int>(r), static_cast<int>(c)) = static_cast<float>(v) * scale;
        }
    }
    return img;
}

void write_tiff(const Image& img, const std::string& path) {
    std::unique_ptr<TIFF, TiffCloser> tif(TIFFOpen(path.c_str(), "w"));
    if (!tif) throw DataError("cannot write " + path);
    TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<uint32_t>(img.width));
    TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<uint32_t>(img.height));
    TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, 16);
    TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, 1);
    TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
    TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
    TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, 1);
    std::vector<uint16_t> row(img.width);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) row[c] = to_u16(img.at(r, c));
        if (TIFFWriteScanline(tif.get(), row.data(), static_cast<uint32_t>(r)) < 0) {
            throw DataError("TIFF encode failed: " + path);
        }
    }
}

} // namespace

ImageFormat format_from_path(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "f32") return ImageFormat::RawFloat;
    if (ext == "png") return ImageFormat::Png;
    if (ext == "tif" || ext == "tiff") return ImageFormat::Tiff;
    throw DataError("unsupported image extension: " + path);
}

Image read_image(const std::string& path) { return read_image(path, format_from_path(path)); }

Image read_image(const std::string& path, ImageFormat format) {
    switch (format) {
        case ImageFormat::RawFloat: return read_raw_float(path);
        case ImageFormat::Png: return read_png(path);
        case ImageFormat::Tiff: return read_tiff(path);
    }
    throw DataError("unreachable image format");
}

void write_image(const Image& image, const std::string& path) {
    write_image(image, path, format_from_path(path));
}

void write_image(const Image& image, const std::string& path, ImageFormat format) {
    if (image.empty()) throw DataError("write_image: empty image");
    switch (format) {
        case ImageFormat::RawFloat: write_raw_float(image, path); return;
        case ImageFormat::Png: write_png(image, path); return;
        case ImageFormat::Tiff: write_tiff(image, path); return;
    }
}

} // namespace patchiq
