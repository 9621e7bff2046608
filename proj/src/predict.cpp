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

#include "patchiq/predict.hpp"

#include <png.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "patchiq/error.hpp"
#include "patchiq/image_io.hpp"
#include "patchiq/util.hpp"
#include <json.hpp>

namespace patchiq {

namespace {

constexpr int kForwardChunk = 128; // patches per forward pass; bounds im2col memory

void write_rgb_png(const std::string& path, int h, int w, const std::vector<uint8_t>& rgb) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw DataError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        std::fclose(fp);
        png_destroy_write_struct(&png, &info);
        throw DataError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw DataError("libpng write failed: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < h; ++r)
        png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<size_t>(r) * w * 3));
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

// Piecewise-linear blue -> cyan -> yellow -> red ramp over t in [0,1].
void color_ramp(double t, uint8_t& r, uint8_t& g, uint8_t& b) {
    t = std::clamp(t, 0.0, 1.0);
    double rr, gg, bb;
    if (t < 1.0 / 3.0) {
        double u = t * 3.0;
        rr = 0.0; gg = u; bb = 1.0;
    } else if (t < 2.0 / 3.0) {
        double u = (t - 1.0 / 3.0) * 3.0;
        rr = u; gg = 1.0; bb = 1.0 - u;
    } else {
        double u = (t - 2.0 / 3.0) * 3.0;
        rr = 1.0; gg = 1.0 - u; bb = 0.0;
    }
    r = static_cast<uint8_t>(std::lround(rr * 255.0));
    g = static_cast<uint8_t>(std::lround(gg * 255.0));
    b = static_cast<uint8_t>(std::lround(bb * 255.0));
}

std::string csv_field(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

PredictionResult predict_image(Model& model, const Image& image) {
    PatchGrid grid = partition_patches(image, model.spec.patch_size);
    const int n = grid.count();
    const int psz = grid.patch_size * grid.patch_size;

    PredictionResult res;
    res.rows = grid.rows;
    res.cols = grid.cols;
    res.patch_size = grid.patch_size;
    res.cropped = grid.cropped;
    res.patch_quality.resize(n);
    res.patch_weight.resize(n);

    std::vector<double> q_norm(n);
    for (int start = 0; start < n; start += kForwardChunk) {
        int chunk = std::min(kForwardChunk, n - start);
        auto out = model.net.forward(grid.patch(start), chunk, /*training=*/false);
        for (int i = 0; i < chunk; ++i) {
            q_norm[start + i] = out.quality[i];
            res.patch_weight[start + i] = out.weight[i];
            res.patch_quality[start + i] =
                static_cast<double>(out.quality[i]) * model.label_std + model.label_mean;
        }
    }

    double agg = aggregate(q_norm, res.patch_weight);
    res.score = agg * model.label_std + model.label_mean;

    // Aggregation is affine-equivariant; the denormalized patch map must
    // aggregate to the reported score.
    double check = aggregate(res.patch_quality, res.patch_weight);
    if (std::abs(check - res.score) > 1e-9 * std::max(1.0, std::abs(res.score)))
        throw NumericError("patch map / score aggregation mismatch");
    return res;
}

BatchReport predict_batch(Model& model, const std::vector<std::pair<std::string, std::string>>& id_paths,
                          const std::string& out_dir, bool heatmaps, bool /*normalized_maps*/) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "predictions.csv");
    if (!csv) throw DataError("cannot write predictions.csv in " + out_dir);
    csv << "id,score,map_quality_path,map_weight_path,elapsed_ms,error\n";

    BatchReport report;
    auto batch_start = std::chrono::steady_clock::now();
    for (const auto& [id, path] : id_paths) {
        BatchItem item;
        item.id = id;
        auto t0 = std::chrono::steady_clock::now();
        std::string qmap_path, wmap_path;
        try {
            Image img = rescale_unit(read_image(path));
            PredictionResult res = predict_image(model, img);
            if (heatmaps) {
                std::string qprefix = (fs::path(out_dir) / (id + "_quality")).string();
                std::string wprefix = (fs::path(out_dir) / (id + "_weight")).string();
                render_heatmap(res, img, MapKind::Quality, qprefix);
                render_heatmap(res, img, MapKind::Weight, wprefix);
                qmap_path = qprefix + ".png";
                wmap_path = wprefix + ".png";
            }
            item.ok = true;
            item.score_or_error = csv_field(res.score);
        } catch (const std::exception& e) {
            item.ok = false;
            item.score_or_error = e.what();
            warn("prediction failed for '" + id + "': " + e.what());
        }
        item.elapsed_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0).count();
        csv << item.id << ',' << (item.ok ? item.score_or_error : "") << ','
            << qmap_path << ',' << wmap_path << ',' << csv_field(item.elapsed_ms) << ','
            << (item.ok ? "" : item.score_or_error) << '\n';
        report.items.push_back(std::move(item));
    }
    report.total_elapsed_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - batch_start).count();
    return report;
}

void render_heatmap(const PredictionResult& result, const Image& image, MapKind which,
                    const std::string& out_prefix) {
    const std::vector<double>& map =
        which == MapKind::Quality ? result.patch_quality : result.patch_weight;
    const char* kind = which == MapKind::Quality ? "quality" : "weight";

    // Raw values, row-major patch grid.
    {
        std::ofstream csv(out_prefix + ".csv");
        if (!csv) throw DataError("cannot write " + out_prefix + ".csv");
        csv.precision(10);
        for (int r = 0; r < result.rows; ++r) {
            for (int c = 0; c < result.cols; ++c)
                csv << (c ? "," : "") << map[static_cast<size_t>(r) * result.cols + c];
            csv << '\n';
        }
    }

    double lo = *std::min_element(map.begin(), map.end());
    double hi = *std::max_element(map.begin(), map.end());
    double span = hi - lo;

    const int ps = result.patch_size;
    const int h = result.rows * ps, w = result.cols * ps;
    constexpr double kAlpha = 0.45; // ramp opacity over the grayscale underlay
    std::vector<uint8_t> rgb(static_cast<size_t>(h) * w * 3);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double gray = std::clamp(static_cast<double>(image.at(r, c)), 0.0, 1.0);
            double v = map[static_cast<size_t>(r / ps) * result.cols + (c / ps)];
            double t = span > 0.0 ? (v - lo) / span : 0.5;
            uint8_t cr, cg, cb;
            color_ramp(t, cr, cg, cb);
            size_t off = (static_cast<size_t>(r) * w + c) * 3;
            rgb[off + 0] = static_cast<uint8_t>(std::lround(255.0 * ((1 - kAlpha) * gray) + kAlpha * cr));
            rgb[off + 1] = static_cast<uint8_t>(std::lround(255.0 * ((1 - kAlpha) * gray) + kAlpha * cg));
            rgb[off + 2] = static_cast<uint8_t>(std::lround(255.0 * ((1 - kAlpha) * gray) + kAlpha * cb));
        }
    }
    write_rgb_png(out_prefix + ".png", h, w, rgb);

    nlohmann::json meta{
        {"map", kind},
        {"rows", result.rows},
        {"cols", result.cols},
        {"patch_size", ps},
        {"value_min", lo},
        {"value_max", hi},
        {"overlay_alpha", kAlpha},
        {"score", result.score},
    };
    std::ofstream js(out_prefix + ".json");
    if (!js) throw DataError("cannot write " + out_prefix + ".json");
    js << meta.dump(2) << '\n';
}

} // namespace patchiq
