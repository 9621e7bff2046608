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

#include "patchiq/eval.hpp"

#include <png.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "patchiq/error.hpp"
#include "patchiq/frc.hpp"
#include "patchiq/image_io.hpp"
#include "patchiq/predict.hpp"
#include <json.hpp>

namespace patchiq {

namespace {

// Merge sort counting exchanges (discordant swaps), Knight 1966.
int64_t merge_count(std::vector<double>& v, std::vector<double>& tmp, size_t lo, size_t hi) {
    if (hi - lo < 2) return 0;
    size_t mid = lo + (hi - lo) / 2;
    int64_t swaps = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
    size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += static_cast<int64_t>(mid - i);
            tmp[k++] = v[j++];
        } else {
            tmp[k++] = v[i++];
        }
    }
    while (i < mid) tmp[k++] = v[i++];
    while (j < hi) tmp[k++] = v[j++];
    std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
    return swaps;
}

// Sum over tie groups of g*(g-1)/2 for a sorted range keyed by `key`.
template <typename Key>
int64_t tie_pairs(const std::vector<size_t>& order, Key key) {
    int64_t pairs = 0, run = 1;
    for (size_t i = 1; i <= order.size(); ++i) {
        if (i < order.size() && key(order[i]) == key(order[i - 1])) {
            ++run;
        } else {
            pairs += run * (run - 1) / 2;
            run = 1;
        }
    }
    return pairs;
}

} // namespace

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw NumericError("kendall_tau: length mismatch");
    const size_t n = x.size();
    if (n < 2) throw NumericError("kendall_tau: need at least two samples");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    const int64_t total = static_cast<int64_t>(n) * (n - 1) / 2;
    const int64_t ties_x = tie_pairs(order, [&](size_t i) { return x[i]; });
    // Pairs tied in both x and y must not count toward discordance or ties_y twice.
    const int64_t ties_xy = [&] {
        int64_t pairs = 0, run = 1;
        for (size_t i = 1; i <= n; ++i) {
            if (i < n && x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]]) {
                ++run;
            } else {
                pairs += run * (run - 1) / 2;
                run = 1;
            }
        }
        return pairs;
    }();

    std::vector<double> ysorted(n);
    for (size_t i = 0; i < n; ++i) ysorted[i] = y[order[i]];
    std::vector<size_t> yorder(n);
    std::iota(yorder.begin(), yorder.end(), size_t{0});
    std::stable_sort(yorder.begin(), yorder.end(),
                     [&](size_t a, size_t b) { return ysorted[a] < ysorted[b]; });
    const int64_t ties_y = tie_pairs(yorder, [&](size_t i) { return ysorted[i]; });

    if (ties_x == total || ties_y == total)
        throw NumericError("kendall_tau: constant input, tau-b undefined");

    std::vector<double> work = ysorted, tmp(n);
    const int64_t discordant = merge_count(work, tmp, 0, n);

    // n0 - n1 - n2 + n3 counts concordant minus discordant among pairs
    // untied in x; swaps from the merge sort count discordant pairs plus
    // nothing for x-ties because equal-x runs were pre-sorted by y.
    const int64_t concordant_minus_discordant =
        total - ties_x - ties_y + ties_xy - 2 * discordant;
    const double denom = std::sqrt(static_cast<double>(total - ties_x)) *
                         std::sqrt(static_cast<double>(total - ties_y));
    return static_cast<double>(concordant_minus_discordant) / denom;
}

double grouped_krcc(const std::vector<int>& level, const std::vector<double>& score) {
    if (level.size() != score.size()) throw NumericError("grouped_krcc: length mismatch");
    if (level.empty()) throw NumericError("grouped_krcc: empty input");
    std::map<int, std::pair<double, int>> acc; // level -> (sum, count)
    for (size_t i = 0; i < level.size(); ++i) {
        auto& a = acc[level[i]];
        a.first += score[i];
        a.second += 1;
    }
    std::vector<double> idx, mean;
    for (const auto& [lvl, sc] : acc) {
        idx.push_back(static_cast<double>(lvl));
        mean.push_back(sc.first / sc.second);
    }
    return kendall_tau(idx, mean);
}

std::vector<RankedItem> build_ranking(const std::vector<std::string>& ids,
                                      const std::vector<double>& scores) {
    if (ids.size() != scores.size()) throw NumericError("build_ranking: length mismatch");
    std::vector<RankedItem> out(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) out[i] = {ids[i], scores[i], 0};
    std::sort(out.begin(), out.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

void save_ranking_csv(const std::vector<RankedItem>& ranking, const std::string& path) {
    std::ofstream csv(path);
    if (!csv) throw DataError("cannot write " + path);
    csv.precision(10);
    csv << "rank,id,score\n";
    for (const auto& r : ranking) csv << r.rank << ',' << r.id << ',' << r.score << '\n';
}

void save_ranking_chart(const std::vector<RankedItem>& ranking, const std::string& path) {
    if (ranking.empty()) throw DataError("empty ranking");
    const int row_h = 12, gap = 3, label_w = 4, width = 512;
    const int height = static_cast<int>(ranking.size()) * (row_h + gap) + gap;
    std::vector<uint8_t> pix(static_cast<size_t>(height) * width, 255);

    double lo = ranking.back().score, hi = ranking.front().score;
    for (const auto& r : ranking) { lo = std::min(lo, r.score); hi = std::max(hi, r.score); }
    double span = hi - lo;

    for (size_t i = 0; i < ranking.size(); ++i) {
        double t = span > 0 ? (ranking[i].score - lo) / span : 1.0;
        int bar = label_w + static_cast<int>(t * (width - label_w - 8));
        int y0 = gap + static_cast<int>(i) * (row_h + gap);
        for (int y = y0; y < y0 + row_h; ++y)
            for (int x = label_w; x < std::max(bar, label_w + 1); ++x)
                pix[static_cast<size_t>(y) * width + x] = 64;
    }

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
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, pix.data() + static_cast<size_t>(y) * width);
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

RegressionReport regression_report(const std::vector<double>& label,
                                   const std::vector<double>& prediction) {
    if (label.size() != prediction.size()) throw NumericError("regression_report: length mismatch");
    const size_t n = label.size();
    if (n < 2) throw NumericError("regression_report: need at least two samples");

    double mx = std::accumulate(label.begin(), label.end(), 0.0) / n;
    double my = std::accumulate(prediction.begin(), prediction.end(), 0.0) / n;
    double sxx = 0, syy = 0, sxy = 0, mse = 0, mae = 0;
    for (size_t i = 0; i < n; ++i) {
        double dx = label[i] - mx, dy = prediction[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        double e = prediction[i] - label[i];
        mse += e * e;
        mae += std::abs(e);
    }
    if (sxx == 0.0) throw NumericError("regression_report: constant labels");

    RegressionReport rep;
    rep.n = static_cast<int>(n);
    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mx;
    rep.pearson_r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    rep.mse = mse / n;
    rep.mae = mae / n;
    try {
        rep.tau = kendall_tau(label, prediction);
    } catch (const NumericError&) {
        rep.tau = 0.0;
    }
    return rep;
}

void save_scatter_csv(const std::vector<std::string>& ids, const std::vector<double>& label,
                      const std::vector<double>& prediction, const std::string& path) {
    if (ids.size() != label.size() || ids.size() != prediction.size())
        throw NumericError("save_scatter_csv: length mismatch");
    std::ofstream csv(path);
    if (!csv) throw DataError("cannot write " + path);
    csv.precision(10);
    csv << "id,label,prediction\n";
    for (size_t i = 0; i < ids.size(); ++i)
        csv << ids[i] << ',' << label[i] << ',' << prediction[i] << '\n';
}

BenchReport bench(Model& model, const std::vector<std::string>& image_paths) {
    if (image_paths.empty()) throw DataError("bench: no images");
    BenchReport rep;
    rep.images = static_cast<int>(image_paths.size());

    std::vector<Image> images;
    images.reserve(image_paths.size());
    for (const auto& p : image_paths) images.push_back(rescale_unit(read_image(p)));

    auto t0 = std::chrono::steady_clock::now();
    for (const auto& img : images) (void)frc_resolution(img);
    auto t1 = std::chrono::steady_clock::now();
    for (auto& img : images) (void)predict_image(model, img);
    auto t2 = std::chrono::steady_clock::now();

    rep.frc_total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rep.model_total_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    rep.frc_per_image_ms = rep.frc_total_ms / rep.images;
    rep.model_per_image_ms = rep.model_total_ms / rep.images;

    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            auto pos = line.find(':');
            rep.hardware = pos == std::string::npos ? line : line.substr(pos + 2);
            break;
        }
    }
    if (rep.hardware.empty()) rep.hardware = "unknown";
    return rep;
}

void save_bench_json(const BenchReport& report, const std::string& path) {
    nlohmann::json j{
        {"images", report.images},
        {"frc_total_ms", report.frc_total_ms},
        {"frc_per_image_ms", report.frc_per_image_ms},
        {"model_total_ms", report.model_total_ms},
        {"model_per_image_ms", report.model_per_image_ms},
        {"hardware", report.hardware},
    };
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace patchiq
