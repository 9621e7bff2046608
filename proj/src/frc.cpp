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

#include "patchiq/frc.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "patchiq/error.hpp"
#include "patchiq/util.hpp"

namespace patchiq {

namespace {

// FFTW planning is not thread-safe.
std::mutex g_fftw_mutex;

// Full complex 2-D DFT in double precision. Double matters here: the
// noise-free failure mode of FRC depends on correlations surviving down to
// very small spectral amplitudes.
std::vector<std::complex<double>> dft2d(const Image& img) {
    const int h = img.height, w = img.width;
    std::vector<std::complex<double>> in(static_cast<size_t>(h) * w), out(in.size());
    for (size_t i = 0; i < in.size(); ++i) in[i] = img.pixels[i];
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        plan = fftw_plan_dft_2d(h, w, reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
    }
    return out;
}

Image crop_even(const Image& image) {
    if (image.height % 2 == 0 && image.width % 2 == 0) return image;
    warn("split_subimages: odd dimensions, cropping one row/column");
    Image out(image.height & ~1, image.width & ~1);
    out.pixel_size_um = image.pixel_size_um;
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) out.at(r, c) = image.at(r, c);
    }
    return out;
}

} // namespace

std::pair<Image, Image> split_subimages(const Image& image) {
    const Image src = crop_even(image);
    const int h = src.height / 2, w = src.width / 2;
    Image a(h, w), b(h, w);
    a.pixel_size_um = src.pixel_size_um;
    b.pixel_size_um = src.pixel_size_um;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            a.at(r, c) = 0.5f * (src.at(2 * r, 2 * c) + src.at(2 * r + 1, 2 * c + 1));
            b.at(r, c) = 0.5f * (src.at(2 * r, 2 * c + 1) + src.at(2 * r + 1, 2 * c));
        }
    }
    return {std::move(a), std::move(b)};
}

FrcCurve frc_curve(const Image& a, const Image& b) {
    if (a.height != b.height || a.width != b.width) {
        throw DataError("frc_curve: dimension mismatch");
    }
    if (a.height % 2 != 0 || a.width % 2 != 0) {
        throw DataError("frc_curve: dimensions must be even");
    }
    const int h = a.height, w = a.width;
    const auto fa = dft2d(a);
    const auto fb = dft2d(b);

    const int n = std::min(h, w);
    const int n_rings = n / 2 + 1;
    std::vector<double> cross(n_rings, 0.0), ea(n_rings, 0.0), eb(n_rings, 0.0);

    for (int ky = 0; ky < h; ++ky) {
        const int fy = ky <= h / 2 ? ky : ky - h;
        for (int kx = 0; kx < w; ++kx) {
            const int fx = kx <= w / 2 ? kx : kx - w;
            const double q = std::sqrt(static_cast<double>(fy) * fy / (static_cast<double>(h) * h) +
                                       static_cast<double>(fx) * fx / (static_cast<double>(w) * w));
            const int ring = static_cast<int>(std::lround(q * n));
            if (ring >= n_rings) continue;
            const auto& va = fa[static_cast<size_t>(ky) * w + kx];
            const auto& vb = fb[static_cast<size_t>(ky) * w + kx];
            cross[ring] += (va * std::conj(vb)).real();
            ea[ring] += std::norm(va);
            eb[ring] += std::norm(vb);
        }
    }

    FrcCurve curve;
    curve.ring_width = 1.0 / n;
    curve.frequencies.resize(n_rings);
    curve.correlations.resize(n_rings);
    curve.has_energy.resize(n_rings);
    for (int r = 0; r < n_rings; ++r) {
        curve.frequencies[r] = static_cast<double>(r) / n;
        const double denom = std::sqrt(ea[r] * eb[r]);
        curve.has_energy[r] = denom > 0.0;
        curve.correlations[r] = denom > 0.0 ? cross[r] / denom : 0.0;
    }
    return curve;
}

ResolutionEstimate frc_resolution(const Image& image, const FrcOptions& options) {
    if (image.height < 64 || image.width < 64) {
        throw DataError("frc_resolution: image must be at least 64x64");
    }
    const float first = image.pixels.front();
    bool constant = true;
    for (float v : image.pixels) {
        if (v != first) { constant = false; break; }
    }
    if (constant) throw NumericError("FRC undefined: zero-variance image");

    const auto [a, b] = split_subimages(image);
    const FrcCurve curve = frc_curve(a, b);
    const int n_rings = static_cast<int>(curve.frequencies.size());

    // Moving average; window shrinks at the ends.
    std::vector<double> smooth(n_rings);
    const int half = options.smoothing_window / 2;
    for (int i = 0; i < n_rings; ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (int j = std::max(0, i - half); j <= std::min(n_rings - 1, i + half); ++j) {
            acc += curve.correlations[j];
            ++cnt;
        }
        smooth[i] = acc / cnt;
    }

    ResolutionEstimate est;
    est.no_crossing = true;
    for (int i = 1; i < n_rings; ++i) {
        if (smooth[i] < options.threshold) {
            const double c0 = smooth[i - 1], c1 = smooth[i];
            const double f0 = curve.frequencies[i - 1], f1 = curve.frequencies[i];
            double t = c0 > c1 ? (c0 - options.threshold) / (c0 - c1) : 1.0;
            t = std::clamp(t, 0.0, 1.0);
            est.cutoff_frequency = f0 + t * (f1 - f0);
            est.no_crossing = false;
            break;
        }
    }
    if (est.no_crossing) est.cutoff_frequency = 0.5;
    if (est.cutoff_frequency <= 0.0) est.cutoff_frequency = curve.frequencies[1];
    est.resolution_px = 1.0 / est.cutoff_frequency;
    if (image.pixel_size_um) est.resolution_um = est.resolution_px * *image.pixel_size_um;
    return est;
}

} // namespace patchiq
