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
#include <vector>

#include "patchiq/net.hpp"

namespace patchiq {

// Kendall rank correlation, tau-b (tie-corrected), computed with Knight's
// O(n log n) merge-sort inversion count. Throws NumericError when either
// input is constant (tau-b undefined) or the lengths differ / n < 2.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// Collapse samples into per-level means, then tau-b of the level means
// against the level indices. Levels with no samples are an error.
double grouped_krcc(const std::vector<int>& level, const std::vector<double>& score);

struct RankedItem {
    std::string id;
    double score = 0.0;
    int rank = 0;       // 1-based, descending score; ties broken by id
};

std::vector<RankedItem> build_ranking(const std::vector<std::string>& ids,
                                      const std::vector<double>& scores);
void save_ranking_csv(const std::vector<RankedItem>& ranking, const std::string& path);

// Horizontal bar chart of ranked scores, 8-bit grayscale PNG.
void save_ranking_chart(const std::vector<RankedItem>& ranking, const std::string& path);

// OLS y = a*x + b plus Pearson r, MSE, MAE and tau-b of prediction vs label.
struct RegressionReport {
    int n = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double pearson_r = 0.0;
    double mse = 0.0;
    double mae = 0.0;
    double tau = 0.0;
};

RegressionReport regression_report(const std::vector<double>& label,
                                   const std::vector<double>& prediction);
void save_scatter_csv(const std::vector<std::string>& ids, const std::vector<double>& label,
                      const std::vector<double>& prediction, const std::string& path);

struct BenchReport {
    int images = 0;
    double frc_total_ms = 0.0;
    double frc_per_image_ms = 0.0;
    double model_total_ms = 0.0;
    double model_per_image_ms = 0.0;
    std::string hardware;  // CPU model line from /proc/cpuinfo
};

// Wall-clock comparison of resolution estimation paths over the same images.
BenchReport bench(Model& model, const std::vector<std::string>& image_paths);
void save_bench_json(const BenchReport& report, const std::string& path);

} // namespace patchiq
