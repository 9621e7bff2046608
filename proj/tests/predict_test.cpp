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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "patchiq/image_io.hpp"
#include "patchiq/predict.hpp"
#include "patchiq/synth.hpp"

using namespace patchiq;
namespace fs = std::filesystem;

namespace {

Image sample_image(int size, uint64_t seed) {
    StructureSpec spec;
    spec.kind = StructureKind::Mixed;
    spec.object_count = 10;
    spec.canvas_height = spec.canvas_width = size;
    spec.seed = seed;
    return gen_structure(spec);
}

} // namespace

TEST_SUITE("predict") {

TEST_CASE("patch map geometry and aggregation consistency") {
    Model model = init_model(ModelSpec{}, 3);
    model.label_mean = 4.0;
    model.label_std = 1.5;
    Image img = sample_image(96, 1);
    PredictionResult res = predict_image(model, img);
    CHECK(res.rows == 3);
    CHECK(res.cols == 3);
    REQUIRE(res.patch_quality.size() == 9);
    REQUIRE(res.patch_weight.size() == 9);
    for (double w : res.patch_weight) CHECK(w >= 1e-6);
    // independent recomputation of the weighted mean
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 9; ++i) {
        num += res.patch_weight[i] * res.patch_quality[i];
        den += res.patch_weight[i];
    }
    CHECK(res.score == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("prediction is bit-identical across calls") {
    Model model = init_model(ModelSpec{}, 4);
    Image img = sample_image(64, 2);
    PredictionResult a = predict_image(model, img);
    PredictionResult b = predict_image(model, img);
    CHECK(a.score == b.score);
    CHECK(a.patch_quality == b.patch_quality);
    CHECK(a.patch_weight == b.patch_weight);
}

TEST_CASE("heatmaps write csv, png and metadata") {
    Model model = init_model(ModelSpec{}, 5);
    Image img = sample_image(64, 3);
    PredictionResult res = predict_image(model, img);
    auto dir = fs::temp_directory_path() / "patchiq_heatmap";
    fs::create_directories(dir);
    std::string prefix = (dir / "m").string();
    render_heatmap(res, img, MapKind::Quality, prefix);
    CHECK(fs::exists(prefix + ".csv"));
    CHECK(fs::exists(prefix + ".png"));
    CHECK(fs::exists(prefix + ".json"));
    // csv round trip: 2 rows x 2 cols of the quality map
    std::ifstream csv(prefix + ".csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == res.rows);
    fs::remove_all(dir);
}

TEST_CASE("batch prediction continues past broken inputs") {
    Model model = init_model(ModelSpec{}, 6);
    auto dir = fs::temp_directory_path() / "patchiq_batch";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string good = (dir / "good.f32").string();
    write_image(sample_image(64, 4), good);

    BatchReport report = predict_batch(
        model,
        {{"good", good}, {"missing", (dir / "nope.f32").string()}},
        (dir / "out").string(), false);
    REQUIRE(report.items.size() == 2);
    CHECK(report.items[0].ok);
    CHECK_FALSE(report.items[1].ok);
    CHECK(fs::exists(dir / "out" / "predictions.csv"));
    fs::remove_all(dir);
}

} // TEST_SUITE
