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

#include <cmath>
#include <filesystem>
#include <random>

#include "patchiq/error.hpp"
#include "patchiq/net.hpp"

using namespace patchiq;
namespace fs = std::filesystem;

namespace {

std::vector<float> random_patches(int n, int patch_size, uint64_t seed) {
    std::vector<float> data(static_cast<size_t>(n) * patch_size * patch_size);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (auto& v : data) v = dist(rng);
    return data;
}

ModelSpec tiny_spec() {
    ModelSpec spec;
    spec.patch_size = 8;
    spec.stage_channels = {4, 6, 8};
    spec.fc_width = 8;
    spec.dropout = 0.0;
    return spec;
}

} // namespace

TEST_SUITE("net") {

TEST_CASE("full parameter count is exactly 5237986") {
    CHECK(parameter_count(ModelSpec{}) == 5237986);
}

TEST_CASE("parameter count equals the sum over named tensors") {
    // Oracle: count what the network actually allocates.
    for (ModelSpec spec : {ModelSpec{}, tiny_spec()}) {
        Network<float> net(spec);
        int64_t total = 0;
        for (const auto& view : net.params()) {
            int64_t size = 1;
            for (int d : view.shape) size *= d;
            CHECK(size == static_cast<int64_t>(view.value->size()));
            CHECK(view.value->size() == view.grad->size());
            total += size;
        }
        CHECK(total == parameter_count(spec));
    }
}

TEST_CASE("initialization is deterministic in the seed") {
    Model a = init_model(tiny_spec(), 5);
    Model b = init_model(tiny_spec(), 5);
    Model c = init_model(tiny_spec(), 6);
    auto pa = a.net.params(), pb = b.net.params(), pc = c.net.params();
    bool all_equal = true, any_diff_c = false;
    for (size_t i = 0; i < pa.size(); ++i) {
        if (*pa[i].value != *pb[i].value) all_equal = false;
        if (*pa[i].value != *pc[i].value) any_diff_c = true;
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("forward yields one quality and one positive weight per patch") {
    Model model = init_model(tiny_spec(), 7);
    auto patches = random_patches(5, 8, 1);
    auto out = model.net.forward(patches.data(), 5, false);
    REQUIRE(out.quality.size() == 5);
    REQUIRE(out.weight.size() == 5);
    for (float w : out.weight) CHECK(w >= 1e-6f);
}

TEST_CASE("inference is deterministic and independent of batch chunking") {
    Model model = init_model(tiny_spec(), 8);
    auto patches = random_patches(6, 8, 2);
    auto all = model.net.forward(patches.data(), 6, false);
    auto again = model.net.forward(patches.data(), 6, false);
    CHECK(all.quality == again.quality);
    CHECK(all.weight == again.weight);
    // per-patch forward matches the batched forward
    for (int i = 0; i < 6; ++i) {
        auto one = model.net.forward(patches.data() + static_cast<size_t>(i) * 64, 1, false);
        CHECK(one.quality[0] == doctest::Approx(all.quality[i]).epsilon(1e-5));
        CHECK(one.weight[0] == doctest::Approx(all.weight[i]).epsilon(1e-5));
    }
}

TEST_CASE("dropout only acts in training mode") {
    ModelSpec spec = tiny_spec();
    spec.dropout = 0.5;
    Model model = init_model(spec, 9);
    auto patches = random_patches(4, 8, 3);
    std::mt19937_64 rng1(1), rng2(2);
    auto t1 = model.net.forward(patches.data(), 4, true, &rng1);
    auto t2 = model.net.forward(patches.data(), 4, true, &rng2);
    CHECK(t1.quality != t2.quality); // different masks
    auto i1 = model.net.forward(patches.data(), 4, false);
    auto i2 = model.net.forward(patches.data(), 4, false);
    CHECK(i1.quality == i2.quality);
}

TEST_CASE("aggregate matches the direct formula and its properties") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> qd(-3.0, 3.0), wd(1e-6, 2.0);
    for (int it = 0; it < 500; ++it) {
        int n = 1 + static_cast<int>(rng() % 12);
        std::vector<double> q(n), w(n);
        for (int i = 0; i < n; ++i) {
            q[i] = qd(rng);
            w[i] = wd(rng);
        }
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += w[i] * q[i];
            den += w[i];
        }
        double agg = aggregate(q, w);
        CHECK(agg == doctest::Approx(num / den).epsilon(1e-12));
        // convexity: bounded by the extreme patch qualities
        CHECK(agg >= *std::min_element(q.begin(), q.end()) - 1e-12);
        CHECK(agg <= *std::max_element(q.begin(), q.end()) + 1e-12);
        // homogeneity in the weights
        std::vector<double> wscaled = w;
        for (auto& v : wscaled) v *= 1e3;
        CHECK(aggregate(q, wscaled) == doctest::Approx(agg).epsilon(1e-12));
    }
}

TEST_CASE("model save/load round trip preserves outputs and metadata") {
    Model model = init_model(tiny_spec(), 10);
    model.label_mean = 3.75;
    model.label_std = 1.25;
    auto path = (fs::temp_directory_path() / "patchiq_model_rt.bin").string();
    save_model(model, path);
    Model back = load_model(path);
    CHECK(back.label_mean == model.label_mean);
    CHECK(back.label_std == model.label_std);
    CHECK(back.target_name == model.target_name);
    auto patches = random_patches(3, 8, 4);
    auto a = model.net.forward(patches.data(), 3, false);
    auto b = back.net.forward(patches.data(), 3, false);
    CHECK(a.quality == b.quality);
    CHECK(a.weight == b.weight);
    fs::remove(path);
}

TEST_CASE("architecture fingerprint mismatch is rejected at load") {
    Model model = init_model(tiny_spec(), 11);
    auto path = (fs::temp_directory_path() / "patchiq_model_fp.bin").string();
    save_model(model, path);
    // a different topology must refuse these weights
    CHECK(arch_fingerprint(tiny_spec()) != arch_fingerprint(ModelSpec{}));
    Model loaded = load_model(path);
    CHECK(loaded.fingerprint() == model.fingerprint());
    fs::remove(path);
}

TEST_CASE("invalid specs are rejected") {
    ModelSpec spec = tiny_spec();
    spec.patch_size = 12; // 12 -> 6 -> 3: not reducible to 1x1
    CHECK_THROWS_AS(spec.validate(), DataError);
    spec = tiny_spec();
    spec.dropout = 1.0;
    CHECK_THROWS_AS(spec.validate(), DataError);
    spec = tiny_spec();
    spec.weight_floor = 0.0;
    CHECK_THROWS_AS(spec.validate(), DataError);
}

} // TEST_SUITE
