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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "patchiq/error.hpp"
#include "patchiq/train.hpp"

using namespace patchiq;

namespace {

ModelSpec tiny_spec() {
    ModelSpec spec;
    spec.patch_size = 8;
    spec.stage_channels = {4, 6, 8};
    spec.fc_width = 8;
    spec.dropout = 0.0;
    return spec;
}

} // namespace

TEST_SUITE("train") {

TEST_CASE("zscore_fit matches the direct population statistics") {
    std::vector<double> labels{2.0, 3.0, 5.0, 8.0, 8.0};
    auto [mean, std] = zscore_fit(labels);
    double m = std::accumulate(labels.begin(), labels.end(), 0.0) / labels.size();
    double v = 0.0;
    for (double l : labels) v += (l - m) * (l - m);
    v /= labels.size();
    CHECK(mean == doctest::Approx(m).epsilon(1e-12));
    CHECK(std == doctest::Approx(std::sqrt(v)).epsilon(1e-12));
    CHECK(zscore_invert(zscore_apply(labels[3], mean, std), mean, std) ==
          doctest::Approx(labels[3]).epsilon(1e-12));
}

TEST_CASE("zscore_fit rejects degenerate label sets") {
    CHECK_THROWS_AS(zscore_fit({1.0}), NumericError);
    CHECK_THROWS_AS(zscore_fit({2.0, 2.0, 2.0}), NumericError);
}

TEST_CASE("loss unit case: y=(0,1), alpha=(1,3), q_t=0.75 gives E_wp=0.5") {
    LossBreakdown loss = loss_wp({0.0, 1.0}, {1.0, 3.0}, 0.75);
    CHECK(std::abs(loss.e_w - 0.0) < 1e-12);   // aggregate = 3/4 = q_t
    CHECK(std::abs(loss.e_p - 0.5) < 1e-12);   // (0.75 + 0.25)/2
    CHECK(std::abs(loss.e_wp - 0.5) < 1e-12);
}

TEST_CASE("more loss unit cases") {
    // equal weights: E_w reduces to |mean - q_t|
    LossBreakdown a = loss_wp({1.0, 3.0}, {1.0, 1.0}, 0.0);
    CHECK(std::abs(a.e_w - 2.0) < 1e-12);
    CHECK(std::abs(a.e_p - 2.0) < 1e-12);
    // single patch: E_w == E_p
    LossBreakdown b = loss_wp({-1.5}, {0.2}, 1.0);
    CHECK(std::abs(b.e_w - 2.5) < 1e-12);
    CHECK(std::abs(b.e_p - 2.5) < 1e-12);
}

TEST_CASE("loss gradients match finite differences of the loss") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> qd(-2.0, 2.0), wd(0.05, 2.0);
    const double h = 1e-6;
    for (int it = 0; it < 50; ++it) {
        int n = 2 + static_cast<int>(rng() % 6);
        std::vector<double> q(n), w(n);
        for (int i = 0; i < n; ++i) {
            q[i] = qd(rng);
            w[i] = wd(rng);
        }
        double q_t = qd(rng);
        LossGrads grads = loss_wp_grad(q, w, q_t);
        REQUIRE(grads.d_quality.size() == static_cast<size_t>(n));
        REQUIRE(grads.d_weight.size() == static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto qp = q, qm = q;
            qp[i] += h;
            qm[i] -= h;
            double fd_q = (loss_wp(qp, w, q_t).e_wp - loss_wp(qm, w, q_t).e_wp) / (2 * h);
            CHECK(grads.d_quality[i] == doctest::Approx(fd_q).epsilon(1e-4));
            auto wp = w, wm = w;
            wp[i] += h;
            wm[i] -= h;
            double fd_w = (loss_wp(q, wp, q_t).e_wp - loss_wp(q, wm, q_t).e_wp) / (2 * h);
            CHECK(grads.d_weight[i] == doctest::Approx(fd_w).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("make_batches partitions shuffled patch indices") {
    std::mt19937_64 rng(7);
    auto batches = make_batches(37, 8, rng);
    CHECK(batches.size() == 4); // floor(37/8), remainder dropped
    std::vector<int> seen;
    for (const auto& b : batches) {
        CHECK(b.size() == 8);
        seen.insert(seen.end(), b.begin(), b.end());
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    for (int idx : seen) {
        CHECK(idx >= 0);
        CHECK(idx < 37);
    }
}

TEST_CASE("network gradients match central finite differences") {
    // Independent oracle for the whole backward pass on a scaled-down
    // double-precision network.
    ModelSpec spec = tiny_spec();
    Network<double> net(spec);
    net.init_he(13);

    const int n = 3;
    std::vector<double> patches(static_cast<size_t>(n) * 64);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& v : patches) v = dist(rng);
    const double q_t = 0.4;

    auto loss_of = [&]() {
        auto out = net.forward(patches.data(), n, true, &rng);
        std::vector<double> q(out.quality.begin(), out.quality.end());
        std::vector<double> w(out.weight.begin(), out.weight.end());
        return loss_wp(q, w, q_t).e_wp;
    };

    (void)loss_of();
    {
        auto out = net.forward(patches.data(), n, true, &rng);
        std::vector<double> q(out.quality.begin(), out.quality.end());
        std::vector<double> w(out.weight.begin(), out.weight.end());
        LossGrads grads = loss_wp_grad(q, w, q_t);
        net.zero_grad();
        net.backward(grads.d_quality, grads.d_weight);
    }

    auto params = net.params();
    const double h = 1e-6;
    int checked = 0, failed = 0;
    std::mt19937_64 pick(23);
    for (int it = 0; it < 120; ++it) {
        auto& view = params[pick() % params.size()];
        size_t j = pick() % view.value->size();
        double saved = (*view.value)[j];
        (*view.value)[j] = saved + h;
        double up = loss_of();
        (*view.value)[j] = saved - h;
        double down = loss_of();
        (*view.value)[j] = saved;
        double fd = (up - down) / (2 * h);
        double analytic = (*view.grad)[j];
        double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
        if (std::abs(fd - analytic) / denom > 1e-4) ++failed;
        ++checked;
    }
    CHECK(checked == 120);
    CHECK(failed == 0);
}

} // TEST_SUITE
