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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patchiq/degrade.hpp"
#include "patchiq/image.hpp"
#include "patchiq/net.hpp"

namespace patchiq {

enum class CheckpointPolicy { Final, BestValidation };

struct TrainConfig {
    int epochs = 300;
    int batch_patches = 128;        // patches per batch, all from one image
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    uint64_t seed = 0;
    CheckpointPolicy checkpoint_policy = CheckpointPolicy::Final;
    // Override the fitted label statistics (used by overfit-style runs on
    // corpora whose labels would be degenerate).
    std::optional<std::pair<double, double>> fixed_label_stats;
};

struct LossBreakdown {
    double e_w = 0.0;   // |weighted estimate - q_t|
    double e_p = 0.0;   // mean per-patch MAE
    double e_wp = 0.0;  // e_w + e_p
};

struct EpochRecord {
    int epoch = 0;
    double train_e_wp = 0.0;   // mean over batches
    double val_mse = 0.0;      // mean squared E_w residual over val images
    double val_mae = 0.0;      // mean absolute residual, for transparency
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;       // by val_mse
    void save_csv(const std::string& path) const;
};

// Population statistics of the training labels. Throws NumericError when
// fewer than two distinct labels are present.
std::pair<double, double> zscore_fit(const std::vector<double>& train_labels);
inline double zscore_apply(double label, double mean, double std) { return (label - mean) / std; }
inline double zscore_invert(double z, double mean, double std) { return z * std + mean; }

// Eq-style batch loss on normalized labels.
LossBreakdown loss_wp(const std::vector<double>& quality, const std::vector<double>& weight,
                      double q_t);

// Gradients of E_wp w.r.t. the patch outputs, same normalized units.
struct LossGrads {
    std::vector<double> d_quality;
    std::vector<double> d_weight;
};
LossGrads loss_wp_grad(const std::vector<double>& quality, const std::vector<double>& weight,
                       double q_t);

// Shuffle the patches of one image and cut them into floor(N_p / batch)
// batches of patch indices; the remainder is dropped for this epoch.
std::vector<std::vector<int>> make_batches(int patch_count, int batch_patches,
                                           std::mt19937_64& rng);

// Adam over the flattened parameter set of a Network<float>.
class AdamOptimizer {
public:
    AdamOptimizer(Network<float>& net, const TrainConfig& config);
    void step();

private:
    Network<float>& net_;
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<std::vector<float>> m_, v_;
};

// One labeled training example: the patch grid of one image.
struct TrainSample {
    std::string id;
    PatchGrid patches;
    double label = 0.0;        // raw target units
};

// Load train/val samples from a labeled manifest. Throws DataError if any
// train or val entry is missing its label.
std::vector<TrainSample> load_samples(const DatasetManifest& manifest, Split split);

// The optimization loop. Mutates the model in place (including its label
// statistics) and returns the per-epoch history. NaN loss raises
// NumericError. Deterministic in (config.seed, samples).
TrainHistory train_model(Model& model, std::vector<TrainSample> train,
                         const std::vector<TrainSample>& val, const TrainConfig& config,
                         const std::string& log_path = "");

} // namespace patchiq
