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

#include "patchiq/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "patchiq/error.hpp"
#include "patchiq/image_io.hpp"
#include "patchiq/util.hpp"

namespace patchiq {

void TrainHistory::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "epoch,train_E_wp,val_metric,val_mae\n";
    for (const auto& e : epochs) {
        out << e.epoch << "," << e.train_e_wp << "," << e.val_mse << "," << e.val_mae << "\n";
    }
}

std::pair<double, double> zscore_fit(const std::vector<double>& labels) {
    if (labels.size() < 2) throw NumericError("zscore_fit: need at least 2 labels");
    const double mean = std::accumulate(labels.begin(), labels.end(), 0.0) / labels.size();
    double var = 0.0;
    for (double v : labels) var += (v - mean) * (v - mean);
    var /= labels.size(); // population statistics
    if (var <= 0.0) throw NumericError("zscore_fit: zero label variance");
    return {mean, std::sqrt(var)};
}

LossBreakdown loss_wp(const std::vector<double>& quality, const std::vector<double>& weight,
                      double q_t) {
    if (quality.empty() || quality.size() != weight.size()) {
        throw DataError("loss_wp: empty or mismatched prediction");
    }
    if (!std::isfinite(q_t)) throw NumericError("loss_wp: non-finite target");
    LossBreakdown loss;
    loss.e_w = std::abs(aggregate(quality, weight) - q_t);
    for (size_t i = 0; i < quality.size(); ++i) loss.e_p += std::abs(quality[i] - q_t);
    loss.e_p /= static_cast<double>(quality.size());
    loss.e_wp = loss.e_w + loss.e_p;
    return loss;
}

LossGrads loss_wp_grad(const std::vector<double>& quality, const std::vector<double>& weight,
                       double q_t) {
    const size_t n = quality.size();
    LossGrads g;
    g.d_quality.assign(n, 0.0);
    g.d_weight.assign(n, 0.0);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += weight[i] * quality[i];
        den += weight[i];
    }
    const double agg = num / den;
    const double sw = agg > q_t ? 1.0 : (agg < q_t ? -1.0 : 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
        const double sp = quality[i] > q_t ? 1.0 : (quality[i] < q_t ? -1.0 : 0.0);
        g.d_quality[i] = sw * weight[i] / den + sp * inv_n;
        g.d_weight[i] = sw * (quality[i] - agg) / den;
    }
    return g;
}

std::vector<std::vector<int>> make_batches(int patch_count, int batch_patches,
                                           std::mt19937_64& rng) {
    if (batch_patches <= 0) throw DataError("make_batches: batch size must be positive");
    std::vector<int> order(patch_count);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int n_batches = patch_count / batch_patches;
    std::vector<std::vector<int>> batches(n_batches);
    for (int b = 0; b < n_batches; ++b) {
        batches[b].assign(order.begin() + static_cast<size_t>(b) * batch_patches,
                          order.begin() + static_cast<size_t>(b + 1) * batch_patches);
    }
    return batches;
}

AdamOptimizer::AdamOptimizer(Network<float>& net, const TrainConfig& config)
    : net_(net),
      lr_(config.learning_rate),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      eps_(config.adam_epsilon) {
    for (const auto& p : net_.params()) {
        m_.emplace_back(p.value->size(), 0.0f);
        v_.emplace_back(p.value->size(), 0.0f);
    }
}

void AdamOptimizer::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto views = net_.params();
    for (size_t pi = 0; pi < views.size(); ++pi) {
        float* w = views[pi].value->data();
        const float* g = views[pi].grad->data();
        float* m = m_[pi].data();
        float* v = v_[pi].data();
        const size_t n = views[pi].value->size();
        for (size_t i = 0; i < n; ++i) {
            m[i] = static_cast<float>(beta1_ * m[i] + (1.0 - beta1_) * g[i]);
            v[i] = static_cast<float>(beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i]);
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= static_cast<float>(lr_ * mhat / (std::sqrt(vhat) + eps_));
        }
    }
}

std::vector<TrainSample> load_samples(const DatasetManifest& manifest, Split split) {
    std::vector<TrainSample> samples;
    for (const auto* entry : manifest.split_entries(split)) {
        if (!entry->label) {
            throw DataError("labels missing: entry " + entry->id + " has no label");
        }
        TrainSample s;
        s.id = entry->id;
        s.patches = partition_patches(read_image(entry->image_path));
        s.label = *entry->label;
        samples.push_back(std::move(s));
    }
    return samples;
}

namespace {

// Full-image weighted estimate in normalized units, inference mode.
double predict_normalized(Model& model, const PatchGrid& patches) {
    const auto out = model.net.forward(patches.data.data(), patches.count(), false);
    std::vector<double> q(out.quality.begin(), out.quality.end());
    std::vector<double> w(out.weight.begin(), out.weight.end());
    return aggregate(q, w);
}

} // namespace

TrainHistory train_model(Model& model, std::vector<TrainSample> train,
                         const std::vector<TrainSample>& val, const TrainConfig& config,
                         const std::string& log_path) {
    if (train.empty()) throw DataError("train_model: no training samples");
    if (config.learning_rate <= 0) throw DataError("train_model: learning rate must be positive");

    // Label statistics from the training split only.
    if (config.fixed_label_stats) {
        model.label_mean = config.fixed_label_stats->first;
        model.label_std = config.fixed_label_stats->second;
        if (model.label_std <= 0) throw NumericError("train_model: label std must be positive");
    } else {
        std::vector<double> labels;
        labels.reserve(train.size());
        for (const auto& s : train) labels.push_back(s.label);
        std::tie(model.label_mean, model.label_std) = zscore_fit(labels);
    }

    // Drop (once, with a warning) images that cannot fill a single batch.
    std::vector<TrainSample> usable;
    for (auto& s : train) {
        if (s.patches.count() < config.batch_patches) {
            warn("train_model: image " + s.id + " has " + std::to_string(s.patches.count()) +
                 " patches < batch size " + std::to_string(config.batch_patches) + ", skipped");
        } else {
            usable.push_back(std::move(s));
        }
    }
    if (usable.empty()) throw DataError("train_model: no image large enough for one batch");

    AdamOptimizer adam(model.net, config);
    std::mt19937_64 rng(config.seed);
    std::mt19937_64 dropout_rng(mix_seed(config.seed, 0x5eed));

    TrainHistory history;
    std::vector<float> batch_buf;
    const int ps = usable.front().patches.patch_size;
    const size_t patch_len = static_cast<size_t>(ps) * ps;

    std::vector<float> best_params_flat;
    double best_val = std::numeric_limits<double>::infinity();

    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path);
        log << "epoch,train_E_wp,val_metric,val_mae\n";
    }

    std::vector<size_t> image_order(usable.size());
    std::iota(image_order.begin(), image_order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(image_order.begin(), image_order.end(), rng);
        double epoch_loss = 0.0;
        int batch_count = 0;
        for (size_t oi : image_order) {
            auto& sample = usable[oi];
            const double q_t = zscore_apply(sample.label, model.label_mean, model.label_std);
            for (const auto& batch : make_batches(sample.patches.count(), config.batch_patches, rng)) {
                batch_buf.resize(batch.size() * patch_len);
                for (size_t i = 0; i < batch.size(); ++i) {
                    std::copy_n(sample.patches.patch(batch[i]), patch_len,
                                batch_buf.data() + i * patch_len);
                }
                auto out = model.net.forward(batch_buf.data(), static_cast<int>(batch.size()),
                                             true, &dropout_rng);
                std::vector<double> q(out.quality.begin(), out.quality.end());
                std::vector<double> w(out.weight.begin(), out.weight.end());
                const LossBreakdown loss = loss_wp(q, w, q_t);
                if (!std::isfinite(loss.e_wp)) {
                    throw NumericError("train_model: NaN/Inf loss at epoch " +
                                       std::to_string(epoch) + ", image " + sample.id);
                }
                epoch_loss += loss.e_wp;
                ++batch_count;
                const LossGrads grads = loss_wp_grad(q, w, q_t);
                std::vector<float> dq(grads.d_quality.begin(), grads.d_quality.end());
                std::vector<float> dw(grads.d_weight.begin(), grads.d_weight.end());
                model.net.zero_grad();
                model.net.backward(dq, dw);
                adam.step();
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_e_wp = batch_count > 0 ? epoch_loss / batch_count : 0.0;
        if (!val.empty()) {
            double mse = 0.0, mae = 0.0;
            for (const auto& s : val) {
                const double q_t = zscore_apply(s.label, model.label_mean, model.label_std);
                const double resid = predict_normalized(model, s.patches) - q_t;
                mse += resid * resid;
                mae += std::abs(resid);
            }
            rec.val_mse = mse / val.size();
            rec.val_mae = mae / val.size();
        }
        history.epochs.push_back(rec);
        if (log.is_open()) {
            log << rec.epoch << "," << rec.train_e_wp << "," << rec.val_mse << ","
                << rec.val_mae << "\n";
            log.flush();
        }
        if (!val.empty() && rec.val_mse < best_val) {
            best_val = rec.val_mse;
            history.best_epoch = epoch;
            if (config.checkpoint_policy == CheckpointPolicy::BestValidation) {
                best_params_flat.clear();
                for (const auto& p : model.net.params()) {
                    best_params_flat.insert(best_params_flat.end(), p.value->begin(),
                                            p.value->end());
                }
            }
        }
    }

    if (config.checkpoint_policy == CheckpointPolicy::BestValidation && !best_params_flat.empty()) {
        size_t off = 0;
        for (auto& p : model.net.params()) {
            std::copy_n(best_params_flat.begin() + off, p.value->size(), p.value->begin());
            off += p.value->size();
        }
    }
    return history;
}

} // namespace patchiq
