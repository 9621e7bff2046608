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
#include <random>
#include <string>
#include <vector>

#include "patchiq/error.hpp"

namespace patchiq {

// Patch regressor topology: five pairs of same-padded 3x3 convolutions with
// ReLU, each pair followed by a 2x2 max pool, then two parallel heads of
// FC-fc_width -> FC-1 with dropout on both FC inputs. The quality head is
// linear; the weight head output is ReLU plus a small positive floor.
struct ModelSpec {
    int patch_size = 32;
    std::vector<int> stage_channels{32, 64, 128, 256, 512};
    int fc_width = 512;
    double dropout = 0.5;
    double weight_floor = 1e-6;

    void validate() const;
};

int64_t parameter_count(const ModelSpec& spec);
uint64_t arch_fingerprint(const ModelSpec& spec);

// Row-major GEMM/GEMV dispatch (float/double) over BLAS.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc);
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc);

template <typename T>
struct ConvParams {
    int cin = 0, cout = 0;
    std::vector<T> w;   // [9*cin, cout], row-major
    std::vector<T> b;   // [cout]
    std::vector<T> gw, gb;
};

template <typename T>
struct FcParams {
    int cin = 0, cout = 0;
    std::vector<T> w;   // [cin, cout]
    std::vector<T> b;
    std::vector<T> gw, gb;
};

template <typename T>
struct PatchOutputs {
    std::vector<T> quality; // y_i, one per patch
    std::vector<T> weight;  // alpha_i >= weight_floor
};

// View over one named parameter tensor and its gradient buffer.
template <typename T>
struct ParamView {
    std::string name;
    std::vector<int> shape;
    std::vector<T>* value;
    std::vector<T>* grad;
};

// The patch network. One instance owns its activation caches, so training
// requires exclusive access; inference-only use is const after forward.
template <typename T>
class Network {
public:
    explicit Network(ModelSpec spec);

    // He fan-in initialization, zero biases. Deterministic in the seed.
    void init_he(uint64_t seed);

    // patches: n blocks of patch_size^2 values, row-major.
    // training enables dropout (rng required) and caches for backward().
    PatchOutputs<T> forward(const T* patches, int n, bool training,
                            std::mt19937_64* dropout_rng = nullptr);

    void zero_grad();
    // d_quality/d_weight: dLoss/dy_i and dLoss/dalpha_i from the last
    // training-mode forward. Accumulates into the gradient buffers.
    void backward(const std::vector<T>& d_quality, const std::vector<T>& d_weight);

    std::vector<ParamView<T>> params();
    const ModelSpec& spec() const { return spec_; }
    int64_t parameter_count() const { return patchiq::parameter_count(spec_); }

private:
    struct Head {
        FcParams<T> fc1, fc2;
        // caches
        std::vector<T> drop1, in1, z1, drop2, in2, z2;
    };

    void forward_head(Head& head, const std::vector<T>& features, int n, bool training,
                      std::mt19937_64* rng);
    // Returns the gradient w.r.t. the shared feature vector.
    std::vector<T> backward_head(Head& head, const std::vector<T>& dz2, int n);

    ModelSpec spec_;
    std::vector<ConvParams<T>> convs_;
    std::vector<int> conv_h_, conv_w_;          // spatial size entering each conv
    Head quality_head_, weight_head_;

    // caches from the last forward
    int n_ = 0;
    bool cached_ = false;
    std::vector<std::vector<T>> conv_in_;       // NHWC input of each conv
    std::vector<std::vector<T>> conv_out_;      // post-ReLU output of each conv
    std::vector<std::vector<uint8_t>> pool_idx_; // argmax in each 2x2 window
    std::vector<T> features_;                   // [n, C_last]
    std::vector<T> weight_pre_;                 // z entering the weight floor
};

// Eq-style weighted aggregation y = sum(alpha_i y_i) / sum(alpha_i).
double aggregate(const std::vector<double>& quality, const std::vector<double>& weight);

// A trained (or initialized) model: parameters plus the label-normalization
// statistics and the architecture fingerprint.
struct Model {
    ModelSpec spec;
    Network<float> net;
    double label_mean = 0.0;
    double label_std = 1.0;
    std::string target_name = "frc_resolution";

    explicit Model(ModelSpec s) : spec(s), net(spec) {}
    uint64_t fingerprint() const { return arch_fingerprint(spec); }
};

Model init_model(const ModelSpec& spec, uint64_t seed);

// Binary container: magic, JSON header (format version, target name, label
// stats, fingerprint, tensor table), then raw little-endian float32 data.
void save_model(Model& model, const std::string& path);
Model load_model(const std::string& path);

extern template class Network<float>;
extern template class Network<double>;

} // namespace patchiq
