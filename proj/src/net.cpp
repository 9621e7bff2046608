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

#include "patchiq/net.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "patchiq/util.hpp"

namespace patchiq {

using nlohmann::json;

void ModelSpec::validate() const {
    if (stage_channels.empty()) throw DataError("ModelSpec: no stages");
    int size = patch_size;
    for (size_t i = 0; i < stage_channels.size(); ++i) {
        if (stage_channels[i] <= 0) throw DataError("ModelSpec: non-positive channel count");
        if (size % 2 != 0) throw DataError("ModelSpec: patch size not divisible by the pool cascade");
        size /= 2;
    }
    if (size != 1) throw DataError("ModelSpec: pool cascade must reduce the patch to 1x1");
    if (fc_width <= 0) throw DataError("ModelSpec: fc_width must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw DataError("ModelSpec: dropout must be in [0,1)");
    if (weight_floor <= 0.0) throw DataError("ModelSpec: weight_floor must be positive");
}

int64_t parameter_count(const ModelSpec& spec) {
    spec.validate();
    int64_t total = 0;
    int cin = 1;
    for (int cout : spec.stage_channels) {
        total += 9LL * cin * cout + cout;   // first conv of the pair
        total += 9LL * cout * cout + cout;  // second conv
        cin = cout;
    }
    const int64_t feat = spec.stage_channels.back();
    total += 2 * (feat * spec.fc_width + spec.fc_width + spec.fc_width + 1);
    return total;
}

uint64_t arch_fingerprint(const ModelSpec& spec) {
    std::string desc = "ps=" + std::to_string(spec.patch_size) + ";ch=";
    for (int c : spec.stage_channels) desc += std::to_string(c) + ",";
    desc += ";fc=" + std::to_string(spec.fc_width);
    desc += ";do=" + std::to_string(spec.dropout);
    desc += ";floor=" + std::to_string(spec.weight_floor);
    return fnv1a(desc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

namespace {

// 3x3, pad 1, NHWC. col has n*h*w rows and 9*c columns.
template <typename T>
void im2col3x3(const T* x, int n, int h, int w, int c, std::vector<T>& col) {
    col.assign(static_cast<size_t>(n) * h * w * 9 * c, T(0));
    const size_t row_len = 9ull * c;
    for (int s = 0; s < n; ++s) {
        const T* xs = x + static_cast<size_t>(s) * h * w * c;
        T* cs = col.data() + static_cast<size_t>(s) * h * w * row_len;
        for (int y = 0; y < h; ++y) {
            for (int xx = 0; xx < w; ++xx) {
                T* dst = cs + (static_cast<size_t>(y) * w + xx) * row_len;
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= w) continue;
                        std::memcpy(dst + (static_cast<size_t>(ky) * 3 + kx) * c,
                                    xs + (static_cast<size_t>(sy) * w + sx) * c,
                                    sizeof(T) * c);
                    }
                }
            }
        }
    }
}

// Scatter-add of a column gradient back onto the input layout.
template <typename T>
void col2im3x3(const std::vector<T>& col, int n, int h, int w, int c, T* dx) {
    const size_t row_len = 9ull * c;
    for (int s = 0; s < n; ++s) {
        T* xs = dx + static_cast<size_t>(s) * h * w * c;
        const T* cs = col.data() + static_cast<size_t>(s) * h * w * row_len;
        for (int y = 0; y < h; ++y) {
            for (int xx = 0; xx < w; ++xx) {
                const T* src = cs + (static_cast<size_t>(y) * w + xx) * row_len;
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= w) continue;
                        const T* sp = src + (static_cast<size_t>(ky) * 3 + kx) * c;
                        T* dp = xs + (static_cast<size_t>(sy) * w + sx) * c;
                        for (int ch = 0; ch < c; ++ch) dp[ch] += sp[ch];
                    }
                }
            }
        }
    }
}

template <typename T>
void add_bias_relu(std::vector<T>& x, const std::vector<T>& bias, size_t rows) {
    const size_t c = bias.size();
    for (size_t r = 0; r < rows; ++r) {
        T* p = x.data() + r * c;
        for (size_t ch = 0; ch < c; ++ch) p[ch] = std::max(T(0), p[ch] + bias[ch]);
    }
}

template <typename T>
void add_bias(std::vector<T>& x, const std::vector<T>& bias, size_t rows) {
    const size_t c = bias.size();
    for (size_t r = 0; r < rows; ++r) {
        T* p = x.data() + r * c;
        for (size_t ch = 0; ch < c; ++ch) p[ch] += bias[ch];
    }
}

} // namespace

template <typename T>
Network<T>::Network(ModelSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    int cin = 1;
    int size = spec_.patch_size;
    for (int cout : spec_.stage_channels) {
        for (int half = 0; half < 2; ++half) {
            ConvParams<T> conv;
            conv.cin = half == 0 ? cin : cout;
            conv.cout = cout;
            conv.w.assign(9ull * conv.cin * conv.cout, T(0));
            conv.b.assign(conv.cout, T(0));
            conv.gw.assign(conv.w.size(), T(0));
            conv.gb.assign(conv.b.size(), T(0));
            conv_h_.push_back(size);
            conv_w_.push_back(size);
            convs_.push_back(std::move(conv));
        }
        size /= 2;
        cin = cout;
    }
    const int feat = spec_.stage_channels.back();
    for (Head* head : {&quality_head_, &weight_head_}) {
        head->fc1.cin = feat;
        head->fc1.cout = spec_.fc_width;
        head->fc2.cin = spec_.fc_width;
        head->fc2.cout = 1;
        for (FcParams<T>* fc : {&head->fc1, &head->fc2}) {
            fc->w.assign(static_cast<size_t>(fc->cin) * fc->cout, T(0));
            fc->b.assign(fc->cout, T(0));
            fc->gw.assign(fc->w.size(), T(0));
            fc->gb.assign(fc->b.size(), T(0));
        }
    }
    conv_in_.resize(convs_.size());
    conv_out_.resize(convs_.size());
    pool_idx_.resize(spec_.stage_channels.size());
}

template <typename T>
void Network<T>::init_he(uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&rng](std::vector<T>& w, int fan_in) {
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
        for (auto& v : w) v = static_cast<T>(dist(rng));
    };
    for (auto& conv : convs_) {
        fill(conv.w, 9 * conv.cin);
        std::fill(conv.b.begin(), conv.b.end(), T(0));
    }
    for (Head* head : {&quality_head_, &weight_head_}) {
        for (FcParams<T>* fc : {&head->fc1, &head->fc2}) {
            fill(fc->w, fc->cin);
            std::fill(fc->b.begin(), fc->b.end(), T(0));
        }
    }
}

template <typename T>
void Network<T>::forward_head(Head& head, const std::vector<T>& features, int n, bool training,
                              std::mt19937_64* rng) {
    const double keep = 1.0 - spec_.dropout;
    auto dropout_mask = [&](std::vector<T>& mask, size_t len) {
        mask.assign(len, T(1));
        if (training && spec_.dropout > 0.0) {
            std::bernoulli_distribution bern(keep);
            const T scale = static_cast<T>(1.0 / keep);
            for (auto& m : mask) m = bern(*rng) ? scale : T(0);
        }
    };
    dropout_mask(head.drop1, features.size());
    head.in1.resize(features.size());
    for (size_t i = 0; i < features.size(); ++i) head.in1[i] = features[i] * head.drop1[i];

    head.z1.assign(static_cast<size_t>(n) * head.fc1.cout, T(0));
    gemm(false, false, n, head.fc1.cout, head.fc1.cin, T(1), head.in1.data(), head.fc1.cin,
         head.fc1.w.data(), head.fc1.cout, T(0), head.z1.data(), head.fc1.cout);
    add_bias(head.z1, head.fc1.b, n);

    dropout_mask(head.drop2, head.z1.size());
    head.in2.resize(head.z1.size());
    for (size_t i = 0; i < head.z1.size(); ++i) head.in2[i] = head.z1[i] * head.drop2[i];

    head.z2.assign(static_cast<size_t>(n), T(0));
    gemm(false, false, n, 1, head.fc2.cin, T(1), head.in2.data(), head.fc2.cin,
         head.fc2.w.data(), 1, T(0), head.z2.data(), 1);
    add_bias(head.z2, head.fc2.b, n);
}

template <typename T>
PatchOutputs<T> Network<T>::forward(const T* patches, int n, bool training,
                                    std::mt19937_64* dropout_rng) {
    if (n <= 0) throw DataError("Network::forward: empty batch");
    if (training && spec_.dropout > 0.0 && dropout_rng == nullptr) {
        throw DataError("Network::forward: training mode requires a dropout rng");
    }
    n_ = n;
    cached_ = true;

    // input is single-channel NHWC
    conv_in_[0].assign(patches, patches + static_cast<size_t>(n) * spec_.patch_size * spec_.patch_size);

    std::vector<T> col;
    size_t conv_idx = 0;
    for (size_t stage = 0; stage < spec_.stage_channels.size(); ++stage) {
        for (int half = 0; half < 2; ++half, ++conv_idx) {
            auto& conv = convs_[conv_idx];
            const int h = conv_h_[conv_idx], w = conv_w_[conv_idx];
            const size_t rows = static_cast<size_t>(n) * h * w;
            im2col3x3(conv_in_[conv_idx].data(), n, h, w, conv.cin, col);
            conv_out_[conv_idx].assign(rows * conv.cout, T(0));
            gemm(false, false, static_cast<int>(rows), conv.cout, 9 * conv.cin, T(1), col.data(),
                 9 * conv.cin, conv.w.data(), conv.cout, T(0), conv_out_[conv_idx].data(),
                 conv.cout);
            add_bias_relu(conv_out_[conv_idx], conv.b, rows);
            if (half == 0) conv_in_[conv_idx + 1] = conv_out_[conv_idx];
        }
        // 2x2 max pool, stride 2
        const int h = conv_h_[conv_idx - 1], w = conv_w_[conv_idx - 1];
        const int c = convs_[conv_idx - 1].cout;
        const int ho = h / 2, wo = w / 2;
        const auto& src = conv_out_[conv_idx - 1];
        std::vector<T> pooled(static_cast<size_t>(n) * ho * wo * c);
        pool_idx_[stage].assign(pooled.size(), 0);
        for (int s = 0; s < n; ++s) {
            for (int y = 0; y < ho; ++y) {
                for (int x = 0; x < wo; ++x) {
                    for (int ch = 0; ch < c; ++ch) {
                        T best = std::numeric_limits<T>::lowest();
                        uint8_t best_i = 0;
                        for (uint8_t i = 0; i < 4; ++i) {
                            const int sy = 2 * y + (i >> 1), sx = 2 * x + (i & 1);
                            const T v = src[((static_cast<size_t>(s) * h + sy) * w + sx) * c + ch];
                            if (v > best) { best = v; best_i = i; }
                        }
                        const size_t o = ((static_cast<size_t>(s) * ho + y) * wo + x) * c + ch;
                        pooled[o] = best;
                        pool_idx_[stage][o] = best_i;
                    }
                }
            }
        }
        if (conv_idx < convs_.size()) {
            conv_in_[conv_idx] = std::move(pooled);
        } else {
            features_ = std::move(pooled); // final pool leaves 1x1 spatial
        }
    }

    forward_head(quality_head_, features_, n, training, dropout_rng);
    forward_head(weight_head_, features_, n, training, dropout_rng);

    PatchOutputs<T> out;
    out.quality = quality_head_.z2;
    weight_pre_ = weight_head_.z2;
    out.weight.resize(weight_pre_.size());
    // Round the floor up so the advertised bound holds after any
    // narrowing cast (float's nearest value to 1e-6 sits just below it).
    T floor = static_cast<T>(spec_.weight_floor);
    if (static_cast<double>(floor) < spec_.weight_floor)
        floor = std::nextafter(floor, std::numeric_limits<T>::max());
    for (size_t i = 0; i < weight_pre_.size(); ++i) {
        out.weight[i] = std::max(T(0), weight_pre_[i]) + floor;
    }
    return out;
}

template <typename T>
void Network<T>::zero_grad() {
    for (auto& conv : convs_) {
        std::fill(conv.gw.begin(), conv.gw.end(), T(0));
        std::fill(conv.gb.begin(), conv.gb.end(), T(0));
    }
    for (Head* head : {&quality_head_, &weight_head_}) {
        for (FcParams<T>* fc : {&head->fc1, &head->fc2}) {
            std::fill(fc->gw.begin(), fc->gw.end(), T(0));
            std::fill(fc->gb.begin(), fc->gb.end(), T(0));
        }
    }
}

template <typename T>
std::vector<T> Network<T>::backward_head(Head& head, const std::vector<T>& dz2, int n) {
    // FC2
    for (int s = 0; s < n; ++s) head.fc2.gb[0] += dz2[s];
    gemm(true, false, head.fc2.cin, 1, n, T(1), head.in2.data(), head.fc2.cin, dz2.data(), 1,
         T(1), head.fc2.gw.data(), 1);
    std::vector<T> din2(static_cast<size_t>(n) * head.fc2.cin, T(0));
    gemm(false, true, n, head.fc2.cin, 1, T(1), dz2.data(), 1, head.fc2.w.data(), 1, T(0),
         din2.data(), head.fc2.cin);
    // dropout before FC2
    std::vector<T> dz1(din2.size());
    for (size_t i = 0; i < din2.size(); ++i) dz1[i] = din2[i] * head.drop2[i];
    // FC1
    for (int s = 0; s < n; ++s) {
        const T* row = dz1.data() + static_cast<size_t>(s) * head.fc1.cout;
        for (int ch = 0; ch < head.fc1.cout; ++ch) head.fc1.gb[ch] += row[ch];
    }
    gemm(true, false, head.fc1.cin, head.fc1.cout, n, T(1), head.in1.data(), head.fc1.cin,
         dz1.data(), head.fc1.cout, T(1), head.fc1.gw.data(), head.fc1.cout);
    std::vector<T> din1(static_cast<size_t>(n) * head.fc1.cin, T(0));
    gemm(false, true, n, head.fc1.cin, head.fc1.cout, T(1), dz1.data(), head.fc1.cout,
         head.fc1.w.data(), head.fc1.cout, T(0), din1.data(), head.fc1.cin);
    // dropout before FC1
    for (size_t i = 0; i < din1.size(); ++i) din1[i] *= head.drop1[i];
    return din1;
}

template <typename T>
void Network<T>::backward(const std::vector<T>& d_quality, const std::vector<T>& d_weight) {
    if (!cached_) throw DataError("Network::backward: no cached forward pass");
    const int n = n_;
    if (static_cast<int>(d_quality.size()) != n || static_cast<int>(d_weight.size()) != n) {
        throw DataError("Network::backward: gradient size mismatch");
    }

    // Weight head: alpha = ReLU(z) + floor.
    std::vector<T> dzw(d_weight);
    for (int s = 0; s < n; ++s) {
        if (weight_pre_[s] <= T(0)) dzw[s] = T(0);
    }
    std::vector<T> dfeat = backward_head(quality_head_, d_quality, n);
    const std::vector<T> dfeat_w = backward_head(weight_head_, dzw, n);
    for (size_t i = 0; i < dfeat.size(); ++i) dfeat[i] += dfeat_w[i];

    // Walk the conv cascade backward, un-pooling between stages.
    std::vector<T> dout = std::move(dfeat); // gradient at the current pool output
    std::vector<T> col;
    size_t conv_idx = convs_.size();
    for (int stage = static_cast<int>(spec_.stage_channels.size()) - 1; stage >= 0; --stage) {
        const int c = spec_.stage_channels[stage];
        const int h = conv_h_[conv_idx - 1], w = conv_w_[conv_idx - 1];
        const int ho = h / 2, wo = w / 2;
        // un-pool
        std::vector<T> dsrc(static_cast<size_t>(n_) * h * w * c, T(0));
        for (int s = 0; s < n_; ++s) {
            for (int y = 0; y < ho; ++y) {
                for (int x = 0; x < wo; ++x) {
                    for (int ch = 0; ch < c; ++ch) {
                        const size_t o = ((static_cast<size_t>(s) * ho + y) * wo + x) * c + ch;
                        const uint8_t i = pool_idx_[stage][o];
                        const int sy = 2 * y + (i >> 1), sx = 2 * x + (i & 1);
                        dsrc[((static_cast<size_t>(s) * h + sy) * w + sx) * c + ch] += dout[o];
                    }
                }
            }
        }
        dout = std::move(dsrc);
        // the two convs of this stage
        for (int half = 1; half >= 0; --half) {
            --conv_idx;
            auto& conv = convs_[conv_idx];
            const int ch_ = conv_h_[conv_idx], cw = conv_w_[conv_idx];
            const size_t rows = static_cast<size_t>(n_) * ch_ * cw;
            // ReLU mask from the cached post-activation output
            for (size_t i = 0; i < dout.size(); ++i) {
                if (conv_out_[conv_idx][i] <= T(0)) dout[i] = T(0);
            }
            for (size_t r = 0; r < rows; ++r) {
                const T* p = dout.data() + r * conv.cout;
                for (int cc = 0; cc < conv.cout; ++cc) conv.gb[cc] += p[cc];
            }
            im2col3x3(conv_in_[conv_idx].data(), n_, ch_, cw, conv.cin, col);
            gemm(true, false, 9 * conv.cin, conv.cout, static_cast<int>(rows), T(1), col.data(),
                 9 * conv.cin, dout.data(), conv.cout, T(1), conv.gw.data(), conv.cout);
            if (conv_idx == 0) break; // no input gradient needed
            std::vector<T> dcol(rows * 9ull * conv.cin, T(0));
            gemm(false, true, static_cast<int>(rows), 9 * conv.cin, conv.cout, T(1), dout.data(),
                 conv.cout, conv.w.data(), conv.cout, T(0), dcol.data(), 9 * conv.cin);
            std::vector<T> din(static_cast<size_t>(n_) * ch_ * cw * conv.cin, T(0));
            col2im3x3(dcol, n_, ch_, cw, conv.cin, din.data());
            dout = std::move(din);
        }
        if (conv_idx == 0) break;
    }
    cached_ = false;
}

template <typename T>
std::vector<ParamView<T>> Network<T>::params() {
    std::vector<ParamView<T>> views;
    for (size_t i = 0; i < convs_.size(); ++i) {
        auto& c = convs_[i];
        views.push_back({"conv" + std::to_string(i) + ".w", {9 * c.cin, c.cout}, &c.w, &c.gw});
        views.push_back({"conv" + std::to_string(i) + ".b", {c.cout}, &c.b, &c.gb});
    }
    const char* head_names[] = {"quality", "weight"};
    Head* heads[] = {&quality_head_, &weight_head_};
    for (int hi = 0; hi < 2; ++hi) {
        FcParams<T>* fcs[] = {&heads[hi]->fc1, &heads[hi]->fc2};
        for (int fi = 0; fi < 2; ++fi) {
            const std::string base = std::string(head_names[hi]) + ".fc" + std::to_string(fi + 1);
            views.push_back({base + ".w", {fcs[fi]->cin, fcs[fi]->cout}, &fcs[fi]->w, &fcs[fi]->gw});
            views.push_back({base + ".b", {fcs[fi]->cout}, &fcs[fi]->b, &fcs[fi]->gb});
        }
    }
    return views;
}

template class Network<float>;
template class Network<double>;

double aggregate(const std::vector<double>& quality, const std::vector<double>& weight) {
    if (quality.empty() || quality.size() != weight.size()) {
        throw DataError("aggregate: empty or mismatched prediction");
    }
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < quality.size(); ++i) {
        num += weight[i] * quality[i];
        den += weight[i];
    }
    return num / den;
}

Model init_model(const ModelSpec& spec, uint64_t seed) {
    Model model(spec);
    model.net.init_he(seed);
    return model;
}

namespace {
constexpr char kModelMagic[8] = {'P', 'I', 'Q', 'M', 'D', 'L', '0', '1'};
}

void save_model(Model& model, const std::string& path) {
    json header;
    header["format_version"] = 1;
    header["target_name"] = model.target_name;
    header["label_mean"] = model.label_mean;
    header["label_std"] = model.label_std;
    header["arch_fingerprint"] = model.fingerprint();
    header["spec"] = {{"patch_size", model.spec.patch_size},
                      {"stage_channels", model.spec.stage_channels},
                      {"fc_width", model.spec.fc_width},
                      {"dropout", model.spec.dropout},
                      {"weight_floor", model.spec.weight_floor}};
    json tensors = json::array();
    uint64_t offset = 0;
    auto views = model.net.params();
    for (const auto& v : views) {
        tensors.push_back({{"name", v.name},
                           {"shape", v.shape},
                           {"dtype", "float32"},
                           {"byte_offset", offset}});
        offset += v.value->size() * sizeof(float);
    }
    header["tensors"] = std::move(tensors);
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out.write(kModelMagic, sizeof(kModelMagic));
    const uint64_t header_len = header_str.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (const auto& v : views) {
        out.write(reinterpret_cast<const char*>(v.value->data()),
                  static_cast<std::streamsize>(v.value->size() * sizeof(float)));
    }
    if (!out) throw DataError("write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw DataError("not a model file: " + path);
    }
    uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(header_len));
    json header = json::parse(header_str, nullptr, false);
    if (header.is_discarded()) throw DataError("corrupt model header: " + path);

    ModelSpec spec;
    spec.patch_size = header["spec"]["patch_size"].get<int>();
    spec.stage_channels = header["spec"]["stage_channels"].get<std::vector<int>>();
    spec.fc_width = header["spec"]["fc_width"].get<int>();
    spec.dropout = header["spec"]["dropout"].get<double>();
    spec.weight_floor = header["spec"]["weight_floor"].get<double>();

    const uint64_t declared = header["arch_fingerprint"].get<uint64_t>();
    if (declared != arch_fingerprint(spec)) {
        throw DataError("architecture fingerprint mismatch in " + path);
    }

    Model model(spec);
    model.target_name = header["target_name"].get<std::string>();
    model.label_mean = header["label_mean"].get<double>();
    model.label_std = header["label_std"].get<double>();
    auto views = model.net.params();
    if (views.size() != header["tensors"].size()) {
        throw DataError("tensor table mismatch in " + path);
    }
    for (size_t i = 0; i < views.size(); ++i) {
        const auto& t = header["tensors"][i];
        if (t["name"].get<std::string>() != views[i].name) {
            throw DataError("tensor name mismatch in " + path);
        }
        in.read(reinterpret_cast<char*>(views[i].value->data()),
                static_cast<std::streamsize>(views[i].value->size() * sizeof(float)));
    }
    if (!in) throw DataError("truncated model file: " + path);
    return model;
}

} // namespace patchiq
