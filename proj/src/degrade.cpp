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

#include "patchiq/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "patchiq/error.hpp"
#include "patchiq/image_io.hpp"
#include "patchiq/util.hpp"

namespace patchiq {

namespace {

using nlohmann::json;

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Mirror index into [0, n): -1 -> 0, -2 -> 1, n -> n-1, ...
inline int mirror(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// Shot term: mean s, variance alpha * s (Gaussian surrogate of the
// variance-modulated Poisson; see header).
inline double shot_sample(double s, double alpha, std::mt19937_64& rng) {
    if (alpha <= 0.0 || s <= 0.0) return s;
    return std::normal_distribution<double>(s, std::sqrt(alpha * s))(rng);
}

} // namespace

std::string to_string(ArtifactKind kind) {
    switch (kind) {
        case ArtifactKind::Reference: return "reference";
        case ArtifactKind::Blur: return "blur";
        case ArtifactKind::DarkNoise: return "dark_noise";
        case ArtifactKind::ReadoutNoise: return "readout_noise";
        case ArtifactKind::ShotNoise: return "shot_noise";
        case ArtifactKind::Vignetting: return "vignetting";
    }
    return "?";
}

ArtifactKind artifact_kind_from_string(const std::string& name) {
    if (name == "reference") return ArtifactKind::Reference;
    if (name == "blur") return ArtifactKind::Blur;
    if (name == "dark_noise") return ArtifactKind::DarkNoise;
    if (name == "readout_noise") return ArtifactKind::ReadoutNoise;
    if (name == "shot_noise") return ArtifactKind::ShotNoise;
    if (name == "vignetting") return ArtifactKind::Vignetting;
    throw DataError("unknown artifact kind: " + name);
}

void ArtifactSpec::validate() const {
    for (double p : {sigma_blur, lambda_dark, sigma2_read, alpha_shot, sigma_ill}) {
        if (p < 0.0 || !std::isfinite(p)) throw DataError("ArtifactSpec: parameter < 0 or non-finite");
    }
}

json to_json(const ArtifactSpec& s) {
    json params;
    params["sigma_blur"] = s.sigma_blur;
    params["lambda_dark"] = s.lambda_dark;
    params["sigma2_read"] = s.sigma2_read;
    params["alpha_shot"] = s.alpha_shot;
    params["sigma_ill"] = s.sigma_ill;
    json j{{"kind", to_string(s.kind)}, {"params", params}, {"seed", s.seed}};
    if (s.level) j["level"] = *s.level;
    return j;
}

ArtifactSpec artifact_spec_from_json(const json& j) {
    ArtifactSpec s;
    s.kind = artifact_kind_from_string(j.at("kind").get<std::string>());
    const auto& p = j.at("params");
    s.sigma_blur = p.value("sigma_blur", 0.0);
    s.lambda_dark = p.value("lambda_dark", 0.0);
    s.sigma2_read = p.value("sigma2_read", 0.0);
    s.alpha_shot = p.value("alpha_shot", 0.0);
    s.sigma_ill = p.value("sigma_ill", 0.0);
    s.seed = j.at("seed").get<uint64_t>();
    if (j.contains("level")) s.level = j["level"].get<int>();
    return s;
}

Image apply_blur(const Image& image, double sigma_blur) {
    if (sigma_blur < 0) throw DataError("apply_blur: sigma < 0");
    if (sigma_blur == 0.0 || image.empty()) return image;
    const auto k = gaussian_kernel(sigma_blur);
    const int radius = static_cast<int>(k.size() / 2);
    const int h = image.height, w = image.width;
    Image tmp(h, w);
    tmp.pixel_size_um = image.pixel_size_um;
    // horizontal pass
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += k[i + radius] * image.at(r, mirror(c + i, w));
            }
            tmp.at(r, c) = static_cast<float>(acc);
        }
    }
    Image out(h, w);
    out.pixel_size_um = image.pixel_size_um;
    // vertical pass
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += k[i + radius] * tmp.at(mirror(r + i, h), c);
            }
            out.at(r, c) = static_cast<float>(acc);
        }
    }
    return out;
}

Image apply_mpg_noise_raw(const Image& image, double lambda_dark, double sigma2_read,
                          double alpha_shot, uint64_t seed) {
    for (double p : {lambda_dark, sigma2_read, alpha_shot}) {
        if (p < 0) throw DataError("apply_mpg_noise: parameter < 0");
    }
    std::mt19937_64 rng(seed);
    Image out = image;
    const double sigma_read = std::sqrt(sigma2_read);
    std::poisson_distribution<long> dark(lambda_dark > 0 ? lambda_dark : 1.0);
    std::normal_distribution<double> readout(0.0, sigma_read > 0 ? sigma_read : 1.0);
    for (auto& v : out.pixels) {
        double acc = shot_sample(v, alpha_shot, rng);
        if (lambda_dark > 0) acc += static_cast<double>(dark(rng));
        if (sigma_read > 0) acc += readout(rng);
        v = static_cast<float>(acc);
    }
    return out;
}

Image apply_mpg_noise(const Image& image, double lambda_dark, double sigma2_read,
                      double alpha_shot, uint64_t seed) {
    return rescale_unit(apply_mpg_noise_raw(image, lambda_dark, sigma2_read, alpha_shot, seed));
}

Image apply_vignetting(const Image& image, double sigma_ill) {
    if (sigma_ill <= 0) throw DataError("apply_vignetting: sigma_ill must be > 0");
    const double lateral = std::max(image.height, image.width);
    const double s = sigma_ill * lateral;
    const double cy = image.height / 2.0, cx = image.width / 2.0;
    const double inv = 1.0 / (2.0 * s * s);
    Image out = image;
    for (int r = 0; r < image.height; ++r) {
        for (int c = 0; c < image.width; ++c) {
            const double r2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
            out.at(r, c) = static_cast<float>(image.at(r, c) * std::exp(-r2 * inv));
        }
    }
    return out;
}

Image apply_artifact(const Image& clean, const ArtifactSpec& spec) {
    spec.validate();
    Image img = clean;
    if (spec.sigma_blur > 0) img = apply_blur(img, spec.sigma_blur);
    if (spec.sigma_ill > 0) img = apply_vignetting(img, spec.sigma_ill);
    if (spec.lambda_dark > 0 || spec.sigma2_read > 0 || spec.alpha_shot > 0) {
        img = apply_mpg_noise_raw(img, spec.lambda_dark, spec.sigma2_read, spec.alpha_shot,
                                  spec.seed);
    }
    return rescale_unit(img);
}

Image apply_graded(const Image& image, const GradedArtifactSpec& spec) {
    if (spec.start < 0 || spec.per_row_increase < 0) {
        throw DataError("apply_graded: negative start or increment");
    }
    const int h = image.height, w = image.width;
    if (spec.kind == GradedKind::Blur) {
        // Per-row kernel selection: output row r is the 2-D convolution of
        // the input with the kernel of sigma(r), evaluated on that row.
        Image out = image;
        for (int r = 0; r < h; ++r) {
            const double sigma = spec.start + r * spec.per_row_increase;
            if (sigma <= 0) continue;
            const auto k = gaussian_kernel(sigma);
            const int radius = static_cast<int>(k.size() / 2);
            // horizontal pass restricted to the rows this output row needs
            std::vector<double> hconv(static_cast<size_t>(2 * radius + 1) * w);
            for (int i = -radius; i <= radius; ++i) {
                const int rr = mirror(r + i, h);
                for (int c = 0; c < w; ++c) {
                    double acc = 0.0;
                    for (int j = -radius; j <= radius; ++j) {
                        acc += k[j + radius] * image.at(rr, mirror(c + j, w));
                    }
                    hconv[static_cast<size_t>(i + radius) * w + c] = acc;
                }
            }
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int i = 0; i <= 2 * radius; ++i) {
                    acc += k[i] * hconv[static_cast<size_t>(i) * w + c];
                }
                out.at(r, c) = static_cast<float>(acc);
            }
        }
        return rescale_unit(out);
    }
    // MPG gradient: each row draws from its own parameter triplet.
    std::mt19937_64 rng(spec.seed);
    Image out = image;
    for (int r = 0; r < h; ++r) {
        const double lambda = spec.start + r * spec.inc_lambda_dark;
        const double sigma2 = spec.start + r * spec.inc_sigma2_read;
        const double alpha = spec.start + r * spec.inc_alpha_shot;
        const double sigma_read = std::sqrt(sigma2);
        for (int c = 0; c < w; ++c) {
            double acc = shot_sample(image.at(r, c), alpha, rng);
            if (lambda > 0) acc += std::poisson_distribution<long>(lambda)(rng);
            if (sigma_read > 0) acc += std::normal_distribution<double>(0.0, sigma_read)(rng);
            out.at(r, c) = static_cast<float>(acc);
        }
    }
    return rescale_unit(out);
}

ParamRange sampled_param_range(ArtifactKind kind) {
    switch (kind) {
        case ArtifactKind::Reference: return {kBaselineNoise, kBaselineNoise};
        case ArtifactKind::Blur: return {1.0, 8.0};
        case ArtifactKind::DarkNoise: return {0.3, 0.5};
        case ArtifactKind::ReadoutNoise: return {0.7, 1.5};
        case ArtifactKind::ShotNoise: return {1.0, 5.0};
        case ArtifactKind::Vignetting: return {0.2, 0.6};
    }
    throw DataError("unreachable artifact kind");
}

const std::array<double, 5> kNoiseFreeBlurLevels{1.0, 2.75, 4.5, 6.25, 8.0};
const std::array<double, 5> kNoiseFreeVignettingLevels{0.6, 0.5, 0.4, 0.3, 0.2};

ArtifactSpec sample_artifact_params(ArtifactKind kind, std::mt19937_64& rng) {
    ArtifactSpec spec;
    spec.kind = kind;
    // Every sampled image carries the low-noise baseline triplet.
    spec.lambda_dark = spec.sigma2_read = spec.alpha_shot = kBaselineNoise;
    const auto range = sampled_param_range(kind);
    double value = range.min;
    if (range.max > range.min) {
        const double mean = 0.5 * (range.min + range.max);
        const double sd = 0.25 * (range.max - range.min);
        value = std::clamp(std::normal_distribution<double>(mean, sd)(rng), range.min, range.max);
    }
    switch (kind) {
        case ArtifactKind::Reference: break;
        case ArtifactKind::Blur: spec.sigma_blur = value; break;
        case ArtifactKind::DarkNoise: spec.lambda_dark = value; break;
        case ArtifactKind::ReadoutNoise: spec.sigma2_read = value; break;
        case ArtifactKind::ShotNoise: spec.alpha_shot = value; break;
        case ArtifactKind::Vignetting: spec.sigma_ill = value; break;
    }
    spec.seed = rng();
    return spec;
}

// ---- manifest ----

std::string to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Predict: return "predict";
    }
    return "?";
}

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    if (name == "predict") return Split::Predict;
    throw DataError("unknown split: " + name);
}

std::vector<const ManifestEntry*> DatasetManifest::split_entries(Split split) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : entries) {
        if (e.split == split) out.push_back(&e);
    }
    return out;
}

const ManifestEntry& DatasetManifest::by_id(const std::string& id) const {
    for (const auto& e : entries) {
        if (e.id == id) return e;
    }
    throw DataError("manifest: no entry with id " + id);
}

json to_json(const DatasetManifest& m) {
    json entries = json::array();
    for (const auto& e : m.entries) {
        json clean;
        if (e.clean_source.structure) {
            clean = {{"type", "structure"}, {"spec", to_json(*e.clean_source.structure)}};
        } else {
            clean = {{"type", "path"}, {"path", e.clean_source.path}};
        }
        clean["sample_label"] = e.clean_source.sample_label;
        json entry{{"id", e.id},
                   {"clean_source", clean},
                   {"artifact", to_json(e.artifact)},
                   {"split", to_string(e.split)},
                   {"image_path", e.image_path}};
        entry["label"] = e.label ? json(*e.label) : json(nullptr);
        entries.push_back(std::move(entry));
    }
    return json{{"version", m.version},
                {"global_seed", m.global_seed},
                {"presets", m.preset},
                {"entries", std::move(entries)}};
}

DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw DataError("incompatible manifest version " + std::to_string(m.version));
    m.global_seed = j.at("global_seed").get<uint64_t>();
    m.preset = j.value("presets", "");
    for (const auto& je : j.at("entries")) {
        ManifestEntry e;
        e.id = je.at("id").get<std::string>();
        const auto& clean = je.at("clean_source");
        if (clean.at("type") == "structure") {
            e.clean_source.structure = structure_spec_from_json(clean.at("spec"));
        } else {
            e.clean_source.path = clean.at("path").get<std::string>();
        }
        e.clean_source.sample_label = clean.value("sample_label", "");
        e.artifact = artifact_spec_from_json(je.at("artifact"));
        e.split = split_from_string(je.at("split").get<std::string>());
        e.image_path = je.value("image_path", "");
        if (je.contains("label") && !je["label"].is_null()) e.label = je["label"].get<double>();
        m.entries.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << to_json(manifest).dump(1) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("invalid manifest JSON: " + path);
    return manifest_from_json(j);
}

// ---- recipes ----

DatasetRecipe paper_recipe(uint64_t global_seed) {
    DatasetRecipe r;
    r.name = "paper";
    r.structures = {StructureKind::Disks, StructureKind::Filaments, StructureKind::Blobs,
                    StructureKind::Rings, StructureKind::Grid, StructureKind::Mixed};
    // Nine stand-in samples emulate the experimental FOVs when no clean
    // directory is supplied; they reuse the generators at 16 FOVs each so the
    // split sizes match the published corpus (1728 / 216 / 216).
    r.fov_train = 24;
    r.fov_val = 3;
    r.fov_test = 3;
    r.image_size = 512;
    r.global_seed = global_seed;
    return r;
}

DatasetRecipe desk_recipe(uint64_t global_seed) {
    DatasetRecipe r;
    r.name = "desk";
    r.structures = {StructureKind::Disks, StructureKind::Blobs, StructureKind::Rings};
    r.fov_train = 8;
    r.fov_val = 1;
    r.fov_test = 1;
    r.image_size = 96;
    r.objects_per_fov = 12;
    r.obj_size_min = 3.0;
    r.obj_size_max = 9.0;
    r.global_seed = global_seed;
    return r;
}

DatasetRecipe noisefree_recipe(uint64_t global_seed) {
    DatasetRecipe r = desk_recipe(global_seed);
    r.name = "noisefree";
    r.fov_train = r.fov_val = r.fov_test = 0;
    r.noise_free_sets = true;
    r.noise_free_fovs = 2;
    return r;
}

DatasetRecipe graded_recipe(uint64_t global_seed) {
    DatasetRecipe r = desk_recipe(global_seed);
    r.name = "graded";
    r.fov_train = r.fov_val = r.fov_test = 0;
    r.image_size = 512;
    r.objects_per_fov = 40;
    r.obj_size_min = 4.0;
    r.obj_size_max = 12.0;
    r.graded_sets = true;
    return r;
}

namespace {

struct SampleSource {
    std::string label;
    std::optional<StructureKind> kind; // parametric when set
    std::string path;                  // otherwise a user image
};

StructureSpec make_fov_spec(const DatasetRecipe& recipe, StructureKind kind,
                            const std::string& fov_tag) {
    StructureSpec s;
    s.kind = kind;
    s.canvas_height = s.canvas_width = recipe.image_size;
    s.object_count = recipe.objects_per_fov;
    s.size_min = recipe.obj_size_min;
    s.size_max = recipe.obj_size_max;
    s.seed = mix_seed(recipe.global_seed, fnv1a(fov_tag));
    return s;
}

} // namespace

DatasetManifest build_dataset(const DatasetRecipe& recipe, const std::string& out_dir,
                              int thread_count) {
    namespace fs = std::filesystem;
    if (recipe.structures.empty() && recipe.clean_paths.empty()) {
        throw DataError("build_dataset: recipe declares no clean sources");
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) throw DataError("cannot create output directory " + out_dir);

    std::vector<SampleSource> samples;
    for (auto kind : recipe.structures) {
        samples.push_back({to_string(kind), kind, ""});
    }
    if (recipe.name == "paper" && recipe.clean_paths.empty()) {
        // Stand-ins for the nine experimental samples.
        const StructureKind cycle[] = {StructureKind::Disks, StructureKind::Filaments,
                                       StructureKind::Blobs, StructureKind::Rings,
                                       StructureKind::Grid, StructureKind::Mixed};
        for (int i = 0; i < 9; ++i) {
            samples.push_back({"sample" + std::to_string(i + 1), cycle[i % 6], ""});
        }
    }
    for (size_t i = 0; i < recipe.clean_paths.size(); ++i) {
        samples.push_back({"user" + std::to_string(i + 1), std::nullopt, recipe.clean_paths[i]});
    }

    const ArtifactKind artifact_kinds[] = {ArtifactKind::Reference, ArtifactKind::Blur,
                                           ArtifactKind::DarkNoise, ArtifactKind::ReadoutNoise,
                                           ArtifactKind::ShotNoise, ArtifactKind::Vignetting};

    DatasetManifest manifest;
    manifest.global_seed = recipe.global_seed;
    manifest.preset = recipe.name;

    auto add_entry = [&](const SampleSource& sample, const std::string& fov_tag, Split split,
                         const ArtifactSpec& artifact, const std::string& id) {
        ManifestEntry e;
        e.id = id;
        if (sample.kind) {
            e.clean_source.structure = make_fov_spec(recipe, *sample.kind, fov_tag);
        } else {
            e.clean_source.path = sample.path;
        }
        e.clean_source.sample_label = sample.label;
        e.artifact = artifact;
        e.split = split;
        e.image_path = (fs::path(out_dir) / (id + ".f32")).string();
        manifest.entries.push_back(std::move(e));
    };

    // Experimental samples with halved FOV counts, matching the published
    // 24-vs-16 / 3-vs-2 composition.
    auto fovs_for = [&](const SampleSource& sample, Split split) {
        const bool standin = sample.label.rfind("sample", 0) == 0 || !sample.path.empty();
        int n = split == Split::Train ? recipe.fov_train
              : split == Split::Val   ? recipe.fov_val
                                      : recipe.fov_test;
        if (standin && recipe.name == "paper") n = (n * 2) / 3; // 24 -> 16, 3 -> 2
        return n;
    };

    for (const Split split : {Split::Train, Split::Val, Split::Test}) {
        for (const auto& sample : samples) {
            const int n_fov = fovs_for(sample, split);
            for (int f = 0; f < n_fov; ++f) {
                const std::string fov_tag =
                    to_string(split) + "/" + sample.label + "/f" + std::to_string(f);
                for (const auto kind : artifact_kinds) {
                    const std::string id = to_string(split) + "_" + sample.label + "_f" +
                                           std::to_string(f) + "_" + to_string(kind);
                    std::mt19937_64 rng(mix_seed(recipe.global_seed, fnv1a(id)));
                    add_entry(sample, fov_tag, split, sample_artifact_params(kind, rng), id);
                }
            }
        }
    }

    if (recipe.noise_free_sets) {
        for (const auto& sample : samples) {
            for (int f = 0; f < recipe.noise_free_fovs; ++f) {
                const std::string fov_tag = "predict/" + sample.label + "/f" + std::to_string(f);
                for (int level = 1; level <= 5; ++level) {
                    {
                        ArtifactSpec a;
                        a.kind = ArtifactKind::Blur;
                        a.sigma_blur = kNoiseFreeBlurLevels[level - 1];
                        a.level = level;
                        add_entry(sample, fov_tag, Split::Predict, a,
                                  "nf_blur_" + sample.label + "_f" + std::to_string(f) + "_L" +
                                      std::to_string(level));
                    }
                    {
                        ArtifactSpec a;
                        a.kind = ArtifactKind::Vignetting;
                        a.sigma_ill = kNoiseFreeVignettingLevels[level - 1];
                        a.level = level;
                        add_entry(sample, fov_tag, Split::Predict, a,
                                  "nf_vignetting_" + sample.label + "_f" + std::to_string(f) +
                                      "_L" + std::to_string(level));
                    }
                    {
                        ArtifactSpec a;
                        a.kind = ArtifactKind::Reference;
                        a.lambda_dark = a.sigma2_read = a.alpha_shot = kNoiseFreeReference;
                        a.level = level;
                        const std::string id = "nf_reference_" + sample.label + "_f" +
                                               std::to_string(f) + "_L" + std::to_string(level);
                        a.seed = mix_seed(recipe.global_seed, fnv1a(id));
                        add_entry(sample, fov_tag, Split::Predict, a, id);
                    }
                }
            }
        }
    }

    if (recipe.graded_sets) {
        // Encoded as manifest entries with reserved kinds; images are
        // rendered below with apply_graded.
        for (const auto& sample : samples) {
            const std::string fov_tag = "predict/" + sample.label + "/f0";
            ArtifactSpec blur;
            blur.kind = ArtifactKind::Blur;
            blur.sigma_blur = 0.0;
            blur.level = -1; // marker: graded
            add_entry(sample, fov_tag, Split::Predict, blur, "graded_blur_" + sample.label);
            ArtifactSpec mpg;
            mpg.kind = ArtifactKind::ShotNoise;
            mpg.level = -1;
            mpg.seed = mix_seed(recipe.global_seed, fnv1a("graded_mpg_" + sample.label));
            add_entry(sample, fov_tag, Split::Predict, mpg, "graded_mpg_" + sample.label);
        }
    }

    // Render and write every entry. Per-entry seeds are already fixed, so
    // the parallel schedule cannot change the output.
    parallel_for(static_cast<int64_t>(manifest.entries.size()), thread_count, [&](int64_t i) {
        const auto& e = manifest.entries[static_cast<size_t>(i)];
        Image clean = e.clean_source.structure ? gen_structure(*e.clean_source.structure)
                                               : ingest_clean(e.clean_source.path);
        Image degraded;
        if (e.artifact.level && *e.artifact.level == -1) {
            GradedArtifactSpec g;
            g.kind = e.artifact.kind == ArtifactKind::Blur ? GradedKind::Blur : GradedKind::MpgNoise;
            g.start = 0.0;
            g.per_row_increase = g.kind == GradedKind::Blur ? 0.02 : 0.0;
            g.seed = e.artifact.seed;
            degraded = apply_graded(clean, g);
        } else {
            degraded = apply_artifact(clean, e.artifact);
        }
        write_image(degraded, e.image_path);
    });

    save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    return manifest;
}

} // namespace patchiq
