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

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchiq/image.hpp"
#include "patchiq/synth.hpp"

namespace patchiq {

enum class ArtifactKind { Reference, Blur, DarkNoise, ReadoutNoise, ShotNoise, Vignetting };

std::string to_string(ArtifactKind kind);
ArtifactKind artifact_kind_from_string(const std::string& name);

// One degradation: kind, its free parameters, and the seed of the noise
// realization. Parameter keys: sigma_blur, lambda_dark, sigma2_read,
// alpha_shot, sigma_ill.
struct ArtifactSpec {
    ArtifactKind kind = ArtifactKind::Reference;
    double sigma_blur = 0.0;     // px
    double lambda_dark = 0.0;    // intensity
    double sigma2_read = 0.0;    // intensity^2
    double alpha_shot = 0.0;     // dimensionless
    double sigma_ill = 0.0;      // fraction of lateral size
    uint64_t seed = 0;
    std::optional<int> level;    // fixed-level sets (noise-free presets)

    void validate() const;
};

nlohmann::json to_json(const ArtifactSpec& spec);
ArtifactSpec artifact_spec_from_json(const nlohmann::json& j);

// Gaussian convolution, kernel truncated at +/-4 sigma and renormalized,
// mirrored boundaries. sigma = 0 is the identity.
Image apply_blur(const Image& image, double sigma_blur);

// Mixed Poisson-Gaussian noise, before the clamp-and-rescale step:
// out = Poisson(lambda_dark) + N(0, sigma2_read) + shot(s), where the
// signal-dependent shot term has mean s and variance alpha_shot * s
// (Gaussian surrogate; intensities live in [0,1] where an integer Poisson
// draw would be degenerate).
Image apply_mpg_noise_raw(const Image& image, double lambda_dark, double sigma2_read,
                          double alpha_shot, uint64_t seed);

// apply_mpg_noise_raw followed by rescale_unit.
Image apply_mpg_noise(const Image& image, double lambda_dark, double sigma2_read,
                      double alpha_shot, uint64_t seed);

// Multiply by a max-normalized Gaussian illumination mask centered on the
// image center; sigma_ill is a fraction of the lateral size (max dimension).
Image apply_vignetting(const Image& image, double sigma_ill);

// Full recipe for one entry: blur / vignetting first, then the noise terms,
// then clamp-and-rescale.
Image apply_artifact(const Image& clean, const ArtifactSpec& spec);

// Artifact parameter that grows linearly from the top row down
// (start + r * per_row_increase on row r).
enum class GradedKind { Blur, MpgNoise };

struct GradedArtifactSpec {
    GradedKind kind = GradedKind::Blur;
    double start = 0.0;
    double per_row_increase = 0.0;        // blur: sigma per row
    // MPG gradient: per-parameter increments (Supp-table style defaults).
    double inc_lambda_dark = 0.001;
    double inc_sigma2_read = 0.007;
    double inc_alpha_shot = 0.007;
    uint64_t seed = 0;
};

Image apply_graded(const Image& image, const GradedArtifactSpec& spec);

// Draw the free parameter of `kind` from the sampling regime
// Normal((min+max)/2, (max-min)/4) clipped to [min, max]; blur and
// vignetting entries carry the fixed low-noise baseline triplet.
ArtifactSpec sample_artifact_params(ArtifactKind kind, std::mt19937_64& rng);

// Parameter table for the sampled regimes (min, max per kind).
struct ParamRange { double min, max; };
ParamRange sampled_param_range(ArtifactKind kind);

constexpr double kBaselineNoise = 0.005;      // sampled-dataset reference triplet
constexpr double kNoiseFreeReference = 0.05;  // fixed-level reference triplet

// Fixed artifact levels of the noise-free prediction sets.
extern const std::array<double, 5> kNoiseFreeBlurLevels;
extern const std::array<double, 5> kNoiseFreeVignettingLevels;

// ---- dataset assembly ----

enum class Split { Train, Val, Test, Predict };
std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct CleanSource {
    // Either a parametric structure or a path to a user image.
    std::optional<StructureSpec> structure;
    std::string path;                        // used when structure is unset
    std::string sample_label;                // bookkeeping name
};

struct ManifestEntry {
    std::string id;
    CleanSource clean_source;
    ArtifactSpec artifact;
    Split split = Split::Train;
    std::string image_path;                  // written degraded image (.f32)
    std::optional<double> label;
};

struct DatasetManifest {
    int version = 1;
    uint64_t global_seed = 0;
    std::string preset;
    std::vector<ManifestEntry> entries;

    std::vector<const ManifestEntry*> split_entries(Split split) const;
    const ManifestEntry& by_id(const std::string& id) const;
};

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// Corpus recipe: clean sources x FOV counts x artifact kinds per split.
struct DatasetRecipe {
    std::string name = "custom";
    std::vector<StructureKind> structures;
    std::vector<std::string> clean_paths;    // optional experimental samples
    int fov_train = 0, fov_val = 0, fov_test = 0;
    int image_size = 512;
    int objects_per_fov = 40;
    double obj_size_min = 4.0, obj_size_max = 12.0;
    uint64_t global_seed = 0;
    bool noise_free_sets = false;            // emit the fixed-level prediction sets
    int noise_free_fovs = 1;                 // FOVs per sample in those sets
    bool graded_sets = false;                // emit graded blur / MPG images
};

DatasetRecipe paper_recipe(uint64_t global_seed);
DatasetRecipe desk_recipe(uint64_t global_seed);
DatasetRecipe noisefree_recipe(uint64_t global_seed);
DatasetRecipe graded_recipe(uint64_t global_seed);

// Generate every image of the recipe, write them (and manifest.json)
// under out_dir. Deterministic in (recipe, global_seed).
DatasetManifest build_dataset(const DatasetRecipe& recipe, const std::string& out_dir,
                              int thread_count = 1);

} // namespace patchiq
