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
#include <string>

#include <json.hpp>

#include "patchiq/image.hpp"

namespace patchiq {

// The six parametric sample families. They are chosen to span
// localized-vs-distributed and thick-vs-thin content: compact bright
// objects (disks, blobs, rings), thin distributed ones (filaments, grid),
// and a mixture.
enum class StructureKind { Disks, Filaments, Blobs, Rings, Grid, Mixed };

std::string to_string(StructureKind kind);
StructureKind structure_kind_from_string(const std::string& name);

struct StructureSpec {
    StructureKind kind = StructureKind::Disks;
    int object_count = 0;
    double size_min = 4.0, size_max = 12.0;          // radius / width, px
    double orientation_min = 0.0, orientation_max = 6.283185307179586;
    double intensity_min = 0.5, intensity_max = 1.0; // peak amplitude
    int canvas_height = 512, canvas_width = 512;
    uint64_t seed = 0;

    void validate() const;   // throws DataError on a broken spec
};

nlohmann::json to_json(const StructureSpec& spec);
StructureSpec structure_spec_from_json(const nlohmann::json& j);

// Render the spec onto a zero background (additive, soft 1px Gaussian
// edges) and rescale to [0,1]. Pure function of the spec.
Image gen_structure(const StructureSpec& spec);

// Read a user-provided clean image and rescale it to [0,1].
Image ingest_clean(const std::string& path);

} // namespace patchiq
