/*
 * Copyright 2026 PLPB Toolkit Contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plpb/tensor.hpp"

namespace plpb {

/// Parametric appearance of one domain. A domain is the identity render
/// plus a fixed chain of intensity shifts; identical (spec, index) pairs
/// always produce bit-identical samples.
struct DomainSpec {
    std::string domain_id;
    double gamma = 1.0;       // > 0, intensity gamma
    double contrast = 1.0;    // > 0, contrast scale around 0.5
    double blur_sigma = 0.0;  // >= 0, Gaussian blur in pixels
    double noise_std = 0.0;   // >= 0, additive Gaussian noise in [0,1] units
    double hue_shift = 0.0;   // in [-0.5, 0.5], red/blue channel cast
    std::uint64_t seed = 0;

    void validate() const;
};

/// One image with optional supervision. Channel 0 of mask/boundary is the
/// outer disc, channel 1 the inner cup; cup is always contained in disc.
/// mask and boundary are both present (labeled) or both absent.
struct ImageSample {
    Tensor32 image;  // [3,H,W] in [0,1]
    std::optional<Tensor32> mask;      // [2,H,W] binary
    std::optional<Tensor32> boundary;  // [2,H,W] in [0,1]
    std::string sample_id;
    std::string domain_id;

    bool labeled() const { return mask.has_value(); }
};

constexpr int kMaskClasses = 2;
constexpr int kImageChannels = 3;
constexpr int kDefaultImageSize = 128;

/// Renders sample `index` of a domain. Transform order is fixed:
/// base render -> gamma -> contrast -> blur -> hue shift -> noise -> clip.
ImageSample generate_sample(const DomainSpec& spec, std::uint64_t index, bool labeled,
                            int height = kDefaultImageSize, int width = kDefaultImageSize);

/// Soft boundary target from a binary mask: the 1-pixel morphological
/// gradient widened to a 2-pixel inner band, Gaussian-smoothed (sigma 1,
/// radius 3) and rescaled to peak at 1. Exactly zero away from the band;
/// an all-zero mask maps to an all-zero boundary.
Tensor32 make_boundary(const Tensor32& mask);

/// In-memory dataset: all samples of one domain split.
struct Dataset {
    DomainSpec domain;
    bool labeled = false;
    int height = 0;
    int width = 0;
    std::vector<ImageSample> samples;
};

Dataset generate_dataset(const DomainSpec& spec, std::uint64_t first_index, int count,
                         bool labeled, int height = kDefaultImageSize,
                         int width = kDefaultImageSize);

/// Writes a dataset directory: manifest.json plus, per sample, the image
/// PNG, a red/green mask PNG when labeled, and a JSON sidecar.
void write_dataset(const std::string& dir, const Dataset& dataset);

/// Reads a dataset directory written by write_dataset. Boundary maps are
/// reconstructed from the stored masks with make_boundary.
Dataset load_dataset(const std::string& dir);

}  // namespace plpb
