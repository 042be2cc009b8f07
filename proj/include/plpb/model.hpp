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
#include <string>
#include <vector>

#include "plpb/types.hpp"

namespace plpb {

/// Architecture settings of the segmentation net: a U-style
/// encoder-decoder with three 2x downsampling stages (factor 8 overall),
/// skip connections, one dropout layer before the last decoder block, and
/// two sibling 1x1 heads (mask probability, boundary regression), both
/// sigmoid-squashed. Encoder widths are base, 1.5*base, 2*base with a
/// 3*base bottleneck; the full-resolution feature map has base channels.
struct NetDescriptor {
    int in_channels = 3;
    int classes = 2;
    int base_width = 16;
    float dropout_rate = 0.3f;

    int downsample_factor() const { return 8; }
    int feature_channels() const { return base_width; }

    void validate() const {
        require(in_channels >= 1 && classes >= 1, "NetDescriptor: bad channel counts");
        require(base_width >= 2 && base_width % 2 == 0,
                "NetDescriptor: base_width must be even and >= 2");
        require(dropout_rate >= 0.0f && dropout_rate < 1.0f,
                "NetDescriptor: dropout_rate must be in [0, 1)");
    }

    friend bool operator==(const NetDescriptor&, const NetDescriptor&) = default;
};

/// Outputs of one forward pass. features is the full-resolution activation
/// map feeding both heads (the penultimate layer), used for prototype
/// distances.
template <typename T>
struct ForwardResult {
    Tensor<T> mask_prob;      // [K,H,W] in (0,1)
    Tensor<T> boundary_pred;  // [K,H,W] in [0,1]
    Tensor<T> features;       // [F,H,W]
};

/// Cached activations of one forward pass, consumed by backward().
/// Owned by the caller so that concurrent read-only inference on a shared
/// net needs no synchronization. Contents are an implementation detail.
template <typename T>
struct ForwardTrace {
    Tensor<T> input;
    Tensor<T> z_e0, a0, z_e1, a1, z_e2, a2, z_b, ab;  // encoder + bottleneck
    Tensor<T> c2, z_d2, d2, c1, z_d1, d1;             // decoder stages 2, 1
    Tensor<T> drop_mask;                              // empty when not sampled
    Tensor<T> c0, z_d0, d0;                           // decoder stage 0 (features)
    Tensor<T> mask_prob, boundary_pred;
};

template <typename T>
class SegNet {
public:
    SegNet() = default;

    /// Deterministic He-style initialization from a seed.
    SegNet(const NetDescriptor& descriptor, std::uint64_t seed);

    const NetDescriptor& descriptor() const { return desc_; }
    std::uint64_t init_seed() const { return init_seed_; }

    std::vector<T>& parameters() { return params_; }
    const std::vector<T>& parameters() const { return params_; }
    std::size_t parameter_count() const { return params_.size(); }

    /// Runs the net on one [C,H,W] image (H, W divisible by the
    /// downsample factor). stochastic=true samples the dropout layer from
    /// noise_seed; otherwise the pass is deterministic and noise_seed is
    /// ignored. Pass a trace to enable backward().
    ForwardResult<T> forward(const Tensor<T>& image, bool stochastic = false,
                             std::uint64_t noise_seed = 0, ForwardTrace<T>* trace = nullptr) const;

    /// Backpropagates loss gradients w.r.t. the two head outputs through
    /// the trace of the matching forward call. Either output may be null.
    /// param_grads is accumulated into (callers zero it between batches).
    void backward(const ForwardTrace<T>& trace, const Tensor<T>* d_mask_prob,
                  const Tensor<T>* d_boundary_pred, std::vector<T>* param_grads,
                  Tensor<T>* d_image = nullptr) const;

private:
    NetDescriptor desc_;
    std::uint64_t init_seed_ = 0;
    std::vector<T> params_;
};

using SegNet32 = SegNet<float>;
using SegNet64 = SegNet<double>;

inline SegNet32 init_model(std::uint64_t seed, const NetDescriptor& descriptor = {}) {
    return SegNet32(descriptor, seed);
}

/// Copy with value semantics; spelled out because flows are defined in
/// terms of which source model the target is cloned from.
template <typename T>
SegNet<T> clone_model(const SegNet<T>& model) {
    return model;
}

// --- checkpoint files -------------------------------------------------
// Layout: 8-byte magic "PLPBCKPT", u32 version, u32 JSON header length,
// header bytes, then the parameter vector as little-endian float32.

struct CheckpointMeta {
    NetDescriptor descriptor;
    std::uint64_t seed = 0;
    ModelRole role = ModelRole::standard_source;
    std::string extra_json;  // optional config snapshot / loss trace blob
};

void save_checkpoint(const std::string& path, const SegNet32& model, const CheckpointMeta& meta);

struct LoadedCheckpoint {
    SegNet32 model;
    CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace plpb
