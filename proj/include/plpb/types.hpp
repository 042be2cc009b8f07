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

#include "plpb/tensor.hpp"

namespace plpb {

/// Which stage/flow produced a model or a supervision bundle.
enum class ModelRole { standard_source, robust_source, standard_target, robust_target };

std::string to_string(ModelRole role);
ModelRole role_from_string(const std::string& s);

/// Weights of the combined target objective: total = seg + alpha*boundary
/// + beta*entropy.
struct LossWeights {
    double alpha = 1.0;
    double beta = 0.4;

    void validate() const {
        require(alpha >= 0.0 && beta >= 0.0, "LossWeights: alpha and beta must be >= 0");
    }
};

/// L-inf PGD parameters. step_size defaults to 2.5*epsilon/steps when <= 0.
struct AttackConfig {
    double epsilon = 4.0 / 255.0;
    int steps = 20;
    double step_size = -1.0;
    bool random_start = true;
    std::uint64_t seed = 0;

    double resolved_step_size() const {
        return step_size > 0.0 ? step_size : 2.5 * epsilon / std::max(steps, 1);
    }

    void validate() const {
        require(epsilon > 0.0 && epsilon <= 1.0, "AttackConfig: epsilon must be in (0, 1]");
        require(steps >= 0, "AttackConfig: steps must be >= 0");
        require(resolved_step_size() <= epsilon + 1e-12,
                "AttackConfig: step_size must not exceed epsilon");
    }
};

/// Per-image self-training targets generated from a frozen source model.
template <typename T>
struct PseudoSupervisionT {
    Tensor<T> pseudo_label;     // binary [K,H,W]
    Tensor<T> pseudo_boundary;  // [K,H,W] in [0,1]
    Tensor<T> selection_mask;   // binary [K,H,W]
    double threshold = 0.75;
    ModelRole provenance = ModelRole::standard_source;
};

using PseudoSupervision = PseudoSupervisionT<float>;

}  // namespace plpb
