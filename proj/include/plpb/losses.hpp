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

#include <cmath>
#include <map>
#include <string>

#include "plpb/types.hpp"

namespace plpb {

/// Clamp applied to probabilities before log terms. Model heads clamp
/// their sigmoid output with the same constant, so in the training path
/// this is a no-op.
constexpr double kProbClamp = 1e-6;

struct LossValue {
    double total = 0.0;
    std::map<std::string, double> components;
};

enum class EntropyMode {
    binary,       // -[p log p + (1-p) log(1-p)], the confidence-seeking form
    single_term,  // -p log p, the literal sum as written
};

// Losses compute values (and optional gradients w.r.t. the predictions)
// with double accumulation regardless of the tensor scalar type.

namespace detail {

template <typename T>
inline double clamped(T p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, static_cast<double>(p)));
}

}  // namespace detail

/// Source objective: mask BCE plus boundary MSE, both averaged over all
/// K*H*W pixels. total = mask + boundary.
template <typename T>
LossValue source_loss(const Tensor<T>& mask_prob, const Tensor<T>& boundary_pred,
                      const Tensor<T>& mask_gt, const Tensor<T>& boundary_gt,
                      Tensor<T>* d_mask = nullptr, Tensor<T>* d_boundary = nullptr) {
    require_same_shape(mask_prob, mask_gt, "source_loss");
    require_same_shape(boundary_pred, boundary_gt, "source_loss");
    require_same_shape(mask_prob, boundary_pred, "source_loss");
    require(is_binary(mask_gt), "source_loss: mask_gt must be binary");

    const std::size_t n = mask_prob.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    if (d_mask) *d_mask = Tensor<T>(mask_prob.channels(), mask_prob.height(), mask_prob.width());
    if (d_boundary)
        *d_boundary = Tensor<T>(mask_prob.channels(), mask_prob.height(), mask_prob.width());

    double bce = 0.0, mse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = detail::clamped(mask_prob[i]);
        const double y = mask_gt[i];
        bce -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        const double diff = static_cast<double>(boundary_pred[i]) - boundary_gt[i];
        mse += diff * diff;
        if (d_mask) (*d_mask)[i] = static_cast<T>((-y / p + (1.0 - y) / (1.0 - p)) * inv_n);
        if (d_boundary) (*d_boundary)[i] = static_cast<T>(2.0 * diff * inv_n);
    }
    LossValue out;
    out.components["mask"] = bce * inv_n;
    out.components["boundary"] = mse * inv_n;
    out.total = out.components["mask"] + out.components["boundary"];
    return out;
}

/// Masked pseudo-label BCE. Pixels with selection_mask = 0 contribute
/// exactly zero; the sum is normalized by max(1, #selected).
template <typename T>
double pseudo_seg_loss(const Tensor<T>& mask_prob, const Tensor<T>& pseudo_label,
                       const Tensor<T>& selection_mask, Tensor<T>* d_mask = nullptr,
                       bool* no_pixels_selected = nullptr) {
    require_same_shape(mask_prob, pseudo_label, "pseudo_seg_loss");
    require_same_shape(mask_prob, selection_mask, "pseudo_seg_loss");
    require(is_binary(pseudo_label), "pseudo_seg_loss: pseudo_label must be binary");
    require(is_binary(selection_mask), "pseudo_seg_loss: selection_mask must be binary");

    const std::size_t n = mask_prob.size();
    std::size_t selected = 0;
    for (std::size_t i = 0; i < n; ++i) selected += selection_mask[i] != T(0);
    if (no_pixels_selected) *no_pixels_selected = selected == 0;

    const double inv_sel = 1.0 / static_cast<double>(std::max<std::size_t>(1, selected));
    if (d_mask) *d_mask = Tensor<T>(mask_prob.channels(), mask_prob.height(), mask_prob.width());

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (selection_mask[i] == T(0)) continue;
        const double p = detail::clamped(mask_prob[i]);
        const double y = pseudo_label[i];
        sum -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        if (d_mask) (*d_mask)[i] = static_cast<T>((-y / p + (1.0 - y) / (1.0 - p)) * inv_sel);
    }
    return sum * inv_sel;
}

/// Pseudo-boundary regression: mean squared error over all pixels.
template <typename T>
double pseudo_boundary_loss(const Tensor<T>& boundary_pred, const Tensor<T>& pseudo_boundary,
                            Tensor<T>* d_boundary = nullptr) {
    require_same_shape(boundary_pred, pseudo_boundary, "pseudo_boundary_loss");
    const std::size_t n = boundary_pred.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    if (d_boundary)
        *d_boundary =
            Tensor<T>(boundary_pred.channels(), boundary_pred.height(), boundary_pred.width());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = static_cast<double>(boundary_pred[i]) - pseudo_boundary[i];
        sum += diff * diff;
        if (d_boundary) (*d_boundary)[i] = static_cast<T>(2.0 * diff * inv_n);
    }
    return sum * inv_n;
}

/// Prediction entropy, averaged over pixels. binary mode is the default;
/// single_term keeps the bare -p log p form for fidelity experiments.
/// Probabilities exactly 0 or 1 are rejected; clamp first.
template <typename T>
double entropy_loss(const Tensor<T>& mask_prob, EntropyMode mode = EntropyMode::binary,
                    Tensor<T>* d_mask = nullptr) {
    const std::size_t n = mask_prob.size();
    require(n > 0, "entropy_loss: empty tensor");
    for (std::size_t i = 0; i < n; ++i)
        require(mask_prob[i] > T(0) && mask_prob[i] < T(1),
                "entropy_loss: probabilities must be strictly inside (0,1)");

    const double inv_n = 1.0 / static_cast<double>(n);
    if (d_mask) *d_mask = Tensor<T>(mask_prob.channels(), mask_prob.height(), mask_prob.width());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = static_cast<double>(mask_prob[i]);
        if (mode == EntropyMode::binary) {
            sum -= p * std::log(p) + (1.0 - p) * std::log(1.0 - p);
            if (d_mask) (*d_mask)[i] = static_cast<T>(std::log((1.0 - p) / p) * inv_n);
        } else {
            sum -= p * std::log(p);
            if (d_mask) (*d_mask)[i] = static_cast<T>(-(std::log(p) + 1.0) * inv_n);
        }
    }
    return sum * inv_n;
}

/// Combined target objective: seg + alpha*boundary + beta*entropy.
template <typename T>
LossValue target_loss(const Tensor<T>& mask_prob, const Tensor<T>& boundary_pred,
                      const PseudoSupervisionT<T>& supervision, const LossWeights& weights,
                      EntropyMode mode = EntropyMode::binary, Tensor<T>* d_mask = nullptr,
                      Tensor<T>* d_boundary = nullptr) {
    weights.validate();

    LossValue out;
    Tensor<T> d_seg, d_ent;
    out.components["seg"] =
        pseudo_seg_loss(mask_prob, supervision.pseudo_label, supervision.selection_mask,
                        d_mask ? &d_seg : nullptr);
    out.components["boundary"] =
        pseudo_boundary_loss(boundary_pred, supervision.pseudo_boundary, d_boundary);
    out.components["entropy"] = entropy_loss(mask_prob, mode, d_mask ? &d_ent : nullptr);
    out.total = out.components["seg"] + weights.alpha * out.components["boundary"] +
                weights.beta * out.components["entropy"];

    if (d_mask) {
        *d_mask = std::move(d_seg);
        for (std::size_t i = 0; i < d_mask->size(); ++i)
            (*d_mask)[i] += static_cast<T>(weights.beta * d_ent[i]);
    }
    if (d_boundary)
        for (std::size_t i = 0; i < d_boundary->size(); ++i)
            (*d_boundary)[i] = static_cast<T>(weights.alpha * (*d_boundary)[i]);
    return out;
}

}  // namespace plpb
