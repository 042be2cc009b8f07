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

#include <algorithm>
#include <cstddef>
#include <vector>

#include "plpb/common.hpp"

namespace plpb {

/// Dense [C, H, W] tensor, channel-major. Images use C=3, masks and
/// per-class maps use C=K=2. Value semantics throughout.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    Tensor(int channels, int height, int width, T fill = T(0))
        : c_(channels), h_(height), w_(width),
          data_(static_cast<std::size_t>(channels) * height * width, fill) {
        require(channels > 0 && height > 0 && width > 0, "Tensor: dims must be positive");
    }

    int channels() const { return c_; }
    int height() const { return h_; }
    int width() const { return w_; }
    std::size_t size() const { return data_.size(); }
    std::size_t plane_size() const { return static_cast<std::size_t>(h_) * w_; }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    T* plane(int c) { return data_.data() + static_cast<std::size_t>(c) * plane_size(); }
    const T* plane(int c) const { return data_.data() + static_cast<std::size_t>(c) * plane_size(); }

    T& at(int c, int y, int x) { return data_[idx(c, y, x)]; }
    T at(int c, int y, int x) const { return data_[idx(c, y, x)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    T operator[](std::size_t i) const { return data_[i]; }

    bool same_shape(const Tensor& o) const { return c_ == o.c_ && h_ == o.h_ && w_ == o.w_; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    void clamp(T lo, T hi) {
        for (auto& v : data_) v = std::min(hi, std::max(lo, v));
    }

    T min() const { return data_.empty() ? T(0) : *std::min_element(data_.begin(), data_.end()); }
    T max() const { return data_.empty() ? T(0) : *std::max_element(data_.begin(), data_.end()); }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(c_, h_, w_);
        for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
        return out;
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.c_ == b.c_ && a.h_ == b.h_ && a.w_ == b.w_ && a.data_ == b.data_;
    }

private:
    std::size_t idx(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * h_ + y) * w_ + x;
    }

    int c_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
};

using Tensor32 = Tensor<float>;

template <typename T>
bool is_binary(const Tensor<T>& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != T(0) && t[i] != T(1)) return false;
    return true;
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* where) {
    require(a.same_shape(b), std::string(where) + ": shape mismatch");
}

}  // namespace plpb
