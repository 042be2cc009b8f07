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

#include "plpb/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace plpb {

std::string to_string(ModelRole role) {
    switch (role) {
        case ModelRole::standard_source: return "standard_source";
        case ModelRole::robust_source: return "robust_source";
        case ModelRole::standard_target: return "standard_target";
        case ModelRole::robust_target: return "robust_target";
    }
    throw Error("to_string: bad ModelRole");
}

ModelRole role_from_string(const std::string& s) {
    if (s == "standard_source") return ModelRole::standard_source;
    if (s == "robust_source") return ModelRole::robust_source;
    if (s == "standard_target") return ModelRole::standard_target;
    if (s == "robust_target") return ModelRole::robust_target;
    throw Error("role_from_string: unknown role '" + s + "'");
}

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

constexpr double kHeadClamp = 1e-6;

// Widths of the fixed topology, derived from the descriptor.
struct Widths {
    int w0, w1, w2, wb;
    explicit Widths(const NetDescriptor& d)
        : w0(d.base_width), w1(d.base_width * 3 / 2), w2(d.base_width * 2), wb(d.base_width * 3) {}
};

struct LayerShape {
    int in_ch, out_ch, ksize;
    std::size_t weight_count() const {
        return static_cast<std::size_t>(out_ch) * in_ch * ksize * ksize;
    }
    std::size_t param_count() const { return weight_count() + out_ch; }
};

// Layer order fixes the parameter layout: weights then bias per layer.
std::vector<LayerShape> layer_shapes(const NetDescriptor& d) {
    const Widths w(d);
    return {
        {d.in_channels, w.w0, 3},  // enc0
        {w.w0, w.w1, 3},           // enc1
        {w.w1, w.w2, 3},           // enc2
        {w.w2, w.wb, 3},           // bottleneck
        {w.wb + w.w2, w.w2, 3},    // dec2
        {w.w2 + w.w1, w.w1, 3},    // dec1
        {w.w1 + w.w0, w.w0, 3},    // dec0
        {w.w0, d.classes, 1},      // mask head
        {w.w0, d.classes, 1},      // boundary head
    };
}

std::size_t total_params(const NetDescriptor& d) {
    std::size_t n = 0;
    for (const auto& s : layer_shapes(d)) n += s.param_count();
    return n;
}

// Spans into the flat parameter vector for one layer.
template <typename T>
struct LayerParams {
    const T* weights;
    const T* bias;
    LayerShape shape;
};

template <typename T>
std::vector<LayerParams<T>> layer_params(const NetDescriptor& d, const T* flat) {
    std::vector<LayerParams<T>> out;
    std::size_t offset = 0;
    for (const auto& s : layer_shapes(d)) {
        out.push_back({flat + offset, flat + offset + s.weight_count(), s});
        offset += s.param_count();
    }
    return out;
}

template <typename T>
std::vector<T>& scratch_buffer(std::size_t n) {
    thread_local std::vector<T> buf;
    if (buf.size() < n) buf.resize(n);
    return buf;
}

// im2col for 3x3, pad 1, stride 1: [C,H,W] -> [(9C) x (H*W)].
template <typename T>
void im2col3x3(const Tensor<T>& in, T* cols) {
    const int h = in.height(), w = in.width();
    const std::size_t hw = in.plane_size();
    for (int c = 0; c < in.channels(); ++c) {
        const T* src = in.plane(c);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                T* row = cols + (static_cast<std::size_t>(c) * 9 + (dy + 1) * 3 + (dx + 1)) * hw;
                for (int y = 0; y < h; ++y) {
                    T* dst = row + static_cast<std::size_t>(y) * w;
                    const int sy = y + dy;
                    if (sy < 0 || sy >= h) {
                        std::memset(dst, 0, sizeof(T) * w);
                        continue;
                    }
                    const T* s = src + static_cast<std::size_t>(sy) * w;
                    if (dx == 0) {
                        std::memcpy(dst, s, sizeof(T) * w);
                    } else if (dx < 0) {
                        dst[0] = T(0);
                        std::memcpy(dst + 1, s, sizeof(T) * (w - 1));
                    } else {
                        std::memcpy(dst, s + 1, sizeof(T) * (w - 1));
                        dst[w - 1] = T(0);
                    }
                }
            }
        }
    }
}

// Transpose of im2col3x3: accumulates column gradients back to [C,H,W].
template <typename T>
void col2im3x3(const T* cols, Tensor<T>& grad) {
    const int h = grad.height(), w = grad.width();
    const std::size_t hw = grad.plane_size();
    for (int c = 0; c < grad.channels(); ++c) {
        T* dst_plane = grad.plane(c);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const T* row = cols + (static_cast<std::size_t>(c) * 9 + (dy + 1) * 3 + (dx + 1)) * hw;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + dy;
                    if (sy < 0 || sy >= h) continue;
                    const T* s = row + static_cast<std::size_t>(y) * w;
                    T* dst = dst_plane + static_cast<std::size_t>(sy) * w;
                    const int x0 = dx < 0 ? 1 : 0;
                    const int x1 = dx > 0 ? w - 1 : w;
                    for (int x = x0; x < x1; ++x) dst[x + dx] += s[x];
                }
            }
        }
    }
}

template <typename T>
Tensor<T> conv_forward(const Tensor<T>& in, const LayerParams<T>& lp) {
    const int hw = static_cast<int>(in.plane_size());
    const LayerShape& s = lp.shape;
    Tensor<T> out(s.out_ch, in.height(), in.width());
    const int k2 = s.ksize * s.ksize;
    const int rows = s.in_ch * k2;

    const T* cols_ptr;
    if (s.ksize == 3) {
        auto& scratch = scratch_buffer<T>(static_cast<std::size_t>(rows) * hw);
        im2col3x3(in, scratch.data());
        cols_ptr = scratch.data();
    } else {
        cols_ptr = in.data();  // 1x1: input matrix is already [C x HW]
    }

    ConstMatMap<T> wmat(lp.weights, s.out_ch, rows);
    ConstMatMap<T> cols(cols_ptr, rows, hw);
    MatMap<T> dst(out.data(), s.out_ch, hw);
    dst.noalias() = wmat * cols;
    for (int oc = 0; oc < s.out_ch; ++oc) dst.row(oc).array() += lp.bias[oc];
    return out;
}

// Accumulates weight/bias gradients; optionally produces d_in.
template <typename T>
void conv_backward(const Tensor<T>& in, const Tensor<T>& d_out, const LayerParams<T>& lp,
                   T* d_weights, T* d_bias, Tensor<T>* d_in) {
    const int hw = static_cast<int>(in.plane_size());
    const LayerShape& s = lp.shape;
    const int rows = s.in_ch * s.ksize * s.ksize;

    ConstMatMap<T> dout(d_out.data(), s.out_ch, hw);

    if (d_weights) {
        const T* cols_ptr;
        // scratch id 1: forward's im2col buffer is reusable only if the
        // caller did not interleave other convs; rebuild unconditionally.
        if (s.ksize == 3) {
            auto& scratch = scratch_buffer<T>(static_cast<std::size_t>(rows) * hw);
            im2col3x3(in, scratch.data());
            cols_ptr = scratch.data();
        } else {
            cols_ptr = in.data();
        }
        ConstMatMap<T> cols(cols_ptr, rows, hw);
        MatMap<T> dw(d_weights, s.out_ch, rows);
        dw.noalias() += dout * cols.transpose();
        for (int oc = 0; oc < s.out_ch; ++oc) d_bias[oc] += dout.row(oc).sum();
    }

    if (d_in) {
        *d_in = Tensor<T>(s.in_ch, in.height(), in.width());
        ConstMatMap<T> wmat(lp.weights, s.out_ch, rows);
        if (s.ksize == 3) {
            auto& scratch = scratch_buffer<T>(static_cast<std::size_t>(rows) * hw + 1);
            MatMap<T> dcols(scratch.data(), rows, hw);
            dcols.noalias() = wmat.transpose() * dout;
            col2im3x3(scratch.data(), *d_in);
        } else {
            MatMap<T> din(d_in->data(), s.in_ch, hw);
            din.noalias() = wmat.transpose() * dout;
        }
    }
}

template <typename T>
T silu_value(T x) {
    const T s = T(1) / (T(1) + std::exp(-x));
    return x * s;
}

template <typename T>
Tensor<T> silu(const Tensor<T>& z) {
    Tensor<T> out(z.channels(), z.height(), z.width());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = silu_value(z[i]);
    return out;
}

template <typename T>
void silu_backward(const Tensor<T>& z, Tensor<T>& d) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        const T s = T(1) / (T(1) + std::exp(-z[i]));
        d[i] *= s * (T(1) + z[i] * (T(1) - s));
    }
}

template <typename T>
Tensor<T> avgpool2(const Tensor<T>& in) {
    Tensor<T> out(in.channels(), in.height() / 2, in.width() / 2);
    for (int c = 0; c < in.channels(); ++c)
        for (int y = 0; y < out.height(); ++y)
            for (int x = 0; x < out.width(); ++x)
                out.at(c, y, x) = (in.at(c, 2 * y, 2 * x) + in.at(c, 2 * y, 2 * x + 1) +
                                   in.at(c, 2 * y + 1, 2 * x) + in.at(c, 2 * y + 1, 2 * x + 1)) *
                                  T(0.25);
    return out;
}

template <typename T>
Tensor<T> avgpool2_backward(const Tensor<T>& d_out, int in_h, int in_w) {
    Tensor<T> d_in(d_out.channels(), in_h, in_w);
    for (int c = 0; c < d_out.channels(); ++c)
        for (int y = 0; y < d_out.height(); ++y)
            for (int x = 0; x < d_out.width(); ++x) {
                const T g = d_out.at(c, y, x) * T(0.25);
                d_in.at(c, 2 * y, 2 * x) = g;
                d_in.at(c, 2 * y, 2 * x + 1) = g;
                d_in.at(c, 2 * y + 1, 2 * x) = g;
                d_in.at(c, 2 * y + 1, 2 * x + 1) = g;
            }
    return d_in;
}

template <typename T>
Tensor<T> upsample2(const Tensor<T>& in) {
    Tensor<T> out(in.channels(), in.height() * 2, in.width() * 2);
    for (int c = 0; c < in.channels(); ++c)
        for (int y = 0; y < in.height(); ++y)
            for (int x = 0; x < in.width(); ++x) {
                const T v = in.at(c, y, x);
                out.at(c, 2 * y, 2 * x) = v;
                out.at(c, 2 * y, 2 * x + 1) = v;
                out.at(c, 2 * y + 1, 2 * x) = v;
                out.at(c, 2 * y + 1, 2 * x + 1) = v;
            }
    return out;
}

template <typename T>
Tensor<T> upsample2_backward(const Tensor<T>& d_out) {
    Tensor<T> d_in(d_out.channels(), d_out.height() / 2, d_out.width() / 2);
    for (int c = 0; c < d_out.channels(); ++c)
        for (int y = 0; y < d_in.height(); ++y)
            for (int x = 0; x < d_in.width(); ++x)
                d_in.at(c, y, x) = d_out.at(c, 2 * y, 2 * x) + d_out.at(c, 2 * y, 2 * x + 1) +
                                   d_out.at(c, 2 * y + 1, 2 * x) +
                                   d_out.at(c, 2 * y + 1, 2 * x + 1);
    return d_in;
}

template <typename T>
Tensor<T> concat(const Tensor<T>& a, const Tensor<T>& b) {
    Tensor<T> out(a.channels() + b.channels(), a.height(), a.width());
    std::memcpy(out.data(), a.data(), sizeof(T) * a.size());
    std::memcpy(out.data() + a.size(), b.data(), sizeof(T) * b.size());
    return out;
}

template <typename T>
void split_grad(const Tensor<T>& d_cat, int a_channels, Tensor<T>& d_a, Tensor<T>& d_b) {
    d_a = Tensor<T>(a_channels, d_cat.height(), d_cat.width());
    d_b = Tensor<T>(d_cat.channels() - a_channels, d_cat.height(), d_cat.width());
    std::memcpy(d_a.data(), d_cat.data(), sizeof(T) * d_a.size());
    std::memcpy(d_b.data(), d_cat.data() + d_a.size(), sizeof(T) * d_b.size());
}

template <typename T>
Tensor<T> head_sigmoid(const Tensor<T>& z) {
    Tensor<T> out(z.channels(), z.height(), z.width());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double p = 1.0 / (1.0 + std::exp(-static_cast<double>(z[i])));
        out[i] = static_cast<T>(std::min(1.0 - kHeadClamp, std::max(kHeadClamp, p)));
    }
    return out;
}

// d_z = d_p * p（1-p), using the clamped probability.
template <typename T>
Tensor<T> head_sigmoid_backward(const Tensor<T>& p, const Tensor<T>& d_p) {
    Tensor<T> d_z(p.channels(), p.height(), p.width());
    for (std::size_t i = 0; i < p.size(); ++i) d_z[i] = d_p[i] * p[i] * (T(1) - p[i]);
    return d_z;
}

}  // namespace

template <typename T>
SegNet<T>::SegNet(const NetDescriptor& descriptor, std::uint64_t seed)
    : desc_(descriptor), init_seed_(seed) {
    desc_.validate();
    params_.assign(total_params(desc_), T(0));
    std::size_t offset = 0;
    int layer_index = 0;
    for (const auto& s : layer_shapes(desc_)) {
        Rng rng(hash_seed(Stream::init, {seed, static_cast<std::uint64_t>(layer_index++)}));
        const double fan_in = static_cast<double>(s.in_ch) * s.ksize * s.ksize;
        const double stddev = std::sqrt(2.0 / fan_in);
        for (std::size_t i = 0; i < s.weight_count(); ++i)
            params_[offset + i] = static_cast<T>(stddev * rng.normal());
        // biases stay zero
        offset += s.param_count();
    }
}

template <typename T>
ForwardResult<T> SegNet<T>::forward(const Tensor<T>& image, bool stochastic,
                                    std::uint64_t noise_seed, ForwardTrace<T>* trace) const {
    require(!params_.empty(), "SegNet: model not initialized");
    require(image.channels() == desc_.in_channels, "SegNet::forward: channel mismatch");
    const int f = desc_.downsample_factor();
    require(image.height() % f == 0 && image.width() % f == 0,
            "SegNet::forward: spatial dims must be divisible by " + std::to_string(f));

    const auto lp = layer_params(desc_, params_.data());
    ForwardTrace<T> local;
    ForwardTrace<T>& t = trace ? *trace : local;
    t.input = image;

    t.z_e0 = conv_forward(image, lp[0]);
    t.a0 = silu(t.z_e0);
    t.z_e1 = conv_forward(avgpool2(t.a0), lp[1]);
    t.a1 = silu(t.z_e1);
    t.z_e2 = conv_forward(avgpool2(t.a1), lp[2]);
    t.a2 = silu(t.z_e2);
    t.z_b = conv_forward(avgpool2(t.a2), lp[3]);
    t.ab = silu(t.z_b);

    t.c2 = concat(upsample2(t.ab), t.a2);
    t.z_d2 = conv_forward(t.c2, lp[4]);
    t.d2 = silu(t.z_d2);

    t.c1 = concat(upsample2(t.d2), t.a1);
    t.z_d1 = conv_forward(t.c1, lp[5]);
    t.d1 = silu(t.z_d1);

    Tensor<T> d1_dropped = t.d1;
    if (stochastic && desc_.dropout_rate > 0.0f) {
        // Inverted dropout so deterministic and stochastic passes share scale.
        const double keep = 1.0 - desc_.dropout_rate;
        Rng rng(hash_seed(Stream::dropout, {noise_seed}));
        t.drop_mask = Tensor<T>(t.d1.channels(), t.d1.height(), t.d1.width());
        for (std::size_t i = 0; i < t.drop_mask.size(); ++i)
            t.drop_mask[i] = rng.uniform() < keep ? static_cast<T>(1.0 / keep) : T(0);
        for (std::size_t i = 0; i < d1_dropped.size(); ++i) d1_dropped[i] *= t.drop_mask[i];
    } else {
        t.drop_mask = Tensor<T>();
    }

    t.c0 = concat(upsample2(d1_dropped), t.a0);
    t.z_d0 = conv_forward(t.c0, lp[6]);
    t.d0 = silu(t.z_d0);

    t.mask_prob = head_sigmoid(conv_forward(t.d0, lp[7]));
    t.boundary_pred = head_sigmoid(conv_forward(t.d0, lp[8]));

    ForwardResult<T> out;
    out.mask_prob = t.mask_prob;
    out.boundary_pred = t.boundary_pred;
    out.features = t.d0;
    return out;
}

template <typename T>
void SegNet<T>::backward(const ForwardTrace<T>& trace, const Tensor<T>* d_mask_prob,
                         const Tensor<T>* d_boundary_pred, std::vector<T>* param_grads,
                         Tensor<T>* d_image) const {
    require(d_mask_prob || d_boundary_pred, "SegNet::backward: no output gradient given");
    require(!trace.d0.empty(), "SegNet::backward: trace is empty");
    if (param_grads) {
        require(param_grads->size() == params_.size(),
                "SegNet::backward: param_grads must match parameter_count()");
    }

    const auto lp = layer_params(desc_, params_.data());
    std::vector<std::size_t> offsets;
    offsets.reserve(lp.size());
    std::size_t off = 0;
    for (const auto& s : layer_shapes(desc_)) {
        offsets.push_back(off);
        off += s.param_count();
    }
    auto dw = [&](int layer) -> T* {
        return param_grads ? param_grads->data() + offsets[layer] : nullptr;
    };
    auto db = [&](int layer) -> T* {
        return param_grads ? param_grads->data() + offsets[layer] + lp[layer].shape.weight_count()
                           : nullptr;
    };

    // Heads into shared feature gradient.
    Tensor<T> d_d0(trace.d0.channels(), trace.d0.height(), trace.d0.width());
    if (d_mask_prob) {
        const Tensor<T> d_zm = head_sigmoid_backward(trace.mask_prob, *d_mask_prob);
        Tensor<T> part;
        conv_backward(trace.d0, d_zm, lp[7], dw(7), db(7), &part);
        for (std::size_t i = 0; i < d_d0.size(); ++i) d_d0[i] += part[i];
    }
    if (d_boundary_pred) {
        const Tensor<T> d_zb = head_sigmoid_backward(trace.boundary_pred, *d_boundary_pred);
        Tensor<T> part;
        conv_backward(trace.d0, d_zb, lp[8], dw(8), db(8), &part);
        for (std::size_t i = 0; i < d_d0.size(); ++i) d_d0[i] += part[i];
    }

    // dec0
    silu_backward(trace.z_d0, d_d0);
    Tensor<T> d_c0;
    conv_backward(trace.c0, d_d0, lp[6], dw(6), db(6), &d_c0);
    Tensor<T> d_u0, d_a0_skip;
    split_grad(d_c0, trace.d1.channels(), d_u0, d_a0_skip);
    Tensor<T> d_d1 = upsample2_backward(d_u0);
    if (!trace.drop_mask.empty())
        for (std::size_t i = 0; i < d_d1.size(); ++i) d_d1[i] *= trace.drop_mask[i];

    // dec1
    silu_backward(trace.z_d1, d_d1);
    Tensor<T> d_c1;
    conv_backward(trace.c1, d_d1, lp[5], dw(5), db(5), &d_c1);
    Tensor<T> d_u1, d_a1_skip;
    split_grad(d_c1, trace.d2.channels(), d_u1, d_a1_skip);
    Tensor<T> d_d2 = upsample2_backward(d_u1);

    // dec2
    silu_backward(trace.z_d2, d_d2);
    Tensor<T> d_c2;
    conv_backward(trace.c2, d_d2, lp[4], dw(4), db(4), &d_c2);
    Tensor<T> d_ub, d_a2_skip;
    split_grad(d_c2, trace.ab.channels(), d_ub, d_a2_skip);
    Tensor<T> d_ab = upsample2_backward(d_ub);

    // bottleneck
    silu_backward(trace.z_b, d_ab);
    Tensor<T> d_p3;
    conv_backward(avgpool2(trace.a2), d_ab, lp[3], dw(3), db(3), &d_p3);
    Tensor<T> d_a2 = avgpool2_backward(d_p3, trace.a2.height(), trace.a2.width());
    for (std::size_t i = 0; i < d_a2.size(); ++i) d_a2[i] += d_a2_skip[i];

    // enc2
    silu_backward(trace.z_e2, d_a2);
    Tensor<T> d_p2;
    conv_backward(avgpool2(trace.a1), d_a2, lp[2], dw(2), db(2), &d_p2);
    Tensor<T> d_a1 = avgpool2_backward(d_p2, trace.a1.height(), trace.a1.width());
    for (std::size_t i = 0; i < d_a1.size(); ++i) d_a1[i] += d_a1_skip[i];

    // enc1
    silu_backward(trace.z_e1, d_a1);
    Tensor<T> d_p1;
    conv_backward(avgpool2(trace.a0), d_a1, lp[1], dw(1), db(1), &d_p1);
    Tensor<T> d_a0 = avgpool2_backward(d_p1, trace.a0.height(), trace.a0.width());
    for (std::size_t i = 0; i < d_a0.size(); ++i) d_a0[i] += d_a0_skip[i];

    // enc0
    silu_backward(trace.z_e0, d_a0);
    conv_backward(trace.input, d_a0, lp[0], dw(0), db(0), d_image);
}

template class SegNet<float>;
template class SegNet<double>;

// --- checkpoint io ----------------------------------------------------

namespace {

constexpr char kMagic[8] = {'P', 'L', 'P', 'B', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

nlohmann::json descriptor_to_json(const NetDescriptor& d) {
    return {{"in_channels", d.in_channels},
            {"classes", d.classes},
            {"base_width", d.base_width},
            {"dropout_rate", d.dropout_rate}};
}

NetDescriptor descriptor_from_json(const nlohmann::json& j) {
    NetDescriptor d;
    d.in_channels = j.at("in_channels").get<int>();
    d.classes = j.at("classes").get<int>();
    d.base_width = j.at("base_width").get<int>();
    d.dropout_rate = j.at("dropout_rate").get<float>();
    d.validate();
    return d;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

}  // namespace

void save_checkpoint(const std::string& path, const SegNet32& model, const CheckpointMeta& meta) {
    nlohmann::json header{{"descriptor", descriptor_to_json(meta.descriptor)},
                          {"seed", meta.seed},
                          {"role", to_string(meta.role)},
                          {"param_count", model.parameter_count()}};
    if (!meta.extra_json.empty()) header["extra"] = nlohmann::json::parse(meta.extra_json);
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    require(out.good(), "save_checkpoint: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(header_str.size()));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));

    static_assert(sizeof(float) == 4);
    // Little-endian hosts only; fine for the supported platforms.
    out.write(reinterpret_cast<const char*>(model.parameters().data()),
              static_cast<std::streamsize>(model.parameter_count() * sizeof(float)));
    require(out.good(), "save_checkpoint: write failed for " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "load_checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
            "load_checkpoint: bad magic in " + path);
    const std::uint32_t version = read_u32(in);
    require(version == kVersion, "load_checkpoint: unsupported version in " + path);
    const std::uint32_t header_len = read_u32(in);
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), header_len);
    require(in.good(), "load_checkpoint: truncated header in " + path);

    const nlohmann::json header = nlohmann::json::parse(header_str);
    LoadedCheckpoint out;
    out.meta.descriptor = descriptor_from_json(header.at("descriptor"));
    out.meta.seed = header.at("seed").get<std::uint64_t>();
    out.meta.role = role_from_string(header.at("role").get<std::string>());
    if (header.contains("extra")) out.meta.extra_json = header.at("extra").dump();

    out.model = SegNet32(out.meta.descriptor, out.meta.seed);
    const std::size_t n = header.at("param_count").get<std::size_t>();
    require(n == out.model.parameter_count(), "load_checkpoint: parameter count mismatch");
    in.read(reinterpret_cast<char*>(out.model.parameters().data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    require(in.good(), "load_checkpoint: truncated payload in " + path);
    return out;
}

}  // namespace plpb
