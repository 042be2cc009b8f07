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

#include "plpb/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "plpb/image_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace plpb {

void DomainSpec::validate() const {
    require(!domain_id.empty(), "DomainSpec: domain_id must not be empty");
    require(gamma > 0.0, "DomainSpec: gamma must be > 0");
    require(contrast > 0.0, "DomainSpec: contrast must be > 0");
    require(blur_sigma >= 0.0, "DomainSpec: blur_sigma must be >= 0");
    require(noise_std >= 0.0, "DomainSpec: noise_std must be >= 0");
    require(hue_shift >= -0.5 && hue_shift <= 0.5, "DomainSpec: hue_shift must be in [-0.5, 0.5]");
}

namespace {

// --- morphology (3x3 square structuring element, border = background) ---

Tensor32 erode3x3(const Tensor32& m) {
    Tensor32 out(m.channels(), m.height(), m.width(), 0.0f);
    for (int c = 0; c < m.channels(); ++c) {
        for (int y = 0; y < m.height(); ++y) {
            for (int x = 0; x < m.width(); ++x) {
                bool keep = true;
                for (int dy = -1; dy <= 1 && keep; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int yy = y + dy, xx = x + dx;
                        if (yy < 0 || yy >= m.height() || xx < 0 || xx >= m.width() ||
                            m.at(c, yy, xx) == 0.0f) {
                            keep = false;
                            break;
                        }
                    }
                }
                out.at(c, y, x) = keep ? 1.0f : 0.0f;
            }
        }
    }
    return out;
}

Tensor32 dilate3x3(const Tensor32& m) {
    Tensor32 out(m.channels(), m.height(), m.width(), 0.0f);
    for (int c = 0; c < m.channels(); ++c) {
        for (int y = 0; y < m.height(); ++y) {
            for (int x = 0; x < m.width(); ++x) {
                bool hit = false;
                for (int dy = -1; dy <= 1 && !hit; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int yy = y + dy, xx = x + dx;
                        if (yy >= 0 && yy < m.height() && xx >= 0 && xx < m.width() &&
                            m.at(c, yy, xx) != 0.0f) {
                            hit = true;
                            break;
                        }
                    }
                }
                out.at(c, y, x) = hit ? 1.0f : 0.0f;
            }
        }
    }
    return out;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

enum class Pad { zero, reflect };

// Separable Gaussian blur.
Tensor32 gaussian_blur(const Tensor32& in, double sigma, int radius, Pad pad) {
    if (sigma <= 0.0 || radius <= 0) return in;
    const auto k = gaussian_kernel(sigma, radius);
    const int h = in.height(), w = in.width();
    auto sample = [&](const Tensor32& t, int c, int y, int x) -> double {
        if (y >= 0 && y < h && x >= 0 && x < w) return t.at(c, y, x);
        if (pad == Pad::zero) return 0.0;
        y = std::clamp(y < 0 ? -y : (y >= h ? 2 * h - 2 - y : y), 0, h - 1);
        x = std::clamp(x < 0 ? -x : (x >= w ? 2 * w - 2 - x : x), 0, w - 1);
        return t.at(c, y, x);
    };
    Tensor32 tmp(in.channels(), h, w), out(in.channels(), h, w);
    for (int c = 0; c < in.channels(); ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * sample(in, c, y, x + i);
                tmp.at(c, y, x) = static_cast<float>(acc);
            }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * sample(tmp, c, y + i, x);
                out.at(c, y, x) = static_cast<float>(acc);
            }
    }
    return out;
}

// Low-frequency random field in [-1,1]: coarse grid, bilinear upsample.
Tensor32 smooth_field(Rng& rng, int channels, int h, int w, int grid) {
    std::vector<double> coarse(static_cast<std::size_t>(channels) * grid * grid);
    for (auto& v : coarse) v = rng.uniform(-1.0, 1.0);
    Tensor32 out(channels, h, w);
    for (int c = 0; c < channels; ++c) {
        for (int y = 0; y < h; ++y) {
            const double gy = static_cast<double>(y) / (h - 1) * (grid - 1);
            const int y0 = std::min(static_cast<int>(gy), grid - 2);
            const double fy = gy - y0;
            for (int x = 0; x < w; ++x) {
                const double gx = static_cast<double>(x) / (w - 1) * (grid - 1);
                const int x0 = std::min(static_cast<int>(gx), grid - 2);
                const double fx = gx - x0;
                auto at = [&](int yy, int xx) {
                    return coarse[(static_cast<std::size_t>(c) * grid + yy) * grid + xx];
                };
                const double v = (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
                                 fy * ((1 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
                out.at(c, y, x) = static_cast<float>(v);
            }
        }
    }
    return out;
}

struct EllipseGeometry {
    double cx, cy, rx, ry, angle;

    // Quadratic form value; <= 1 inside.
    double eval(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double ca = std::cos(angle), sa = std::sin(angle);
        const double u = ca * dx + sa * dy;
        const double v = -sa * dx + ca * dy;
        return (u * u) / (rx * rx) + (v * v) / (ry * ry);
    }
};

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

std::string format_sample_id(const std::string& domain_id, std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "-%05llu", static_cast<unsigned long long>(index));
    return domain_id + buf;
}

}  // namespace

Tensor32 make_boundary(const Tensor32& mask) {
    require(is_binary(mask), "make_boundary: mask must be binary");
    const Tensor32 eroded = erode3x3(mask);
    Tensor32 edge(mask.channels(), mask.height(), mask.width());
    for (std::size_t i = 0; i < mask.size(); ++i)
        edge[i] = (mask[i] != 0.0f && eroded[i] == 0.0f) ? 1.0f : 0.0f;

    // Widen the 1-pixel gradient to a 2-pixel band inside the mask.
    const Tensor32 dilated = dilate3x3(edge);
    Tensor32 band(mask.channels(), mask.height(), mask.width());
    for (std::size_t i = 0; i < mask.size(); ++i)
        band[i] = (dilated[i] != 0.0f && mask[i] != 0.0f) ? 1.0f : 0.0f;

    Tensor32 soft = gaussian_blur(band, 1.0, 3, Pad::zero);
    for (int c = 0; c < soft.channels(); ++c) {
        float peak = 0.0f;
        const float* p = soft.plane(c);
        for (std::size_t i = 0; i < soft.plane_size(); ++i) peak = std::max(peak, p[i]);
        if (peak > 0.0f) {
            float* q = soft.plane(c);
            for (std::size_t i = 0; i < soft.plane_size(); ++i) q[i] /= peak;
        }
    }
    return soft;
}

ImageSample generate_sample(const DomainSpec& spec, std::uint64_t index, bool labeled,
                            int height, int width) {
    spec.validate();
    require(height >= 16 && width >= 16, "generate_sample: image too small");

    // Geometry: outer disc plus an inner cup kept strictly inside.
    Rng geo(hash_seed(Stream::geometry, {spec.seed, index}));
    EllipseGeometry disc;
    disc.cx = width * (0.5 + geo.uniform(-0.10, 0.10));
    disc.cy = height * (0.5 + geo.uniform(-0.10, 0.10));
    disc.rx = width * geo.uniform(0.18, 0.27);
    disc.ry = height * geo.uniform(0.18, 0.27);
    disc.angle = geo.uniform(0.0, M_PI);

    const double cup_scale = geo.uniform(0.45, 0.65);
    EllipseGeometry cup = disc;
    cup.rx = disc.rx * cup_scale;
    cup.ry = disc.ry * cup_scale;
    const double max_off = (1.0 - cup_scale) * 0.4;
    cup.cx += disc.rx * geo.uniform(-max_off, max_off);
    cup.cy += disc.ry * geo.uniform(-max_off, max_off);

    // Base render: textured background, brighter disc, brightest cup.
    Rng tex(hash_seed(Stream::texture, {spec.seed, index}));
    const Tensor32 field = smooth_field(tex, 3, height, width, 9);
    static const double kBackground[3] = {0.62, 0.33, 0.18};
    static const double kDisc[3] = {0.88, 0.69, 0.38};
    static const double kCup[3] = {0.97, 0.86, 0.52};

    Tensor32 image(kImageChannels, height, width);
    const double inv_diag = 1.0 / std::hypot(width * 0.5, height * 0.5);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double ed = disc.eval(x, y);
            const double ec = cup.eval(x, y);
            const double a_disc = smoothstep(-0.12, 0.12, 1.0 - ed);
            const double a_cup = smoothstep(-0.12, 0.12, 1.0 - ec);
            const double r = std::hypot(x - width * 0.5, y - height * 0.5) * inv_diag;
            const double vignette = 1.0 - 0.30 * r * r;
            for (int c = 0; c < 3; ++c) {
                double v = kBackground[c] + 0.10 * field.at(c, y, x);
                v = v * (1.0 - a_disc) + a_disc * (kDisc[c] + 0.04 * field.at(c, y, x));
                v = v * (1.0 - a_cup) + a_cup * kCup[c];
                image.at(c, y, x) = static_cast<float>(std::clamp(v * vignette, 0.0, 1.0));
            }
        }
    }

    // Domain shift chain, fixed order.
    if (spec.gamma != 1.0)
        for (std::size_t i = 0; i < image.size(); ++i)
            image[i] = static_cast<float>(std::pow(static_cast<double>(image[i]), spec.gamma));
    if (spec.contrast != 1.0)
        for (std::size_t i = 0; i < image.size(); ++i)
            image[i] = static_cast<float>(0.5 + (image[i] - 0.5) * spec.contrast);
    if (spec.blur_sigma > 0.0) {
        const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * spec.blur_sigma)));
        image = gaussian_blur(image, spec.blur_sigma, radius, Pad::reflect);
    }
    if (spec.hue_shift != 0.0) {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                image.at(0, y, x) += static_cast<float>(spec.hue_shift);
                image.at(2, y, x) -= static_cast<float>(spec.hue_shift);
            }
    }
    if (spec.noise_std > 0.0) {
        Rng noise(hash_seed(Stream::noise, {spec.seed, index}));
        for (std::size_t i = 0; i < image.size(); ++i)
            image[i] += static_cast<float>(spec.noise_std * noise.normal());
    }
    image.clamp(0.0f, 1.0f);

    ImageSample sample;
    sample.image = std::move(image);
    sample.sample_id = format_sample_id(spec.domain_id, index);
    sample.domain_id = spec.domain_id;
    if (labeled) {
        Tensor32 mask(kMaskClasses, height, width, 0.0f);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const bool in_disc = disc.eval(x, y) <= 1.0;
                const bool in_cup = in_disc && cup.eval(x, y) <= 1.0;  // cup subset of disc
                mask.at(0, y, x) = in_disc ? 1.0f : 0.0f;
                mask.at(1, y, x) = in_cup ? 1.0f : 0.0f;
            }
        sample.boundary = make_boundary(mask);
        sample.mask = std::move(mask);
    }
    return sample;
}

Dataset generate_dataset(const DomainSpec& spec, std::uint64_t first_index, int count,
                         bool labeled, int height, int width) {
    require(count >= 0, "generate_dataset: negative count");
    Dataset ds;
    ds.domain = spec;
    ds.labeled = labeled;
    ds.height = height;
    ds.width = width;
    ds.samples.resize(count);
    parallel_for(count, [&](std::size_t i) {
        ds.samples[i] = generate_sample(spec, first_index + i, labeled, height, width);
    });
    return ds;
}

namespace {

json domain_to_json(const DomainSpec& d) {
    return json{{"domain_id", d.domain_id}, {"gamma", d.gamma},         {"contrast", d.contrast},
                {"blur_sigma", d.blur_sigma}, {"noise_std", d.noise_std}, {"hue_shift", d.hue_shift},
                {"seed", d.seed}};
}

DomainSpec domain_from_json(const json& j) {
    DomainSpec d;
    d.domain_id = j.at("domain_id").get<std::string>();
    d.gamma = j.at("gamma").get<double>();
    d.contrast = j.at("contrast").get<double>();
    d.blur_sigma = j.at("blur_sigma").get<double>();
    d.noise_std = j.at("noise_std").get<double>();
    d.hue_shift = j.at("hue_shift").get<double>();
    d.seed = j.at("seed").get<std::uint64_t>();
    d.validate();
    return d;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open for writing: " + path.string());
    out << text;
    require(out.good(), "write failed: " + path.string());
}

}  // namespace

void write_dataset(const std::string& dir, const Dataset& dataset) {
    fs::create_directories(dir);
    json samples = json::array();
    for (const auto& s : dataset.samples) {
        const std::string image_file = s.sample_id + ".png";
        write_png(fs::path(dir) / image_file, to_image8(s.image));
        json entry{{"id", s.sample_id}, {"image", image_file}, {"labeled", s.labeled()}};
        if (s.labeled()) {
            const std::string mask_file = s.sample_id + ".mask.png";
            write_png(fs::path(dir) / mask_file, to_image8(*s.mask));
            entry["mask"] = mask_file;
        }
        json sidecar{{"sample_id", s.sample_id}, {"domain_id", s.domain_id}, {"labeled", s.labeled()}};
        write_text(fs::path(dir) / (s.sample_id + ".json"), sidecar.dump(2) + "\n");
        samples.push_back(std::move(entry));
    }
    json manifest{{"domain", domain_to_json(dataset.domain)},
                  {"labeled", dataset.labeled},
                  {"height", dataset.height},
                  {"width", dataset.width},
                  {"samples", std::move(samples)}};
    write_text(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
}

Dataset load_dataset(const std::string& dir) {
    const fs::path manifest_path = fs::path(dir) / "manifest.json";
    std::ifstream in(manifest_path);
    require(in.good(), "load_dataset: cannot open " + manifest_path.string());
    json manifest = json::parse(in);

    Dataset ds;
    ds.domain = domain_from_json(manifest.at("domain"));
    ds.labeled = manifest.at("labeled").get<bool>();
    ds.height = manifest.at("height").get<int>();
    ds.width = manifest.at("width").get<int>();

    const auto& samples = manifest.at("samples");
    ds.samples.resize(samples.size());
    std::vector<json> entries(samples.begin(), samples.end());
    parallel_for(entries.size(), [&](std::size_t i) {
        const json& entry = entries[i];
        ImageSample s;
        s.sample_id = entry.at("id").get<std::string>();
        s.domain_id = ds.domain.domain_id;
        s.image = from_image8(read_png(fs::path(dir) / entry.at("image").get<std::string>()), 3);
        if (entry.at("labeled").get<bool>()) {
            Tensor32 mask =
                from_image8(read_png(fs::path(dir) / entry.at("mask").get<std::string>()), 2);
            for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = mask[k] >= 0.5f ? 1.0f : 0.0f;
            s.boundary = make_boundary(mask);
            s.mask = std::move(mask);
        }
        ds.samples[i] = std::move(s);
    });
    return ds;
}

}  // namespace plpb
