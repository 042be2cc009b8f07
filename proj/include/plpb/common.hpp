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
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace plpb {

/// Thrown on contract violations (bad shapes, invalid parameter ranges,
/// missing prerequisites). The C API translates these into error codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(what);
}

// ---------------------------------------------------------------------------
// Deterministic RNG.
//
// All randomness in the toolkit flows through this generator so that runs are
// bit-reproducible across platforms. std::mt19937 would reproduce on one
// libstdc++, but the distributions are implementation-defined; everything
// here is hand-specified instead.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Mixes an arbitrary list of integers into one seed. Used to derive
/// independent substreams, e.g. hash_seed(seed, epoch, sample_index).
inline std::uint64_t hash_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x243f6a8885a308d3ull;  // arbitrary nonzero start
    for (std::uint64_t p : parts) {
        state ^= p + 0x9e3779b97f4a7c15ull + (state << 6) + (state >> 2);
        splitmix64(state);
    }
    std::uint64_t s = state;
    return splitmix64(s);
}

/// Stream tags keep substreams for different purposes disjoint.
enum class Stream : std::uint64_t {
    geometry = 1,
    texture = 2,
    noise = 3,
    init = 4,
    shuffle = 5,
    dropout = 6,
    attack = 7,
    augment = 8,
    uncertainty = 9,
};

inline std::uint64_t hash_seed(Stream tag, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = hash_seed(parts);
    return hash_seed({static_cast<std::uint64_t>(tag), state});
}

/// xoshiro256++ with splitmix64 seeding; uniform/normal draws are fully
/// specified here so sequences never depend on the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Multiply-shift; bias is negligible for the n used here (< 2^32).
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller. Draws two uniforms per call; no
    /// cached spare, so the consumed stream length is call-count invariant.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// ---------------------------------------------------------------------------
// Deterministic fan-out.
// ---------------------------------------------------------------------------

/// Number of worker threads used by parallel_for. Overridable via the
/// PLPB_THREADS environment variable; results never depend on the value
/// because each index writes only its own slot.
int worker_threads();

/// Runs fn(i) for i in [0, n). Work items must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace plpb
