/*
 Copyright 2026 The hcpa Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Counter-based random numbers: Philox4x32-10 (Salmon, Moraes, Dror, Shaw,
// SC'11) with polar-method normals. A stream is keyed by the master seed and
// addressed by (path index, block counter), so each Monte-Carlo path owns an
// independent substream that does not depend on scheduling.

#ifndef HCPA_RNG_HPP
#define HCPA_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace hcpa {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 evaluation.
constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += W0;
            key[1] += W1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

/// Gaussian stream for one Monte-Carlo path.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

    /// Marsaglia polar method; one Philox block per attempt.
    double normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        for (;;) {
            const PhiloxBlock r = philox4x32_10({path_lo_, path_hi_, static_cast<std::uint32_t>(block_),
                                                 static_cast<std::uint32_t>(block_ >> 32)},
                                                key_);
            ++block_;
            const double v1 = 2.0 * open_unit(r[0], r[1]) - 1.0;
            const double v2 = 2.0 * open_unit(r[2], r[3]) - 1.0;
            const double s = v1 * v1 + v2 * v2;
            if (s >= 1.0 || s == 0.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v2 * f;
            have_spare_ = true;
            return v1 * f;
        }
    }

    /// Uniform on (0, 1) from 52 random bits; both ends are excluded exactly.
    static double open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
    }

private:
    PhiloxKey key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace hcpa

#endif  // HCPA_RNG_HPP
