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
// Shared fixtures for the unit tests.

#ifndef HCPA_TESTS_SUPPORT_HPP
#define HCPA_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "hcpa/config.hpp"
#include "hcpa/hcpa.hpp"
#include "oracles/gaussian_moments.hpp"

namespace testing_support {

inline constexpr double kLambdaA = 0.8660254037844386;  // lambda_P = 0.5

inline hcpa::ModelParams reference() { return hcpa::ModelParams{}; }

inline hcpa::Multipliers reference_mult() { return hcpa::Multipliers::from_lambda_A(kLambdaA); }

inline oracle::Params to_oracle(const hcpa::ModelParams& m, const hcpa::Multipliers& mult) {
    return {m.a, m.b, m.sigma, m.alpha, m.beta, m.T, mult.lambda_A(), mult.lambda_P()};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("hcpa-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing_support

#endif  // HCPA_TESTS_SUPPORT_HPP
