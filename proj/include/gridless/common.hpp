// SPDX-License-Identifier: Apache-2.0
//
// gridless: gridless channel estimation for hybrid MIMO receivers with low-resolution ADCs
// Copyright (C) 2026 The gridless authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef GRIDLESS_COMMON_HPP
#define GRIDLESS_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gridless
{
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;

// Noise is CN(0, 1) after combining, i.e. 1/2 variance per real dimension.
inline constexpr double kNoiseSigma = 0.70710678118654752440;

// Invalid configuration: bad sizes, bit depths, split fractions, sequence parameters.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Invalid data passed to an operation: dimension mismatch, out-of-range parameters, non-finite samples.
class InputError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// SplitMix64 finalizer; used to derive independent sub-seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    return mix_seed(mix_seed(a) ^ (b + 0x632BE59BD9B4E019ULL));
}

} // namespace gridless

#endif
