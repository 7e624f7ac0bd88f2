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


#ifndef GRIDLESS_QUANTIZER_HPP
#define GRIDLESS_QUANTIZER_HPP

#include "gridless/common.hpp"

#include <vector>

namespace gridless
{

// Uniform mid-rise quantizer applied independently to the real and imaginary part.
// Interior thresholds sit at step * (i - 2^(bits-1)), i = 1 .. 2^bits - 1; the two
// outer intervals are unbounded.
struct QuantizerSpec
{
    int bits = 1;
    double step = 1.0;
    double per_dim_sigma = 1.0;

    int levels() const { return 1 << bits; }

    // Boundary i of the interval partition, i = 0 .. levels(). Index 0 is -inf and levels() is +inf.
    double threshold(int i) const;

    // Interval index of a real sample; a sample on a threshold goes to the upper interval.
    int code_of(double v) const;
};

struct QuantizedCode
{
    int re = 0;
    int im = 0;
};

// ADC output together with the interval boundaries it implies.
struct QuantizedObservation
{
    std::vector<QuantizedCode> codes;
    CVec lo; // lower thresholds, components may be -inf
    CVec up; // upper thresholds, components may be +inf
    QuantizerSpec quantizer;

    Index size() const { return lo.size(); }
};

// Log probability that N(mu, sigma^2) falls in (lo, up) and its first two mu-derivatives.
struct BoxDerivatives
{
    double logp = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Mean squared error E(x - Q(x))^2 of the uniform quantizer for x ~ N(0, 1), with
// reconstruction points at interval midpoints (outer intervals: half a step beyond the last threshold).
double uniform_quantizer_mse(int bits, double step);

// MSE-optimal step of the uniform quantizer for a standard Gaussian input.
double optimal_gaussian_step(int bits);

QuantizerSpec design_quantizer(int bits, double per_dim_sigma);

QuantizedObservation quantize(const CVec &y, const QuantizerSpec &spec);

BoxDerivatives box_loglik(double lo, double up, double mu, double sigma);

// log(erfc(x)), accurate far into the upper tail where erfc itself underflows.
double log_erfc(double x);

} // namespace gridless

#endif
