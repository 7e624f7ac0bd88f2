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


#include "gridless/quantizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gridless
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kLogHalf = -0.69314718055994530942;

double std_pdf(double x)
{
    if (std::isinf(x))
        return 0.0;
    return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

// int_{-h}^{h} u^2 phi(c + u) du
double centered_second_moment(double c, double h)
{
    double s = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i)
    {
        const double u = h * kGlNodes[i];
        s += kGlWeights[i] * u * u * (std_pdf(c + u) + std_pdf(c - u));
    }
    return s * h;
}

// int_{t}^{inf} (x - r)^2 phi(x) dx
double tail_second_moment(double t, double r)
{
    const double q = 0.5 * std::erfc(t * kSqrt1_2);
    const double p = std_pdf(t);
    return (1.0 + r * r) * q + t * p - 2.0 * r * p;
}

double golden_minimize_log_step(int bits)
{
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::log(1e-5), hi = std::log(4.0);
    auto f = [bits](double s) { return uniform_quantizer_mse(bits, std::exp(s)); };
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-11)
    {
        if (f1 < f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return std::exp(0.5 * (lo + hi));
}

struct TailRatios
{
    double logp;
    double ra; // phi(a) / P
    double rb; // phi(b) / P
};

// 0 < a < b <= inf, standardized units.
TailRatios upper_tail(double a, double b)
{
    const double la = log_erfc(a * kSqrt1_2);
    const double lb = std::isinf(b) ? -kInf : log_erfc(b * kSqrt1_2);
    const double logp = kLogHalf + la + std::log(-std::expm1(lb - la));
    const double ra = std::exp(-0.5 * a * a - kLogSqrt2Pi - logp);
    const double rb = std::isinf(b) ? 0.0 : std::exp(-0.5 * b * b - kLogSqrt2Pi - logp);
    return {logp, ra, rb};
}

// a <= 0 <= b; erf(b) and -erf(a) are both non-negative so the sum does not cancel.
TailRatios central(double a, double b)
{
    const double ea = std::isinf(a) ? -1.0 : std::erf(a * kSqrt1_2);
    const double eb = std::isinf(b) ? 1.0 : std::erf(b * kSqrt1_2);
    const double p = 0.5 * (eb - ea);
    return {std::log(p), std_pdf(a) / p, std_pdf(b) / p};
}

} // namespace

double QuantizerSpec::threshold(int i) const
{
    if (i <= 0)
        return -kInf;
    if (i >= levels())
        return kInf;
    return step * static_cast<double>(i - levels() / 2);
}

int QuantizerSpec::code_of(double v) const
{
    const int top = levels() - 1;
    const double guess = std::floor(v / step) + static_cast<double>(levels() / 2);
    int c = static_cast<int>(std::clamp(guess, 0.0, static_cast<double>(top)));
    while (c < top && v >= threshold(c + 1))
        ++c;
    while (c > 0 && v < threshold(c))
        --c;
    return c;
}

double uniform_quantizer_mse(int bits, double step)
{
    if (bits < 1 || bits > 12)
        throw ConfigError("uniform_quantizer_mse: bits must be in 1..12");
    if (!(step > 0.0))
        throw ConfigError("uniform_quantizer_mse: step must be positive");

    // Symmetric about zero: sum the non-negative half and double it.
    const int half = 1 << (bits - 1);
    double mse = 0.0;
    for (int i = 0; i + 1 < half; ++i)
        mse += centered_second_moment(step * (i + 0.5), 0.5 * step);
    const double t = step * (half - 1);
    mse += tail_second_moment(t, t + 0.5 * step);
    return 2.0 * mse;
}

double optimal_gaussian_step(int bits)
{
    if (bits < 1 || bits > 12)
        throw ConfigError("optimal_gaussian_step: bits must be in 1..12");
    static const std::array<double, 13> table = [] {
        std::array<double, 13> t{};
        for (int b = 1; b <= 12; ++b)
            t[b] = golden_minimize_log_step(b);
        return t;
    }();
    return table[bits];
}

QuantizerSpec design_quantizer(int bits, double per_dim_sigma)
{
    if (bits < 1 || bits > 12)
        throw ConfigError("design_quantizer: bits must be in 1..12, got " + std::to_string(bits));
    if (!(per_dim_sigma > 0.0) || !std::isfinite(per_dim_sigma))
        throw ConfigError("design_quantizer: per_dim_sigma must be positive and finite");
    return QuantizerSpec{bits, optimal_gaussian_step(bits) * per_dim_sigma, per_dim_sigma};
}

QuantizedObservation quantize(const CVec &y, const QuantizerSpec &spec)
{
    if (spec.bits < 1 || spec.bits > 12 || !(spec.step > 0.0))
        throw ConfigError("quantize: invalid quantizer spec");

    QuantizedObservation out;
    out.quantizer = spec;
    out.codes.resize(static_cast<std::size_t>(y.size()));
    out.lo.resize(y.size());
    out.up.resize(y.size());
    for (Index i = 0; i < y.size(); ++i)
    {
        const double re = y[i].real(), im = y[i].imag();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw InputError("quantize: non-finite sample at index " + std::to_string(i));
        const int cr = spec.code_of(re), ci = spec.code_of(im);
        out.codes[static_cast<std::size_t>(i)] = {cr, ci};
        out.lo[i] = {spec.threshold(cr), spec.threshold(ci)};
        out.up[i] = {spec.threshold(cr + 1), spec.threshold(ci + 1)};
    }
    return out;
}

double log_erfc(double x)
{
    if (x < 26.0)
        return std::log(std::erfc(x));
    // Asymptotic series of erfcx; at x >= 26 the truncation error is far below double precision.
    const double inv = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 8; ++k)
    {
        term *= -(2.0 * k - 1.0) * inv;
        sum += term;
    }
    return -x * x - std::log(x) - 0.5 * std::log(kPi) + std::log(sum);
}

BoxDerivatives box_loglik(double lo, double up, double mu, double sigma)
{
    if (std::isnan(lo) || std::isnan(up) || !std::isfinite(mu))
        throw InputError("box_loglik: non-finite argument");
    if (!(lo < up))
        throw InputError("box_loglik: lower threshold must be below upper threshold");
    if (!(sigma > 0.0))
        throw InputError("box_loglik: sigma must be positive");

    if (std::isinf(lo) && std::isinf(up))
        return {0.0, 0.0, 0.0};

    const double a = (lo - mu) / sigma;
    const double b = (up - mu) / sigma;

    TailRatios r{};
    double sign = 1.0;
    double sa = a, sb = b;
    if (a > 0.0)
    {
        r = upper_tail(a, b);
    }
    else if (b < 0.0)
    {
        // Mirror into the upper tail; d1 flips sign, d2 does not.
        sa = -b;
        sb = -a;
        r = upper_tail(sa, sb);
        sign = -1.0;
    }
    else
    {
        r = central(a, b);
    }

    const double d1_std = r.ra - r.rb;
    const double ta = std::isinf(sa) ? 0.0 : sa * r.ra;
    const double tb = std::isinf(sb) ? 0.0 : sb * r.rb;

    BoxDerivatives out;
    out.logp = std::min(r.logp, 0.0);
    out.d1 = sign * d1_std / sigma;
    out.d2 = (ta - tb - d1_std * d1_std) / (sigma * sigma);
    return out;
}

} // namespace gridless
