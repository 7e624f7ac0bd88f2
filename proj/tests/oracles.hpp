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



// Independent reference computations for the tests: finite differences, dense matrices,
// quadrature and Monte Carlo. Nothing here calls the code under test except for read-only
// accessors (pilot table, combiners) that define the instance.

#ifndef GRIDLESS_TEST_ORACLES_HPP
#define GRIDLESS_TEST_ORACLES_HPP

#include "gridless/measurement.hpp"
#include "gridless/quantizer.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace oracle
{

using gridless::cplx;
using gridless::CMat;
using gridless::CVec;
using gridless::Index;

inline double central_diff(const std::function<double(double)> &f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline cplx central_diff_c(const std::function<cplx(double)> &f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// |got - want| <= tol * max(|want|, floor)
inline bool rel_close(double got, double want, double tol, double floor = 1.0)
{
    return std::abs(got - want) <= tol * std::max(std::abs(want), floor);
}

inline double phi(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int n = 4000)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Raised cosine straight from its textbook definition, away from the removable points.
inline double rc_textbook(double t, double T, double beta)
{
    const double x = t / T;
    const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
    return sinc * std::cos(M_PI * beta * x) / (1.0 - 4.0 * beta * beta * x * x);
}

// E(x - Q(x))^2 for x ~ N(0, 1) by quadrature over every cell. Reconstruction points at
// cell midpoints, the outer cells at half a step beyond the last threshold.
inline double quantizer_mse(int bits, double step)
{
    const int levels = 1 << bits;
    const double half = levels / 2;
    double total = 0.0;
    for (int i = 0; i < levels; ++i)
    {
        const double lo = i == 0 ? -12.0 : step * (i - half);
        const double up = i == levels - 1 ? 12.0 : step * (i + 1 - half);
        const double rec = step * (i - half + 0.5);
        total += simpson([&](double x) { return (x - rec) * (x - rec) * phi(x); }, lo, up, 2000);
    }
    return total;
}

inline double golden_section_min(const std::function<double(double)> &f, double a, double b, double tol = 1e-10)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// P(lo < mu + sigma Z < up) by quadrature of the Gaussian density over the box, truncated to
// +-40 sigma around mu and to 12 sigma past a box edge lying in the tail.
inline double box_probability(double lo, double up, double mu, double sigma)
{
    double a = std::max(lo, mu - 40.0 * sigma), b = std::min(up, mu + 40.0 * sigma);
    if (lo > mu)
        b = std::min(b, lo + 12.0 * sigma);
    if (up < mu)
        a = std::max(a, up - 12.0 * sigma);
    if (!(b > a))
        return 0.0;
    return simpson([&](double x) { return phi((x - mu) / sigma) / sigma; }, a, b, 20000);
}

// Dense measurement matrix Abar: row n R + r, column of H[d](m, k) in the stacked channel.
// Row block n is (s_n^T kron W[n]^H) with s_n the D most recent pilot vectors, slots cyclic.
inline CMat dense_measurement(const gridless::MeasurementModel &model)
{
    const int M = model.antennas(), R = model.rf_chains(), K = model.users(), D = model.taps(),
              N = model.slots();
    CMat A = CMat::Zero(static_cast<Index>(R) * N, static_cast<Index>(M) * K * D);
    for (int n = 0; n < N; ++n)
    {
        const CMat Wh = model.combiner(n).adjoint();
        for (int d = 0; d < D; ++d)
        {
            const int slot = ((n - d) % N + N) % N;
            for (int k = 0; k < K; ++k)
            {
                const cplx s = model.pilots().pilots(slot, k);
                A.block(static_cast<Index>(n) * R, (static_cast<Index>(d) * K + k) * M, R, M) += s * Wh;
            }
        }
    }
    return A;
}

// Dense F(P): column l is the stacked channel of path l with unit gain, built tap by tap.
inline CMat dense_path_matrix(const gridless::PathSet &paths, int M, int K, int D, double T, double beta)
{
    CMat F = CMat::Zero(static_cast<Index>(M) * K * D, static_cast<Index>(paths.size()));
    for (std::size_t l = 0; l < paths.size(); ++l)
    {
        const auto &p = paths[l];
        for (int d = 0; d < D; ++d)
        {
            const double t = d * T - p.delay;
            const double pd = std::abs(std::abs(t / T) * 2.0 * beta - 1.0) < 1e-9
                                  ? rc_textbook(t + 1e-7 * T, T, beta) * 0.5 + rc_textbook(t - 1e-7 * T, T, beta) * 0.5
                                  : rc_textbook(t, T, beta);
            for (int m = 0; m < M; ++m)
                F((static_cast<Index>(d) * K + p.user) * M + m, static_cast<Index>(l)) =
                    pd * std::exp(cplx(0.0, M_PI * m * std::sin(p.aoa)));
        }
    }
    return F;
}

// ADC reconstruction: interval midpoints per real dimension, the raw sample where an interval is unbounded.
inline CVec dequantize(const gridless::QuantizedObservation &obs, const CVec &raw)
{
    CVec out(obs.size());
    auto mid = [](double lo, double up, double fallback) {
        return std::isfinite(lo) && std::isfinite(up) ? 0.5 * (lo + up) : fallback;
    };
    for (Index i = 0; i < obs.size(); ++i)
        out[i] = cplx(mid(obs.lo[i].real(), obs.up[i].real(), raw[i].real()),
                      mid(obs.lo[i].imag(), obs.up[i].imag(), raw[i].imag()));
    return out;
}

inline CVec random_cvec(Index n, std::mt19937_64 &rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    CVec v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = cplx(g(rng), g(rng));
    return v;
}

} // namespace oracle

#endif
