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


#include "gridless/array_channel.hpp"

#include <cmath>
#include <random>

namespace gridless
{
namespace
{
constexpr double kBoundSlack = 1e-12;

struct SincTerms
{
    double s, d1, d2;
};

// sin(z)/z and its z-derivatives; Taylor series near the origin.
SincTerms sinc_z(double z)
{
    if (std::abs(z) < 0.5)
    {
        // s = sum_k (-1)^k z^(2k) / (2k+1)!
        SincTerms r{1.0, 0.0, 0.0};
        const double z2 = z * z;
        double fact = 1.0;  // (2k+1)!
        double zodd = z;    // z^(2k-1)
        double zeven = 1.0; // z^(2k-2)
        for (int k = 1; k < 12; ++k)
        {
            fact *= (2.0 * k) * (2.0 * k + 1.0);
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            r.s += sgn * zeven * z2 / fact;
            r.d1 += sgn * (2.0 * k) * zodd / fact;
            r.d2 += sgn * (2.0 * k) * (2.0 * k - 1.0) * zeven / fact;
            zodd *= z2;
            zeven *= z2;
        }
        return r;
    }
    const double s = std::sin(z), c = std::cos(z);
    return {s / z, (z * c - s) / (z * z), ((2.0 - z * z) * s - 2.0 * z * c) / (z * z * z)};
}

// Normalized sinc S(x) = sin(pi x)/(pi x) and x-derivatives.
SincTerms sinc_x(double x)
{
    const SincTerms z = sinc_z(kPi * x);
    return {z.s, kPi * z.d1, kPi * kPi * z.d2};
}

// cos(pi beta x) / (1 - 4 beta^2 x^2) for x >= 0, rewritten as (pi/4) S(y) / (1 + y) with
// y = beta x - 1/2, which is smooth through x = 1/(2 beta).
SincTerms rolloff_factor(double x, double beta)
{
    if (beta == 0.0)
        return {1.0, 0.0, 0.0};
    const double ax = std::abs(x);
    const double y = beta * ax - 0.5;
    const SincTerms s = sinc_x(y);
    const double w = 1.0 / (1.0 + y);
    const double q = s.s * w;
    const double q1 = s.d1 * w - s.s * w * w;
    const double q2 = s.d2 * w - 2.0 * s.d1 * w * w + 2.0 * s.s * w * w * w;
    const double c = 0.25 * kPi;
    const double sign = x < 0.0 ? -1.0 : 1.0;
    return {c * q, sign * c * beta * q1, c * beta * beta * q2};
}

} // namespace

void check_path_bounds(double theta, double tau, const PulseSpec &pulse, const char *who)
{
    if (!(theta >= -kPi / 2 - kBoundSlack && theta <= kPi / 2 + kBoundSlack))
        throw InputError(std::string(who) + ": angle outside [-pi/2, pi/2]");
    if (!(tau >= -kBoundSlack * pulse.sample_period && tau <= pulse.max_delay() * (1.0 + kBoundSlack)))
        throw InputError(std::string(who) + ": delay outside [0, (D-1) Ts]");
}

SteeringVector steering(double theta, int antennas)
{
    if (antennas < 1)
        throw InputError("steering: antenna count must be positive");
    if (!(theta >= -kPi / 2 - kBoundSlack && theta <= kPi / 2 + kBoundSlack))
        throw InputError("steering: angle outside [-pi/2, pi/2]");

    const double s = std::sin(theta), c = std::cos(theta);
    SteeringVector out{CVec(antennas), CVec(antennas), CVec(antennas)};
    for (int m = 0; m < antennas; ++m)
    {
        const double pm = kPi * m;
        const cplx a = std::polar(1.0, pm * s);
        const cplx g1(0.0, pm * c);
        out.value[m] = a;
        out.d1[m] = g1 * a;
        out.d2[m] = (cplx(0.0, -pm * s) + g1 * g1) * a;
    }
    return out;
}

PulseSample rc_pulse_eval(double t, const PulseSpec &spec)
{
    const double T = spec.sample_period;
    const double x = t / T;
    const SincTerms s = sinc_x(x);
    const SincTerms g = rolloff_factor(x, spec.rolloff);
    return {s.s * g.s, (s.d1 * g.s + s.s * g.d1) / T, (s.d2 * g.s + 2.0 * s.d1 * g.d1 + s.s * g.d2) / (T * T)};
}

double rc_pulse(double t, const PulseSpec &spec)
{
    return rc_pulse_eval(t, spec).value;
}

double rc_pulse_deriv(double t, const PulseSpec &spec)
{
    return rc_pulse_eval(t, spec).d1;
}

PathSet draw_paths(int users, std::span<const int> paths_per_user, const PulseSpec &pulse, std::uint64_t seed)
{
    if (users < 1 || static_cast<int>(paths_per_user.size()) != users)
        throw ConfigError("draw_paths: need one path count per user");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gain(0.0, kNoiseSigma);
    std::uniform_real_distribution<double> aoa(-kPi / 2, kPi / 2);
    std::uniform_real_distribution<double> delay(0.0, 1.0);

    PathSet paths;
    for (int k = 0; k < users; ++k)
    {
        if (paths_per_user[static_cast<std::size_t>(k)] < 1)
            throw ConfigError("draw_paths: every user needs at least one path");
        for (int l = 0; l < paths_per_user[static_cast<std::size_t>(k)]; ++l)
        {
            PathParams p;
            const double re = gain(rng);
            const double im = gain(rng);
            p.gain = {re, im};
            p.aoa = aoa(rng);
            p.delay = delay(rng) * pulse.max_delay();
            p.user = k;
            paths.push_back(p);
        }
    }
    return paths;
}

ChannelRealization assemble_channel(const PathSet &paths, const ArraySpec &array, const PulseSpec &pulse, int users)
{
    if (array.antennas < 1 || users < 1 || pulse.taps < 1)
        throw InputError("assemble_channel: dimensions must be positive");

    const int M = array.antennas, D = pulse.taps;
    ChannelRealization out{paths, CVec::Zero(static_cast<Index>(M) * users * D)};
    for (const PathParams &p : paths)
    {
        if (p.user < 0 || p.user >= users)
            throw InputError("assemble_channel: path user index out of range");
        check_path_bounds(p.aoa, p.delay, pulse, "assemble_channel");
        const CVec a = steering(p.aoa, M).value;
        for (int d = 0; d < D; ++d)
        {
            const cplx w = p.gain * rc_pulse(d * pulse.sample_period - p.delay, pulse);
            out.h.segment(channel_index(d, p.user, 0, users, M), M) += w * a;
        }
    }
    return out;
}

} // namespace gridless
