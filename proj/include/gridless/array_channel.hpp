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


#ifndef GRIDLESS_ARRAY_CHANNEL_HPP
#define GRIDLESS_ARRAY_CHANNEL_HPP

#include "gridless/common.hpp"

#include <span>
#include <vector>

namespace gridless
{

// Half-wavelength uniform linear array.
struct ArraySpec
{
    int antennas = 1;
};

struct PulseSpec
{
    double rolloff = 0.35;
    double sample_period = 1.0 / 600e6; // seconds
    int taps = 1;

    double max_delay() const { return (taps - 1) * sample_period; }
};

struct PathParams
{
    cplx gain{0.0, 0.0};
    double aoa = 0.0;   // radians, [-pi/2, pi/2]
    double delay = 0.0; // seconds, [0, (taps - 1) * sample_period]
    int user = 0;
};

using PathSet = std::vector<PathParams>;

// Taps are stacked tap-major, then user, then antenna: h[(d * K + k) * M + m] = H[d](m, k).
struct ChannelRealization
{
    PathSet paths;
    CVec h;
};

struct SteeringVector
{
    CVec value; // a(theta)[m] = exp(j pi m sin(theta))
    CVec d1;    // d a / d theta
    CVec d2;    // d^2 a / d theta^2
};

SteeringVector steering(double theta, int antennas);

struct PulseSample
{
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Raised-cosine pulse and its first two time derivatives; the removable singularities at
// t = 0 and |t| = T/(2 beta) are evaluated through an equivalent smooth factorization.
PulseSample rc_pulse_eval(double t, const PulseSpec &spec);
double rc_pulse(double t, const PulseSpec &spec);
double rc_pulse_deriv(double t, const PulseSpec &spec);

// Gains CN(0, 1), angles U[-pi/2, pi/2], delays U[0, (D-1) T]; paths are grouped by user.
PathSet draw_paths(int users, std::span<const int> paths_per_user, const PulseSpec &pulse, std::uint64_t seed);

ChannelRealization assemble_channel(const PathSet &paths, const ArraySpec &array, const PulseSpec &pulse, int users);

// Index of H[d](m, k) inside the stacked channel vector.
inline Index channel_index(int tap, int user, int antenna, int users, int antennas)
{
    return (static_cast<Index>(tap) * users + user) * antennas + antenna;
}

void check_path_bounds(double theta, double tau, const PulseSpec &pulse, const char *who);

} // namespace gridless

#endif
