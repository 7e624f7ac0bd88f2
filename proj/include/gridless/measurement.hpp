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


#ifndef GRIDLESS_MEASUREMENT_HPP
#define GRIDLESS_MEASUREMENT_HPP

#include "gridless/array_channel.hpp"

#include <vector>

namespace gridless
{

// Zadoff-Chu sequence of odd length: x[n] = exp(-j pi root n (n + 1) / length).
CVec zc_sequence(int length, int root);

// Constant-amplitude zero-autocorrelation sequence of any length: zc_sequence for odd
// lengths, exp(-j pi root n^2 / length) for even lengths.
CVec chu_sequence(int length, int root);

struct TrainingConfig
{
    int users = 1;
    int slots = 1;
    double snr = 1.0; // linear per-entry pilot power
    int zc_root = 1;
    std::vector<int> shifts; // per-user circular shifts; empty selects evenly spread shifts
};

// pilots(n, k) = s_k[n], one row per slot.
struct PilotTable
{
    CMat pilots;
    std::vector<int> shifts;
    double snr = 1.0;
};

PilotTable build_pilots(const TrainingConfig &config, int taps);

struct CombinerSchedule
{
    std::vector<CMat> combiners;  // M x R per slot
    std::vector<int> offsets;     // first column shift per slot
    int stride = 1;               // shift increment between columns
};

CombinerSchedule build_combiners(int antennas, int rf_chains, int slots, std::uint64_t seed);

struct DelayResponse
{
    cplx value{0.0, 0.0};
    cplx d1{0.0, 0.0}; // d / d tau
    cplx d2{0.0, 0.0};
};

// Per-slot delay responses c_k(n, tau) for all n.
struct DelayResponses
{
    CVec value, d1, d2;
};

struct AtomJacobian
{
    CVec d_theta;
    CVec d_tau;
};

// Forward map of the training phase: pilots, combiners, array and pulse. Row n * R + r of
// the measurement vector is RF chain r at slot n.
class MeasurementModel
{
  public:
    MeasurementModel(PilotTable pilots, CombinerSchedule combiners, ArraySpec array, PulseSpec pulse);

    int antennas() const { return array_.antennas; }
    int rf_chains() const { return static_cast<int>(combiners_.combiners.front().cols()); }
    int slots() const { return static_cast<int>(pilots_.pilots.rows()); }
    int users() const { return static_cast<int>(pilots_.pilots.cols()); }
    int taps() const { return pulse_.taps; }
    Index rows() const { return static_cast<Index>(rf_chains()) * slots(); }
    Index channel_size() const { return static_cast<Index>(antennas()) * users() * taps(); }

    const ArraySpec &array() const { return array_; }
    const PulseSpec &pulse() const { return pulse_; }
    const PilotTable &pilots() const { return pilots_; }
    const CombinerSchedule &schedule() const { return combiners_; }
    const CMat &combiner(int slot) const { return combiners_.combiners[static_cast<std::size_t>(slot)]; }

    // c_k(n, tau) = sum_d p(d T - tau) s_k[n - d], slot index taken modulo N.
    DelayResponse pilot_convolution(int user, int slot, double tau) const;
    DelayResponses delay_responses(int user, double tau) const;

    CVec atom(double theta, double tau, int user) const;
    AtomJacobian atom_jacobian(double theta, double tau, int user) const;

    // One atom column per path; gains are ignored.
    CMat atoms(const PathSet &paths) const;

    CVec apply_forward(const CVec &h) const;
    CVec apply_forward(const CVec &h, std::uint64_t noise_seed) const;

    // W[n]^H v[n] with v[n] ~ CN(0, I_M).
    CVec combined_noise(std::uint64_t noise_seed) const;

  private:
    void check_atom_args(double theta, double tau, int user, const char *who) const;

    PilotTable pilots_;
    CombinerSchedule combiners_;
    ArraySpec array_;
    PulseSpec pulse_;
};

DelayResponse pilot_convolution(int user, int slot, double tau, const MeasurementModel &model);
CVec atom(double theta, double tau, int user, const MeasurementModel &model);
AtomJacobian atom_jacobian(double theta, double tau, int user, const MeasurementModel &model);

} // namespace gridless

#endif
