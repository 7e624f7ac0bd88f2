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


#include "gridless/measurement.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace gridless
{
namespace
{

int wrap(long long i, int n)
{
    const long long r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

int circular_distance(int a, int b, int n)
{
    const int d = wrap(a - b, n);
    return std::min(d, n - d);
}

} // namespace

CVec zc_sequence(int length, int root)
{
    if (length < 1 || length % 2 == 0)
        throw ConfigError("zc_sequence: length must be odd and positive");
    if (std::gcd(root, length) != 1)
        throw ConfigError("zc_sequence: root must be coprime to length");

    CVec x(length);
    for (int n = 0; n < length; ++n)
    {
        // Reduce the exponent modulo 2 * length before scaling to keep the phase exact.
        const long long e = (static_cast<long long>(root) * n * (n + 1)) % (2LL * length);
        x[n] = std::polar(1.0, -kPi * static_cast<double>(e) / length);
    }
    return x;
}

CVec chu_sequence(int length, int root)
{
    if (length < 1)
        throw ConfigError("chu_sequence: length must be positive");
    if (length % 2 == 1)
        return zc_sequence(length, root);
    if (std::gcd(root, length) != 1)
        throw ConfigError("chu_sequence: root must be coprime to length");

    CVec x(length);
    for (int n = 0; n < length; ++n)
    {
        const long long e = (static_cast<long long>(root) * n * n) % (2LL * length);
        x[n] = std::polar(1.0, -kPi * static_cast<double>(e) / length);
    }
    return x;
}

PilotTable build_pilots(const TrainingConfig &config, int taps)
{
    const int K = config.users, N = config.slots;
    if (K < 1 || N < 1 || taps < 1)
        throw ConfigError("build_pilots: users, slots and taps must be positive");
    if (!(config.snr > 0.0) || !std::isfinite(config.snr))
        throw ConfigError("build_pilots: snr must be positive");

    std::vector<int> shifts = config.shifts;
    if (shifts.empty())
    {
        const int spacing = N / K;
        if (K > 1 && spacing < taps)
            throw ConfigError("build_pilots: not enough circular shifts for " + std::to_string(K) +
                              " users with " + std::to_string(taps) + " taps over " + std::to_string(N) +
                              " slots");
        for (int k = 0; k < K; ++k)
            shifts.push_back(k * spacing);
    }
    if (static_cast<int>(shifts.size()) != K)
        throw ConfigError("build_pilots: need one shift per user");
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j)
            if (circular_distance(shifts[i], shifts[j], N) < taps)
                throw ConfigError("build_pilots: user shifts must be at least the tap count apart");

    const CVec base = chu_sequence(N, config.zc_root);
    const double amp = std::sqrt(config.snr);
    PilotTable out{CMat(N, K), shifts, config.snr};
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
            out.pilots(n, k) = amp * base[wrap(static_cast<long long>(n) - shifts[k], N)];
    return out;
}

CombinerSchedule build_combiners(int antennas, int rf_chains, int slots, std::uint64_t seed)
{
    const int M = antennas, R = rf_chains;
    if (M < 1 || R < 1 || slots < 1)
        throw ConfigError("build_combiners: dimensions must be positive");
    if (R > M)
        throw ConfigError("build_combiners: more RF chains than antennas");

    const CVec base = chu_sequence(M, 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));

    CombinerSchedule out;
    out.stride = M / R;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> offset(0, M - 1);
    for (int n = 0; n < slots; ++n)
    {
        const int first = offset(rng);
        CMat W(M, R);
        for (int r = 0; r < R; ++r)
        {
            const int shift = wrap(static_cast<long long>(first) + static_cast<long long>(r) * out.stride, M);
            for (int m = 0; m < M; ++m)
                W(m, r) = scale * base[wrap(static_cast<long long>(m) - shift, M)];
        }
        out.combiners.push_back(std::move(W));
        out.offsets.push_back(first);
    }
    return out;
}

MeasurementModel::MeasurementModel(PilotTable pilots, CombinerSchedule combiners, ArraySpec array, PulseSpec pulse)
    : pilots_(std::move(pilots)), combiners_(std::move(combiners)), array_(array), pulse_(pulse)
{
    if (combiners_.combiners.empty() || pilots_.pilots.rows() == 0 || pilots_.pilots.cols() == 0)
        throw ConfigError("MeasurementModel: empty pilots or combiners");
    if (static_cast<Index>(combiners_.combiners.size()) != pilots_.pilots.rows())
        throw ConfigError("MeasurementModel: combiner count does not match slot count");
    if (pulse_.taps < 1 || !(pulse_.sample_period > 0.0) || pulse_.rolloff < 0.0 || pulse_.rolloff > 1.0)
        throw ConfigError("MeasurementModel: invalid pulse spec");
    const Index R = combiners_.combiners.front().cols();
    for (const CMat &W : combiners_.combiners)
        if (W.rows() != array_.antennas || W.cols() != R)
            throw ConfigError("MeasurementModel: combiner dimensions do not match the array");
}

void MeasurementModel::check_atom_args(double theta, double tau, int user, const char *who) const
{
    if (user < 0 || user >= users())
        throw InputError(std::string(who) + ": user index out of range");
    check_path_bounds(theta, tau, pulse_, who);
}

DelayResponse MeasurementModel::pilot_convolution(int user, int slot, double tau) const
{
    if (slot < 0 || slot >= slots())
        throw InputError("pilot_convolution: slot out of range");
    check_path_bounds(0.0, tau, pulse_, "pilot_convolution");
    if (user < 0 || user >= users())
        throw InputError("pilot_convolution: user index out of range");

    DelayResponse out;
    for (int d = 0; d < taps(); ++d)
    {
        const PulseSample p = rc_pulse_eval(d * pulse_.sample_period - tau, pulse_);
        const cplx s = pilots_.pilots(wrap(static_cast<long long>(slot) - d, slots()), user);
        out.value += p.value * s;
        out.d1 -= p.d1 * s;
        out.d2 += p.d2 * s;
    }
    return out;
}

DelayResponses MeasurementModel::delay_responses(int user, double tau) const
{
    const int N = slots(), D = taps();
    std::vector<PulseSample> p(static_cast<std::size_t>(D));
    for (int d = 0; d < D; ++d)
        p[static_cast<std::size_t>(d)] = rc_pulse_eval(d * pulse_.sample_period - tau, pulse_);

    DelayResponses out{CVec::Zero(N), CVec::Zero(N), CVec::Zero(N)};
    for (int n = 0; n < N; ++n)
    {
        for (int d = 0; d < D; ++d)
        {
            const cplx s = pilots_.pilots(wrap(static_cast<long long>(n) - d, N), user);
            const PulseSample &q = p[static_cast<std::size_t>(d)];
            out.value[n] += q.value * s;
            out.d1[n] -= q.d1 * s;
            out.d2[n] += q.d2 * s;
        }
    }
    return out;
}

CVec MeasurementModel::atom(double theta, double tau, int user) const
{
    check_atom_args(theta, tau, user, "atom");
    const CVec a = steering(theta, antennas()).value;
    const DelayResponses c = delay_responses(user, tau);
    const int R = rf_chains();
    CVec out(rows());
    for (int n = 0; n < slots(); ++n)
        out.segment(static_cast<Index>(n) * R, R) = c.value[n] * (combiner(n).adjoint() * a);
    return out;
}

AtomJacobian MeasurementModel::atom_jacobian(double theta, double tau, int user) const
{
    check_atom_args(theta, tau, user, "atom_jacobian");
    const SteeringVector a = steering(theta, antennas());
    const DelayResponses c = delay_responses(user, tau);
    const int R = rf_chains();
    AtomJacobian out{CVec(rows()), CVec(rows())};
    for (int n = 0; n < slots(); ++n)
    {
        const CMat &W = combiner(n);
        out.d_theta.segment(static_cast<Index>(n) * R, R) = c.value[n] * (W.adjoint() * a.d1);
        out.d_tau.segment(static_cast<Index>(n) * R, R) = c.d1[n] * (W.adjoint() * a.value);
    }
    return out;
}

CMat MeasurementModel::atoms(const PathSet &paths) const
{
    CMat out(rows(), static_cast<Index>(paths.size()));
    for (std::size_t i = 0; i < paths.size(); ++i)
        out.col(static_cast<Index>(i)) = atom(paths[i].aoa, paths[i].delay, paths[i].user);
    return out;
}

CVec MeasurementModel::apply_forward(const CVec &h) const
{
    if (h.size() != channel_size())
        throw InputError("apply_forward: channel vector has wrong length");

    const int M = antennas(), K = users(), D = taps(), N = slots(), R = rf_chains();
    CVec y(rows());
    CVec x(M);
    for (int n = 0; n < N; ++n)
    {
        x.setZero();
        for (int d = 0; d < D; ++d)
        {
            const int src = wrap(static_cast<long long>(n) - d, N);
            for (int k = 0; k < K; ++k)
                x += pilots_.pilots(src, k) * h.segment(channel_index(d, k, 0, K, M), M);
        }
        y.segment(static_cast<Index>(n) * R, R) = combiner(n).adjoint() * x;
    }
    return y;
}

CVec MeasurementModel::combined_noise(std::uint64_t noise_seed) const
{
    const int M = antennas(), N = slots(), R = rf_chains();
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> g(0.0, kNoiseSigma);
    CVec v(rows());
    CVec raw(M);
    for (int n = 0; n < N; ++n)
    {
        for (int m = 0; m < M; ++m)
        {
            const double re = g(rng);
            const double im = g(rng);
            raw[m] = {re, im};
        }
        v.segment(static_cast<Index>(n) * R, R) = combiner(n).adjoint() * raw;
    }
    return v;
}

CVec MeasurementModel::apply_forward(const CVec &h, std::uint64_t noise_seed) const
{
    return apply_forward(h) + combined_noise(noise_seed);
}

DelayResponse pilot_convolution(int user, int slot, double tau, const MeasurementModel &model)
{
    return model.pilot_convolution(user, slot, tau);
}

CVec atom(double theta, double tau, int user, const MeasurementModel &model)
{
    return model.atom(theta, tau, user);
}

AtomJacobian atom_jacobian(double theta, double tau, int user, const MeasurementModel &model)
{
    return model.atom_jacobian(theta, tau, user);
}

} // namespace gridless
