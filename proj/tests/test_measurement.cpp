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



#include "oracles.hpp"

#include "gridless/measurement.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace gridless;

namespace
{

MeasurementModel make_model(int M, int R, int K, int D, int N, double snr, std::uint64_t seed)
{
    TrainingConfig t;
    t.users = K;
    t.slots = N;
    t.snr = snr;
    PulseSpec pulse{0.35, 1.0 / 600e6, D};
    return MeasurementModel(build_pilots(t, D), build_combiners(M, R, N, seed), ArraySpec{M}, pulse);
}

cplx circular_corr(const CVec &x, int lag)
{
    const Index n = x.size();
    cplx s(0.0, 0.0);
    for (Index i = 0; i < n; ++i)
        s += x[i] * std::conj(x[(i + lag) % n]);
    return s;
}

} // namespace

TEST_CASE("Zadoff-Chu sequence basics", "[zc]")
{
    const CVec x = zc_sequence(31, 3);
    CHECK(x[0] == cplx(1.0, 0.0));
    for (Index i = 0; i < x.size(); ++i)
        CHECK(std::abs(std::abs(x[i]) - 1.0) < 1e-14);
    CHECK(std::abs(circular_corr(zc_sequence(5, 1), 1)) < 1e-12);
    for (int lag = 1; lag < 31; ++lag)
        CHECK(std::abs(circular_corr(x, lag)) < 1e-11);
    CHECK(std::abs(zc_sequence(7, 2)[3] - std::exp(cplx(0.0, -kPi * 2 * 3 * 4 / 7.0))) < 1e-14);
}

TEST_CASE("Zadoff-Chu rejects even lengths and non-coprime roots", "[zc]")
{
    CHECK_THROWS_AS(zc_sequence(8, 1), ConfigError);
    CHECK_THROWS_AS(zc_sequence(9, 3), ConfigError);
    CHECK_THROWS_AS(zc_sequence(0, 1), ConfigError);
}

TEST_CASE("even-length Chu sequence keeps the ideal periodic autocorrelation", "[zc]")
{
    for (int n : {4, 16, 400})
    {
        const CVec x = chu_sequence(n, 1);
        for (Index i = 0; i < x.size(); ++i)
            CHECK(std::abs(std::abs(x[i]) - 1.0) < 1e-13);
        for (int lag = 1; lag < std::min(n, 40); ++lag)
            CHECK(std::abs(circular_corr(x, lag)) < 1e-9 * n);
    }
    CHECK(chu_sequence(31, 1) == zc_sequence(31, 1));
}

TEST_CASE("pilot table: modulus, orthogonality and shifts", "[pilots]")
{
    for (int N : {255, 400})
    {
        TrainingConfig t;
        t.users = 4;
        t.slots = N;
        t.snr = 10.0;
        const PilotTable p = build_pilots(t, 4);
        REQUIRE(p.pilots.rows() == N);
        REQUIRE(p.pilots.cols() == 4);
        for (Index n = 0; n < N; ++n)
            for (Index k = 0; k < 4; ++k)
                CHECK(std::abs(std::abs(p.pilots(n, k)) - std::sqrt(10.0)) < 1e-12);
        const CMat gram = p.pilots.adjoint() * p.pilots;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                if (a != b)
                    CHECK(std::abs(gram(a, b)) < 1e-9 * 10.0 * N);
        // power constraint realized over the period
        CHECK((gram / N - 10.0 * CMat::Identity(4, 4)).norm() < 1e-9 * 10.0);
        // shift 0 is the base sequence
        CHECK(p.shifts[0] == 0);
        CHECK((p.pilots.col(0) - std::sqrt(10.0) * chu_sequence(N, 1)).norm() < 1e-12);
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
            {
                const int diff = std::abs(p.shifts[a] - p.shifts[b]);
                CHECK(std::min(diff, N - diff) >= 4);
            }
    }
}

TEST_CASE("pilot shifts are circular shifts of the base", "[pilots]")
{
    TrainingConfig t;
    t.users = 2;
    t.slots = 31;
    t.shifts = {0, 9};
    const PilotTable p = build_pilots(t, 3);
    for (Index n = 0; n < 31; ++n)
        CHECK(std::abs(p.pilots(n, 1) - p.pilots((n + 31 - 9) % 31, 0)) < 1e-14);
}

TEST_CASE("pilot construction rejects too many users or close shifts", "[pilots]")
{
    TrainingConfig t;
    t.users = 5;
    t.slots = 16;
    CHECK_THROWS_AS(build_pilots(t, 4), ConfigError);
    t.users = 2;
    t.shifts = {0, 2};
    CHECK_THROWS_AS(build_pilots(t, 4), ConfigError);
}

TEST_CASE("combiners: orthonormal columns of unit-modulus entries", "[combiners]")
{
    for (int M : {7, 16})
        for (int R : {1, 4, M})
        {
            const CombinerSchedule s = build_combiners(M, R, 50, 3);
            REQUIRE(s.combiners.size() == 50);
            for (const CMat &W : s.combiners)
            {
                REQUIRE(W.rows() == M);
                REQUIRE(W.cols() == R);
                CHECK((W.adjoint() * W - CMat::Identity(R, R)).norm() < 1e-12);
                for (Index i = 0; i < W.size(); ++i)
                    CHECK(std::abs(std::abs(W.data()[i]) - 1.0 / std::sqrt(M)) < 1e-14);
            }
        }
}

TEST_CASE("combiner columns are distinct circular shifts that rotate across slots", "[combiners]")
{
    const int M = 16, R = 4;
    const CombinerSchedule s = build_combiners(M, R, 40, 8);
    const CVec base = chu_sequence(M, 1) / std::sqrt(static_cast<double>(M));
    std::set<int> offsets;
    for (std::size_t n = 0; n < s.combiners.size(); ++n)
    {
        std::set<int> shifts;
        for (int r = 0; r < R; ++r)
        {
            int found = -1;
            for (int sh = 0; sh < M; ++sh)
            {
                bool match = true;
                for (int m = 0; m < M && match; ++m)
                    match = std::abs(s.combiners[n](m, r) - base[(m + sh) % M]) < 1e-12;
                if (match)
                    found = sh;
            }
            REQUIRE(found >= 0);
            shifts.insert(found);
        }
        CHECK(shifts.size() == static_cast<std::size_t>(R));
        offsets.insert(s.offsets[n]);
    }
    CHECK(offsets.size() > 1);
}

TEST_CASE("combiner schedule is reproducible from its seed", "[combiners]")
{
    const CombinerSchedule a = build_combiners(8, 2, 20, 5), b = build_combiners(8, 2, 20, 5);
    for (std::size_t n = 0; n < 20; ++n)
        CHECK(a.combiners[n] == b.combiners[n]);
    CHECK_THROWS_AS(build_combiners(4, 5, 10, 1), ConfigError);
}

TEST_CASE("pilot convolution at zero delay is the pilot itself", "[measurement]")
{
    const MeasurementModel m = make_model(4, 2, 2, 4, 31, 5.0, 1);
    for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 31; ++n)
            CHECK(std::abs(m.pilot_convolution(k, n, 0.0).value - m.pilots().pilots(n, k)) < 1e-14);
}

TEST_CASE("pilot convolution derivatives match finite differences", "[measurement][derivatives]")
{
    const MeasurementModel m = make_model(4, 2, 2, 4, 31, 5.0, 1);
    const double T = m.pulse().sample_period;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 2.99);
    for (int i = 0; i < 300; ++i)
    {
        const double tau = u(rng) * T;
        const int n = i % 31, k = i % 2;
        const DelayResponse c = m.pilot_convolution(k, n, tau);
        const cplx fd = oracle::central_diff_c([&](double t) { return m.pilot_convolution(k, n, t).value; }, tau, 1e-6 * T);
        const cplx fd2 = oracle::central_diff_c([&](double t) { return m.pilot_convolution(k, n, t).d1; }, tau, 1e-6 * T);
        CHECK(std::abs(c.d1 - fd) <= 1e-6 * std::max(std::abs(fd), std::sqrt(5.0) / T));
        CHECK(std::abs(c.d2 - fd2) <= 1e-5 * std::max(std::abs(fd2), std::sqrt(5.0) / (T * T)));
    }
}

TEST_CASE("pilot convolution scales with the pilot amplitude", "[measurement]")
{
    const MeasurementModel a = make_model(4, 2, 1, 3, 15, 1.0, 1), b = make_model(4, 2, 1, 3, 15, 9.0, 1);
    const double tau = 0.37 * a.pulse().sample_period;
    for (int n = 0; n < 15; ++n)
        CHECK(std::abs(b.pilot_convolution(0, n, tau).value - 3.0 * a.pilot_convolution(0, n, tau).value) < 1e-13);
}

TEST_CASE("atom at zero delay", "[measurement]")
{
    const MeasurementModel m = make_model(6, 3, 1, 3, 11, 2.0, 4);
    const double th = 0.4;
    const CVec a = m.atom(th, 0.0, 0);
    const CVec s = steering(th, 6).value;
    for (int n = 0; n < 11; ++n)
        CHECK((a.segment(n * 3, 3) - m.pilots().pilots(n, 0) * (m.combiner(n).adjoint() * s)).norm() < 1e-13);
}

TEST_CASE("atom equals the dense product of measurement and path matrices", "[measurement][oracle]")
{
    const MeasurementModel m = make_model(4, 2, 2, 3, 9, 3.0, 6);
    const CMat A = oracle::dense_measurement(m);
    const double T = m.pulse().sample_period;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ut(-1.5, 1.5), ud(0.0, 2.0);
    for (int i = 0; i < 20; ++i)
    {
        const PathParams p{cplx(1, 0), ut(rng), ud(rng) * T, i % 2};
        const CMat F = oracle::dense_path_matrix(PathSet{p}, 4, 2, 3, T, 0.35);
        const CVec want = A * F.col(0);
        CHECK((m.atom(p.aoa, p.delay, p.user) - want).norm() <= 1e-10 * want.norm());
    }
}

TEST_CASE("atom Jacobian matches finite differences", "[measurement][derivatives]")
{
    const MeasurementModel m = make_model(8, 4, 2, 4, 31, 3.0, 7);
    const double T = m.pulse().sample_period;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ut(-1.5, 1.5), ud(0.01, 2.99);
    for (int i = 0; i < 100; ++i)
    {
        const double th = ut(rng), tau = ud(rng) * T;
        const int k = i % 2;
        const AtomJacobian j = m.atom_jacobian(th, tau, k);
        const double h = 1e-6;
        const CVec fth = (m.atom(th + h, tau, k) - m.atom(th - h, tau, k)) / (2 * h);
        const CVec ftau = (m.atom(th, tau + h * T, k) - m.atom(th, tau - h * T, k)) / (2 * h * T);
        CHECK((j.d_theta - fth).norm() <= 1e-6 * fth.norm());
        CHECK((j.d_tau - ftau).norm() <= 1e-6 * ftau.norm());
    }
}

TEST_CASE("atom rejects out-of-range parameters", "[measurement]")
{
    const MeasurementModel m = make_model(4, 2, 2, 3, 9, 1.0, 1);
    const double T = m.pulse().sample_period;
    CHECK_THROWS_AS(m.atom(1.6, 0.0, 0), InputError);
    CHECK_THROWS_AS(m.atom(0.0, 2.5 * T, 0), InputError);
    CHECK_THROWS_AS(m.atom(0.0, -0.1 * T, 0), InputError);
    CHECK_THROWS_AS(m.atom(0.0, 0.0, 2), InputError);
    CHECK_THROWS_AS(m.atom_jacobian(0.0, 0.0, -1), InputError);
}

TEST_CASE("forward map matches dense materialization on tiny instances", "[measurement][oracle]")
{
    std::mt19937_64 rng(10);
    struct Dims
    {
        int M, R, K, D, N;
    };
    for (const Dims d : {Dims{4, 2, 1, 2, 5}, Dims{3, 3, 2, 2, 7}, Dims{5, 2, 2, 3, 8}})
    {
        const MeasurementModel m = make_model(d.M, d.R, d.K, d.D, d.N, 2.0, 3);
        const CMat A = oracle::dense_measurement(m);
        const CVec h = oracle::random_cvec(m.channel_size(), rng);
        CHECK((m.apply_forward(h) - A * h).norm() <= 1e-10);
    }
}

TEST_CASE("forward map is linear and zero for zero channel", "[measurement]")
{
    const MeasurementModel m = make_model(6, 2, 2, 3, 17, 4.0, 2);
    std::mt19937_64 rng(12);
    const CVec h1 = oracle::random_cvec(m.channel_size(), rng), h2 = oracle::random_cvec(m.channel_size(), rng);
    CHECK(m.apply_forward(CVec::Zero(m.channel_size())).norm() == 0.0);
    CHECK((m.apply_forward(h1 + h2) - m.apply_forward(h1) - m.apply_forward(h2)).norm() < 1e-12 * m.apply_forward(h1).norm());
    CHECK_THROWS_AS(m.apply_forward(CVec::Zero(m.channel_size() + 1)), InputError);
}

TEST_CASE("atoms factor the forward map", "[measurement][property]")
{
    const MeasurementModel m = make_model(8, 4, 2, 4, 40, 3.0, 5);
    const std::vector<int> L{2, 3};
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const PathSet paths = draw_paths(2, L, m.pulse(), seed);
        CVec gains(static_cast<Index>(paths.size()));
        for (std::size_t i = 0; i < paths.size(); ++i)
            gains[static_cast<Index>(i)] = paths[i].gain;
        const CVec y = m.apply_forward(assemble_channel(paths, m.array(), m.pulse(), 2).h);
        CHECK((m.atoms(paths) * gains - y).norm() <= 1e-10 * y.norm());
    }
}

TEST_CASE("noise after combining is white", "[measurement][montecarlo]")
{
    const int R = 4, N = 50;
    const MeasurementModel m = make_model(16, R, 1, 2, N, 1.0, 9);
    CMat cov = CMat::Zero(R, R);
    int count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        const CVec v = m.combined_noise(seed);
        for (int n = 0; n < N; ++n, ++count)
        {
            const CVec x = v.segment(n * R, R);
            cov += x * x.adjoint();
        }
    }
    cov /= count;
    CHECK(count == 10000);
    CHECK((cov - CMat::Identity(R, R)).cwiseAbs().maxCoeff() < 0.05);
    CHECK((m.apply_forward(CVec::Zero(m.channel_size()), 3) - m.combined_noise(3)).norm() == 0.0);
}
