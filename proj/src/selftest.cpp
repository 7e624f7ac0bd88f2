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



#include "gridless/selftest.hpp"

#include "gridless/harness.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>

namespace gridless
{

namespace
{

struct Check
{
    const char *name;
    std::function<std::string()> body; // empty string on success
};

std::string fmt(const char *format, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

double rel_err(double got, double want)
{
    return std::abs(got - want) / std::max(1e-12, std::abs(want));
}

std::string check_quantizer_step()
{
    const double c1 = optimal_gaussian_step(1), c2 = optimal_gaussian_step(2);
    if (std::abs(c1 - 1.596) > 2e-3 || std::abs(c2 - 0.996) > 2e-3)
        return fmt("c_1 = %.4f, c_2 = %.4f", c1, c2);
    return {};
}

std::string check_box_derivatives()
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i)
    {
        const double a = u(rng), w = 0.1 + std::abs(u(rng));
        const double mu = u(rng), h = 1e-5;
        const BoxDerivatives b = box_loglik(a, a + w, mu, kNoiseSigma);
        const BoxDerivatives p = box_loglik(a, a + w, mu + h, kNoiseSigma);
        const BoxDerivatives m = box_loglik(a, a + w, mu - h, kNoiseSigma);
        worst = std::max(worst, rel_err((p.logp - m.logp) / (2 * h), b.d1));
        worst = std::max(worst, rel_err((p.d1 - m.d1) / (2 * h), b.d2));
    }
    return worst < 1e-4 ? std::string() : fmt("worst relative error %.3g", worst);
}

std::string check_forward_dense()
{
    const SystemConfig sys{.antennas = 3, .rf_chains = 2, .users = 2, .taps = 2, .slots = 5,
                           .paths_per_user = {1, 1}};
    const TrialRealization tr = realize_trial(sys, 10.0, 12, 5, 0);
    const MeasurementModel &mdl = tr.model;
    const int M = 3, R = 2, K = 2, D = 2, N = 5;
    CMat dense = CMat::Zero(R * N, M * K * D);
    for (int n = 0; n < N; ++n)
        for (int r = 0; r < R; ++r)
            for (int d = 0; d < D; ++d)
                for (int k = 0; k < K; ++k)
                    for (int m = 0; m < M; ++m)
                        dense(n * R + r, channel_index(d, k, m, K, M)) =
                            std::conj(mdl.combiner(n)(m, r)) * mdl.pilots().pilots(((n - d) % N + N) % N, k);
    const double err = (dense * tr.channel.h - mdl.apply_forward(tr.channel.h)).norm();
    return err < 1e-10 ? std::string() : fmt("forward map differs by %.3g", err);
}

std::string check_score_derivatives()
{
    const SystemConfig sys{.antennas = 8, .rf_chains = 4, .users = 1, .taps = 3, .slots = 31,
                           .paths_per_user = {2}};
    const TrialRealization tr = realize_trial(sys, 10.0, 2, 3, 0);
    const CVSplit split = split_data(tr.model.rows(), 4, 0.8, 1);
    const ScoreField field(tr.model, tr.obs, split, CVec::Zero(tr.model.rows()));
    const double T = sys.sample_period;
    const double th = 0.3, tau = 0.7 * T, ht = 1e-5, hd = 1e-5 * T;
    const ScoreDerivatives s = field.derivatives(th, tau, 0);
    const double gt = (field.value(th + ht, tau, 0) - field.value(th - ht, tau, 0)) / (2 * ht);
    const double gd = (field.value(th, tau + hd, 0) - field.value(th, tau - hd, 0)) / (2 * hd);
    const double e = std::max(rel_err(s.gradient[0], gt), rel_err(s.gradient[1], gd));
    return e < 1e-5 ? std::string() : fmt("score gradient relative error %.3g", e);
}

std::string check_refit_least_squares()
{
    const SystemConfig sys{.antennas = 8, .rf_chains = 4, .users = 1, .taps = 3, .slots = 63,
                           .paths_per_user = {2}};
    const TrialRealization tr = realize_trial(sys, 10.0, 12, 9, 0);
    const CVSplit split = split_data(tr.model.rows(), 4, 0.8, 2);
    std::vector<PathEstimate> paths;
    for (const PathParams &p : tr.channel.paths)
        paths.push_back({p.aoa, p.delay, p.user});
    const CMat A = tr.model.atoms(tr.channel.paths);
    CMat Ae(static_cast<Index>(split.est_rows.size()), A.cols());
    CVec ye(Ae.rows());
    for (std::size_t i = 0; i < split.est_rows.size(); ++i)
    {
        Ae.row(static_cast<Index>(i)) = A.row(split.est_rows[i]);
        ye[static_cast<Index>(i)] = tr.received[split.est_rows[i]];
    }
    const CVec ls = Ae.colPivHouseholderQr().solve(ye);
    const RefitResult fit = refit_gains(A, tr.obs, split, CVec::Zero(A.cols()), EstimatorConfig{});
    const double e = (fit.gains - ls).norm() / ls.norm();
    return e < 1e-3 ? std::string() : fmt("relative gap to least squares %.3g", e);
}

std::string check_noiseless_recovery()
{
    const SystemConfig sys{.antennas = 16, .rf_chains = 16, .users = 1, .taps = 4, .slots = 63,
                           .paths_per_user = {1}};
    const TrialRealization base = realize_trial(sys, 30.0, 12, 4, 0);
    const CVec y = base.model.apply_forward(base.channel.h);
    double var = 0.0;
    for (Index i = 0; i < y.size(); ++i)
        var += y[i].real() * y[i].real();
    const QuantizedObservation obs = quantize(y, design_quantizer(12, std::sqrt(var / y.size())));
    EstimatorConfig cfg;
    cfg.seed = 1;
    const EstimatorResult r = run_with(obs, base.model, cfg, LoopControl{true, false, 1});
    const PathParams &p = base.channel.paths.front();
    const double dth = std::abs(r.paths.front().theta - p.aoa);
    const double dtau = std::abs(r.paths.front().tau - p.delay) / sys.sample_period;
    if (dth > 1e-3 || dtau > 1e-3)
        return fmt("angle error %.3g rad, delay error %.3g T", dth, dtau);
    return {};
}

std::string check_determinism()
{
    ExperimentConfig cfg;
    cfg.system = SystemConfig{.antennas = 8, .rf_chains = 2, .users = 1, .taps = 2, .slots = 40,
                              .paths_per_user = {2}};
    cfg.snr_grid_db = {10.0};
    cfg.bits_grid = {2};
    cfg.trials = 2;
    cfg.threads = 1;
    const std::string a = format_csv(run_experiment(cfg));
    const std::string b = format_csv(run_experiment(cfg));
    return a == b ? std::string() : std::string("two runs with the same seed differ");
}

} // namespace

int run_selftest(std::ostream &out)
{
    const Check checks[] = {
        {"quantizer step", check_quantizer_step},
        {"box log-likelihood derivatives", check_box_derivatives},
        {"forward map vs dense materialization", check_forward_dense},
        {"score gradient vs finite differences", check_score_derivatives},
        {"gain refit vs least squares at 12 bits", check_refit_least_squares},
        {"noiseless single-path refinement", check_noiseless_recovery},
        {"deterministic experiment", check_determinism},
    };
    int failures = 0;
    for (const Check &c : checks)
    {
        std::string msg;
        try
        {
            msg = c.body();
        }
        catch (const std::exception &e)
        {
            msg = std::string("exception: ") + e.what();
        }
        out << (msg.empty() ? "ok    " : "FAIL  ") << c.name;
        if (!msg.empty())
            out << ": " << msg;
        out << '\n';
        failures += !msg.empty();
    }
    out << (failures == 0 ? "selftest passed" : "selftest failed") << '\n';
    return failures;
}

} // namespace gridless
