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



// Command-line front end: `simulate` runs a seeded Monte Carlo experiment and writes the
// per-trial CSV (and optionally an SVG plot); `selftest` runs the built-in checks.

#include "gridless/harness.hpp"
#include "gridless/selftest.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

using namespace gridless;

std::string join(const std::vector<std::string> &items)
{
    std::string out;
    for (const std::string &s : items)
        out += (out.empty() ? "" : ",") + s;
    return out;
}

struct SimulateArgs
{
    std::string config;
    std::vector<std::string> snr_db;
    std::vector<std::string> bits;
    std::optional<int> trials;
    std::optional<std::string> seed;
    std::vector<std::string> estimators;
    std::string out;
    std::string plot;
    std::optional<int> threads;
    bool timing = false;
    bool append = false;
};

int simulate(const SimulateArgs &a)
{
    ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
    if (!a.snr_db.empty())
        apply_setting(cfg, "snr_db", join(a.snr_db));
    if (!a.bits.empty())
        apply_setting(cfg, "bits", join(a.bits));
    if (a.trials)
        apply_setting(cfg, "trials", std::to_string(*a.trials));
    if (a.seed)
        apply_setting(cfg, "seed", *a.seed);
    if (!a.estimators.empty())
        apply_setting(cfg, "estimators", join(a.estimators));
    if (a.threads)
        apply_setting(cfg, "threads", std::to_string(*a.threads));
    if (a.timing)
        cfg.record_runtime = true;
    if (!a.out.empty())
        cfg.out_csv = a.out;
    if (!a.plot.empty())
        cfg.plot_path = a.plot;
    cfg.validate();

    const ResultTable table = run_experiment(cfg);
    if (cfg.out_csv.empty())
        std::cout << format_csv(table);
    else
        write_csv(table, cfg.out_csv, a.append);
    if (!cfg.plot_path.empty())
        emit_plot(table, cfg.plot_path);

    int failed = 0;
    for (const TrialResult &r : table.rows)
        failed += !r.error.empty();
    for (const CurvePoint &p : summarize(table))
        std::fprintf(stderr, "%-16s B=%-2d snr=%6.1f dB  nmse=%8.2f dB  (%d trials)\n",
                     to_string(p.estimator).c_str(), p.bits, p.snr_db, 10.0 * std::log10(p.mean_nmse), p.count);
    if (failed > 0)
        std::fprintf(stderr, "warning: %d trial(s) failed, recorded as nan\n", failed);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Gridless channel estimation simulator for hybrid MIMO with low-resolution ADCs"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App *simulate_cmd = app.add_subcommand("simulate", "Run a Monte Carlo NMSE experiment");
    simulate_cmd->add_option("--config", sim.config, "Experiment file (key = value lines)")->check(CLI::ExistingFile);
    simulate_cmd->add_option("--snr-db", sim.snr_db, "SNR grid in dB")->delimiter(',');
    simulate_cmd->add_option("--bits", sim.bits, "ADC resolutions")->delimiter(',');
    simulate_cmd->add_option("--trials", sim.trials, "Trials per grid point");
    simulate_cmd->add_option("--seed", sim.seed, "Master seed");
    simulate_cmd->add_option("--estimators", sim.estimators, "nfcfgs_cv, ongrid_fcfgs_cv, oracle_stop")
        ->delimiter(',');
    simulate_cmd->add_option("--out", sim.out, "CSV output path (stdout if omitted)");
    simulate_cmd->add_option("--plot", sim.plot, "SVG plot output path");
    simulate_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
    simulate_cmd->add_flag("--timing", sim.timing, "Record wall-clock runtime per trial");
    simulate_cmd->add_flag("--append", sim.append, "Append to an existing CSV written with the same configuration");

    app.add_subcommand("selftest", "Run built-in oracle and property checks");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (app.got_subcommand("selftest"))
            return run_selftest(std::cout) == 0 ? 0 : 1;
        return simulate(sim);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const InputError &e)
    {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    }
    catch (const IoError &e)
    {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
