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


#include "gridless/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace gridless
{
namespace
{

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

int to_int(const std::string &key, const std::string &v)
{
    std::size_t pos = 0;
    int out = 0;
    try
    {
        out = std::stoi(v, &pos);
    }
    catch (const std::exception &)
    {
        pos = 0;
    }
    if (pos == 0 || pos != v.size())
        throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

double to_double(const std::string &key, const std::string &v)
{
    std::size_t pos = 0;
    double out = 0.0;
    try
    {
        out = std::stod(v, &pos);
    }
    catch (const std::exception &)
    {
        pos = 0;
    }
    if (pos == 0 || pos != v.size())
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string &key, const std::string &v)
{
    std::size_t pos = 0;
    std::uint64_t out = 0;
    try
    {
        if (!v.empty() && v.front() != '-')
            out = std::stoull(v, &pos);
    }
    catch (const std::exception &)
    {
        pos = 0;
    }
    if (pos == 0 || pos != v.size())
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string &key, const std::string &v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw ConfigError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string fmt_double(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T> &items, F &&fmt)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
    {
        if (i)
            out += ',';
        out += fmt(items[i]);
    }
    return out;
}

std::uint64_t fnv1a(const void *data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL)
{
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i)
    {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

// ------------------------------------------------------------------------
// Configuration
// ------------------------------------------------------------------------

std::string to_string(EstimatorKind kind)
{
    switch (kind)
    {
    case EstimatorKind::nfcfgs_cv:
        return "nfcfgs_cv";
    case EstimatorKind::ongrid_fcfgs_cv:
        return "ongrid_fcfgs_cv";
    case EstimatorKind::oracle_stop:
        return "oracle_stop";
    }
    return "unknown";
}

EstimatorKind parse_estimator(const std::string &name)
{
    if (name == "nfcfgs_cv")
        return EstimatorKind::nfcfgs_cv;
    if (name == "ongrid_fcfgs_cv")
        return EstimatorKind::ongrid_fcfgs_cv;
    if (name == "oracle_stop")
        return EstimatorKind::oracle_stop;
    throw ConfigError("unknown estimator '" + name + "' (expected nfcfgs_cv, ongrid_fcfgs_cv or oracle_stop)");
}

int SystemConfig::total_paths() const
{
    int n = 0;
    for (int l : paths_per_user)
        n += l;
    return n;
}

void SystemConfig::validate() const
{
    if (antennas < 1 || rf_chains < 1 || users < 1 || taps < 1 || slots < 1)
        throw ConfigError("system: M, R, K, D and N must be positive");
    if (rf_chains > antennas)
        throw ConfigError("system: R must not exceed M");
    if (!(sample_period > 0.0))
        throw ConfigError("system: Ts must be positive");
    if (rolloff < 0.0 || rolloff > 1.0)
        throw ConfigError("system: rolloff must lie in [0, 1]");
    if (static_cast<int>(paths_per_user.size()) != users)
        throw ConfigError("system: need one path count per user");
    for (int l : paths_per_user)
        if (l < 1)
            throw ConfigError("system: every user needs at least one path");
    if (users > 1 && slots / users < taps)
        throw ConfigError("system: N too short to separate the users' pilot shifts");
}

void ExperimentConfig::validate() const
{
    system.validate();
    if (trials < 0)
        throw ConfigError("trials must be non-negative");
    if (bits_grid.empty() || snr_grid_db.empty() || estimators.empty())
        throw ConfigError("snr_db, bits and estimators must be non-empty");
    for (int b : bits_grid)
        if (b < 1 || b > 12)
            throw ConfigError("bits must lie in 1..12");
    for (double s : snr_grid_db)
        if (!std::isfinite(s))
            throw ConfigError("snr_db entries must be finite");
    if (!(estimator.cv_fraction > 0.0 && estimator.cv_fraction < 1.0))
        throw ConfigError("cv_fraction must lie in (0, 1)");
}

void apply_setting(ExperimentConfig &c, const std::string &key, const std::string &raw)
{
    const std::string v = trim(raw);
    SystemConfig &s = c.system;
    EstimatorConfig &e = c.estimator;
    if (key == "M")
        s.antennas = to_int(key, v);
    else if (key == "R")
        s.rf_chains = to_int(key, v);
    else if (key == "K")
    {
        s.users = to_int(key, v);
        if (static_cast<int>(s.paths_per_user.size()) != s.users && !s.paths_per_user.empty())
            s.paths_per_user.assign(static_cast<std::size_t>(std::max(s.users, 0)), s.paths_per_user.front());
    }
    else if (key == "D")
        s.taps = to_int(key, v);
    else if (key == "N")
        s.slots = to_int(key, v);
    else if (key == "Ts")
        s.sample_period = to_double(key, v);
    else if (key == "rolloff")
        s.rolloff = to_double(key, v);
    else if (key == "L")
    {
        std::vector<int> l;
        for (const auto &item : split_list(v))
            l.push_back(to_int(key, item));
        if (l.size() == 1)
            l.assign(static_cast<std::size_t>(std::max(s.users, 1)), l.front());
        s.paths_per_user = l;
    }
    else if (key == "snr_db")
    {
        c.snr_grid_db.clear();
        for (const auto &item : split_list(v))
            c.snr_grid_db.push_back(to_double(key, item));
    }
    else if (key == "bits")
    {
        c.bits_grid.clear();
        for (const auto &item : split_list(v))
            c.bits_grid.push_back(to_int(key, item));
    }
    else if (key == "trials")
        c.trials = to_int(key, v);
    else if (key == "seed")
        c.seed = to_u64(key, v);
    else if (key == "estimators")
    {
        c.estimators.clear();
        for (const auto &item : split_list(v))
            c.estimators.push_back(parse_estimator(item));
    }
    else if (key == "threads")
        c.threads = to_int(key, v);
    else if (key == "timing")
        c.record_runtime = to_bool(key, v);
    else if (key == "out")
        c.out_csv = v;
    else if (key == "plot")
        c.plot_path = v;
    else if (key == "theta_oversampling")
        e.theta_oversampling = to_int(key, v);
    else if (key == "tau_oversampling")
        e.tau_oversampling = to_int(key, v);
    else if (key == "newton_max_iters")
        e.newton_max_iters = to_int(key, v);
    else if (key == "newton_step_tol")
        e.newton_step_tol = to_double(key, v);
    else if (key == "line_search_floor")
        e.line_search_floor = to_double(key, v);
    else if (key == "refit_tol")
        e.refit_tol = to_double(key, v);
    else if (key == "refit_max_iters")
        e.refit_max_iters = to_int(key, v);
    else if (key == "max_outer_iters")
        e.max_outer_iters = to_int(key, v);
    else if (key == "cv_fraction")
        e.cv_fraction = to_double(key, v);
    else if (key == "keep_best_cv")
        e.keep_best_cv = to_bool(key, v);
    else if (key == "combiner_rotation")
    {
        if (v != "seeded_offset_stride_M_div_R")
            throw ConfigError("config: unsupported combiner_rotation '" + v + "'");
    }
    else if (key == "normalize_score")
        e.normalize_score = to_bool(key, v);
    else
        throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string &text)
{
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string resolved_config(const ExperimentConfig &c)
{
    const SystemConfig &s = c.system;
    const EstimatorConfig &e = c.estimator;
    std::ostringstream out;
    out << "M=" << s.antennas << '\n'
        << "R=" << s.rf_chains << '\n'
        << "K=" << s.users << '\n'
        << "D=" << s.taps << '\n'
        << "N=" << s.slots << '\n'
        << "Ts=" << fmt_double(s.sample_period) << '\n'
        << "rolloff=" << fmt_double(s.rolloff) << '\n'
        << "L=" << join(s.paths_per_user, [](int v) { return std::to_string(v); }) << '\n'
        << "snr_db=" << join(c.snr_grid_db, fmt_short) << '\n'
        << "bits=" << join(c.bits_grid, [](int v) { return std::to_string(v); }) << '\n'
        << "trials=" << c.trials << '\n'
        << "seed=" << c.seed << '\n'
        << "estimators=" << join(c.estimators, [](EstimatorKind k) { return to_string(k); }) << '\n'
        << "theta_oversampling=" << e.theta_oversampling << '\n'
        << "tau_oversampling=" << e.tau_oversampling << '\n'
        << "newton_max_iters=" << e.newton_max_iters << '\n'
        << "newton_step_tol=" << fmt_short(e.newton_step_tol) << '\n'
        << "line_search_floor=" << fmt_short(e.line_search_floor) << '\n'
        << "refit_tol=" << fmt_short(e.refit_tol) << '\n'
        << "refit_max_iters=" << e.refit_max_iters << '\n'
        << "max_outer_iters=" << e.max_outer_iters << '\n'
        << "cv_fraction=" << fmt_short(e.cv_fraction) << '\n'
        << "keep_best_cv=" << (e.keep_best_cv ? "true" : "false") << '\n'
        << "normalize_score=" << (e.normalize_score ? "true" : "false") << '\n'
        << "combiner_rotation=seeded_offset_stride_M_div_R" << '\n'
        << "timing=" << (c.record_runtime ? "true" : "false") << '\n';
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig &config)
{
    const std::string text = resolved_config(config);
    return fnv1a(text.data(), text.size());
}

// ------------------------------------------------------------------------
// Trials
// ------------------------------------------------------------------------

std::uint64_t TrialRealization::fingerprint() const
{
    std::uint64_t h = fnv1a(channel.h.data(), sizeof(cplx) * static_cast<std::size_t>(channel.h.size()));
    return fnv1a(received.data(), sizeof(cplx) * static_cast<std::size_t>(received.size()), h);
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial)
{
    return mix_seed(master_seed, static_cast<std::uint64_t>(trial));
}

TrialRealization realize_trial(const SystemConfig &system, double snr_db, int bits, std::uint64_t master_seed,
                               int trial)
{
    system.validate();
    const std::uint64_t seed = trial_seed(master_seed, trial);
    const PulseSpec pulse = system.pulse();

    TrainingConfig training;
    training.users = system.users;
    training.slots = system.slots;
    training.snr = std::pow(10.0, snr_db / 10.0);

    MeasurementModel model(build_pilots(training, system.taps),
                           build_combiners(system.antennas, system.rf_chains, system.slots, mix_seed(seed, 2)),
                           system.array(), pulse);
    ChannelRealization channel = assemble_channel(
        draw_paths(system.users, system.paths_per_user, pulse, mix_seed(seed, 1)), system.array(), pulse,
        system.users);
    CVec y = model.apply_forward(channel.h, mix_seed(seed, 3));

    const double mean = y.real().mean();
    const double var = (y.real().array() - mean).square().mean();
    const double sigma_hat = std::sqrt(var);
    QuantizedObservation obs = quantize(y, design_quantizer(bits, sigma_hat));

    return TrialRealization{std::move(channel), std::move(model), std::move(y), std::move(obs), sigma_hat,
                            seed, mix_seed(seed, 4)};
}

double nmse(const CVec &h_hat, const CVec &h)
{
    if (h_hat.size() != h.size())
        throw InputError("nmse: length mismatch");
    const double denom = h.squaredNorm();
    if (!(denom > 0.0))
        throw InputError("nmse: true channel is zero");
    return (h_hat - h).squaredNorm() / denom;
}

TrialResult run_estimator(EstimatorKind kind, const TrialRealization &trial, const ExperimentConfig &config,
                          int trial_index, double snr_db, int bits)
{
    TrialResult r;
    r.trial = trial_index;
    r.seed = trial.trial_seed;
    r.estimator = kind;
    r.snr_db = snr_db;
    r.bits = bits;
    r.realization = trial.fingerprint();

    EstimatorConfig ec = config.estimator;
    ec.seed = trial.split_seed;
    const auto start = std::chrono::steady_clock::now();
    try
    {
        EstimatorResult est;
        switch (kind)
        {
        case EstimatorKind::nfcfgs_cv:
            est = run(trial.obs, trial.model, ec);
            break;
        case EstimatorKind::ongrid_fcfgs_cv:
            est = run_ongrid_fcfgs_cv(trial.obs, trial.model, ec);
            break;
        case EstimatorKind::oracle_stop:
            est = run_oracle_stop(trial.obs, trial.model, ec, config.system.total_paths());
            break;
        }
        r.nmse = nmse(est.h_hat, trial.channel.h);
        r.path_count = static_cast<int>(est.paths.size());
        r.iterations = static_cast<int>(est.trace.size());
        for (const IterationRecord &rec : est.trace)
        {
            r.trace_est.push_back(rec.g_est);
            r.trace_cv.push_back(rec.g_cv);
        }
    }
    catch (const std::exception &ex)
    {
        r.nmse = std::nan("");
        r.error = ex.what();
    }
    const auto stop = std::chrono::steady_clock::now();
    r.runtime_s = config.record_runtime ? std::chrono::duration<double>(stop - start).count() : std::nan("");
    return r;
}

ResultTable run_experiment(const ExperimentConfig &config)
{
    config.validate();
    ResultTable table{config, {}};

    const std::size_t n_snr = config.snr_grid_db.size(), n_bits = config.bits_grid.size();
    const std::size_t n_est = config.estimators.size();
    const auto n_trials = static_cast<std::size_t>(config.trials);
    const std::size_t n_tasks = n_snr * n_bits * n_trials;
    std::vector<std::vector<TrialResult>> results(n_tasks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < n_tasks; t = next++)
        {
            const std::size_t trial = t % n_trials;
            const std::size_t b = (t / n_trials) % n_bits;
            const std::size_t s = t / (n_trials * n_bits);
            try
            {
                const double snr = config.snr_grid_db[s];
                const int bits = config.bits_grid[b];
                const TrialRealization real =
                    realize_trial(config.system, snr, bits, config.seed, static_cast<int>(trial));
                for (EstimatorKind kind : config.estimators)
                    results[t].push_back(run_estimator(kind, real, config, static_cast<int>(trial), snr, bits));
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };

    unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(n_tasks, 1)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto &th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);

    // Ordered merge: snr, bits, estimator, trial.
    for (std::size_t s = 0; s < n_snr; ++s)
        for (std::size_t b = 0; b < n_bits; ++b)
            for (std::size_t e = 0; e < n_est; ++e)
                for (std::size_t trial = 0; trial < n_trials; ++trial)
                    table.rows.push_back(results[(s * n_bits + b) * n_trials + trial][e]);
    return table;
}

// ------------------------------------------------------------------------
// CSV
// ------------------------------------------------------------------------

std::string format_csv(const ResultTable &table, bool with_header)
{
    std::ostringstream out;
    if (with_header)
    {
        out << "# gridless simulate results\n";
        out << "# config_hash=" << hex64(config_hash(table.config)) << '\n';
        std::istringstream cfg(resolved_config(table.config));
        std::string line;
        while (std::getline(cfg, line))
            out << "# " << line << '\n';
        out << "trial,seed,estimator,snr_db,bits,nmse,path_count,iterations,runtime_s\n";
    }
    for (const TrialResult &r : table.rows)
    {
        out << r.trial << ',' << r.seed << ',' << to_string(r.estimator) << ',' << fmt_short(r.snr_db) << ','
            << r.bits << ',' << fmt_double(r.nmse) << ',' << r.path_count << ',' << r.iterations << ','
            << fmt_double(r.runtime_s) << '\n';
    }
    return out.str();
}

void write_csv(const ResultTable &table, const std::string &path, bool append)
{
    bool header = true;
    if (append)
    {
        std::ifstream existing(path);
        if (existing)
        {
            std::string line;
            const std::string expected = "# config_hash=" + hex64(config_hash(table.config));
            bool found = false;
            while (std::getline(existing, line))
            {
                if (line.rfind("# config_hash=", 0) == 0)
                {
                    found = true;
                    if (line != expected)
                        throw IoError("refusing to append to '" + path + "': it was written with a different configuration");
                    break;
                }
            }
            if (!found)
                throw IoError("refusing to append to '" + path + "': no config_hash header");
            header = false;
        }
    }
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << format_csv(table, header);
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

std::vector<CurvePoint> summarize(const ResultTable &table)
{
    std::map<std::tuple<int, int, double>, std::pair<double, int>> acc;
    for (const TrialResult &r : table.rows)
    {
        if (!r.error.empty() || std::isnan(r.nmse))
            continue;
        auto &slot = acc[{r.bits, static_cast<int>(r.estimator), r.snr_db}];
        slot.first += r.nmse;
        slot.second += 1;
    }
    std::vector<CurvePoint> out;
    for (const auto &[key, v] : acc)
    {
        CurvePoint p;
        p.bits = std::get<0>(key);
        p.estimator = static_cast<EstimatorKind>(std::get<1>(key));
        p.snr_db = std::get<2>(key);
        p.mean_nmse = v.first / v.second;
        p.count = v.second;
        out.push_back(p);
    }
    return out;
}

} // namespace gridless
