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


#ifndef GRIDLESS_HARNESS_HPP
#define GRIDLESS_HARNESS_HPP

#include "gridless/baselines.hpp"
#include "gridless/quantizer.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gridless
{

class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class EstimatorKind
{
    nfcfgs_cv,
    ongrid_fcfgs_cv,
    oracle_stop,
};

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator(const std::string &name);

struct SystemConfig
{
    int antennas = 32;
    int rf_chains = 8;
    int users = 4;
    int taps = 4;
    int slots = 1600;
    double sample_period = 1.0 / 600e6;
    double rolloff = 0.35;
    std::vector<int> paths_per_user = {2, 2, 2, 2};

    ArraySpec array() const { return {antennas}; }
    PulseSpec pulse() const { return {rolloff, sample_period, taps}; }
    int total_paths() const;
    void validate() const;
};

struct ExperimentConfig
{
    SystemConfig system;
    std::vector<double> snr_grid_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    std::vector<int> bits_grid = {1, 2, 3, 4};
    int trials = 10;
    std::uint64_t seed = 1;
    std::vector<EstimatorKind> estimators = {EstimatorKind::nfcfgs_cv};
    EstimatorConfig estimator;
    int threads = 0; // 0 = hardware concurrency
    bool record_runtime = false;
    std::string out_csv;
    std::string plot_path;

    void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::string &path);
void apply_setting(ExperimentConfig &config, const std::string &key, const std::string &value);

// Canonical key=value listing of every setting, one per line.
std::string resolved_config(const ExperimentConfig &config);
std::uint64_t config_hash(const ExperimentConfig &config);

// Everything one trial needs: channel, training model and the quantized observation.
struct TrialRealization
{
    ChannelRealization channel;
    MeasurementModel model;
    CVec received; // unquantized, noisy
    QuantizedObservation obs;
    double sigma_hat = 0.0;
    std::uint64_t trial_seed = 0;
    std::uint64_t split_seed = 0;

    // Hash of the channel and unquantized samples, for checking paired seeding.
    std::uint64_t fingerprint() const;
};

std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

// Channel, combiners, noise and split depend only on (master seed, trial), so every SNR, bit
// depth and estimator sees the same draws.
TrialRealization realize_trial(const SystemConfig &system, double snr_db, int bits, std::uint64_t master_seed,
                               int trial);

double nmse(const CVec &h_hat, const CVec &h);

struct TrialResult
{
    int trial = 0;
    std::uint64_t seed = 0;
    EstimatorKind estimator = EstimatorKind::nfcfgs_cv;
    double snr_db = 0.0;
    int bits = 0;
    double nmse = 0.0;
    int path_count = 0;
    int iterations = 0;
    double runtime_s = 0.0;
    std::vector<double> trace_est;
    std::vector<double> trace_cv;
    std::uint64_t realization = 0;
    std::string error; // non-empty when the estimator threw
};

struct ResultTable
{
    ExperimentConfig config;
    std::vector<TrialResult> rows;
};

TrialResult run_estimator(EstimatorKind kind, const TrialRealization &trial, const ExperimentConfig &config,
                          int trial_index, double snr_db, int bits);

ResultTable run_experiment(const ExperimentConfig &config);

std::string format_csv(const ResultTable &table, bool with_header = true);
void write_csv(const ResultTable &table, const std::string &path, bool append = false);

struct CurvePoint
{
    int bits = 0;
    EstimatorKind estimator = EstimatorKind::nfcfgs_cv;
    double snr_db = 0.0;
    double mean_nmse = 0.0;
    int count = 0;
};

// Trial means of NMSE per (bits, estimator, snr); failed trials are skipped.
std::vector<CurvePoint> summarize(const ResultTable &table);

std::string render_plot_svg(const ResultTable &table);
void emit_plot(const ResultTable &table, const std::string &path);

} // namespace gridless

#endif
