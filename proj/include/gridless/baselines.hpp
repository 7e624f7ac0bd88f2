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


#ifndef GRIDLESS_BASELINES_HPP
#define GRIDLESS_BASELINES_HPP

#include "gridless/estimator.hpp"

namespace gridless
{

enum class BaselineKind
{
    ongrid_fcfgs_cv,
    oracle_stop_nfcfgs,
};

struct BaselineConfig
{
    BaselineKind kind = BaselineKind::ongrid_fcfgs_cv;
    EstimatorConfig estimator;
};

// Same greedy loop and CV stop, with every path kept on its grid point.
EstimatorResult run_ongrid_fcfgs_cv(const QuantizedObservation &obs, const MeasurementModel &model,
                                    const EstimatorConfig &config);

// Gridless loop run for exactly `true_path_count` iterations, no cross-validation stop.
EstimatorResult run_oracle_stop(const QuantizedObservation &obs, const MeasurementModel &model,
                                const EstimatorConfig &config, int true_path_count);

EstimatorResult run_baseline(const QuantizedObservation &obs, const MeasurementModel &model,
                             const BaselineConfig &config, int true_path_count);

} // namespace gridless

#endif
