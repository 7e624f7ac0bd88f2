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


#include "gridless/baselines.hpp"

namespace gridless
{

EstimatorResult run_ongrid_fcfgs_cv(const QuantizedObservation &obs, const MeasurementModel &model,
                                    const EstimatorConfig &config)
{
    LoopControl control;
    control.refine = false;
    return run_with(obs, model, config, control);
}

EstimatorResult run_oracle_stop(const QuantizedObservation &obs, const MeasurementModel &model,
                                const EstimatorConfig &config, int true_path_count)
{
    if (true_path_count < 1)
        throw ConfigError("run_oracle_stop: true path count must be at least 1");
    LoopControl control;
    control.stop_on_cv = false;
    control.iterations = true_path_count;
    return run_with(obs, model, config, control);
}

EstimatorResult run_baseline(const QuantizedObservation &obs, const MeasurementModel &model,
                             const BaselineConfig &config, int true_path_count)
{
    switch (config.kind)
    {
    case BaselineKind::ongrid_fcfgs_cv:
        return run_ongrid_fcfgs_cv(obs, model, config.estimator);
    case BaselineKind::oracle_stop_nfcfgs:
        return run_oracle_stop(obs, model, config.estimator, true_path_count);
    }
    throw ConfigError("run_baseline: unknown baseline kind");
}

} // namespace gridless
