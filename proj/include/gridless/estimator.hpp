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


#ifndef GRIDLESS_ESTIMATOR_HPP
#define GRIDLESS_ESTIMATOR_HPP

#include "gridless/likelihood.hpp"
#include "gridless/measurement.hpp"

#include <vector>

namespace gridless
{

// Slot-aligned partition of the measurement rows into estimation and cross-validation sets.
struct CVSplit
{
    std::vector<Index> est_rows;
    std::vector<Index> cv_rows;
    std::vector<int> est_slots;
    std::vector<int> cv_slots;
    double fraction = 0.8;
};

// round(fraction * N) slots go to the estimation set, drawn uniformly with the given seed.
CVSplit split_data(Index rows, int rf_chains, double fraction, std::uint64_t seed);

struct Grid
{
    std::vector<double> theta;
    std::vector<double> tau;
    int users = 1;

    std::size_t size() const { return theta.size() * tau.size() * static_cast<std::size_t>(users); }
    double theta_step() const;
    double tau_step() const;
};

// theta_oversampling * M angle-cell midpoints across [-pi/2, pi/2] and tau_oversampling * D delays on
// [0, (D-1) T] with endpoints included.
Grid make_grid(int antennas, const PulseSpec &pulse, int users, int theta_oversampling = 2,
               int tau_oversampling = 2);

struct EstimatorConfig
{
    int theta_oversampling = 2;
    int tau_oversampling = 2;
    int newton_max_iters = 10;
    double newton_step_tol = 1e-8;        // on the (theta, tau / T) step norm
    double line_search_floor = 0x1p-20;   // smallest step multiplier tried before giving up
    double hessian_eig_tol = 1e-12;       // Newton step only if both eigenvalues are below -tol
    double refit_tol = 1e-7;              // gradient norm
    int refit_max_iters = 200;
    double degenerate_condition = 1e8;
    int max_outer_iters = 0;              // 0 selects RN / 8
    double cv_fraction = 0.8;
    bool keep_best_cv = true;
    bool normalize_score = true;          // divide the score by the atom energy on the estimation rows
    std::uint64_t seed = 0;               // cross-validation split

    int outer_cap(Index rows) const
    {
        return max_outer_iters > 0 ? max_outer_iters : std::max<int>(1, static_cast<int>(rows / 8));
    }
};

struct PathEstimate
{
    double theta = 0.0;
    double tau = 0.0;
    int user = 0;
};

struct GridPoint
{
    PathEstimate path;
    std::size_t index = 0; // lexicographic (theta, tau, user) index
    double score = 0.0;
};

struct ScoreDerivatives
{
    double value = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero(); // (d/d theta, d/d tau), tau in seconds
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

// Selection score f(theta, tau, k) = |d g / d alpha at alpha = 0|^2 over the estimation rows,
// for a fixed mean offset z contributed by the already selected paths. With `normalized`, the
// derivative is taken along the unit-energy atom, i.e. f is divided by ||a_E(theta, tau, k)||^2.
class ScoreField
{
  public:
    ScoreField(const MeasurementModel &model, const QuantizedObservation &obs, const CVSplit &split,
               const CVec &offset, bool normalized = true);

    bool normalized() const { return normalized_; }

    double value(double theta, double tau, int user) const;
    ScoreDerivatives derivatives(double theta, double tau, int user) const;

    // Exhaustive maximization over the grid; ties keep the lowest index.
    GridPoint coarse_select(const Grid &grid) const;

    const MeasurementModel &model() const { return *model_; }

  private:
    CVec slot_delays(const CVec &per_slot) const;

    RVec beam_energy(const CVec &a) const;

    const MeasurementModel *model_;
    std::vector<int> slots_;
    CMat q_; // column j: W[n] w[n] for estimation slot n = slots_[j]
    bool normalized_;
};

double score(double theta, double tau, int user, const ScoreField &field);
ScoreDerivatives score_gradient_hessian(double theta, double tau, int user, const ScoreField &field);
GridPoint coarse_select(const Grid &grid, const ScoreField &field);

struct RefineResult
{
    PathEstimate path;
    double score_start = 0.0;
    double score_end = 0.0;
    std::vector<double> accepted; // score after every accepted step
    int newton_steps = 0;
    int gradient_steps = 0;
};

// Newton ascent on the score in (theta, tau / T), gradient ascent when the Hessian is not
// negative definite. Every accepted step strictly increases the score; iterates stay in the
// parameter box; the user index is never changed.
RefineResult newton_refine(const PathEstimate &coarse, const ScoreField &field, const Grid &grid,
                           const EstimatorConfig &config);

struct RefitResult
{
    CVec gains;
    double loglik = 0.0;
    double start_loglik = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;
    double condition = 1.0;
};

// Maximum-likelihood gains on the estimation rows by damped Newton ascent from the warm start.
RefitResult refit_gains(const CMat &atoms, const QuantizedObservation &obs, const CVSplit &split,
                        const CVec &warm_start, const EstimatorConfig &config);
RefitResult refit_gains(const std::vector<PathEstimate> &paths, const MeasurementModel &model,
                        const QuantizedObservation &obs, const CVSplit &split, const CVec &warm_start,
                        const EstimatorConfig &config);

// Log-likelihood on the cross-validation rows; -inf for an empty path set.
double cv_score(const CVec &gains, const std::vector<PathEstimate> &paths, const MeasurementModel &model,
                const QuantizedObservation &obs, const CVSplit &split);

CVec reconstruct(const CVec &gains, const std::vector<PathEstimate> &paths, const ArraySpec &array,
                 const PulseSpec &pulse, int users);

struct IterationRecord
{
    GridPoint coarse;
    RefineResult refine;
    std::vector<PathEstimate> paths;
    CVec gains;
    double g_est = 0.0;
    double g_cv = 0.0;
    int refit_iterations = 0;
    bool refit_converged = false;
    bool degenerate = false;
    bool duplicate = false;
};

struct EstimatorResult
{
    std::vector<PathEstimate> paths;
    CVec gains;
    CVec h_hat;
    std::vector<IterationRecord> trace;
    std::size_t selected_iteration = 0; // number of trace entries behind the returned estimate
    bool truncated = false;             // outer-iteration cap reached before the CV stop
    CVSplit split;

    PathSet path_set() const;
};

struct LoopControl
{
    bool refine = true;     // false: keep grid points (on-grid selection)
    bool stop_on_cv = true; // false: run exactly `iterations` outer iterations
    int iterations = 0;     // fixed iteration count when stop_on_cv is false
};

EstimatorResult run(const QuantizedObservation &obs, const MeasurementModel &model, const EstimatorConfig &config);
EstimatorResult run_with(const QuantizedObservation &obs, const MeasurementModel &model,
                         const EstimatorConfig &config, const LoopControl &control);

} // namespace gridless

#endif
