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


#include "gridless/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace gridless
{
namespace
{
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

PathSet to_path_set(const std::vector<PathEstimate> &paths, const CVec *gains)
{
    PathSet out;
    out.reserve(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
    {
        PathParams p;
        p.aoa = paths[i].theta;
        p.delay = paths[i].tau;
        p.user = paths[i].user;
        if (gains)
            p.gain = (*gains)[static_cast<Index>(i)];
        out.push_back(p);
    }
    return out;
}

Eigen::Vector2d symmetric_eigenvalues(const Eigen::Matrix2d &h)
{
    const double mean = 0.5 * (h(0, 0) + h(1, 1));
    const double half = 0.5 * (h(0, 0) - h(1, 1));
    const double r = std::hypot(half, h(0, 1));
    return {mean - r, mean + r};
}

} // namespace

// ------------------------------------------------------------------------
// Split and grid
// ------------------------------------------------------------------------

CVSplit split_data(Index rows, int rf_chains, double fraction, std::uint64_t seed)
{
    if (rf_chains < 1 || rows < 1 || rows % rf_chains != 0)
        throw ConfigError("split_data: row count must be a positive multiple of the RF chain count");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ConfigError("split_data: fraction must lie in (0, 1)");

    const int slots = static_cast<int>(rows / rf_chains);
    const int n_est = static_cast<int>(std::lround(fraction * slots));
    if (n_est < 1 || n_est >= slots)
        throw ConfigError("split_data: fraction leaves an empty estimation or validation set");

    std::vector<int> order(static_cast<std::size_t>(slots));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (int i = slots - 1; i > 0; --i)
    {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
    }

    CVSplit out;
    out.fraction = fraction;
    out.est_slots.assign(order.begin(), order.begin() + n_est);
    out.cv_slots.assign(order.begin() + n_est, order.end());
    std::sort(out.est_slots.begin(), out.est_slots.end());
    std::sort(out.cv_slots.begin(), out.cv_slots.end());
    for (int n : out.est_slots)
        for (int r = 0; r < rf_chains; ++r)
            out.est_rows.push_back(static_cast<Index>(n) * rf_chains + r);
    for (int n : out.cv_slots)
        for (int r = 0; r < rf_chains; ++r)
            out.cv_rows.push_back(static_cast<Index>(n) * rf_chains + r);
    return out;
}

double Grid::theta_step() const
{
    return theta.size() > 1 ? theta[1] - theta[0] : kPi;
}

double Grid::tau_step() const
{
    return tau.size() > 1 ? tau[1] - tau[0] : 0.0;
}

Grid make_grid(int antennas, const PulseSpec &pulse, int users, int theta_oversampling, int tau_oversampling)
{
    if (antennas < 1 || users < 1 || pulse.taps < 1 || theta_oversampling < 1 || tau_oversampling < 1)
        throw ConfigError("make_grid: sizes and oversampling factors must be positive");

    Grid g;
    g.users = users;
    // Cell midpoints: the endpoints alias to the same atom and are stationary in theta.
    const int n_theta = std::max(2, theta_oversampling * antennas);
    for (int i = 0; i < n_theta; ++i)
        g.theta.push_back(-kPi / 2 + kPi * (i + 0.5) / n_theta);

    if (pulse.taps == 1)
    {
        g.tau.push_back(0.0);
    }
    else
    {
        const int n_tau = tau_oversampling * pulse.taps;
        for (int j = 0; j < n_tau; ++j)
            g.tau.push_back(pulse.max_delay() * j / (n_tau - 1));
        g.tau.back() = pulse.max_delay();
    }
    return g;
}

// ------------------------------------------------------------------------
// Score field
// ------------------------------------------------------------------------

ScoreField::ScoreField(const MeasurementModel &model, const QuantizedObservation &obs, const CVSplit &split,
                       const CVec &offset, bool normalized)
    : model_(&model), slots_(split.est_slots), normalized_(normalized)
{
    if (obs.size() != model.rows() || offset.size() != model.rows())
        throw InputError("ScoreField: observation or offset length does not match the model");
    const int R = model.rf_chains();
    if (split.est_rows.size() != slots_.size() * static_cast<std::size_t>(R))
        throw InputError("ScoreField: split is not slot-aligned for this model");

    CVec means(static_cast<Index>(split.est_rows.size()));
    for (std::size_t j = 0; j < split.est_rows.size(); ++j)
        means[static_cast<Index>(j)] = offset[split.est_rows[j]];
    CVec w;
    box_terms(obs, split.est_rows, means, &w);

    q_.resize(model.antennas(), static_cast<Index>(slots_.size()));
    for (std::size_t j = 0; j < slots_.size(); ++j)
        q_.col(static_cast<Index>(j)) = model.combiner(slots_[j]) * w.segment(static_cast<Index>(j) * R, R);
}

CVec ScoreField::slot_delays(const CVec &per_slot) const
{
    CVec out(static_cast<Index>(slots_.size()));
    for (std::size_t j = 0; j < slots_.size(); ++j)
        out[static_cast<Index>(j)] = per_slot[slots_[j]];
    return out;
}

RVec ScoreField::beam_energy(const CVec &a) const
{
    RVec out(static_cast<Index>(slots_.size()));
    for (std::size_t j = 0; j < slots_.size(); ++j)
        out[static_cast<Index>(j)] = (model_->combiner(slots_[j]).adjoint() * a).squaredNorm();
    return out;
}

double ScoreField::value(double theta, double tau, int user) const
{
    if (user < 0 || user >= model_->users())
        throw InputError("score: user index out of range");
    check_path_bounds(theta, tau, model_->pulse(), "score");
    const CVec a = steering(theta, model_->antennas()).value;
    const CVec u = q_.transpose() * a.conjugate();
    const CVec c = slot_delays(model_->delay_responses(user, tau).value);
    const double s = std::norm(c.dot(u));
    if (!normalized_)
        return s;
    const double e = c.cwiseAbs2().dot(beam_energy(a));
    return e > 0.0 ? s / e : 0.0;
}

ScoreDerivatives ScoreField::derivatives(double theta, double tau, int user) const
{
    if (user < 0 || user >= model_->users())
        throw InputError("score_gradient_hessian: user index out of range");
    check_path_bounds(theta, tau, model_->pulse(), "score_gradient_hessian");

    const SteeringVector a = steering(theta, model_->antennas());
    const CVec u0 = q_.transpose() * a.value.conjugate();
    const CVec u1 = q_.transpose() * a.d1.conjugate();
    const CVec u2 = q_.transpose() * a.d2.conjugate();
    const DelayResponses c = model_->delay_responses(user, tau);
    const CVec c0 = slot_delays(c.value), c1 = slot_delays(c.d1), c2 = slot_delays(c.d2);

    // G = sum conj(c) u; dot() conjugates its left operand.
    const cplx g = c0.dot(u0);
    const cplx g_t = c0.dot(u1);
    const cplx g_d = c1.dot(u0);
    const cplx g_tt = c0.dot(u2);
    const cplx g_td = c1.dot(u1);
    const cplx g_dd = c2.dot(u0);

    // S = |G|^2
    const double s = std::norm(g);
    const Eigen::Vector2d ds(2.0 * std::real(std::conj(g) * g_t), 2.0 * std::real(std::conj(g) * g_d));
    Eigen::Matrix2d hs;
    hs(0, 0) = 2.0 * (std::norm(g_t) + std::real(std::conj(g) * g_tt));
    hs(0, 1) = hs(1, 0) = 2.0 * std::real(std::conj(g_d) * g_t + std::conj(g) * g_td);
    hs(1, 1) = 2.0 * (std::norm(g_d) + std::real(std::conj(g) * g_dd));

    ScoreDerivatives out;
    if (!normalized_)
    {
        out.value = s;
        out.gradient = ds;
        out.hessian = hs;
        return out;
    }

    // E = sum |c_n|^2 beta_n(theta), beta_n = ||W[n]^H a(theta)||^2
    double e = 0.0, e_t = 0.0, e_d = 0.0, e_tt = 0.0, e_td = 0.0, e_dd = 0.0;
    for (std::size_t j = 0; j < slots_.size(); ++j)
    {
        const auto jj = static_cast<Index>(j);
        const CMat &W = model_->combiner(slots_[j]);
        const CVec b0 = W.adjoint() * a.value, b1 = W.adjoint() * a.d1, b2 = W.adjoint() * a.d2;
        const double beta = b0.squaredNorm();
        const double beta_t = 2.0 * std::real(b0.dot(b1));
        const double beta_tt = 2.0 * (b1.squaredNorm() + std::real(b0.dot(b2)));
        const double gamma = std::norm(c0[jj]);
        const double gamma_d = 2.0 * std::real(std::conj(c0[jj]) * c1[jj]);
        const double gamma_dd = 2.0 * (std::norm(c1[jj]) + std::real(std::conj(c0[jj]) * c2[jj]));
        e += gamma * beta;
        e_t += gamma * beta_t;
        e_d += gamma_d * beta;
        e_tt += gamma * beta_tt;
        e_td += gamma_d * beta_t;
        e_dd += gamma_dd * beta;
    }
    if (!(e > 0.0))
        return out;
    const Eigen::Vector2d de(e_t, e_d);
    Eigen::Matrix2d he;
    he << e_tt, e_td, e_td, e_dd;

    out.value = s / e;
    out.gradient = ds / e - s * de / (e * e);
    out.hessian = hs / e - (ds * de.transpose() + de * ds.transpose()) / (e * e) - s * he / (e * e) +
                  2.0 * s * de * de.transpose() / (e * e * e);
    return out;
}

GridPoint ScoreField::coarse_select(const Grid &grid) const
{
    if (grid.size() == 0)
        throw InputError("coarse_select: empty grid");
    if (grid.users != model_->users())
        throw InputError("coarse_select: grid user count does not match the model");

    const std::size_t n_tau = grid.tau.size();
    const auto K = static_cast<std::size_t>(grid.users);
    CMat delays(static_cast<Index>(slots_.size()), static_cast<Index>(n_tau * K));
    for (std::size_t j = 0; j < n_tau; ++j)
        for (std::size_t k = 0; k < K; ++k)
            delays.col(static_cast<Index>(j * K + k)) =
                slot_delays(model_->delay_responses(static_cast<int>(k), grid.tau[j]).value);
    const RMat delay_energy = delays.cwiseAbs2();

    GridPoint best;
    best.score = -1.0;
    for (std::size_t i = 0; i < grid.theta.size(); ++i)
    {
        const CVec a = steering(grid.theta[i], model_->antennas()).value;
        const CVec u = q_.transpose() * a.conjugate();
        const CVec g = delays.adjoint() * u;
        RVec energy;
        if (normalized_)
            energy = delay_energy.transpose() * beam_energy(a);
        for (std::size_t j = 0; j < n_tau; ++j)
        {
            for (std::size_t k = 0; k < K; ++k)
            {
                const auto col = static_cast<Index>(j * K + k);
                double f = std::norm(g[col]);
                if (normalized_)
                    f = energy[col] > 0.0 ? f / energy[col] : 0.0;
                if (f > best.score)
                {
                    best.score = f;
                    best.index = (i * n_tau + j) * K + k;
                    best.path = {grid.theta[i], grid.tau[j], static_cast<int>(k)};
                }
            }
        }
    }
    return best;
}

double score(double theta, double tau, int user, const ScoreField &field)
{
    return field.value(theta, tau, user);
}

ScoreDerivatives score_gradient_hessian(double theta, double tau, int user, const ScoreField &field)
{
    return field.derivatives(theta, tau, user);
}

GridPoint coarse_select(const Grid &grid, const ScoreField &field)
{
    return field.coarse_select(grid);
}

// ------------------------------------------------------------------------
// Off-grid refinement
// ------------------------------------------------------------------------

RefineResult newton_refine(const PathEstimate &coarse, const ScoreField &field, const Grid &grid,
                           const EstimatorConfig &config)
{
    const PulseSpec &pulse = field.model().pulse();
    const double T = pulse.sample_period;
    const double tau_max = pulse.max_delay() / T;

    // Work in (theta, tau / T) so both coordinates are O(1).
    Eigen::Vector2d x(coarse.theta, coarse.tau / T);
    const Eigen::Vector2d cell(grid.theta_step(), pulse.taps > 1 ? grid.tau_step() / T : 1.0);
    auto clamp = [&](Eigen::Vector2d v) {
        v[0] = std::clamp(v[0], -kPi / 2, kPi / 2);
        v[1] = std::clamp(v[1], 0.0, tau_max);
        return v;
    };
    auto f_at = [&](const Eigen::Vector2d &v) { return field.value(v[0], v[1] * T, coarse.user); };

    RefineResult out;
    out.path = coarse;
    out.score_start = f_at(x);
    double f = out.score_start;

    for (int it = 0; it < config.newton_max_iters; ++it)
    {
        const ScoreDerivatives d = field.derivatives(x[0], x[1] * T, coarse.user);
        const Eigen::Vector2d g(d.gradient[0], d.gradient[1] * T);
        Eigen::Matrix2d h;
        h << d.hessian(0, 0), d.hessian(0, 1) * T, d.hessian(1, 0) * T, d.hessian(1, 1) * T * T;

        Eigen::Vector2d dir;
        bool newton = false;
        const Eigen::Vector2d eig = symmetric_eigenvalues(h);
        if (eig[1] < -config.hessian_eig_tol)
        {
            dir = -h.ldlt().solve(g);
            newton = dir.allFinite();
        }
        if (!newton)
        {
            // Steepest ascent measured in grid cells, one cell long.
            const Eigen::Vector2d scaled = cell.cwiseProduct(g);
            const double len = scaled.norm();
            if (!(len > 0.0))
                break;
            dir = cell.cwiseProduct(scaled) / len;
        }

        bool accepted = false;
        Eigen::Vector2d next = x;
        double f_next = f;
        for (double eta = 1.0; eta >= config.line_search_floor; eta *= 0.5)
        {
            next = clamp(x + eta * dir);
            f_next = f_at(next);
            if (f_next > f)
            {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;

        const double step = (next - x).norm();
        x = next;
        f = f_next;
        out.accepted.push_back(f);
        (newton ? out.newton_steps : out.gradient_steps)++;
        if (step < config.newton_step_tol)
            break;
    }

    out.path = {x[0], x[1] * T, coarse.user};
    out.score_end = f;
    return out;
}

// ------------------------------------------------------------------------
// Gain refit
// ------------------------------------------------------------------------

RefitResult refit_gains(const CMat &atoms, const QuantizedObservation &obs, const CVSplit &split,
                        const CVec &warm_start, const EstimatorConfig &config)
{
    if (warm_start.size() != atoms.cols())
        throw InputError("refit_gains: warm start does not match atom count");

    const RestrictedLikelihood lik(atoms, obs, split.est_rows);
    const Index P = atoms.cols();

    RefitResult out;
    out.gains = warm_start;
    if (P == 0)
    {
        out.loglik = out.start_loglik = lik.value(out.gains);
        out.converged = true;
        return out;
    }

    const CMat gram = lik.atoms().adjoint() * lik.atoms();
    const Eigen::SelfAdjointEigenSolver<CMat> es(gram, Eigen::EigenvaluesOnly);
    const double emax = es.eigenvalues().maxCoeff(), emin = es.eigenvalues().minCoeff();
    out.condition = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
    out.degenerate = !(out.condition <= config.degenerate_condition);

    CVec grad;
    RMat hess;
    double g = lik.evaluate(out.gains, &grad, &hess);
    out.start_loglik = g;

    for (; out.iterations < config.refit_max_iters; ++out.iterations)
    {
        if (grad.norm() <= config.refit_tol)
            break;

        RVec gr(2 * P);
        gr << grad.real(), grad.imag();
        const RMat neg = -hess;
        const double scale = std::max(neg.diagonal().maxCoeff(), 1e-300);

        RVec step;
        bool have_step = false;
        for (double damping : {out.degenerate ? 1e-10 : 0.0, 1e-8, 1e-4})
        {
            const RMat sys = neg + (damping * scale) * RMat::Identity(2 * P, 2 * P);
            const Eigen::LDLT<RMat> ldlt(sys);
            if (ldlt.info() != Eigen::Success)
                continue;
            step = ldlt.solve(gr);
            if (step.allFinite() && step.dot(gr) > 0.0)
            {
                have_step = true;
                break;
            }
        }
        if (!have_step)
            step = gr / scale;

        const double slope = step.dot(gr);
        const CVec dstep = step.head(P).cast<cplx>() + cplx(0.0, 1.0) * step.tail(P).cast<cplx>();
        bool accepted = false;
        CVec next;
        for (double t = 1.0; t > 1e-18; t *= 0.5)
        {
            next = out.gains + t * dstep;
            const double gv = lik.value(next);
            if (gv > g && gv >= g + 1e-4 * t * slope)
            {
                accepted = true;
                break;
            }
            // Near the optimum the change drops below the resolution of g; a full step that
            // stays within rounding of g and halves the gradient is still progress.
            const double resolution = 1e-12 * std::max(1.0, std::abs(g));
            if (t == 1.0 && gv >= g - resolution && have_step)
            {
                CVec ngrad;
                RMat nhess;
                const double gn = lik.evaluate(next, &ngrad, &nhess);
                if (gn >= g - resolution && ngrad.norm() <= 0.5 * grad.norm())
                {
                    out.gains = next;
                    g = gn;
                    grad = std::move(ngrad);
                    hess = std::move(nhess);
                    accepted = true;
                    next.resize(0);
                    break;
                }
            }
        }
        if (!accepted)
            break;
        if (next.size() == 0)
            continue;
        out.gains = next;
        g = lik.evaluate(out.gains, &grad, &hess);
    }

    if (g < out.start_loglik)
    {
        // rounding-level steps never leave the result below the warm start
        out.gains = warm_start;
        g = lik.evaluate(out.gains, &grad, &hess);
    }
    out.loglik = g;
    out.gradient_norm = grad.norm();
    out.converged = out.gradient_norm <= config.refit_tol;
    return out;
}

RefitResult refit_gains(const std::vector<PathEstimate> &paths, const MeasurementModel &model,
                        const QuantizedObservation &obs, const CVSplit &split, const CVec &warm_start,
                        const EstimatorConfig &config)
{
    return refit_gains(model.atoms(to_path_set(paths, nullptr)), obs, split, warm_start, config);
}

double cv_score(const CVec &gains, const std::vector<PathEstimate> &paths, const MeasurementModel &model,
                const QuantizedObservation &obs, const CVSplit &split)
{
    if (paths.empty())
        return kNegInf;
    if (gains.size() != static_cast<Index>(paths.size()))
        throw InputError("cv_score: gain count does not match path count");
    return log_likelihood(gains, model.atoms(to_path_set(paths, nullptr)), obs, split.cv_rows);
}

CVec reconstruct(const CVec &gains, const std::vector<PathEstimate> &paths, const ArraySpec &array,
                 const PulseSpec &pulse, int users)
{
    if (gains.size() != static_cast<Index>(paths.size()))
        throw InputError("reconstruct: gain count does not match path count");
    return assemble_channel(to_path_set(paths, &gains), array, pulse, users).h;
}

PathSet EstimatorResult::path_set() const
{
    return to_path_set(paths, &gains);
}

// ------------------------------------------------------------------------
// Greedy loop
// ------------------------------------------------------------------------

EstimatorResult run(const QuantizedObservation &obs, const MeasurementModel &model, const EstimatorConfig &config)
{
    return run_with(obs, model, config, LoopControl{});
}

EstimatorResult run_with(const QuantizedObservation &obs, const MeasurementModel &model,
                         const EstimatorConfig &config, const LoopControl &control)
{
    if (obs.size() != model.rows())
        throw InputError("run: observation length does not match the model");
    if (!control.stop_on_cv && control.iterations < 1)
        throw ConfigError("run: a fixed-length run needs at least one iteration");

    EstimatorResult result;
    result.split = split_data(model.rows(), model.rf_chains(), config.cv_fraction, config.seed);
    const CVSplit &split = result.split;
    const Grid grid = make_grid(model.antennas(), model.pulse(), model.users(), config.theta_oversampling,
                                config.tau_oversampling);
    const int cap = control.stop_on_cv ? config.outer_cap(model.rows()) : control.iterations;
    const double T = model.pulse().sample_period;

    std::vector<PathEstimate> paths;
    CVec gains(0);
    CMat atoms(model.rows(), 0);
    CVec offset = CVec::Zero(model.rows());
    double cv_current = kNegInf;
    bool stopped = false;

    for (int it = 0; it < cap; ++it)
    {
        const double eps = cv_current;
        const ScoreField field(model, obs, split, offset, config.normalize_score);

        IterationRecord rec;
        rec.coarse = field.coarse_select(grid);
        if (control.refine)
        {
            rec.refine = newton_refine(rec.coarse.path, field, grid, config);
        }
        else
        {
            rec.refine.path = rec.coarse.path;
            rec.refine.score_start = rec.refine.score_end = rec.coarse.score;
        }
        const PathEstimate chosen = rec.refine.path;
        for (const PathEstimate &p : paths)
            if (p.user == chosen.user && std::abs(p.theta - chosen.theta) < 1e-9 &&
                std::abs(p.tau - chosen.tau) < 1e-9 * T)
                rec.duplicate = true;

        paths.push_back(chosen);
        atoms.conservativeResize(Eigen::NoChange, atoms.cols() + 1);
        atoms.col(atoms.cols() - 1) = model.atom(chosen.theta, chosen.tau, chosen.user);
        CVec warm(gains.size() + 1);
        warm << gains, cplx(0.0, 0.0);

        const RefitResult refit = refit_gains(atoms, obs, split, warm, config);
        gains = refit.gains;
        offset = atoms * gains;
        cv_current = log_likelihood(gains, atoms, obs, split.cv_rows);

        rec.paths = paths;
        rec.gains = gains;
        rec.g_est = refit.loglik;
        rec.g_cv = cv_current;
        rec.refit_iterations = refit.iterations;
        rec.refit_converged = refit.converged;
        rec.degenerate = refit.degenerate;
        result.trace.push_back(std::move(rec));

        if (control.stop_on_cv && !(cv_current > eps))
        {
            stopped = true;
            break;
        }
    }

    result.truncated = control.stop_on_cv && !stopped;
    result.selected_iteration = result.trace.size();
    if (control.stop_on_cv && config.keep_best_cv)
    {
        double best = kNegInf;
        for (std::size_t i = 0; i < result.trace.size(); ++i)
        {
            if (result.trace[i].g_cv > best)
            {
                best = result.trace[i].g_cv;
                result.selected_iteration = i + 1;
            }
        }
    }

    const IterationRecord &final_rec = result.trace[result.selected_iteration - 1];
    result.paths = final_rec.paths;
    result.gains = final_rec.gains;
    result.h_hat = reconstruct(result.gains, result.paths, model.array(), model.pulse(), model.users());
    return result;
}

} // namespace gridless
