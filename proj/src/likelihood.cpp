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


#include "gridless/likelihood.hpp"

#include <numeric>

namespace gridless
{
namespace
{

void check_rows(std::span<const Index> rows, Index n, const char *who)
{
    for (Index r : rows)
        if (r < 0 || r >= n)
            throw InputError(std::string(who) + ": row index out of range");
}

void check_dims(const CVec &x, const CMat &atoms, const QuantizedObservation &obs, const char *who)
{
    if (atoms.rows() != obs.size())
        throw InputError(std::string(who) + ": atom rows do not match observation length");
    if (x.size() != atoms.cols())
        throw InputError(std::string(who) + ": gain vector does not match atom count");
}

// Column-ordered accumulation so that appending a zero-gain column leaves every mean bit-identical.
CVec gathered_means(const CMat &atoms, const CVec &x, std::span<const Index> rows)
{
    CVec mu = CVec::Zero(static_cast<Index>(rows.size()));
    for (Index p = 0; p < atoms.cols(); ++p)
    {
        const cplx xp = x[p];
        for (std::size_t j = 0; j < rows.size(); ++j)
            mu[static_cast<Index>(j)] += atoms(rows[j], p) * xp;
    }
    return mu;
}

} // namespace

double box_terms(const QuantizedObservation &obs, std::span<const Index> rows, const CVec &means, CVec *d1,
                 RVec *d2_re, RVec *d2_im)
{
    const auto n = static_cast<Index>(rows.size());
    if (means.size() != n)
        throw InputError("box_terms: means must align with rows");
    if (d1)
        d1->resize(n);
    if (d2_re)
        d2_re->resize(n);
    if (d2_im)
        d2_im->resize(n);

    double total = 0.0;
    for (Index j = 0; j < n; ++j)
    {
        const Index i = rows[static_cast<std::size_t>(j)];
        const BoxDerivatives re = box_loglik(obs.lo[i].real(), obs.up[i].real(), means[j].real(), kNoiseSigma);
        const BoxDerivatives im = box_loglik(obs.lo[i].imag(), obs.up[i].imag(), means[j].imag(), kNoiseSigma);
        total += re.logp + im.logp;
        if (d1)
            (*d1)[j] = {re.d1, im.d1};
        if (d2_re)
            (*d2_re)[j] = re.d2;
        if (d2_im)
            (*d2_im)[j] = im.d2;
    }
    return total;
}

double log_likelihood(const CVec &x, const CMat &atoms, const QuantizedObservation &obs,
                      std::span<const Index> rows)
{
    check_dims(x, atoms, obs, "log_likelihood");
    check_rows(rows, obs.size(), "log_likelihood");
    return box_terms(obs, rows, gathered_means(atoms, x, rows));
}

CVec gain_gradient(const CVec &x, const CMat &atoms, const QuantizedObservation &obs, std::span<const Index> rows)
{
    check_dims(x, atoms, obs, "gain_gradient");
    check_rows(rows, obs.size(), "gain_gradient");
    CVec d1;
    box_terms(obs, rows, gathered_means(atoms, x, rows), &d1);
    CVec grad = CVec::Zero(atoms.cols());
    for (std::size_t j = 0; j < rows.size(); ++j)
        grad += d1[static_cast<Index>(j)] * atoms.row(rows[j]).adjoint();
    return grad;
}

RestrictedLikelihood::RestrictedLikelihood(const CMat &atoms, const QuantizedObservation &obs,
                                           std::span<const Index> rows)
    : rows_(rows.size())
{
    if (atoms.rows() != obs.size())
        throw InputError("RestrictedLikelihood: atom rows do not match observation length");
    check_rows(rows, obs.size(), "RestrictedLikelihood");

    const auto n = static_cast<Index>(rows.size());
    atoms_.resize(n, atoms.cols());
    obs_.quantizer = obs.quantizer;
    obs_.lo.resize(n);
    obs_.up.resize(n);
    obs_.codes.resize(rows.size());
    for (Index j = 0; j < n; ++j)
    {
        const Index i = rows[static_cast<std::size_t>(j)];
        atoms_.row(j) = atoms.row(i);
        obs_.lo[j] = obs.lo[i];
        obs_.up[j] = obs.up[i];
        obs_.codes[static_cast<std::size_t>(j)] = obs.codes[static_cast<std::size_t>(i)];
    }
    std::iota(rows_.begin(), rows_.end(), Index{0});
}

CVec RestrictedLikelihood::means(const CVec &x) const
{
    if (x.size() != atoms_.cols())
        throw InputError("RestrictedLikelihood: gain vector does not match atom count");
    return gathered_means(atoms_, x, rows_);
}

double RestrictedLikelihood::value(const CVec &x) const
{
    return box_terms(obs_, rows_, means(x));
}

double RestrictedLikelihood::evaluate(const CVec &x, CVec *gradient, RMat *hessian) const
{
    CVec d1;
    RVec d2r, d2i;
    const double g = box_terms(obs_, rows_, means(x), &d1, hessian ? &d2r : nullptr, hessian ? &d2i : nullptr);
    if (gradient)
        *gradient = atoms_.adjoint() * d1;
    if (hessian)
    {
        // Real mean depends on [Re a, -Im a], imaginary mean on [Im a, Re a].
        const Index p = atoms_.cols();
        RMat jr(atoms_.rows(), 2 * p), ji(atoms_.rows(), 2 * p);
        jr << atoms_.real(), -atoms_.imag();
        ji << atoms_.imag(), atoms_.real();
        *hessian = jr.transpose() * d2r.asDiagonal() * jr + ji.transpose() * d2i.asDiagonal() * ji;
    }
    return g;
}

} // namespace gridless
