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


#ifndef GRIDLESS_LIKELIHOOD_HPP
#define GRIDLESS_LIKELIHOOD_HPP

#include "gridless/quantizer.hpp"

#include <span>
#include <vector>

namespace gridless
{

// Sum of real- and imaginary-part box log-probabilities over `rows`, with noise std
// kNoiseSigma per real dimension. means[j] is the noiseless mean of row rows[j].
// Optional outputs (sized to rows.size()): d1 packs the real-part derivative in .real()
// and the imaginary-part derivative in .imag(); d2_re / d2_im are the second derivatives.
double box_terms(const QuantizedObservation &obs, std::span<const Index> rows, const CVec &means, CVec *d1 = nullptr,
                 RVec *d2_re = nullptr, RVec *d2_im = nullptr);

// g(x) restricted to `rows`; atoms has one row per observation entry.
double log_likelihood(const CVec &x, const CMat &atoms, const QuantizedObservation &obs,
                      std::span<const Index> rows);

// Ascent direction of g in x: d g / d Re(x) + j d g / d Im(x).
CVec gain_gradient(const CVec &x, const CMat &atoms, const QuantizedObservation &obs, std::span<const Index> rows);

// Gain log-likelihood with the atom rows and box bounds gathered once, for repeated
// evaluation inside the gain refit.
class RestrictedLikelihood
{
  public:
    RestrictedLikelihood(const CMat &atoms, const QuantizedObservation &obs, std::span<const Index> rows);

    Index gains() const { return atoms_.cols(); }
    const CMat &atoms() const { return atoms_; }

    double value(const CVec &x) const;

    // Returns g(x). gradient as in gain_gradient; hessian is the 2P x 2P real Hessian in
    // the stacked coordinates [Re(x); Im(x)].
    double evaluate(const CVec &x, CVec *gradient, RMat *hessian) const;

  private:
    CVec means(const CVec &x) const;

    CMat atoms_;
    QuantizedObservation obs_;
    std::vector<Index> rows_;
};

} // namespace gridless

#endif
