// SPDX-License-Identifier: Apache-2.0
//
// cdimap - channel distribution maps for ultra-reliable rate selection
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

#ifndef CDIMAP_SPECIAL_FUNCTIONS_HPP
#define CDIMAP_SPECIAL_FUNCTIONS_HPP

namespace cdimap {

/// erf^-1(p) for |p| < 1. Rational starting guess refined by Halley steps on
/// erf; |erf(y) - p| <= 1e-12 over the domain. Throws DomainError for |p| >= 1.
double inverse_erf(double p);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

double chi_square_cdf(double x, double dof);

/// Inverse chi-square CDF, absolute accuracy 1e-10 in x for p in (0, 1).
double chi_square_quantile(double p, double dof);

}  // namespace cdimap

#endif
