// SPDX-License-Identifier: Apache-2.0
//
// beamlearn: decentralized interference-aware beam codebook learning
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


#ifndef BEAMLEARN_LINALG_HPP
#define BEAMLEARN_LINALG_HPP

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace beamlearn
{
    // Eigenvalues of a real symmetric matrix by the cyclic Jacobi method, sorted in decreasing order.
    // Intended for the small (L x L, L <= ~16) matrices of multipath space.
    inline std::vector<double> symmetric_eigenvalues(Eigen::MatrixXd A, int max_sweeps = 100)
    {
        const Eigen::Index n = A.rows();
        if (A.cols() != n)
            throw DimensionError("symmetric_eigenvalues: matrix must be square");

        for (int sweep = 0; sweep < max_sweeps; ++sweep)
        {
            double off = 0.0, diag = 0.0;
            for (Eigen::Index p = 0; p < n; ++p)
            {
                diag += A(p, p) * A(p, p);
                for (Eigen::Index q = p + 1; q < n; ++q)
                    off += A(p, q) * A(p, q);
            }
            if (off <= 1e-30 * std::max(diag, 1e-300))
                break;

            for (Eigen::Index p = 0; p < n - 1; ++p)
            {
                for (Eigen::Index q = p + 1; q < n; ++q)
                {
                    const double apq = A(p, q);
                    if (apq == 0.0)
                        continue;
                    const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                    const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    for (Eigen::Index k = 0; k < n; ++k)
                    {
                        const double akp = A(k, p), akq = A(k, q);
                        A(k, p) = c * akp - s * akq;
                        A(k, q) = s * akp + c * akq;
                    }
                    for (Eigen::Index k = 0; k < n; ++k)
                    {
                        const double apk = A(p, k), aqk = A(q, k);
                        A(p, k) = c * apk - s * aqk;
                        A(q, k) = s * apk + c * aqk;
                    }
                }
            }
        }
        std::vector<double> ev(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
            ev[static_cast<std::size_t>(i)] = A(i, i);
        std::sort(ev.begin(), ev.end(), std::greater<>());
        return ev;
    }

    // Eigenvalues of a Hermitian matrix, decreasing. Uses the real embedding [[Re, -Im], [Im, Re]], whose
    // spectrum is that of the Hermitian matrix with every eigenvalue doubled.
    inline std::vector<double> hermitian_eigenvalues(const CMatrix &A)
    {
        const Eigen::Index n = A.rows();
        if (A.cols() != n)
            throw DimensionError("hermitian_eigenvalues: matrix must be square");
        Eigen::MatrixXd R(2 * n, 2 * n);
        R.topLeftCorner(n, n) = A.real();
        R.topRightCorner(n, n) = -A.imag();
        R.bottomLeftCorner(n, n) = A.imag();
        R.bottomRightCorner(n, n) = A.real();
        const auto doubled = symmetric_eigenvalues(R);
        std::vector<double> ev(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < ev.size(); ++i)
            ev[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
        return ev;
    }

    // Spectral norm of a Hermitian matrix: the largest eigenvalue magnitude.
    inline double hermitian_spectral_norm(const CMatrix &A)
    {
        const auto ev = hermitian_eigenvalues(A);
        double r = 0.0;
        for (double e : ev)
            r = std::max(r, std::abs(e));
        return r;
    }
}

#endif
