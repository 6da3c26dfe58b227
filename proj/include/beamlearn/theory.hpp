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


#ifndef BEAMLEARN_THEORY_HPP
#define BEAMLEARN_THEORY_HPP

#include "codebook.hpp"
#include "common.hpp"
#include "geometry.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace beamlearn
{
    // Multipath-space view of the interference seen through a receive beam w on channel
    // H = sum_l g_l a_r(l) a_t(l)^H. With unit-norm steering vectors b = a / sqrt(M), H = sum_l g_l sqrt(Mr Mt) b_r b_t^H,
    // so the per-path coefficients are xi_l = g_l sqrt(Mr Mt) (w^H b_r(l)) and the path couplings are
    // Pi_{lk} = b_t(l)^H b_t(k) for l != k (zero diagonal). For i.i.d. uniform-phase transmit beams,
    // E|w^H H f|^2 = conj(xi)^H Sigma conj(xi) with Sigma = (I + Pi) / Mt.
    struct MultipathProjection
    {
        CVector xi;
        CMatrix pi;
        std::size_t tx_antennas = 0;

        std::size_t paths() const { return static_cast<std::size_t>(xi.size()); }
        CVector xi_tilde() const { return xi.conjugate(); }
        double xi_norm2() const { return xi.squaredNorm(); }

        CMatrix identity_plus_pi() const
        {
            return CMatrix::Identity(pi.rows(), pi.cols()) + pi;
        }

        CMatrix sigma() const { return identity_plus_pi() / static_cast<double>(tx_antennas); }
    };

    inline CVector unit_steering(const ArrayGeometry &geom, double azimuth, double elevation)
    {
        return array_response(geom, azimuth, elevation) / std::sqrt(static_cast<double>(geom.num_antennas));
    }

    inline MultipathProjection build_projection(const CVector &w, const InterferenceChannel &ch)
    {
        const std::size_t L = ch.paths.size();
        if (L < 1)
            throw ConfigError("build_projection: channel has no paths");
        if (static_cast<std::size_t>(w.size()) != ch.rx_geometry.num_antennas)
            throw DimensionError("build_projection: beam size does not match receive array");
        const double scale = std::sqrt(static_cast<double>(ch.rx_geometry.num_antennas * ch.tx_geometry.num_antennas));

        MultipathProjection p;
        p.tx_antennas = ch.tx_geometry.num_antennas;
        p.xi.resize(static_cast<Eigen::Index>(L));
        std::vector<CVector> bt;
        bt.reserve(L);
        for (std::size_t l = 0; l < L; ++l)
        {
            const auto &path = ch.paths[l];
            const CVector br = unit_steering(ch.rx_geometry, path.rx_azimuth, path.rx_elevation);
            p.xi[static_cast<Eigen::Index>(l)] = path.gain * scale * w.dot(br);
            bt.push_back(unit_steering(ch.tx_geometry, path.tx_azimuth, path.tx_elevation));
        }
        p.pi = CMatrix::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t k = 0; k < L; ++k)
                if (l != k)
                    p.pi(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = bt[l].dot(bt[k]);
        return p;
    }

    inline MultipathProjection build_projection(const QuantizedBeam &w, const InterferenceChannel &ch)
    {
        return build_projection(w.vector(), ch);
    }

    // xi~^H Sigma xi~ = (|xi|^2 + xi~^H Pi xi~) / M. The imaginary part vanishes for Hermitian Pi.
    inline double expected_interference_closed_form(const MultipathProjection &p)
    {
        const CVector xt = p.xi_tilde();
        const cdouble q = xt.dot(p.sigma() * xt);
        return std::max(q.real(), 0.0);
    }

    inline double pi_spectral_norm(const MultipathProjection &p)
    {
        return hermitian_spectral_norm(p.pi);
    }

    // lambda_L(I + Pi) / (1 + ||Pi||_2). Throws when I + Pi is not positive definite.
    inline double eta_resolution(const MultipathProjection &p)
    {
        const auto ev = hermitian_eigenvalues(p.identity_plus_pi());
        const double lambda_min = ev.back();
        if (!(lambda_min > 0.0))
            throw NumericalError("eta_resolution: I + Pi is not positive definite (smallest eigenvalue " + std::to_string(lambda_min) + ")");
        return lambda_min / (1.0 + pi_spectral_norm(p));
    }

    // (1 - ||Pi||_2) / (1 + ||Pi||_2)
    inline double eta_prime(double pi_norm)
    {
        return (1.0 - pi_norm) / (1.0 + pi_norm);
    }

    namespace detail
    {
        inline void require_same_channel(const MultipathProjection &a, const MultipathProjection &b, const char *who)
        {
            if (a.tx_antennas != b.tx_antennas || a.pi.rows() != b.pi.rows() || (a.pi - b.pi).norm() > 1e-12 * std::max(1.0, a.pi.norm()))
                throw ConfigError(std::string(who) + ": projections do not share the same interference channel");
        }
    }

    struct OrderingCheck
    {
        bool condition_holds = false; // |xi|^2 < eta |xi'|^2
        bool ordering_holds = false;  // E(w) < E(w')
        double eta = 0.0;
    };

    inline OrderingCheck check_ordering_condition(const MultipathProjection &pw, const MultipathProjection &pw_prime)
    {
        detail::require_same_channel(pw, pw_prime, "check_ordering_condition");
        OrderingCheck c;
        c.eta = eta_resolution(pw);
        c.condition_holds = pw.xi_norm2() < c.eta * pw_prime.xi_norm2();
        c.ordering_holds = expected_interference_closed_form(pw) < expected_interference_closed_form(pw_prime);
        return c;
    }

    // Weyl: max_k |lambda_k(I + Pi) - 1| <= ||Pi||_2.
    // Rayleigh: lambda_L(I + Pi) |xi|^2 / M <= xi~^H Sigma xi~ <= (1 + ||Pi||_2) |xi|^2 / M.
    // Margins are upper side minus lower side, so a negative margin is a violation.
    struct BoundReport
    {
        double pi_norm = 0.0;
        double lambda_min = 0.0;
        double lambda_max = 0.0;
        double weyl_deviation = 0.0;
        double weyl_margin = 0.0;
        double rayleigh_lower = 0.0;
        double quadratic = 0.0;
        double rayleigh_upper = 0.0;
        double lower_margin = 0.0;
        double upper_margin = 0.0;

        bool holds(double rel_tol = 1e-10) const
        {
            const double scale_e = std::max(1.0, pi_norm);
            const double scale_q = std::max({std::abs(rayleigh_upper), std::abs(quadratic), 1e-300});
            return weyl_margin >= -rel_tol * scale_e && lower_margin >= -rel_tol * scale_q && upper_margin >= -rel_tol * scale_q;
        }
    };

    inline BoundReport check_bounds(const MultipathProjection &p)
    {
        BoundReport r;
        const auto ev = hermitian_eigenvalues(p.identity_plus_pi());
        r.pi_norm = pi_spectral_norm(p);
        r.lambda_max = ev.front();
        r.lambda_min = ev.back();
        for (double e : ev)
            r.weyl_deviation = std::max(r.weyl_deviation, std::abs(e - 1.0));
        r.weyl_margin = r.pi_norm - r.weyl_deviation;
        const double M = static_cast<double>(p.tx_antennas);
        const double n2 = p.xi_norm2();
        r.rayleigh_lower = r.lambda_min * n2 / M;
        r.quadratic = expected_interference_closed_form(p);
        r.rayleigh_upper = (1.0 + r.pi_norm) * n2 / M;
        r.lower_margin = r.quadratic - r.rayleigh_lower;
        r.upper_margin = r.rayleigh_upper - r.quadratic;
        return r;
    }

    struct AsymptoticsRow
    {
        std::size_t M = 0;
        std::size_t L = 0;
        std::size_t trial = 0;
        double pi_norm2 = 0.0;
        double eta_prime = 0.0;
    };

    // Pi for L transmit directions drawn i.i.d. U[0, pi] (elevation at broadside), half-wavelength ULA.
    inline CMatrix random_path_coupling(std::size_t M, std::size_t L, Rng &rng)
    {
        const ArrayGeometry geom{M, 0.5, 'x'};
        std::vector<CVector> bt;
        for (std::size_t l = 0; l < L; ++l)
            bt.push_back(unit_steering(geom, uniform_real(rng, 0.0, pi), broadside_elevation));
        CMatrix P = CMatrix::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t k = 0; k < L; ++k)
                if (l != k)
                    P(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = bt[l].dot(bt[k]);
        return P;
    }

    inline std::vector<AsymptoticsRow> pi_norm_asymptotics(std::span<const std::size_t> M_list, std::size_t L, std::size_t trials, Rng &rng)
    {
        if (trials < 1)
            throw ConfigError("pi_norm_asymptotics: trials must be at least 1");
        if (L < 1)
            throw ConfigError("pi_norm_asymptotics: L must be at least 1");
        std::vector<AsymptoticsRow> rows;
        for (std::size_t M : M_list)
        {
            for (std::size_t t = 0; t < trials; ++t)
            {
                const double n = hermitian_spectral_norm(random_path_coupling(M, L, rng));
                rows.push_back({M, L, t, n, eta_prime(n)});
            }
        }
        return rows;
    }

    inline double median(std::vector<double> v)
    {
        if (v.empty())
            throw ConfigError("median of an empty set");
        const std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
        const double hi = v[mid];
        if (v.size() % 2 == 1)
            return hi;
        const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        return 0.5 * (lo + hi);
    }

    struct RatioBoundsReport
    {
        double ratio = 0.0;      // E(w) / E(w')
        double norm_ratio = 0.0; // |xi|^2 / |xi'|^2
        double gap = 0.0;        // |ratio - norm_ratio|
        double pi_norm = 0.0;
        double gap_bound = 0.0; // from the +-||Pi||_2 |xi|^2 sandwich; infinite when ||Pi||_2 >= 1
        bool within_bound = false;
    };

    // Ratio of expected interferences versus the limiting norm ratio. Each quadratic term lies in
    // [(1 - ||Pi||)|xi|^2, (1 + ||Pi||)|xi|^2], which bounds the ratio to
    // [norm_ratio (1 - ||Pi||)/(1 + ||Pi||), norm_ratio (1 + ||Pi||)/(1 - ||Pi||)].
    inline RatioBoundsReport check_ratio_bounds(const MultipathProjection &pw, const MultipathProjection &pw_prime)
    {
        detail::require_same_channel(pw, pw_prime, "check_ratio_bounds");
        RatioBoundsReport r;
        const double e = expected_interference_closed_form(pw);
        const double ep = expected_interference_closed_form(pw_prime);
        if (!(ep > 0.0) || !(pw_prime.xi_norm2() > 0.0))
            throw NumericalError("check_ratio_bounds: reference beam has zero interference");
        r.ratio = e / ep;
        r.norm_ratio = pw.xi_norm2() / pw_prime.xi_norm2();
        r.gap = std::abs(r.ratio - r.norm_ratio);
        r.pi_norm = pi_spectral_norm(pw);
        if (r.pi_norm < 1.0)
        {
            const double lo = r.norm_ratio * (1.0 - r.pi_norm) / (1.0 + r.pi_norm);
            const double hi = r.norm_ratio * (1.0 + r.pi_norm) / (1.0 - r.pi_norm);
            r.gap_bound = std::max(r.norm_ratio - lo, hi - r.norm_ratio);
            r.within_bound = r.ratio >= lo * (1.0 - 1e-12) && r.ratio <= hi * (1.0 + 1e-12);
        }
        else
        {
            r.gap_bound = std::numeric_limits<double>::infinity();
            r.within_bound = true;
        }
        return r;
    }

    // Empirical mean of z_l = b_t(l)^H f over draws of i.i.d. uniform-phase beams.
    inline CVector empirical_path_coupling_mean(const InterferenceChannel &ch, const PhaseSet &phases, std::size_t draws, Rng &rng)
    {
        const std::size_t L = ch.paths.size();
        std::vector<CVector> bt;
        for (const auto &p : ch.paths)
            bt.push_back(unit_steering(ch.tx_geometry, p.tx_azimuth, p.tx_elevation));
        CVector acc = CVector::Zero(static_cast<Eigen::Index>(L));
        for (std::size_t d = 0; d < draws; ++d)
        {
            const QuantizedBeam f = random_beam(ch.tx_geometry.num_antennas, phases, rng);
            for (std::size_t l = 0; l < L; ++l)
                acc[static_cast<Eigen::Index>(l)] += bt[l].dot(f.vector());
        }
        return acc / static_cast<double>(draws);
    }
}

#endif
