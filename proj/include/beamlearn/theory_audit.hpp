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


#ifndef BEAMLEARN_THEORY_AUDIT_HPP
#define BEAMLEARN_THEORY_AUDIT_HPP

#include "codebook.hpp"
#include "geometry.hpp"
#include "measurement.hpp"
#include "policy.hpp"
#include "theory.hpp"

#include <cmath>
#include <vector>

namespace beamlearn
{
    // L paths with CN(0, 1) gains and rx/tx azimuths i.i.d. U[0, pi] at broadside elevation.
    inline InterferenceChannel random_interference_channel(const ArrayGeometry &geom, std::size_t L, Rng &rng)
    {
        InterferenceChannel ch{{}, geom, geom};
        for (std::size_t l = 0; l < L; ++l)
        {
            const cdouble g(standard_normal(rng) / std::sqrt(2.0), standard_normal(rng) / std::sqrt(2.0));
            ch.paths.push_back({g, uniform_real(rng, 0.0, pi), broadside_elevation, uniform_real(rng, 0.0, pi), broadside_elevation});
        }
        return ch;
    }

    struct ClosedFormCheck
    {
        std::size_t L = 0;
        double closed_form = 0.0;
        double monte_carlo = 0.0;
        double rel_error = 0.0;
    };

    // Closed form against the sample mean of |w^H H f|^2 over `draws` random transmit beams; L cycles through 1..max_paths.
    inline std::vector<ClosedFormCheck> closed_form_audit(const ArrayGeometry &geom, const PhaseSet &phases, std::size_t instances,
                                                          std::size_t max_paths, std::size_t draws, Rng &rng)
    {
        std::vector<ClosedFormCheck> out;
        const InterfererPolicy random = InterfererPolicy::random_beam(geom.num_antennas, phases);
        for (std::size_t i = 0; i < instances; ++i)
        {
            ClosedFormCheck c;
            c.L = 1 + i % max_paths;
            const InterferenceChannel ch = random_interference_channel(geom, c.L, rng);
            const QuantizedBeam w = random_beam(geom.num_antennas, phases, rng);
            c.closed_form = expected_interference_closed_form(build_projection(w, ch));
            c.monte_carlo = sample_mean(measure_interference(w, synth_interference_matrix(ch), random, draws, 0.0, rng));
            c.rel_error = std::abs(c.monte_carlo - c.closed_form) / c.closed_form;
            out.push_back(c);
        }
        return out;
    }

    struct OrderingAudit
    {
        std::size_t pairs = 0;
        std::size_t condition_true = 0;
        std::size_t violations = 0; // condition true but ordering false
    };

    inline OrderingAudit ordering_audit(const ArrayGeometry &geom, const PhaseSet &phases, std::size_t pairs, std::size_t max_paths, Rng &rng)
    {
        OrderingAudit a;
        for (std::size_t i = 0; i < pairs; ++i)
        {
            const std::size_t L = 1 + uniform_index(rng, max_paths);
            const InterferenceChannel ch = random_interference_channel(geom, L, rng);
            const auto p1 = build_projection(random_beam(geom.num_antennas, phases, rng), ch);
            const auto p2 = build_projection(random_beam(geom.num_antennas, phases, rng), ch);
            const OrderingCheck c = check_ordering_condition(p1, p2);
            ++a.pairs;
            if (c.condition_holds)
            {
                ++a.condition_true;
                if (!c.ordering_holds)
                    ++a.violations;
            }
        }
        return a;
    }

    struct BoundAudit
    {
        std::size_t trials = 0;
        std::size_t weyl_violations = 0;
        std::size_t rayleigh_violations = 0;
        double worst_weyl_margin = 0.0;
    };

    inline BoundAudit bound_audit(const ArrayGeometry &geom, const PhaseSet &phases, std::size_t trials, std::size_t max_paths, Rng &rng)
    {
        BoundAudit a;
        a.worst_weyl_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < trials; ++i)
        {
            const std::size_t L = 1 + uniform_index(rng, max_paths);
            const InterferenceChannel ch = random_interference_channel(geom, L, rng);
            const BoundReport r = check_bounds(build_projection(random_beam(geom.num_antennas, phases, rng), ch));
            ++a.trials;
            const double tol = 1e-10;
            if (r.weyl_margin < -tol * std::max(1.0, r.pi_norm))
                ++a.weyl_violations;
            const double scale = std::max({std::abs(r.rayleigh_upper), std::abs(r.quadratic), 1e-300});
            if (r.lower_margin < -tol * scale || r.upper_margin < -tol * scale)
                ++a.rayleigh_violations;
            a.worst_weyl_margin = std::min(a.worst_weyl_margin, r.weyl_margin);
        }
        return a;
    }
}

#endif
