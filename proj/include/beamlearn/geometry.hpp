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


#ifndef BEAMLEARN_GEOMETRY_HPP
#define BEAMLEARN_GEOMETRY_HPP

#include "common.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace beamlearn
{
    // Uniform linear array. Azimuth is measured from the array axis, elevation from the zenith, so a wave
    // arriving at (azimuth, elevation) advances by 2*pi*spacing*cos(azimuth)*sin(elevation) per element.
    struct ArrayGeometry
    {
        std::size_t num_antennas = 16; // M
        double spacing = 0.5;          // element spacing in wavelengths
        char axis = 'x';               // placement axis label (x, y or z)

        void validate() const
        {
            if (num_antennas < 1)
                throw ConfigError("ArrayGeometry: at least one antenna required");
            if (!(spacing > 0.0) || !std::isfinite(spacing))
                throw ConfigError("ArrayGeometry: spacing must be positive");
            if (axis != 'x' && axis != 'y' && axis != 'z')
                throw ConfigError("ArrayGeometry: axis must be x, y or z");
        }
    };

    inline constexpr double broadside_elevation = pi / 2.0;

    // Unit-modulus response, element m = exp(j*2*pi*d*m*cos(az)*sin(el)), m = 0..M-1.
    inline CVector array_response(const ArrayGeometry &geom, double azimuth, double elevation = broadside_elevation)
    {
        const std::size_t M = geom.num_antennas;
        const double step = 2.0 * pi * geom.spacing * std::cos(azimuth) * std::sin(elevation);
        CVector a(static_cast<Eigen::Index>(M));
        for (std::size_t m = 0; m < M; ++m)
            a[static_cast<Eigen::Index>(m)] = std::polar(1.0, step * static_cast<double>(m));
        return a;
    }

    struct PathComponent
    {
        cdouble gain{1.0, 0.0};
        double azimuth = pi / 2.0;
        double elevation = broadside_elevation;
    };

    struct PathSet
    {
        std::vector<PathComponent> paths;

        std::size_t size() const { return paths.size(); }
    };

    inline CVector synth_channel(const PathSet &ps, const ArrayGeometry &geom)
    {
        if (ps.paths.empty())
            throw ConfigError("synth_channel: path set is empty");
        CVector h = CVector::Zero(static_cast<Eigen::Index>(geom.num_antennas));
        for (const auto &p : ps.paths)
            h += p.gain * array_response(geom, p.azimuth, p.elevation);
        return h;
    }

    struct InterferencePath
    {
        cdouble gain{1.0, 0.0};
        double rx_azimuth = pi / 2.0;
        double rx_elevation = broadside_elevation;
        double tx_azimuth = pi / 2.0;
        double tx_elevation = broadside_elevation;
    };

    // BS-to-BS channel H = sum_l gain_l * a_rx(l) * a_tx(l)^H, mapping the transmitter's beam to the
    // receiver's antennas.
    struct InterferenceChannel
    {
        std::vector<InterferencePath> paths;
        ArrayGeometry rx_geometry;
        ArrayGeometry tx_geometry;

        std::size_t size() const { return paths.size(); }

        // The same physical link used in the opposite direction (TDD reciprocity): H^H.
        InterferenceChannel reversed() const
        {
            InterferenceChannel r{{}, tx_geometry, rx_geometry};
            r.paths.reserve(paths.size());
            for (const auto &p : paths)
                r.paths.push_back({std::conj(p.gain), p.tx_azimuth, p.tx_elevation, p.rx_azimuth, p.rx_elevation});
            return r;
        }
    };

    inline CMatrix synth_interference_matrix(const InterferenceChannel &ch)
    {
        if (ch.paths.empty())
            throw ConfigError("synth_interference_matrix: path set is empty");
        const auto Mr = static_cast<Eigen::Index>(ch.rx_geometry.num_antennas);
        const auto Mt = static_cast<Eigen::Index>(ch.tx_geometry.num_antennas);
        CMatrix H = CMatrix::Zero(Mr, Mt);
        for (const auto &p : ch.paths)
        {
            const CVector ar = array_response(ch.rx_geometry, p.rx_azimuth, p.rx_elevation);
            const CVector at = array_response(ch.tx_geometry, p.tx_azimuth, p.tx_elevation);
            H.noalias() += p.gain * ar * at.adjoint();
        }
        return H;
    }
}

#endif
