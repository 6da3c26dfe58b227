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


#ifndef BEAMLEARN_SCENARIO_HPP
#define BEAMLEARN_SCENARIO_HPP

#include "common.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

namespace beamlearn
{
    using Position = std::array<double, 3>;

    // Parameters of the synthetic street layout: K base stations along the x axis (staggered in y), a
    // rectangular user grid on one side of the street, all arrays along x, LOS-dominant BS-to-BS links.
    struct ScenarioParams
    {
        std::size_t antennas = 16;
        double spacing = 0.5;
        std::size_t bs_count = 2;
        std::size_t grid_rows = 20;       // along y
        std::size_t grid_cols = 10;       // along x
        double grid_width = 60.0;         // meters along x, centered on the street midpoint
        double grid_height = 70.0;        // meters along y
        double grid_offset = 30.0;        // y of the first grid row
        double bs_spacing = 80.0;         // distance between neighbouring BSs along x
        double bs_stagger = 20.0;         // y offset added per BS index
        std::size_t user_paths = 1;
        std::size_t interference_paths = 1;
        double nlos_offset_db = -15.0;
        double interference_gain_ratio = 10.0; // inter-BS LOS magnitude / strongest user LOS magnitude
        double reference_distance = 50.0;      // LOS magnitude is 1 at this distance, falls as 1/d
        std::uint64_t seed = 1;

        void validate() const
        {
            if (antennas < 1 || antennas > 1024)
                throw ConfigError("scenario: antennas must be in [1, 1024]");
            if (!(spacing > 0.0))
                throw ConfigError("scenario: antenna spacing must be positive");
            if (bs_count < 2)
                throw ConfigError("scenario: at least two base stations required");
            if (grid_rows < 1 || grid_cols < 1)
                throw ConfigError("scenario: user grid must be non-empty");
            if (!(grid_width > 0.0) || !(grid_height > 0.0) || !(bs_spacing > 0.0) || !(reference_distance > 0.0))
                throw ConfigError("scenario: geometric dimensions must be positive");
            if (user_paths < 1 || interference_paths < 1)
                throw ConfigError("scenario: path counts must be positive");
            if (!(interference_gain_ratio > 0.0))
                throw ConfigError("scenario: interference gain ratio must be positive");
        }
    };

    struct UserRecord
    {
        int id = 0;
        Position pos{0.0, 0.0, 0.0};
        std::vector<CVector> channels; // one per BS
        std::vector<PathSet> paths;    // per BS; empty when loaded from raw channel data
    };

    // Directed BS-to-BS link. `from` transmits, `to` receives.
    struct InterferenceLink
    {
        std::size_t from = 0;
        std::size_t to = 0;
        CMatrix H;
        std::optional<InterferenceChannel> geometry;
    };

    struct Scenario
    {
        ArrayGeometry geometry;
        std::vector<Position> bs_positions;
        std::vector<UserRecord> users;
        std::vector<std::size_t> serving_bs; // per user
        std::vector<InterferenceLink> links;
        std::uint64_t seed = 0;

        std::size_t num_antennas() const { return geometry.num_antennas; }
        std::size_t bs_count() const { return bs_positions.size(); }

        const CVector &channel(std::size_t user, std::size_t bs) const { return users.at(user).channels.at(bs); }

        std::vector<std::size_t> users_of(std::size_t bs) const
        {
            std::vector<std::size_t> out;
            for (std::size_t u = 0; u < users.size(); ++u)
                if (serving_bs[u] == bs)
                    out.push_back(u);
            return out;
        }

        std::vector<CVector> channels_of(std::size_t bs) const
        {
            std::vector<CVector> out;
            for (auto u : users_of(bs))
                out.push_back(users[u].channels[bs]);
            return out;
        }

        const InterferenceLink &link(std::size_t from, std::size_t to) const
        {
            for (const auto &l : links)
                if (l.from == from && l.to == to)
                    return l;
            throw ConfigError("scenario: no interference link " + std::to_string(from) + " -> " + std::to_string(to));
        }

        // Azimuth (at the receiver) of the strongest path on a link, if the path geometry is known.
        std::optional<double> los_azimuth(std::size_t from, std::size_t to) const
        {
            const auto &l = link(from, to);
            if (!l.geometry || l.geometry->paths.empty())
                return std::nullopt;
            const InterferencePath *best = &l.geometry->paths.front();
            for (const auto &p : l.geometry->paths)
                if (std::abs(p.gain) > std::abs(best->gain))
                    best = &p;
            return best->rx_azimuth;
        }
    };

    // Serving BS per user: the BS with the largest channel 2-norm, ties to the lowest index.
    inline std::vector<std::size_t> associate_users(const Scenario &s)
    {
        std::vector<std::size_t> serving(s.users.size(), 0);
        for (std::size_t u = 0; u < s.users.size(); ++u)
        {
            const auto &ch = s.users[u].channels;
            if (ch.size() != s.bs_count())
                throw DimensionError("associate_users: user " + std::to_string(s.users[u].id) + " lacks a channel to every BS");
            double best = ch[0].norm();
            for (std::size_t k = 1; k < ch.size(); ++k)
            {
                const double n = ch[k].norm();
                if (n > best)
                {
                    best = n;
                    serving[u] = k;
                }
            }
        }
        return serving;
    }

    namespace detail
    {
        inline std::array<double, 3> axis_vector(char axis)
        {
            switch (axis)
            {
            case 'x':
                return {1.0, 0.0, 0.0};
            case 'z':
                return {0.0, 0.0, 1.0};
            default:
                return {0.0, 1.0, 0.0};
            }
        }

        // Angle between the direction from -> to and the array axis, in [0, pi].
        inline double axis_angle(const Position &from, const Position &to, char axis)
        {
            const auto ax = axis_vector(axis);
            double d[3], n = 0.0, dot = 0.0;
            for (int i = 0; i < 3; ++i)
            {
                d[i] = to[i] - from[i];
                n += d[i] * d[i];
            }
            n = std::sqrt(n);
            for (int i = 0; i < 3; ++i)
                dot += d[i] / n * ax[i];
            return std::acos(std::clamp(dot, -1.0, 1.0));
        }

        inline double distance(const Position &a, const Position &b)
        {
            return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
        }

        inline cdouble random_phase(Rng &rng, double magnitude)
        {
            return std::polar(magnitude, uniform_real(rng, -pi, pi));
        }
    }

    inline Scenario generate_scenario(const ScenarioParams &p)
    {
        p.validate();
        Scenario s;
        s.geometry = ArrayGeometry{p.antennas, p.spacing, 'x'};
        s.seed = p.seed;
        Rng rng = make_stream(p.seed, 0x5CE7A210ULL);

        for (std::size_t k = 0; k < p.bs_count; ++k)
        {
            const double x = (static_cast<double>(k) - 0.5 * static_cast<double>(p.bs_count - 1)) * p.bs_spacing;
            s.bs_positions.push_back({x, static_cast<double>(k) * p.bs_stagger, 0.0});
        }

        const double nlos_scale = std::pow(10.0, p.nlos_offset_db / 20.0);
        double strongest_user = 0.0;
        int next_id = 0;
        for (std::size_t r = 0; r < p.grid_rows; ++r)
        {
            for (std::size_t c = 0; c < p.grid_cols; ++c)
            {
                UserRecord u;
                u.id = next_id++;
                const double fx = p.grid_cols == 1 ? 0.5 : static_cast<double>(c) / static_cast<double>(p.grid_cols - 1);
                const double fy = p.grid_rows == 1 ? 0.5 : static_cast<double>(r) / static_cast<double>(p.grid_rows - 1);
                u.pos = {(fx - 0.5) * p.grid_width, p.grid_offset + fy * p.grid_height, 0.0};
                for (std::size_t k = 0; k < p.bs_count; ++k)
                {
                    PathSet ps;
                    const double d = detail::distance(s.bs_positions[k], u.pos);
                    const double los_mag = p.reference_distance / d;
                    strongest_user = std::max(strongest_user, los_mag);
                    ps.paths.push_back({detail::random_phase(rng, los_mag), detail::axis_angle(s.bs_positions[k], u.pos, s.geometry.axis), broadside_elevation});
                    for (std::size_t l = 1; l < p.user_paths; ++l)
                        ps.paths.push_back({detail::random_phase(rng, los_mag * nlos_scale), uniform_real(rng, 0.0, pi), broadside_elevation});
                    u.channels.push_back(synth_channel(ps, s.geometry));
                    u.paths.push_back(std::move(ps));
                }
                s.users.push_back(std::move(u));
            }
        }

        // One physical link per unordered BS pair; the reverse direction is its reciprocal H^H.
        const double los_gain = p.interference_gain_ratio * strongest_user;
        for (std::size_t q = 0; q < p.bs_count; ++q)
        {
            for (std::size_t k = q + 1; k < p.bs_count; ++k)
            {
                InterferenceChannel ch{{}, s.geometry, s.geometry};
                // transmitter q, receiver k
                ch.paths.push_back({detail::random_phase(rng, los_gain),
                                    detail::axis_angle(s.bs_positions[k], s.bs_positions[q], s.geometry.axis), broadside_elevation,
                                    detail::axis_angle(s.bs_positions[q], s.bs_positions[k], s.geometry.axis), broadside_elevation});
                for (std::size_t l = 1; l < p.interference_paths; ++l)
                    ch.paths.push_back({detail::random_phase(rng, los_gain * nlos_scale),
                                        uniform_real(rng, 0.0, pi), broadside_elevation,
                                        uniform_real(rng, 0.0, pi), broadside_elevation});
                const InterferenceChannel rev = ch.reversed();
                s.links.push_back({q, k, synth_interference_matrix(ch), ch});
                s.links.push_back({k, q, synth_interference_matrix(rev), rev});
            }
        }
        s.serving_bs = associate_users(s);
        return s;
    }
}

#endif
