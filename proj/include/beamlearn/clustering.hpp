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


#ifndef BEAMLEARN_CLUSTERING_HPP
#define BEAMLEARN_CLUSTERING_HPP

#include "codebook.hpp"
#include "common.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

namespace beamlearn
{
    struct UserCluster
    {
        std::size_t id = 0;
        std::vector<std::size_t> members; // indices into the clustered channel list
    };

    // Over-sampled steering codebook used only to sense power signatures for clustering.
    inline Codebook sensing_codebook(const ArrayGeometry &geom, std::size_t oversampling = 4, unsigned phase_bits = 8)
    {
        return beamsteering_codebook(geom, oversampling * geom.num_antennas, PhaseSet(phase_bits));
    }

    // Normalized power signature of a channel: |b_i^H h|^2 across the sensing beams, scaled to unit sum.
    inline std::vector<double> power_signature(const CVector &h, const Codebook &sensing)
    {
        std::vector<double> f(sensing.size());
        double total = 0.0;
        for (std::size_t i = 0; i < sensing.size(); ++i)
            total += (f[i] = beamforming_gain(sensing[i], h));
        if (total > 0.0)
            for (auto &x : f)
                x /= total;
        return f;
    }

    namespace detail
    {
        inline double sq_dist(const std::vector<double> &a, const std::vector<double> &b)
        {
            double d = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                d += (a[i] - b[i]) * (a[i] - b[i]);
            return d;
        }

        inline std::size_t nearest(const std::vector<double> &x, const std::vector<std::vector<double>> &centers)
        {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < centers.size(); ++c)
            {
                const double d = sq_dist(x, centers[c]);
                if (d < bd)
                {
                    bd = d;
                    best = c;
                }
            }
            return best;
        }
    }

    // k-means (k-means++ seeding, Lloyd iterations) over power signatures. An empty cluster takes the member
    // of the largest cluster farthest from that cluster's centroid. Stops when assignments repeat.
    inline std::vector<UserCluster> cluster_users(std::span<const CVector> channels, std::size_t N, const Codebook &sensing, Rng &rng, std::size_t max_iterations = 200)
    {
        if (N < 1)
            throw ConfigError("cluster_users: N must be positive");
        if (channels.size() < N)
            throw ConfigError("cluster_users: " + std::to_string(channels.size()) + " users cannot fill " + std::to_string(N) + " clusters");

        const std::size_t U = channels.size();
        std::vector<std::vector<double>> x(U);
        for (std::size_t u = 0; u < U; ++u)
            x[u] = power_signature(channels[u], sensing);

        // k-means++ seeding
        std::vector<std::vector<double>> centers;
        centers.push_back(x[uniform_index(rng, U)]);
        std::vector<double> d2(U);
        while (centers.size() < N)
        {
            double total = 0.0;
            for (std::size_t u = 0; u < U; ++u)
                total += (d2[u] = detail::sq_dist(x[u], centers[detail::nearest(x[u], centers)]));
            std::size_t pick = 0;
            if (total > 0.0)
            {
                double r = uniform_unit(rng) * total;
                for (pick = 0; pick + 1 < U; ++pick)
                {
                    r -= d2[pick];
                    if (r < 0.0)
                        break;
                }
            }
            else
                pick = uniform_index(rng, U);
            centers.push_back(x[pick]);
        }

        std::vector<std::size_t> assign(U, 0), previous;
        for (std::size_t it = 0; it < max_iterations; ++it)
        {
            for (std::size_t u = 0; u < U; ++u)
                assign[u] = detail::nearest(x[u], centers);

            // repair empty clusters
            for (std::size_t c = 0; c < N; ++c)
            {
                std::vector<std::size_t> sizes(N, 0);
                for (auto a : assign)
                    ++sizes[a];
                if (sizes[c] > 0)
                    continue;
                const std::size_t largest = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
                std::vector<double> centroid(x[0].size(), 0.0);
                for (std::size_t u = 0; u < U; ++u)
                    if (assign[u] == largest)
                        for (std::size_t i = 0; i < centroid.size(); ++i)
                            centroid[i] += x[u][i] / static_cast<double>(sizes[largest]);
                std::size_t far = U;
                double fd = -1.0;
                for (std::size_t u = 0; u < U; ++u)
                {
                    if (assign[u] != largest)
                        continue;
                    const double d = detail::sq_dist(x[u], centroid);
                    if (d > fd)
                    {
                        fd = d;
                        far = u;
                    }
                }
                assign[far] = c;
            }

            // centroid update
            for (std::size_t c = 0; c < N; ++c)
            {
                std::vector<double> m(x[0].size(), 0.0);
                std::size_t n = 0;
                for (std::size_t u = 0; u < U; ++u)
                {
                    if (assign[u] != c)
                        continue;
                    ++n;
                    for (std::size_t i = 0; i < m.size(); ++i)
                        m[i] += x[u][i];
                }
                for (auto &v : m)
                    v /= static_cast<double>(n);
                centers[c] = std::move(m);
            }
            if (assign == previous)
                break;
            previous = assign;
        }

        std::vector<UserCluster> out(N);
        for (std::size_t c = 0; c < N; ++c)
            out[c].id = c;
        for (std::size_t u = 0; u < U; ++u)
            out[assign[u]].members.push_back(u);
        return out;
    }
}

#endif
