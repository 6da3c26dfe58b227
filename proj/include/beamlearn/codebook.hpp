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


#ifndef BEAMLEARN_CODEBOOK_HPP
#define BEAMLEARN_CODEBOOK_HPP

#include "common.hpp"
#include "geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace beamlearn
{
    // The 2^r phase-shifter settings {-pi + 2*pi*k/2^r : k = 1..2^r}, all in (-pi, pi].
    // Index i stores k = i + 1, so index 0 is the smallest phase and index 2^r - 1 is exactly pi.
    class PhaseSet
    {
    public:
        static constexpr unsigned max_bits = 8;

        explicit PhaseSet(unsigned bits = 4) : bits_(bits)
        {
            if (bits < 1 || bits > max_bits)
                throw ConfigError("PhaseSet: phase bits must be in [1, 8], got " + std::to_string(bits));
        }

        unsigned bits() const { return bits_; }
        std::size_t size() const { return std::size_t{1} << bits_; }

        double value(std::size_t index) const
        {
            if (index >= size())
                throw std::out_of_range("PhaseSet: index out of range");
            return -pi + 2.0 * pi * static_cast<double>(index + 1) / static_cast<double>(size());
        }

        // Index of the phase closest (on the circle) to an arbitrary angle.
        std::size_t nearest_index(double phase) const
        {
            const double n = static_cast<double>(size());
            const double k = std::round((phase + pi) * n / (2.0 * pi)); // k in Z, value = -pi + 2*pi*k/n
            long long idx = static_cast<long long>(k) - 1;
            const long long sz = static_cast<long long>(size());
            idx %= sz;
            if (idx < 0)
                idx += sz;
            return static_cast<std::size_t>(idx);
        }

        friend bool operator==(const PhaseSet &, const PhaseSet &) = default;

    private:
        unsigned bits_;
    };

    // Unit-norm analog beam w = M^{-1/2} [e^{j theta_1}, ..., e^{j theta_M}]^T with every theta_m in the
    // phase set. The complex vector is materialized once at construction.
    class QuantizedBeam
    {
    public:
        using Index = std::uint16_t;

        QuantizedBeam() = default;

        QuantizedBeam(std::vector<Index> indices, PhaseSet phases) : indices_(std::move(indices)), phases_(phases)
        {
            if (indices_.empty())
                throw ConfigError("QuantizedBeam: at least one antenna required");
            const double scale = 1.0 / std::sqrt(static_cast<double>(indices_.size()));
            vec_.resize(static_cast<Eigen::Index>(indices_.size()));
            for (std::size_t m = 0; m < indices_.size(); ++m)
            {
                if (indices_[m] >= phases_.size())
                    throw std::out_of_range("QuantizedBeam: phase index " + std::to_string(indices_[m]) + " out of range");
                vec_[static_cast<Eigen::Index>(m)] = std::polar(scale, phases_.value(indices_[m]));
            }
        }

        std::size_t num_antennas() const { return indices_.size(); }
        const PhaseSet &phase_set() const { return phases_; }
        std::span<const Index> indices() const { return indices_; }
        const std::vector<Index> &index_vector() const { return indices_; }
        const CVector &vector() const { return vec_; }

        // Exact-configuration key, used by the measurement cache.
        std::string key() const
        {
            std::string k;
            k.reserve(indices_.size() + 1);
            k.push_back(static_cast<char>(phases_.bits()));
            for (auto i : indices_)
            {
                k.push_back(static_cast<char>(i & 0xFF));
            }
            return k;
        }

        // FNV-1a over the configuration, printed in measurement logs.
        std::uint64_t hash() const
        {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (unsigned char c : key())
            {
                h ^= c;
                h *= 0x100000001b3ULL;
            }
            return h;
        }

        friend bool operator==(const QuantizedBeam &a, const QuantizedBeam &b)
        {
            return a.phases_ == b.phases_ && a.indices_ == b.indices_;
        }

    private:
        std::vector<Index> indices_;
        PhaseSet phases_;
        CVector vec_;
    };

    inline QuantizedBeam beam_from_indices(std::span<const std::size_t> indices, std::size_t M, const PhaseSet &phases)
    {
        if (indices.size() != M)
            throw DimensionError("beam_from_indices: expected " + std::to_string(M) + " indices, got " + std::to_string(indices.size()));
        std::vector<QuantizedBeam::Index> idx(indices.size());
        for (std::size_t m = 0; m < M; ++m)
        {
            if (indices[m] >= phases.size())
                throw std::out_of_range("beam_from_indices: index out of range");
            idx[m] = static_cast<QuantizedBeam::Index>(indices[m]);
        }
        return QuantizedBeam(std::move(idx), phases);
    }

    // Nearest-phase quantization of an arbitrary complex weight vector; magnitudes are discarded.
    inline QuantizedBeam quantize_beam(const CVector &target, const PhaseSet &phases)
    {
        std::vector<QuantizedBeam::Index> idx(static_cast<std::size_t>(target.size()));
        for (Eigen::Index m = 0; m < target.size(); ++m)
            idx[static_cast<std::size_t>(m)] = static_cast<QuantizedBeam::Index>(phases.nearest_index(std::arg(target[m])));
        return QuantizedBeam(std::move(idx), phases);
    }

    inline QuantizedBeam random_beam(std::size_t M, const PhaseSet &phases, Rng &rng)
    {
        std::vector<QuantizedBeam::Index> idx(M);
        for (auto &i : idx)
            i = static_cast<QuantizedBeam::Index>(uniform_index(rng, phases.size()));
        return QuantizedBeam(std::move(idx), phases);
    }

    class Codebook
    {
    public:
        Codebook() = default;

        explicit Codebook(std::vector<QuantizedBeam> beams) : beams_(std::move(beams))
        {
            if (beams_.empty())
                throw ConfigError("Codebook: at least one beam required");
            for (const auto &b : beams_)
                if (b.num_antennas() != beams_.front().num_antennas() || !(b.phase_set() == beams_.front().phase_set()))
                    throw DimensionError("Codebook: all beams must share antenna count and phase resolution");
        }

        std::size_t size() const { return beams_.size(); }
        bool empty() const { return beams_.empty(); }
        std::size_t num_antennas() const { return beams_.empty() ? 0 : beams_.front().num_antennas(); }
        const QuantizedBeam &operator[](std::size_t i) const { return beams_.at(i); }
        const std::vector<QuantizedBeam> &beams() const { return beams_; }
        auto begin() const { return beams_.begin(); }
        auto end() const { return beams_.end(); }

        friend bool operator==(const Codebook &, const Codebook &) = default;

    private:
        std::vector<QuantizedBeam> beams_;
    };

    inline double beamforming_gain(const CVector &w, const CVector &h)
    {
        if (w.size() != h.size())
            throw DimensionError("beamforming_gain: beam has " + std::to_string(w.size()) + " elements, channel has " + std::to_string(h.size()));
        return std::norm(w.dot(h)); // Eigen's dot conjugates the first argument: w^H h
    }

    inline double beamforming_gain(const QuantizedBeam &w, const CVector &h)
    {
        return beamforming_gain(w.vector(), h);
    }

    struct BeamSelection
    {
        std::size_t index = 0;
        double gain = 0.0;
    };

    // Beam training: argmax_n |w_n^H h|^2, ties resolved to the lowest index.
    inline BeamSelection beam_training_select(const Codebook &cb, const CVector &h)
    {
        if (cb.empty())
            throw ConfigError("beam_training_select: empty codebook");
        BeamSelection best{0, beamforming_gain(cb[0], h)};
        for (std::size_t n = 1; n < cb.size(); ++n)
        {
            const double g = beamforming_gain(cb[n], h);
            if (g > best.gain)
                best = {n, g};
        }
        return best;
    }

    // Steering directions cos(phi_n) = -1 + (2n + 1)/N, the midpoints of N equal cells of [-1, 1).
    inline double steering_direction(std::size_t n, std::size_t N)
    {
        return -1.0 + (2.0 * static_cast<double>(n) + 1.0) / static_cast<double>(N);
    }

    inline QuantizedBeam steering_beam(const ArrayGeometry &geom, double cos_azimuth, const PhaseSet &phases)
    {
        std::vector<QuantizedBeam::Index> idx(geom.num_antennas);
        for (std::size_t m = 0; m < geom.num_antennas; ++m)
            idx[m] = static_cast<QuantizedBeam::Index>(phases.nearest_index(2.0 * pi * geom.spacing * static_cast<double>(m) * cos_azimuth));
        return QuantizedBeam(std::move(idx), phases);
    }

    inline Codebook beamsteering_codebook(const ArrayGeometry &geom, std::size_t N, const PhaseSet &phases)
    {
        if (N < 1)
            throw ConfigError("beamsteering_codebook: N must be positive");
        std::vector<QuantizedBeam> beams;
        beams.reserve(N);
        for (std::size_t n = 0; n < N; ++n)
            beams.push_back(steering_beam(geom, steering_direction(n, N), phases));
        return Codebook(std::move(beams));
    }

    struct PatternPoint
    {
        double angle = 0.0;
        double gain = 0.0;
    };

    // |w^H a(phi, pi/2)|^2 over an azimuth grid.
    inline std::vector<PatternPoint> beam_pattern(const CVector &w, const ArrayGeometry &geom, std::span<const double> angles)
    {
        if (angles.empty())
            throw ConfigError("beam_pattern: empty angle grid");
        if (static_cast<std::size_t>(w.size()) != geom.num_antennas)
            throw DimensionError("beam_pattern: beam size does not match the array");
        std::vector<PatternPoint> out;
        out.reserve(angles.size());
        for (double a : angles)
            out.push_back({a, beamforming_gain(w, array_response(geom, a))});
        return out;
    }

    inline std::vector<PatternPoint> beam_pattern(const QuantizedBeam &w, const ArrayGeometry &geom, std::span<const double> angles)
    {
        return beam_pattern(w.vector(), geom, angles);
    }

    // n + 1 evenly spaced angles covering [lo, hi].
    inline std::vector<double> angle_grid(double lo, double hi, std::size_t n)
    {
        std::vector<double> g(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        return g;
    }
}

#endif
