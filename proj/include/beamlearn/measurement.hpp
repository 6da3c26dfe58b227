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


#ifndef BEAMLEARN_MEASUREMENT_HPP
#define BEAMLEARN_MEASUREMENT_HPP

#include "codebook.hpp"
#include "common.hpp"
#include "policy.hpp"

#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace beamlearn
{
    // One interfering transmitter as seen by the receiving BS: channel H (rx x tx) and its beam policy.
    struct InterferenceSource
    {
        CMatrix H;
        InterfererPolicy policy;
    };

    namespace detail
    {
        inline double noise_sample(double noise_power, Rng &rng)
        {
            if (noise_power <= 0.0)
                return 0.0;
            // w^H n ~ CN(0, sigma^2) for unit-norm w
            const double re = standard_normal(rng), im = standard_normal(rng);
            return 0.5 * noise_power * (re * re + im * im);
        }

        inline double interference_sample(const std::vector<Eigen::RowVectorXcd> &projected, std::span<const InterferenceSource> sources, Rng &rng)
        {
            double p = 0.0;
            for (std::size_t q = 0; q < sources.size(); ++q)
            {
                const QuantizedBeam f = sources[q].policy.draw(rng);
                p += std::norm((projected[q] * f.vector())(0));
            }
            return p;
        }

        inline std::vector<Eigen::RowVectorXcd> project(const CVector &w, std::span<const InterferenceSource> sources)
        {
            std::vector<Eigen::RowVectorXcd> out;
            out.reserve(sources.size());
            for (const auto &s : sources)
            {
                if (s.H.rows() != w.size())
                    throw DimensionError("interference channel rows do not match the receive beam");
                out.push_back(w.adjoint() * s.H);
            }
            return out;
        }
    }

    // P interference-only power samples: sum over interferers of |w^H H_q f_q|^2, one fresh f_q per sample.
    inline std::vector<double> measure_interference(const QuantizedBeam &w, std::span<const InterferenceSource> sources, std::size_t P, double noise_power, Rng &rng)
    {
        if (P < 1)
            throw ConfigError("measure_interference: P must be at least 1");
        const auto projected = detail::project(w.vector(), sources);
        std::vector<double> out(P);
        for (auto &v : out)
            v = detail::interference_sample(projected, sources, rng) + detail::noise_sample(noise_power, rng);
        return out;
    }

    inline std::vector<double> measure_interference(const QuantizedBeam &w, const CMatrix &H, const InterfererPolicy &policy, std::size_t P, double noise_power, Rng &rng)
    {
        const InterferenceSource src{H, policy};
        return measure_interference(w, std::span<const InterferenceSource>(&src, 1), P, noise_power, rng);
    }

    // Q signal-plus-interference samples: |w^H h|^2 + sum_q |w^H H_q f'_q|^2.
    inline std::vector<double> measure_signal_plus_interference(const QuantizedBeam &w, const CVector &h_user, std::span<const InterferenceSource> sources, std::size_t Q, double noise_power, Rng &rng)
    {
        if (Q < 1)
            throw ConfigError("measure_signal_plus_interference: Q must be at least 1");
        const double signal = beamforming_gain(w, h_user);
        const auto projected = detail::project(w.vector(), sources);
        std::vector<double> out(Q);
        for (auto &v : out)
            v = signal + detail::interference_sample(projected, sources, rng) + detail::noise_sample(noise_power, rng);
        return out;
    }

    inline std::vector<double> measure_signal_plus_interference(const QuantizedBeam &w, const CVector &h_user, const CMatrix &H, const InterfererPolicy &policy, std::size_t Q, double noise_power, Rng &rng)
    {
        const InterferenceSource src{H, policy};
        return measure_signal_plus_interference(w, h_user, std::span<const InterferenceSource>(&src, 1), Q, noise_power, rng);
    }

    struct MeasurementLogRow
    {
        std::size_t step = 0;
        std::uint64_t beam_hash = 0;
        char slot = 'I'; // 'I' interference only, 'S' signal plus interference
        double value = 0.0;
    };

    struct MeasurementSet
    {
        std::vector<double> interference_samples;              // I(w), P entries
        std::vector<double> signal_plus_interference_samples;  // SI(w), Q entries
        QuantizedBeam beam;

        std::size_t P() const { return interference_samples.size(); }
        std::size_t Q() const { return signal_plus_interference_samples.size(); }
    };

    inline double sample_mean(std::span<const double> v)
    {
        if (v.empty())
            throw ConfigError("mean of an empty sample set");
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }

    // mean(SI) - mean(I). Finite samples can give a negative value; it is returned unchanged.
    inline double estimate_gain(const MeasurementSet &ms)
    {
        if (ms.interference_samples.empty() || ms.signal_plus_interference_samples.empty())
            throw ConfigError("estimate_gain: both I and SI sample sets must be non-empty");
        return sample_mean(ms.signal_plus_interference_samples) - sample_mean(ms.interference_samples);
    }

    // (P*mean(I) + Q*mean(SI) - Q*gain) / (P + Q): pooled estimate of E[|w^H H f|^2] using both bursts.
    inline double estimate_expected_interference(const MeasurementSet &ms, double gain_estimate)
    {
        const double P = static_cast<double>(ms.P());
        const double Q = static_cast<double>(ms.Q());
        if (ms.P() + ms.Q() == 0)
            throw ConfigError("estimate_expected_interference: no samples");
        double acc = 0.0;
        if (ms.P() > 0)
            acc += P * sample_mean(ms.interference_samples);
        if (ms.Q() > 0)
            acc += Q * sample_mean(ms.signal_plus_interference_samples) - Q * gain_estimate;
        return acc / (P + Q);
    }

    // Average per-user gain over a cluster, or over `sample_size` users drawn without replacement
    // (sample_size == 0 or >= cluster size uses everyone). `user_gain` defaults to the exact |w^H h|^2.
    inline double cluster_average_gain(const QuantizedBeam &w, std::span<const CVector> cluster, std::size_t sample_size, Rng &rng,
                                       const std::function<double(const CVector &)> &user_gain = {})
    {
        if (cluster.empty())
            throw ConfigError("cluster_average_gain: empty cluster");
        auto gain_of = [&](const CVector &h)
        { return user_gain ? user_gain(h) : beamforming_gain(w, h); };

        double total = 0.0;
        if (sample_size == 0 || sample_size >= cluster.size())
        {
            for (const auto &h : cluster)
                total += gain_of(h);
            return total / static_cast<double>(cluster.size());
        }
        // partial Fisher-Yates over indices
        std::vector<std::size_t> idx(cluster.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < sample_size; ++i)
        {
            const std::size_t j = i + uniform_index(rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
            total += gain_of(cluster[idx[i]]);
        }
        return total / static_cast<double>(sample_size);
    }

    struct DecisionThreshold
    {
        double gamma = 1.0;

        explicit DecisionThreshold(double g = 1.0) : gamma(g)
        {
            if (!(g > 0.0))
                throw ConfigError("decision threshold must be positive");
        }
    };

    // H0: w is believed better at suppressing interference than w'. H1: not better.
    enum class Hypothesis
    {
        H0,
        H1
    };

    // H0 iff est(w) / est(w') < gamma; a ratio equal to gamma decides H1.
    inline Hypothesis decide_better(double est_w, double est_w_prime, DecisionThreshold threshold = DecisionThreshold{})
    {
        if (!(est_w_prime > 0.0))
            throw NumericalError("decide_better: reference estimate must be positive");
        return (est_w / est_w_prime < threshold.gamma) ? Hypothesis::H0 : Hypothesis::H1;
    }
}

#endif
