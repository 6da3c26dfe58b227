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


#ifndef BEAMLEARN_CACHE_HPP
#define BEAMLEARN_CACHE_HPP

#include "codebook.hpp"
#include "common.hpp"

#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace beamlearn
{
    // How cached interference samples enter a measurement burst of size P.
    //   off:     always P fresh samples, cache untouched
    //   top-up:  all cached samples are used; only max(P - cached, 0) fresh samples are taken
    //   replace: if at least P samples are cached they are used alone, otherwise P fresh samples
    enum class CacheMode
    {
        Off,
        TopUp,
        Replace
    };

    inline std::string to_string(CacheMode m)
    {
        switch (m)
        {
        case CacheMode::Off:
            return "off";
        case CacheMode::TopUp:
            return "top-up";
        default:
            return "replace";
        }
    }

    inline CacheMode cache_mode_from_string(const std::string &s)
    {
        if (s == "off")
            return CacheMode::Off;
        if (s == "top-up")
            return CacheMode::TopUp;
        if (s == "replace")
            return CacheMode::Replace;
        throw ConfigError("unknown cache mode '" + s + "' (expected off|top-up|replace)");
    }

    // Per-BS shared interference dataset keyed by exact phase configuration. Append-only; every lookup
    // returns all samples appended so far under that key, in append order.
    class MeasurementCache
    {
    public:
        explicit MeasurementCache(std::size_t owner_bs = 0) : owner_(owner_bs) {}

        std::size_t owner() const { return owner_; }

        void append(const QuantizedBeam &beam, double sample) { append(beam.key(), std::span<const double>(&sample, 1)); }

        void append(const QuantizedBeam &beam, std::span<const double> samples) { append(beam.key(), samples); }

        void append(const std::string &key, std::span<const double> samples)
        {
            if (samples.empty())
                return;
            std::unique_lock lock(mutex_);
            auto &v = data_[key];
            v.insert(v.end(), samples.begin(), samples.end());
            total_ += samples.size();
        }

        std::vector<double> lookup(const QuantizedBeam &beam) const
        {
            std::shared_lock lock(mutex_);
            auto it = data_.find(beam.key());
            return it == data_.end() ? std::vector<double>{} : it->second;
        }

        std::size_t count(const QuantizedBeam &beam) const
        {
            std::shared_lock lock(mutex_);
            auto it = data_.find(beam.key());
            return it == data_.end() ? 0 : it->second.size();
        }

        std::size_t keys() const
        {
            std::shared_lock lock(mutex_);
            return data_.size();
        }

        std::size_t total_samples() const
        {
            std::shared_lock lock(mutex_);
            return total_;
        }

    private:
        std::size_t owner_;
        mutable std::shared_mutex mutex_;
        std::unordered_map<std::string, std::vector<double>> data_;
        std::size_t total_ = 0;
    };

    inline void cache_append(MeasurementCache &cache, const QuantizedBeam &beam, double sample)
    {
        cache.append(beam, sample);
    }

    inline std::vector<double> cache_lookup(const MeasurementCache &cache, const QuantizedBeam &beam)
    {
        return cache.lookup(beam);
    }
}

#endif
